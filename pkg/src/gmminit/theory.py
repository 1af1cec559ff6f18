"""Closed-form moments, gradient-norm lower bounds and expectation identities.

The identities describe how a single rotation V = exp(-iθG/2), with θ drawn
from one of the G0..G3 distributions, acts on Tr[O·VρV†] when O commutes or
anticommutes with G.  Each identity is checked by integrating the left-hand
side over θ with Gauss quadrature and comparing against its closed form in
terms of

    α = E cos²θ = (1 + e^{-2s²})/2,
    β = E sin²θ = (1 - e^{-2s²})/2,
    γ = E cos θ = e^{-s²/2}      (θ ~ N(0, s²)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .initstrategy import DistSpec, count_equivalent_terms, g0, g1, g2, g3
from .pauli import PAULI_LETTERS, Observable, pair_stats, pauli_matrix, support


@dataclass(frozen=True)
class MomentCoeffs:
    alpha: float
    beta: float
    gamma: float
    sigma2: float


def moment_coeffs(sigma2: float) -> MomentCoeffs:
    if sigma2 < 0:
        raise ValueError("variance must be non-negative")
    e = math.exp(-2 * sigma2)
    # beta via expm1 keeps full relative precision for small variances
    beta = -0.5 * math.expm1(-2 * sigma2)
    return MomentCoeffs((1 + e) / 2, beta, math.exp(-sigma2 / 2), sigma2)


# ---------------------------------------------------------------------------
# Bounds
# ---------------------------------------------------------------------------

def single_term_bound(n_blocks: int) -> float:
    """Lower bound 1/4 - 1/(8L) on E‖∇f‖² for a single Pauli term."""
    if n_blocks < 1:
        raise ValueError("L must be >= 1")
    return 0.25 - 1.0 / (8 * n_blocks)


def linear_combination_bound(m_equivalent: int, n_blocks: int) -> float:
    """M·(1/4 - 1/(8L)) for a ±1-weighted sum with M Z/I-equivalent terms."""
    if m_equivalent < 1:
        raise ValueError("M must be >= 1")
    return m_equivalent * single_term_bound(n_blocks)


def nonnegative_bound(obs: Observable, chosen_term: int, n_blocks: int) -> float:
    """Bound for an observable with non-negative unit terms.

    Adds, over ordered pairs i != j of Z/I-equivalent terms,
    (2L-1)·S3/(2LS) · (1 - 1/(2LS))^(2L·S13) · exp(-S03/(2S)).
    """
    if np.any(obs.coeffs < 0):
        raise ValueError("bound requires all observable coefficients to be non-negative")
    m, members = count_equivalent_terms(obs, chosen_term)
    _, S = support(obs.terms[chosen_term][1])
    if S == 0:
        raise ValueError("chosen term is the identity")
    L = n_blocks
    total = linear_combination_bound(m, L)
    x = 2 * L * S
    for i in members:
        for j in members:
            if i == j:
                continue
            st = pair_stats(obs.terms[i][1], obs.terms[j][1])
            total += ((2 * L - 1) * st.s3 / x) * (1 - 1 / x) ** (2 * L * st.s13) \
                * math.exp(-st.s03 / (2 * S))
    return total


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

@lru_cache(maxsize=8)
def _hermite(n: int):
    x, w = np.polynomial.hermite_e.hermegauss(n)
    return x, w / math.sqrt(2 * math.pi)


@lru_cache(maxsize=8)
def _legendre(n: int):
    return np.polynomial.legendre.leggauss(n)


def quadrature_nodes(dist: DistSpec, n_nodes: int = 64) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights integrating against ``dist``.

    Gauss–Hermite per mixture component, weighted by the mixture weight;
    Gauss–Legendre for uniform intervals.
    """
    if dist.kind == "uniform":
        x, w = _legendre(n_nodes)
        half = 0.5 * (dist.high - dist.low)
        return dist.low + half * (x + 1), 0.5 * w
    x, w = _hermite(n_nodes)
    nodes, weights = [], []
    for cw, mu, var in dist.components:
        nodes.append(mu + math.sqrt(var) * x)
        weights.append(cw * w)
    return np.concatenate(nodes), np.concatenate(weights)


def expect(dist: DistSpec, f: Callable[[np.ndarray], np.ndarray], n_nodes: int = 64) -> float:
    nodes, weights = quadrature_nodes(dist, n_nodes)
    return float(np.dot(weights, f(nodes)))


# ---------------------------------------------------------------------------
# Expectation identities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LemmaCase:
    name: str
    dist: str              # G0..G3
    roles: tuple[str, ...]  # "anti" or "comm" relative to the generator
    integrand: str         # mean | square | deriv | prod | deriv_prod | deriv_square
    rhs: Callable          # (MomentCoeffs, t, u) -> float


def _zero(c, t, u):
    return 0.0


def _lemma_cases() -> dict[str, LemmaCase]:
    # t[k] = Tr[O_k ρ], u[k] = Tr[iG O_k ρ]
    def ab(c, t, u):
        return c.alpha * t[0] * t[1] + c.beta * u[0] * u[1]

    def ba(c, t, u):
        return c.beta * t[0] * t[1] + c.alpha * u[0] * u[1]

    def ab_sq(c, t, u):
        return c.alpha * t[0] ** 2 + c.beta * u[0] ** 2

    def ba_sq(c, t, u):
        return c.beta * t[0] ** 2 + c.alpha * u[0] ** 2

    cases = [
        LemmaCase("commuting.mean", "G0", ("comm",), "mean", lambda c, t, u: t[0]),
        LemmaCase("commuting.square", "G0", ("comm",), "square", lambda c, t, u: t[0] ** 2),
        LemmaCase("commuting.deriv", "G0", ("comm",), "deriv", _zero),
        LemmaCase("gaussian.mean", "G1", ("anti",), "mean", lambda c, t, u: c.gamma * t[0]),
        LemmaCase("gaussian.deriv", "G1", ("anti",), "deriv", lambda c, t, u: c.gamma * u[0]),
        LemmaCase("gaussian.mixed", "G1", ("comm", "anti"), "prod",
                  lambda c, t, u: c.gamma * t[0] * t[1]),
        LemmaCase("gaussian.deriv_mixed", "G1", ("comm", "anti"), "deriv_prod", _zero),
        LemmaCase("gaussian.deriv_commuting", "G1", ("comm", "comm"), "deriv_prod", _zero),
        LemmaCase("gaussian.product", "G1", ("anti", "anti"), "prod", ab),
        LemmaCase("gaussian.deriv_product", "G1", ("anti", "anti"), "deriv_prod", ba),
    ]
    for fam, dist, prod, dprod in (("bimodal", "G2", ba, ab), ("trimodal", "G3", ab, ba)):
        cases += [
            LemmaCase(f"{fam}.mean", dist, ("anti",), "mean", _zero),
            LemmaCase(f"{fam}.deriv", dist, ("anti",), "deriv", _zero),
            LemmaCase(f"{fam}.mixed", dist, ("comm", "anti"), "prod", _zero),
            LemmaCase(f"{fam}.commuting_product", dist, ("comm", "comm"), "prod",
                      lambda c, t, u: t[0] * t[1]),
            LemmaCase(f"{fam}.deriv_mixed", dist, ("comm", "anti"), "deriv_prod", _zero),
            LemmaCase(f"{fam}.deriv_commuting", dist, ("comm", "comm"), "deriv_prod", _zero),
            LemmaCase(f"{fam}.product", dist, ("anti", "anti"), "prod", prod),
            LemmaCase(f"{fam}.deriv_product", dist, ("anti", "anti"), "deriv_prod", dprod),
        ]
    for dist, sq, dsq in (("G1", ab_sq, ba_sq), ("G3", ab_sq, ba_sq), ("G2", ba_sq, ab_sq)):
        cases += [
            LemmaCase(f"corollary.square.{dist}", dist, ("anti",), "square", sq),
            LemmaCase(f"corollary.deriv_square.{dist}", dist, ("anti",), "deriv_square", dsq),
        ]
    return {c.name: c for c in cases}


LEMMA_CASES = _lemma_cases()


@dataclass(frozen=True)
class LemmaReport:
    case: str
    sigma2: float
    lhs: float
    rhs: float

    @property
    def error(self) -> float:
        return abs(self.lhs - self.rhs)


def _random_pure_state(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def _random_operator(rng, n_qubits: int, gen: np.ndarray, role: str) -> np.ndarray:
    """Random real combination of Pauli words that (anti)commute with ``gen``."""
    pool = []
    for idx in range(4 ** n_qubits):
        word = "".join(PAULI_LETTERS[(idx >> (2 * k)) & 3] for k in range(n_qubits))
        p = pauli_matrix(word)
        anti = np.allclose(p @ gen + gen @ p, 0)
        if (role == "anti") == anti:
            pool.append(p)
    picks = rng.choice(len(pool), size=min(len(pool), int(rng.integers(1, 4))), replace=False)
    op = sum(rng.normal() * pool[k] for k in picks)
    # the relation is checked on the assembled operator, not assumed
    rel = op @ gen + gen @ op if role == "anti" else op @ gen - gen @ op
    if not np.allclose(rel, 0):
        raise AssertionError(f"constructed operator does not satisfy role {role!r}")
    return op


def _dist_for(name: str, sigma2: float) -> DistSpec:
    return {"G0": g0, "G1": lambda: g1(sigma2), "G2": lambda: g2(sigma2),
            "G3": lambda: g3(sigma2)}[name]()


def verify_lemma_identity(case: str, sigma2: float, trial_seed: int,
                          n_nodes: int = 64) -> LemmaReport:
    """Draw one random instance of ``case`` and compare quadrature with closed form."""
    try:
        spec = LEMMA_CASES[case]
    except KeyError:
        raise KeyError(f"unknown identity {case!r}; known: {sorted(LEMMA_CASES)}") from None
    rng = np.random.default_rng(trial_seed)
    n_qubits = int(rng.integers(1, 3))
    dim = 1 << n_qubits
    word = ["I"] * n_qubits
    word[int(rng.integers(n_qubits))] = "XYZ"[int(rng.integers(3))]
    gen = pauli_matrix("".join(word))
    psi = _random_pure_state(rng, dim)
    rho = np.outer(psi, psi.conj())
    ops = [_random_operator(rng, n_qubits, gen, role) for role in spec.roles]

    # V(θ) = W diag(exp(-iθλ/2)) W† from the eigendecomposition of G
    evals, W = np.linalg.eigh(gen)

    def traces(theta: np.ndarray):
        phases = np.exp(-0.5j * np.outer(theta, evals))          # (k, d)
        V = np.einsum("ij,kj,lj->kil", W, phases, W.conj())      # (k, d, d)
        sig = V @ rho @ np.conj(np.transpose(V, (0, 2, 1)))
        dsig = -0.5j * (gen @ sig - sig @ gen)
        vals = [np.einsum("ij,kji->k", op, sig).real for op in ops]
        ders = [np.einsum("ij,kji->k", op, dsig).real for op in ops]
        return vals, ders

    def integrand(theta):
        vals, ders = traces(theta)
        return {
            "mean": lambda: vals[0],
            "square": lambda: vals[0] ** 2,
            "deriv": lambda: ders[0],
            "prod": lambda: vals[0] * vals[1],
            "deriv_prod": lambda: ders[0] * ders[1],
            "deriv_square": lambda: ders[0] ** 2,
        }[spec.integrand]()

    lhs = expect(_dist_for(spec.dist, sigma2), integrand, n_nodes)
    t = [np.trace(op @ rho).real for op in ops]
    u = [np.trace(1j * gen @ op @ rho).real for op in ops]
    rhs = float(spec.rhs(moment_coeffs(sigma2), t, u))
    return LemmaReport(case, sigma2, lhs, rhs)
