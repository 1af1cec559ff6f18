"""Invariant checks driven by the ``verify`` command.

Each check returns a :class:`CheckResult` carrying the largest measured
discrepancy and the tolerance it was held to.  Check names are stable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Optional

import numpy as np

from ..ansatz import GateOrder, build_circuit_spec, detect_inactive
from ..gradient import grad_adjoint, grad_finite_difference, grad_parameter_shift
from ..initstrategy import gaussian
from ..pauli import CZ_TABLE, PAULI_LETTERS, Observable, PauliString, pauli_matrix
from ..statevector import cz_layer_signs
from ..theory import (
    LEMMA_CASES,
    expect,
    linear_combination_bound,
    moment_coeffs,
    nonnegative_bound,
    verify_lemma_identity,
)

LEMMA_SIGMA2 = (0.01, 0.1, 0.5)
MOMENT_SIGMA2 = (0.001, 0.01, 0.05, 0.1, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0)


@dataclass(frozen=True)
class CheckResult:
    name: str
    discrepancy: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.discrepancy <= self.tolerance)


def check_cz_table(table: Optional[dict] = None) -> CheckResult:
    """Compare a CZ conjugation table with brute-force conjugation.

    The reference uses the simulator's CZ diagonal, not the matrix the table
    was built from, so the two sides are computed independently.
    """
    table = CZ_TABLE if table is None else table
    cz = np.diag(cz_layer_signs(2, ((0, 1),)))
    worst = 0.0
    for a, b in product(PAULI_LETTERS, repeat=2):
        ra, rb, sign = table[(a, b)]
        want = cz @ pauli_matrix(a + b) @ cz
        got = sign * pauli_matrix(ra + rb)
        worst = max(worst, float(np.abs(want - got).max()))
    return CheckResult("cz_table.matrix_match", worst, 0.0)


def check_moments() -> list[CheckResult]:
    worst = 0.0
    taylor = 0.0
    for s2 in MOMENT_SIGMA2:
        c = moment_coeffs(s2)
        dist = gaussian(0.0, s2)
        worst = max(worst,
                    abs(c.alpha - expect(dist, lambda t: np.cos(t) ** 2)),
                    abs(c.beta - expect(dist, lambda t: np.sin(t) ** 2)),
                    abs(c.gamma - expect(dist, np.cos)))
        # violation amounts; zero when both inequalities hold
        taylor = max(taylor, (1 - s2) - c.alpha, s2 * (1 - s2) - c.beta)
    return [CheckResult("moments.quadrature", worst, 1e-10),
            CheckResult("moments.taylor_bounds", max(taylor, 0.0), 0.0)]


def check_lemmas(trials: int = 50, seed: int = 0, tol: float = 1e-8) -> list[CheckResult]:
    out = []
    for k, name in enumerate(sorted(LEMMA_CASES)):
        worst = 0.0
        for s2 in LEMMA_SIGMA2:
            for t in range(trials):
                rep = verify_lemma_identity(name, s2, [seed, k, t])
                worst = max(worst, rep.error)
        out.append(CheckResult(f"lemma.{name}", worst, tol))
    return out


def random_instance(rng: np.random.Generator, max_qubits: int = 6, max_blocks: int = 4):
    n = int(rng.integers(1, max_qubits + 1))
    L = int(rng.integers(1, max_blocks + 1))
    order = list(GateOrder)[int(rng.integers(3))]
    entangler = ("chain", "ring", "none")[int(rng.integers(3))]
    spec = build_circuit_spec(n, L, entangler, order)
    n_terms = int(rng.integers(1, 5))
    terms = [(float(rng.normal()), "".join(rng.choice(list("IXYZ"), n))) for _ in range(n_terms)]
    obs = Observable.from_terms(terms, n)
    if not obs.terms:
        obs = Observable.single("Z" * n)
    theta = rng.uniform(-math.pi, math.pi, spec.shape)
    return spec, obs, theta


def check_gradients(n_instances: int = 20, seed: int = 0) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    fd = adj = 0.0
    for _ in range(n_instances):
        spec, obs, theta = random_instance(rng)
        ref = grad_parameter_shift(spec, obs, theta).grad
        fd = max(fd, float(np.abs(ref - grad_finite_difference(spec, obs, theta, 1e-5).grad).max()))
        adj = max(adj, float(np.abs(ref - grad_adjoint(spec, obs, theta).grad).max()))
    return [CheckResult("gradient.shift_vs_finite_difference", fd, 1e-6),
            CheckResult("gradient.shift_vs_adjoint", adj, 1e-10)]


def check_inactive(n_points: int = 20, seed: int = 0) -> CheckResult:
    """Final R_y gradients for Y^{⊗N}, and every detected inactive component."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for n in range(1, 9):
        spec = build_circuit_spec(n, 2)
        obs = Observable.single("Y" * n)
        idx = [(q - 1, k - 1) for q, k in sorted(detect_inactive(spec, obs))]
        if len(idx) != n:
            return CheckResult("inactive.final_layer", math.inf, 1e-12)
        rows, cols = zip(*idx)
        for _ in range(n_points):
            theta = rng.uniform(-math.pi, math.pi, spec.shape)
            for fn in (grad_parameter_shift, grad_adjoint):
                worst = max(worst, float(np.abs(fn(spec, obs, theta).grad[rows, cols]).max()))
    return CheckResult("inactive.final_layer", worst, 1e-12)


def check_bounds() -> list[CheckResult]:
    obs = Observable.from_terms([(1.0, "ZZ"), (1.0, "ZI")])
    example = abs(nonnegative_bound(obs, 0, 2) - 0.71741)
    single = max(abs(nonnegative_bound(Observable.single(w), 0, L) - linear_combination_bound(1, L))
                 for w in ("X", "ZY", "XIZ") for L in (1, 2, 5))
    return [CheckResult("bound.nonnegative_example", example, 1e-4),
            CheckResult("bound.single_term_reduction", single, 0.0)]


def run_all_checks(trials: int = 50, seed: int = 0, cz_table: Optional[dict] = None) -> list[CheckResult]:
    results = [check_cz_table(cz_table)]
    results += check_moments()
    results += check_lemmas(trials, seed)
    results += check_gradients(seed=seed)
    results.append(check_inactive(seed=seed))
    results += check_bounds()
    return results


def format_report(results: list[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'check':<{width}}  {'status':<6}  {'discrepancy':>12}  {'tolerance':>10}"]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{r.name:<{width}}  {status:<6}  {r.discrepancy:12.3e}  {r.tolerance:10.1e}")
    n_fail = sum(not r.passed for r in results)
    lines.append(f"{len(results) - n_fail}/{len(results)} checks passed")
    return "\n".join(lines)
