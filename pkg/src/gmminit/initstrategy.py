"""Angle distributions and observable-adaptive initialization strategies.

The four named distributions are

* ``G0``: arbitrary; instantiated as U[-π, π]
* ``G1(s²)``: N(0, s²)
* ``G2(s²)``: ½N(-π/2, s²) + ½N(π/2, s²)
* ``G3(s²)``: ¼N(-π, s²) + ¼N(π, s²) + ½N(0, s²)

Observable-adaptive strategies draw every block but the last from ``G1(s²)``
with s² = 1/(2LS) and pick the last block's distributions qubit by qubit from
the Pauli letter of a chosen observable term.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .ansatz import CircuitSpec, GateOrder
from .pauli import Observable

STRATEGY_KINDS = ("table1", "table2", "table3", "uniform", "gaussian_baseline", "reduced_domain")
TABLE_KINDS = ("table1", "table2", "table3")


@dataclass(frozen=True)
class DistSpec:
    """A uniform interval or a finite Gaussian mixture.

    ``components`` holds ``(weight, mean, variance)`` triples; a plain Gaussian
    is a one-component mixture.  ``label`` is informational only.
    """

    kind: str
    components: tuple[tuple[float, float, float], ...] = ()
    low: float = 0.0
    high: float = 0.0
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if self.kind == "uniform":
            if not self.low <= self.high:
                raise ValueError("uniform bounds must satisfy low <= high")
        elif self.kind in ("gaussian", "mixture"):
            if not self.components:
                raise ValueError("mixture needs at least one component")
            weights = [w for w, _, _ in self.components]
            if any(w <= 0 for w in weights) or abs(sum(weights) - 1) > 1e-12:
                raise ValueError("mixture weights must be positive and sum to 1")
            if any(v < 0 for _, _, v in self.components):
                raise ValueError("component variance must be non-negative")
        else:
            raise ValueError(f"unknown distribution kind {self.kind!r}")

    @property
    def mean(self) -> float:
        if self.kind == "uniform":
            return 0.5 * (self.low + self.high)
        return sum(w * m for w, m, _ in self.components)


def uniform(low: float, high: float, label: str = "") -> DistSpec:
    return DistSpec("uniform", low=low, high=high, label=label or f"U[{low:g},{high:g}]")


def gaussian(mean: float, variance: float, label: str = "") -> DistSpec:
    return DistSpec("gaussian", ((1.0, mean, variance),), label=label or f"N({mean:g},{variance:g})")


def g0() -> DistSpec:
    return uniform(-math.pi, math.pi, "G0")


def g1(sigma2: float) -> DistSpec:
    return gaussian(0.0, sigma2, "G1")


def g2(sigma2: float) -> DistSpec:
    return DistSpec("mixture", ((0.5, -math.pi / 2, sigma2), (0.5, math.pi / 2, sigma2)), label="G2")


def g3(sigma2: float) -> DistSpec:
    return DistSpec(
        "mixture",
        ((0.25, -math.pi, sigma2), (0.25, math.pi, sigma2), (0.5, 0.0, sigma2)),
        label="G3",
    )


def named_dist(name: str, sigma2: float) -> DistSpec:
    if name == "G0":
        return g0()
    return {"G1": g1, "G2": g2, "G3": g3}[name](sigma2)


def sample_angles(dist: DistSpec, rng: np.random.Generator, size=None):
    """Draw from ``dist``; mixtures pick a component by weight, then draw it."""
    if dist.kind == "uniform":
        return rng.uniform(dist.low, dist.high, size)
    comps = dist.components
    if len(comps) == 1:
        _, mu, var = comps[0]
        return rng.normal(mu, math.sqrt(var), size)
    weights = np.array([w for w, _, _ in comps])
    means = np.array([m for _, m, _ in comps])
    sds = np.sqrt([v for _, _, v in comps])
    pick = rng.choice(len(comps), size=size, p=weights)
    return rng.normal(means[pick], sds[pick])


def sample_angle(dist: DistSpec, rng: np.random.Generator) -> float:
    return float(sample_angles(dist, rng))


# ---------------------------------------------------------------------------
# Strategy construction
# ---------------------------------------------------------------------------

# Last-block assignment per Pauli letter as (R_y, R_x), for the R_x then R_y order
_TABLE2 = {"X": ("G2", "G1"), "Y": ("G1", "G2"), "Z": ("G3", "G3"), "I": ("G3", "G3")}
_TABLE3 = {"X": ("G2", "G1"), "Y": ("G1", "G2"), "Z": ("G1", "G1"), "I": ("G1", "G1")}
# Reference assignments for the other gate orders, kept for the "literal" option.
# Reversed order, as (R_y, R_x):
_LITERAL_YX = {"X": ("G1", "G2"), "Y": ("G2", "G1"), "Z": ("G3", "G3"), "I": ("G3", "G3")}
# three-rotation order, as (first R_x, R_y, second R_x):
_LITERAL_XYX = {
    "X": ("G3", "G1", "G1"),
    "Y": ("G3", "G2", "G2"),
    "Z": ("G3", "G3", "G3"),
    "I": ("G3", "G3", "G3"),
}
ALT_ORDER_MODES = ("derived", "literal")


def _table1(z_variant: str, identity_dist: str) -> dict[str, tuple[str, str]]:
    return {"X": ("G2", "G1"), "Y": ("G0", "G2"), "Z": (z_variant, z_variant),
            "I": (identity_dist, identity_dist)}


def _derived_last_block(table: dict, axes: tuple[str, ...], letter: str) -> list[str]:
    """Last-block names for any gate order, derived from an R_x-R_y table.

    Read backwards from the observable, an X (Y) letter must be turned onto Z
    by the last R_y (R_x) of the block, which takes G2.  Gates after it
    commute with the letter and take the table's free entry (R_y under Y);
    gates before it see Z and take the table's Z-keeping entry (R_x under X).
    Z and I letters use the table's entry on every gate.  For the R_x-R_y
    order this reproduces the table itself.
    """
    if letter in "ZI":
        return [table[letter][0]] * len(axes)
    free, keep = table["Y"][0], table["X"][1]
    turn_axis = "Y" if letter == "X" else "X"
    turn = max(k for k, ax in enumerate(axes) if ax == turn_axis)
    return ["G2" if k == turn else free if k > turn else keep for k in range(len(axes))]


@dataclass(frozen=True)
class InitStrategy:
    dists: tuple[tuple[DistSpec, ...], ...]  # (layers, qubits)
    sigma2: Optional[float]
    name: str
    chosen_term: Optional[int] = None

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.dists), len(self.dists[0]))

    def labels(self) -> list[list[str]]:
        return [[d.label for d in row] for row in self.dists]


def count_equivalent_terms(obs: Observable, chosen_term: int) -> tuple[int, list[int]]:
    """Count terms equal to the chosen word up to Z<->I swaps (chosen included).

    The all-identity word is never counted: it is constant under the circuit
    and contributes no gradient.
    """
    if not 0 <= chosen_term < len(obs.terms):
        raise IndexError(f"chosen term {chosen_term} out of range for {len(obs.terms)} terms")
    ref = obs.terms[chosen_term][1].word
    members = []
    for k, (_, p) in enumerate(obs.terms):
        if k != chosen_term and set(p.word) == {"I"}:
            continue
        if all(a == b or {a, b} == {"Z", "I"} for a, b in zip(ref, p.word)):
            members.append(k)
    return len(members), members


def build_strategy(kind: str, spec: CircuitSpec, obs: Optional[Observable] = None,
                   chosen_term: Optional[int] = 0, *,
                   term: Optional[str] = None,
                   sigma2: Optional[float] = None,
                   sigma2_scale: float = 1.0,
                   z_variant: str = "G1",
                   identity_dist: str = "G0",
                   a: float = 0.07,
                   alt_order: str = "derived") -> InitStrategy:
    """Build the per-parameter distribution grid for ``spec``.

    The last block follows the selected table using the Pauli letters of
    ``term`` (if given) or of ``obs.terms[chosen_term]``.  ``sigma2``
    overrides 1/(2LS) outright; ``sigma2_scale`` multiplies the default.
    ``z_variant`` and ``identity_dist`` only affect ``table1``.

    For the R_y-R_x and R_x-R_y-R_x orders, ``alt_order="derived"`` carries
    the selected table over by following each letter back through the gates;
    ``"literal"`` uses the reference alternate-order assignments, which turn
    neither X nor Y onto Z and leave the gradient near zero.
    """
    if kind not in STRATEGY_KINDS:
        raise ValueError(f"unknown strategy kind {kind!r}; expected one of {STRATEGY_KINDS}")
    L, N = spec.n_blocks, spec.n_qubits
    rows = spec.n_layers

    word = None
    if term is not None:
        word = term
        chosen_term = None
    elif obs is not None and chosen_term is not None:
        if obs.n_qubits != N:
            raise ValueError(f"observable on {obs.n_qubits} qubits, circuit on {N}")
        if not 0 <= chosen_term < len(obs.terms):
            raise IndexError(f"chosen term {chosen_term} out of range")
        word = obs.terms[chosen_term][1].word
    if word is not None and len(word) != N:
        raise ValueError(f"term {word!r} does not match N={N}")
    S = sum(ch != "I" for ch in word) if word is not None else None

    if kind == "uniform":
        cell = uniform(-math.pi, math.pi, "uniform")
        return InitStrategy(((cell,) * N,) * rows, None, kind, chosen_term)
    if kind == "reduced_domain":
        cell = uniform(-a * math.pi, a * math.pi, "reduced_domain")
        return InitStrategy(((cell,) * N,) * rows, None, kind, chosen_term)
    if kind == "gaussian_baseline":
        s = S if S else N
        var = 1.0 / (4 * s * (L + 2))
        cell = gaussian(0.0, var, "gaussian_baseline")
        return InitStrategy(((cell,) * N,) * rows, var, kind, chosen_term)

    if word is None:
        raise ValueError(f"{kind} needs an observable term to adapt to")
    if S == 0:
        raise ValueError("chosen term is the identity; S = 0 leaves the variance undefined")
    if kind == "table3" and obs is not None and np.any(obs.coeffs < 0):
        raise ValueError("table3 requires all observable coefficients to be non-negative")
    if alt_order not in ALT_ORDER_MODES:
        raise ValueError(f"alt_order must be one of {ALT_ORDER_MODES}")
    if z_variant not in ("G1", "G3") or identity_dist not in ("G0", "G1"):
        raise ValueError("z_variant must be G1/G3 and identity_dist G0/G1")

    s2 = sigma2 if sigma2 is not None else sigma2_scale / (2 * L * S)
    if s2 < 0:
        raise ValueError("variance must be non-negative")
    base = g1(s2)
    grid = [[base] * N for _ in range(rows)]
    r = spec.rotations_per_block
    first_last = rows - r  # 0-based index of the last block's first rotation layer

    table = {"table1": _table1(z_variant, identity_dist),
             "table2": _TABLE2, "table3": _TABLE3}[kind]
    for n, ch in enumerate(word):
        if alt_order == "literal" and spec.gate_order is GateOrder.RY_RX:
            ry_name, rx_name = _LITERAL_YX[ch]
            names = [ry_name, rx_name]
        elif alt_order == "literal" and spec.gate_order is GateOrder.RX_RY_RX:
            names = list(_LITERAL_XYX[ch])
        else:
            names = _derived_last_block(table, spec.axes, ch)
        for k, name in enumerate(names):
            grid[first_last + k][n] = named_dist(name, s2)
    return InitStrategy(tuple(tuple(row) for row in grid), s2, kind, chosen_term)


def sample_params(strategy: InitStrategy, seed: int) -> np.ndarray:
    """One draw per cell; cell ``i`` (flat, layer-major) uses stream ``(seed, i)``."""
    rows, cols = strategy.shape
    out = np.empty((rows, cols))
    for q in range(rows):
        for n in range(cols):
            rng = np.random.default_rng([seed, q * cols + n])
            out[q, n] = sample_angle(strategy.dists[q][n], rng)
    return out
