"""Pauli strings, weighted observables and CZ conjugation.

Words are plain strings over ``IXYZ`` with the leftmost character acting on
qubit 0.  CZ conjugation only ever produces a ``±1`` phase on a Pauli word, so
a real ``sign`` is carried alongside the word instead of a phase group.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

import numpy as np

PAULI_LETTERS = "IXYZ"

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

CZ_MATRIX = np.diag([1, 1, 1, -1]).astype(complex)


class PauliParseError(ValueError):
    """Raised for malformed Pauli text."""


@dataclass(frozen=True)
class PauliString:
    word: str
    sign: float = 1.0

    def __post_init__(self):
        bad = set(self.word) - set(PAULI_LETTERS)
        if bad:
            raise PauliParseError(f"foreign Pauli characters {sorted(bad)} in {self.word!r}")
        if not np.isfinite(self.sign) or self.sign == 0:
            raise ValueError("Pauli sign must be finite and nonzero")

    @property
    def n_qubits(self) -> int:
        return len(self.word)

    def __len__(self) -> int:
        return len(self.word)

    def __str__(self) -> str:
        prefix = "-" if self.sign < 0 else "+"
        mag = abs(self.sign)
        return f"{prefix}{self.word}" if mag == 1.0 else f"{prefix}{mag:g}*{self.word}"


def parse_pauli(text: str, n_qubits: int) -> PauliString:
    """Parse an uppercase Pauli word such as ``"XXIZ"`` (sign +1)."""
    word = text.strip()
    if len(word) != n_qubits:
        raise PauliParseError(
            f"Pauli word {word!r} has length {len(word)}, expected {n_qubits}"
        )
    for pos, ch in enumerate(word):
        if ch not in PAULI_LETTERS:
            raise PauliParseError(
                f"character {ch!r} at qubit {pos + 1} of {word!r} is not one of I, X, Y, Z"
            )
    return PauliString(word, 1.0)


def support(p: PauliString) -> tuple[frozenset[int], int]:
    """Return the set of qubits where ``p`` is not the identity, and its size."""
    idx = frozenset(i for i, ch in enumerate(p.word) if ch != "I")
    return idx, len(idx)


# ---------------------------------------------------------------------------
# CZ conjugation
# ---------------------------------------------------------------------------

def _decompose_two_qubit(mat: np.ndarray) -> tuple[str, str, float]:
    """Match ``mat`` against ±(P⊗Q); raise if it is not a signed Pauli pair."""
    for a, b in product(PAULI_LETTERS, repeat=2):
        ref = np.kron(PAULI_MATRICES[a], PAULI_MATRICES[b])
        overlap = np.trace(ref.conj().T @ mat) / 4
        if abs(abs(overlap) - 1) < 1e-12:
            if abs(overlap.imag) > 1e-12:
                raise ValueError("CZ conjugation produced a non-real phase")
            return a, b, float(np.sign(overlap.real))
    raise ValueError("matrix is not a signed two-qubit Pauli product")


def build_cz_table() -> dict[tuple[str, str], tuple[str, str, float]]:
    """Derive the 16-entry CZ conjugation table from explicit 4×4 matrices."""
    table = {}
    for a, b in product(PAULI_LETTERS, repeat=2):
        mat = np.kron(PAULI_MATRICES[a], PAULI_MATRICES[b])
        table[(a, b)] = _decompose_two_qubit(CZ_MATRIX.conj().T @ mat @ CZ_MATRIX)
    return table


CZ_TABLE = build_cz_table()


def _check_edge(edge: Sequence[int], n_qubits: int) -> tuple[int, int]:
    i, j = int(edge[0]), int(edge[1])
    if not (0 <= i < n_qubits and 0 <= j < n_qubits):
        raise IndexError(f"edge ({i}, {j}) out of range for {n_qubits} qubits")
    if i == j:
        raise ValueError(f"edge ({i}, {j}) must join two distinct qubits")
    return i, j


def cz_conjugate(p: PauliString, edge: Sequence[int]) -> PauliString:
    """Return CZ†·p·CZ for a CZ acting on ``edge`` (0-based qubit indices)."""
    i, j = _check_edge(edge, p.n_qubits)
    a, b, s = CZ_TABLE[(p.word[i], p.word[j])]
    chars = list(p.word)
    chars[i], chars[j] = a, b
    return PauliString("".join(chars), p.sign * s)


def cz_conjugate_layer(p: PauliString, edges: Iterable[Sequence[int]]) -> PauliString:
    for edge in edges:
        p = cz_conjugate(p, edge)
    return p


# ---------------------------------------------------------------------------
# Pair statistics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PairStats:
    s1: int   # both X
    s3: int   # both Z
    s13: int  # equal and non-identity
    s03: int  # one Z, the other I


def pair_stats(a: PauliString, b: PauliString) -> PairStats:
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"length mismatch: {a.n_qubits} vs {b.n_qubits}")
    s1 = s3 = s13 = s03 = 0
    for x, y in zip(a.word, b.word):
        if x == y and x != "I":
            s13 += 1
            s1 += x == "X"
            s3 += x == "Z"
        elif {x, y} == {"Z", "I"}:
            s03 += 1
    return PairStats(s1, s3, s13, s03)


# ---------------------------------------------------------------------------
# Observables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Observable:
    """Real-weighted sum of Pauli words; duplicate words are merged."""

    terms: tuple[tuple[float, PauliString], ...]
    n_qubits: int

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("observable needs at least one qubit")
        seen = set()
        for coeff, p in self.terms:
            if p.n_qubits != self.n_qubits:
                raise ValueError(
                    f"term {p.word!r} has length {p.n_qubits}, expected {self.n_qubits}"
                )
            if p.word in seen:
                raise ValueError(f"duplicate word {p.word!r}; use Observable.from_terms")
            if coeff == 0 or not np.isfinite(coeff):
                raise ValueError(f"coefficient of {p.word!r} must be finite and nonzero")
            seen.add(p.word)

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[float, str | PauliString]],
                   n_qubits: int | None = None) -> "Observable":
        """Build an observable, folding each string's sign into its coefficient.

        Repeated words have their coefficients summed; terms that cancel to zero
        are dropped.
        """
        merged: dict[str, float] = {}
        for coeff, p in terms:
            if isinstance(p, str):
                p = parse_pauli(p, len(p.strip()) if n_qubits is None else n_qubits)
            if n_qubits is None:
                n_qubits = p.n_qubits
            elif p.n_qubits != n_qubits:
                raise ValueError(
                    f"term {p.word!r} has length {p.n_qubits}, expected {n_qubits}"
                )
            merged[p.word] = merged.get(p.word, 0.0) + float(coeff) * p.sign
        if n_qubits is None:
            raise ValueError("cannot infer qubit count of an empty observable")
        kept = tuple((c, PauliString(w)) for w, c in merged.items() if c != 0.0)
        return cls(kept, n_qubits)

    @classmethod
    def single(cls, word: str, coeff: float = 1.0) -> "Observable":
        return cls.from_terms([(coeff, word)])

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def words(self) -> list[str]:
        return [p.word for _, p in self.terms]

    @property
    def coeffs(self) -> np.ndarray:
        return np.array([c for c, _ in self.terms], dtype=float)

    def scaled(self, factor: float) -> "Observable":
        return Observable.from_terms([(c * factor, p) for c, p in self.terms], self.n_qubits)

    def __str__(self) -> str:
        return " ".join(f"{c:+g}*{p.word}" for c, p in self.terms)


def pauli_matrix(word: str) -> np.ndarray:
    """Dense matrix of a Pauli word in the simulator's basis ordering.

    Qubit 0 is the least-significant bit of the basis index, so it is the
    rightmost Kronecker factor.
    """
    mat = np.ones((1, 1), dtype=complex)
    for ch in word:
        mat = np.kron(PAULI_MATRICES[ch], mat)
    return mat


def observable_matrix(obs: Observable) -> np.ndarray:
    dim = 1 << obs.n_qubits
    mat = np.zeros((dim, dim), dtype=complex)
    for coeff, p in obs.terms:
        mat += coeff * pauli_matrix(p.word)
    return mat
