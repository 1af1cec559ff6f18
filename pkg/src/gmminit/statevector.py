"""Dense statevector engine.

Amplitudes live in a flat complex128 array indexed by bitstring, qubit 0 being
the least-significant bit.  Gate functions mutate the state in place and return
it so calls can be chained.  Global phase is not tracked.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np

from .pauli import Observable, PauliString, observable_matrix

if TYPE_CHECKING:
    from .ansatz import CircuitSpec

MAX_QUBITS = 24
MAX_DENSE_QUBITS = 12


class CapacityError(ValueError):
    """Requested register exceeds what the engine will allocate."""


@dataclass
class StateVector:
    amplitudes: np.ndarray
    n_qubits: int

    def __post_init__(self):
        if self.amplitudes.shape != (1 << self.n_qubits,):
            raise ValueError("amplitude array does not match qubit count")

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy(), self.n_qubits)

    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)


def init_zero(n_qubits: int) -> StateVector:
    if n_qubits < 1:
        raise ValueError("need at least one qubit")
    if n_qubits > MAX_QUBITS:
        raise CapacityError(f"{n_qubits} qubits exceeds the cap of {MAX_QUBITS}")
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(amps, n_qubits)


def _check_qubit(qubit: int, n_qubits: int) -> None:
    if not 0 <= qubit < n_qubits:
        raise IndexError(f"qubit {qubit} out of range for {n_qubits} qubits")


def _pair_view(amps: np.ndarray, qubit: int) -> np.ndarray:
    # axis 1 of the view is the bit of `qubit`
    return amps.reshape(-1, 2, 1 << qubit)


def apply_rotation(state: StateVector, axis: str, qubit: int, angle: float) -> StateVector:
    """Apply exp(-i·angle·P/2) with P = X or Y to one qubit, in place."""
    _check_qubit(qubit, state.n_qubits)
    _rotate(state.amplitudes, axis, qubit, angle)
    return state


def _rotate(amps: np.ndarray, axis: str, qubit: int, angle: float) -> None:
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    v = _pair_view(amps, qubit)
    lo = v[:, 0, :].copy()
    hi = v[:, 1, :]
    if axis == "Y":
        v[:, 0, :] *= c
        v[:, 0, :] -= s * hi
        hi *= c
        hi += s * lo
    elif axis == "X":
        v[:, 0, :] *= c
        v[:, 0, :] -= 1j * s * hi
        hi *= c
        hi -= 1j * s * lo
    else:
        raise ValueError(f"unsupported rotation axis {axis!r}")


def _generator_overlap(bra: np.ndarray, ket: np.ndarray, axis: str, qubit: int) -> complex:
    """<bra| P_qubit |ket> for P = X or Y."""
    b = _pair_view(bra, qubit)
    k = _pair_view(ket, qubit)
    cross = np.vdot(b[:, 0, :], k[:, 1, :]), np.vdot(b[:, 1, :], k[:, 0, :])
    if axis == "X":
        return cross[0] + cross[1]
    return -1j * cross[0] + 1j * cross[1]


@lru_cache(maxsize=64)
def _basis_index(n_qubits: int) -> np.ndarray:
    return np.arange(1 << n_qubits, dtype=np.int64)


@lru_cache(maxsize=256)
def cz_layer_signs(n_qubits: int, edges: tuple[tuple[int, int], ...]) -> np.ndarray:
    """Diagonal of a product of CZ gates as a ±1 float array."""
    idx = _basis_index(n_qubits)
    flips = np.zeros(idx.shape, dtype=np.int64)
    for i, j in edges:
        _check_qubit(i, n_qubits)
        _check_qubit(j, n_qubits)
        if i == j:
            raise ValueError(f"CZ edge ({i}, {j}) joins a qubit to itself")
        flips ^= (idx >> i) & (idx >> j) & 1
    signs = 1.0 - 2.0 * flips
    signs.setflags(write=False)
    return signs


def apply_cz_layer(state: StateVector, edges: Iterable[Sequence[int]]) -> StateVector:
    key = tuple((int(i), int(j)) for i, j in edges)
    if key:
        state.amplitudes *= cz_layer_signs(state.n_qubits, key)
    return state


# ---------------------------------------------------------------------------
# Pauli action
# ---------------------------------------------------------------------------

@lru_cache(maxsize=4096)
def _pauli_masks(word: str) -> tuple[int, int, int]:
    flip = zsign = ny = 0
    for q, ch in enumerate(word):
        if ch in "XY":
            flip |= 1 << q
        if ch in "YZ":
            zsign |= 1 << q
        ny += ch == "Y"
    return flip, zsign, ny


def apply_pauli(amps: np.ndarray, word: str, n_qubits: int) -> np.ndarray:
    """Return P|psi> for a Pauli word as a new array."""
    flip, zsign, ny = _pauli_masks(word)
    idx = _basis_index(n_qubits)
    src = idx ^ flip if flip else idx
    out = amps[src] if flip else amps.copy()
    if zsign:
        # P|i> = i^ny (-1)^{popcount(i & zsign)} |i ^ flip>
        parity = np.bitwise_count(src & zsign) & 1
        out[parity == 1] *= -1
    if ny % 4:
        out *= 1j ** (ny % 4)
    return out


def apply_observable(amps: np.ndarray, obs: Observable) -> np.ndarray:
    n = obs.n_qubits
    out = np.zeros_like(amps)
    for coeff, p in obs.terms:
        out += coeff * apply_pauli(amps, p.word, n)
    return out


def expectation(state: StateVector, obs: Observable | PauliString) -> float:
    """<psi|O|psi> for a normalised state; identity terms contribute their coefficient."""
    if isinstance(obs, PauliString):
        obs = Observable.from_terms([(1.0, obs)])
    if obs.n_qubits != state.n_qubits:
        raise ValueError(
            f"observable on {obs.n_qubits} qubits, state on {state.n_qubits}"
        )
    total = 0.0
    amps = state.amplitudes
    for coeff, p in obs.terms:
        if not p.word.strip("I"):
            # exact for normalised states, without the norm's rounding noise
            total += coeff
            continue
        total += coeff * np.vdot(amps, apply_pauli(amps, p.word, state.n_qubits)).real
    return float(total)


# ---------------------------------------------------------------------------
# Circuits
# ---------------------------------------------------------------------------

def run_circuit(spec: "CircuitSpec", params) -> StateVector:
    """Execute the layered ansatz on |0...0>.

    Each block applies its CZ layer, then its rotation layers in the order
    given by ``spec.gate_order``.
    """
    theta = spec.check_params(params)
    state = init_zero(spec.n_qubits)
    amps = state.amplitudes
    layer = 0
    for block in range(spec.n_blocks):
        edges = spec.block_edges(block)
        if edges:
            amps *= cz_layer_signs(spec.n_qubits, edges)
        for axis in spec.axes:
            for q in range(spec.n_qubits):
                angle = theta[layer, q]
                if angle != 0.0:
                    _rotate(amps, axis, q, angle)
            layer += 1
    return state


def exact_ground_energy(obs: Observable) -> float:
    """Smallest eigenvalue of the dense Hermitian matrix of ``obs``."""
    if obs.n_qubits > MAX_DENSE_QUBITS:
        raise CapacityError(
            f"dense diagonalization capped at {MAX_DENSE_QUBITS} qubits, got {obs.n_qubits}"
        )
    return float(np.linalg.eigvalsh(observable_matrix(obs))[0])
