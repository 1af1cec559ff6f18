"""Hardware-efficient layered ansatz: structure, parameter layout, inactive parameters.

Parameters form a grid indexed by layer ``q`` and qubit ``n``.  Following the
usual θ_{q,n} labelling, ``(q, n)`` pairs handed to or returned from this module
are 1-based; flat indices are 0-based, layer-major (``q`` slow, ``n`` fast).
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .pauli import Observable


class GateOrder(str, Enum):
    RX_RY = "RX_RY"
    RY_RX = "RY_RX"
    RX_RY_RX = "RX_RY_RX"

    @property
    def axes(self) -> tuple[str, ...]:
        return {
            GateOrder.RX_RY: ("X", "Y"),
            GateOrder.RY_RX: ("Y", "X"),
            GateOrder.RX_RY_RX: ("X", "Y", "X"),
        }[self]


ENTANGLER_PRESETS = ("chain", "ring", "none")

Edge = tuple[int, int]


@dataclass(frozen=True)
class CircuitSpec:
    n_qubits: int
    n_blocks: int
    edges: tuple[tuple[Edge, ...], ...]  # one CZ edge list per block
    gate_order: GateOrder = GateOrder.RX_RY

    def __post_init__(self):
        if self.n_qubits < 1 or self.n_blocks < 1:
            raise ValueError("need N >= 1 and L >= 1")
        if len(self.edges) != self.n_blocks:
            raise ValueError(f"expected {self.n_blocks} edge layers, got {len(self.edges)}")
        for layer in self.edges:
            for i, j in layer:
                if not (0 <= i < self.n_qubits and 0 <= j < self.n_qubits):
                    raise ValueError(
                        f"edge ({i + 1}, {j + 1}) references a qubit beyond N={self.n_qubits}"
                    )
                if i == j:
                    raise ValueError(f"edge ({i + 1}, {j + 1}) joins a qubit to itself")

    @property
    def axes(self) -> tuple[str, ...]:
        return self.gate_order.axes

    @property
    def rotations_per_block(self) -> int:
        return len(self.axes)

    @property
    def n_layers(self) -> int:
        return self.n_blocks * self.rotations_per_block

    @property
    def param_count(self) -> int:
        return self.n_layers * self.n_qubits

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_layers, self.n_qubits)

    def block_edges(self, block: int) -> tuple[Edge, ...]:
        return self.edges[block]

    def layer_axis(self, q: int) -> str:
        """Rotation axis of 1-based layer ``q``."""
        return self.axes[(q - 1) % self.rotations_per_block]

    def check_params(self, params) -> np.ndarray:
        """Return ``params`` as a (layers, qubits) float array, validating shape."""
        theta = np.asarray(params, dtype=float)
        if theta.ndim == 1 and theta.size == self.param_count:
            theta = theta.reshape(self.shape)
        if theta.shape != self.shape:
            raise ValueError(
                f"parameter shape {np.shape(params)} does not match circuit shape {self.shape}"
            )
        return theta


def preset_edges(n_qubits: int, preset: str) -> tuple[Edge, ...]:
    if preset == "none" or n_qubits < 2:
        if preset not in ENTANGLER_PRESETS:
            raise ValueError(f"unknown entangler preset {preset!r}")
        return ()
    if preset == "chain":
        return tuple((i, i + 1) for i in range(n_qubits - 1))
    if preset == "ring":
        chain = tuple((i, i + 1) for i in range(n_qubits - 1))
        return chain if n_qubits == 2 else chain + ((n_qubits - 1, 0),)
    raise ValueError(f"unknown entangler preset {preset!r}")


def build_circuit_spec(n_qubits: int, n_blocks: int,
                       entangler: str | Sequence = "chain",
                       gate_order: str | GateOrder = GateOrder.RX_RY) -> CircuitSpec:
    """Build a circuit description.

    ``entangler`` is a preset name (``chain``, ``ring``, ``none``), a single
    explicit edge list used in every block, or a list of per-block edge lists.
    Explicit edges are 0-based.
    """
    if n_qubits < 1 or n_blocks < 1:
        raise ValueError("need N >= 1 and L >= 1")
    order = GateOrder(gate_order)
    if isinstance(entangler, str):
        layer = preset_edges(n_qubits, entangler)
        edges = (layer,) * n_blocks
    else:
        entangler = list(entangler)
        per_block = bool(entangler) and all(
            isinstance(e, (list, tuple)) and (not e or isinstance(e[0], (list, tuple)))
            for e in entangler
        )
        if per_block:
            if len(entangler) != n_blocks:
                raise ValueError(
                    f"per-block entangler has {len(entangler)} layers, circuit has {n_blocks} blocks"
                )
            edges = tuple(tuple((int(i), int(j)) for i, j in layer) for layer in entangler)
        else:
            layer = tuple((int(i), int(j)) for i, j in entangler)
            edges = (layer,) * n_blocks
    return CircuitSpec(n_qubits, n_blocks, edges, order)


@dataclass(frozen=True)
class ParamLayout:
    n_layers: int
    n_qubits: int

    def to_flat(self, q: int, n: int) -> int:
        if not (1 <= q <= self.n_layers and 1 <= n <= self.n_qubits):
            raise IndexError(f"(q={q}, n={n}) outside {self.n_layers}x{self.n_qubits} grid")
        return (q - 1) * self.n_qubits + (n - 1)

    def from_flat(self, index: int) -> tuple[int, int]:
        if not 0 <= index < self.n_layers * self.n_qubits:
            raise IndexError(f"flat index {index} out of range")
        q, n = divmod(index, self.n_qubits)
        return q + 1, n + 1

    def __len__(self) -> int:
        return self.n_layers * self.n_qubits


def param_layout(spec: CircuitSpec) -> ParamLayout:
    return ParamLayout(spec.n_layers, spec.n_qubits)


def detect_inactive(spec: CircuitSpec, obs: Observable) -> set[tuple[int, int]]:
    """Final-layer parameters that cannot influence the cost.

    A final rotation on qubit ``n`` is inactive when every term of ``obs`` has
    either the identity or the rotation's own axis at ``n``: the rotation then
    commutes with the whole observable and drops out of the expectation.
    """
    if obs.n_qubits != spec.n_qubits:
        raise ValueError(f"observable on {obs.n_qubits} qubits, circuit on {spec.n_qubits}")
    last = spec.n_layers
    axis = spec.layer_axis(last)
    inactive = set()
    for n in range(spec.n_qubits):
        if all(p.word[n] in ("I", axis) for _, p in obs.terms):
            inactive.add((last, n + 1))
    return inactive
