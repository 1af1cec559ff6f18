"""Cost evaluation, exact gradients and Monte-Carlo gradient statistics."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .ansatz import CircuitSpec
from .initstrategy import InitStrategy, sample_params
from .pauli import Observable
from .statevector import (
    _generator_overlap,
    _rotate,
    apply_observable,
    cz_layer_signs,
    expectation,
    run_circuit,
)

ENGINES = ("shift", "adjoint", "auto")
ADJOINT_MIN_QUBITS = 12


@dataclass
class GradReport:
    grad: np.ndarray  # (layers, qubits)
    norm_sq: float
    cost: float

    @classmethod
    def from_grad(cls, grad: np.ndarray, cost: float) -> "GradReport":
        return cls(grad, float(np.sum(grad * grad)), float(cost))


@dataclass
class McStats:
    samples: int
    mean_norm_sq: float
    stderr_norm_sq: float
    component_means: np.ndarray
    component_stderrs: np.ndarray

    @property
    def component_variances(self) -> np.ndarray:
        return self.component_stderrs ** 2 * self.samples


def _check_obs(spec: CircuitSpec, obs: Observable) -> None:
    if obs.n_qubits != spec.n_qubits:
        raise ValueError(f"observable on {obs.n_qubits} qubits, circuit on {spec.n_qubits}")


def cost(spec: CircuitSpec, obs: Observable, params) -> float:
    _check_obs(spec, obs)
    return expectation(run_circuit(spec, params), obs)


def grad_parameter_shift(spec: CircuitSpec, obs: Observable, params) -> GradReport:
    """Two-point shift rule ½[f(θ+π/2) - f(θ-π/2)], exact for X/Y rotations."""
    _check_obs(spec, obs)
    theta = spec.check_params(params).copy()
    grad = np.zeros_like(theta)
    shift = math.pi / 2
    for q in range(theta.shape[0]):
        for n in range(theta.shape[1]):
            orig = theta[q, n]
            theta[q, n] = orig + shift
            plus = cost(spec, obs, theta)
            theta[q, n] = orig - shift
            minus = cost(spec, obs, theta)
            theta[q, n] = orig
            grad[q, n] = 0.5 * (plus - minus)
    return GradReport.from_grad(grad, cost(spec, obs, theta))


def grad_finite_difference(spec: CircuitSpec, obs: Observable, params, h: float = 1e-5) -> GradReport:
    if not h > 0:
        raise ValueError("finite-difference step must be positive")
    _check_obs(spec, obs)
    theta = spec.check_params(params).copy()
    grad = np.zeros_like(theta)
    for q in range(theta.shape[0]):
        for n in range(theta.shape[1]):
            orig = theta[q, n]
            theta[q, n] = orig + h
            plus = cost(spec, obs, theta)
            theta[q, n] = orig - h
            minus = cost(spec, obs, theta)
            theta[q, n] = orig
            grad[q, n] = (plus - minus) / (2 * h)
    return GradReport.from_grad(grad, cost(spec, obs, theta))


def grad_adjoint(spec: CircuitSpec, obs: Observable, params) -> GradReport:
    """Reverse-mode gradient: one forward pass, one backward sweep.

    Walking the gates backwards with |ψ> (the state after the gate) and
    |λ> = U_rest† O |ψ_out>, the derivative of a rotation exp(-iθP/2) is
    Im <λ|P|ψ>.
    """
    _check_obs(spec, obs)
    theta = spec.check_params(params)
    psi = run_circuit(spec, theta).amplitudes
    lam = apply_observable(psi, obs)
    value = float(np.vdot(psi, lam).real)
    grad = np.zeros_like(theta)
    r = spec.rotations_per_block
    for block in reversed(range(spec.n_blocks)):
        for k in reversed(range(r)):
            layer = block * r + k
            axis = spec.axes[k]
            for q in range(spec.n_qubits):
                grad[layer, q] = _generator_overlap(lam, psi, axis, q).imag
                angle = theta[layer, q]
                if angle != 0.0:
                    _rotate(psi, axis, q, -angle)
                    _rotate(lam, axis, q, -angle)
        edges = spec.block_edges(block)
        if edges:
            signs = cz_layer_signs(spec.n_qubits, edges)
            psi *= signs
            lam *= signs
    return GradReport.from_grad(grad, value)


def resolve_engine(engine: str, n_qubits: int) -> str:
    if engine not in ENGINES:
        raise ValueError(f"unknown gradient engine {engine!r}")
    if engine == "auto":
        return "adjoint" if n_qubits >= ADJOINT_MIN_QUBITS else "shift"
    return engine


def gradient(spec: CircuitSpec, obs: Observable, params, engine: str = "auto") -> GradReport:
    engine = resolve_engine(engine, spec.n_qubits)
    fn = grad_adjoint if engine == "adjoint" else grad_parameter_shift
    return fn(spec, obs, params)


def _sample_grad(args) -> np.ndarray:
    spec, obs, strategy, seed, engine = args
    theta = sample_params(strategy, seed)
    return gradient(spec, obs, theta, engine).grad.ravel()


def sample_gradients(spec: CircuitSpec, obs: Observable, strategy: InitStrategy,
                     n_samples: int, base_seed: int, engine: str = "auto",
                     workers: int = 1) -> np.ndarray:
    """Gradients at ``n_samples`` initial points; row ``i`` uses seed ``base_seed + i``."""
    if strategy.shape != spec.shape:
        raise ValueError(f"strategy grid {strategy.shape} does not match circuit {spec.shape}")
    engine = resolve_engine(engine, spec.n_qubits)
    tasks = [(spec, obs, strategy, base_seed + i, engine) for i in range(n_samples)]
    if workers <= 1:
        rows = [_sample_grad(t) for t in tasks]
    else:
        # each task owns its buffers and RNG stream; map preserves order
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sample_grad, tasks))
    return np.vstack(rows)


def summarize(grads: np.ndarray) -> McStats:
    n = grads.shape[0]
    norms = np.sum(grads * grads, axis=1)
    root = math.sqrt(n)
    return McStats(
        samples=n,
        mean_norm_sq=float(np.mean(norms)),
        stderr_norm_sq=float(np.std(norms, ddof=1) / root),
        component_means=np.mean(grads, axis=0),
        component_stderrs=np.std(grads, axis=0, ddof=1) / root,
    )


def mc_grad_stats(spec: CircuitSpec, obs: Observable, strategy: InitStrategy,
                  n_samples: int, base_seed: int, engine: str = "auto",
                  workers: int = 1, grads_out: Optional[list] = None) -> McStats:
    """Monte-Carlo mean and standard error of the gradient over initial points.

    Aggregation happens after all samples are collected in index order, so the
    result does not depend on ``workers``.
    """
    if n_samples < 2:
        raise ValueError("need at least two samples for a standard error")
    grads = sample_gradients(spec, obs, strategy, n_samples, base_seed, engine, workers)
    if grads_out is not None:
        grads_out.append(grads)
    return summarize(grads)
