"""Experiment drivers behind the command-line subcommands."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from ..ansatz import CircuitSpec, GateOrder, build_circuit_spec
from ..gradient import gradient, mc_grad_stats
from ..initstrategy import InitStrategy, build_strategy, count_equivalent_terms, sample_params
from ..pauli import Observable
from ..statevector import MAX_DENSE_QUBITS, exact_ground_energy
from ..theory import linear_combination_bound, nonnegative_bound, single_term_bound
from . import checks
from .config import (
    SEED_CHOSEN_TERM,
    SEED_OBSERVABLE,
    SEED_SAMPLES,
    SEED_TRAIN,
    SEED_VERIFY,
    ConfigError,
    RunConfig,
)
from .hamiltonians import (
    gen_global,
    gen_random_global_ensemble,
    gen_tfim,
    load_observable_file,
    observable_from_records,
    save_observable_file,
)

GRADSCAN_COLUMNS = ("n_qubits", "n_blocks", "strategy", "n_samples",
                    "mean_norm_sq", "stderr_norm_sq", "theorem_bound")
TRAIN_COLUMNS = ("iter", "cost", "grad_norm_sq")


class TrainingDiverged(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Shared setup
# ---------------------------------------------------------------------------

def build_observable(cfg: RunConfig, n_qubits: Optional[int] = None) -> Observable:
    n = cfg.n_qubits if n_qubits is None else n_qubits
    if cfg.terms is not None:
        obs = observable_from_records(cfg.terms)
    elif cfg.observable_file is not None:
        obs = load_observable_file(cfg.observable_file)
    elif cfg.generator == "tfim":
        obs = gen_tfim(n)
    elif cfg.generator == "global":
        obs = gen_global(n, cfg.letter)
    else:
        obs = gen_random_global_ensemble(n, cfg.n_plus, cfg.n_minus, cfg.seed + SEED_OBSERVABLE)
    if obs.n_qubits != n:
        raise ConfigError(f"observable acts on {obs.n_qubits} qubits but the circuit has {n}")
    return obs


def resolve_chosen_term(cfg: RunConfig, obs: Observable) -> int:
    if cfg.chosen_term == "random":
        rng = np.random.default_rng(cfg.seed + SEED_CHOSEN_TERM)
        # never adapt to the identity word
        candidates = [k for k, (_, p) in enumerate(obs.terms) if set(p.word) != {"I"}]
        if not candidates:
            raise ConfigError("observable has no non-identity term to adapt to")
        return int(candidates[int(rng.integers(len(candidates)))])
    if cfg.chosen_term >= len(obs.terms):
        raise ConfigError(f"chosen_term {cfg.chosen_term} out of range for {len(obs.terms)} terms")
    return int(cfg.chosen_term)


def build_spec(cfg: RunConfig, n_qubits: Optional[int] = None) -> CircuitSpec:
    n = cfg.n_qubits if n_qubits is None else n_qubits
    return build_circuit_spec(n, cfg.n_blocks, cfg.entangler, cfg.gate_order)


def build_strategy_from_config(cfg: RunConfig, kind: str, spec: CircuitSpec,
                               obs: Observable, chosen: int) -> InitStrategy:
    return build_strategy(kind, spec, obs, chosen, term=cfg.term, sigma2=cfg.sigma2,
                          sigma2_scale=cfg.sigma2_scale, z_variant=cfg.z_variant,
                          identity_dist=cfg.identity_dist, a=cfg.a, alt_order=cfg.alt_order)


def theorem_bound(cfg: RunConfig, kind: str, spec: CircuitSpec, obs: Observable,
                  chosen: int) -> Optional[float]:
    """Lower bound on E‖∇f‖² that applies to this cell, or None.

    Bounds are stated for the R_x-R_y order, unit coefficients and the
    default variance 1/(2LS).
    """
    if spec.gate_order is not GateOrder.RX_RY or cfg.sigma2 is not None or cfg.sigma2_scale != 1.0:
        return None
    if cfg.term is not None and cfg.term != obs.terms[chosen][1].word:
        return None
    coeffs = obs.coeffs
    if not np.all(np.abs(coeffs) == 1.0):
        return None
    L = spec.n_blocks
    if kind == "table1":
        return single_term_bound(L) if len(obs.terms) == 1 else None
    if kind == "table2":
        m, _ = count_equivalent_terms(obs, chosen)
        return linear_combination_bound(m, L)
    if kind == "table3" and np.all(coeffs > 0):
        return nonnegative_bound(obs, chosen, L)
    return None


def _fmt(x) -> str:
    if x is None:
        return ""
    return repr(float(x))


def _write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


# ---------------------------------------------------------------------------
# gradscan
# ---------------------------------------------------------------------------

@dataclass
class GradscanRow:
    n_qubits: int
    n_blocks: int
    strategy: str
    n_samples: int
    mean_norm_sq: float
    stderr_norm_sq: float
    theorem_bound: Optional[float]

    def as_strings(self) -> list[str]:
        return [str(self.n_qubits), str(self.n_blocks), self.strategy, str(self.n_samples),
                _fmt(self.mean_norm_sq), _fmt(self.stderr_norm_sq), _fmt(self.theorem_bound)]


def gradscan_rows(cfg: RunConfig) -> list[GradscanRow]:
    if not cfg.strategies:
        raise ConfigError("strategy list is empty")
    rows = []
    for n in (cfg.scan_qubits or [cfg.n_qubits]):
        n = int(n)
        spec = build_spec(cfg, n)
        obs = build_observable(cfg, n)
        chosen = resolve_chosen_term(cfg, obs)
        for kind in cfg.strategies:
            strategy = build_strategy_from_config(cfg, kind, spec, obs, chosen)
            stats = mc_grad_stats(spec, obs, strategy, cfg.n_samples, cfg.seed + SEED_SAMPLES,
                                  engine=cfg.engine, workers=cfg.workers)
            rows.append(GradscanRow(n, cfg.n_blocks, kind, cfg.n_samples, stats.mean_norm_sq,
                                    stats.stderr_norm_sq,
                                    theorem_bound(cfg, kind, spec, obs, chosen)))
    return rows


def rows_to_csv(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    return buf.getvalue()


def cmd_gradscan(cfg: RunConfig) -> str:
    """Run the scan and return the CSV text; written to ``cfg.out`` if set."""
    rows = gradscan_rows(cfg)
    text = rows_to_csv(GRADSCAN_COLUMNS, [r.as_strings() for r in rows])
    if cfg.out:
        _write_text(cfg.out, text)
    return text


# ---------------------------------------------------------------------------
# train
# ---------------------------------------------------------------------------

@dataclass
class TrainTrace:
    iters: list = field(default_factory=list)
    costs: list = field(default_factory=list)
    grad_norm_sq: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    params: Optional[np.ndarray] = None

    def append(self, it: int, cost: float, gns: float) -> None:
        if self.iters and it <= self.iters[-1]:
            raise ValueError("iterations must be strictly increasing")
        self.iters.append(it)
        self.costs.append(cost)
        self.grad_norm_sq.append(gns)

    def to_csv(self) -> str:
        rows = [[str(i), _fmt(c), _fmt(g)] for i, c, g in zip(self.iters, self.costs, self.grad_norm_sq)]
        return rows_to_csv(TRAIN_COLUMNS, rows)


class Adam:
    def __init__(self, lr: float, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = self.v = None
        self.t = 0

    def step(self, theta: np.ndarray, grad: np.ndarray) -> np.ndarray:
        if self.m is None:
            self.m = np.zeros_like(theta)
            self.v = np.zeros_like(theta)
        self.t += 1
        self.m = self.beta1 * self.m + (1 - self.beta1) * grad
        self.v = self.beta2 * self.v + (1 - self.beta2) * grad * grad
        m_hat = self.m / (1 - self.beta1 ** self.t)
        v_hat = self.v / (1 - self.beta2 ** self.t)
        return theta - self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


class GradientDescent:
    def __init__(self, lr: float):
        self.lr = lr

    def step(self, theta: np.ndarray, grad: np.ndarray) -> np.ndarray:
        return theta - self.lr * grad


def train(spec: CircuitSpec, obs: Observable, theta0: np.ndarray, optimizer: str = "adam",
          learning_rate: float = 0.01, max_iters: int = 200, engine: str = "adjoint") -> TrainTrace:
    """Minimise the cost from ``theta0``, recording iterations 0..max_iters."""
    opt = Adam(learning_rate) if optimizer == "adam" else GradientDescent(learning_rate)
    theta = spec.check_params(theta0).copy()
    trace = TrainTrace()
    for it in range(max_iters + 1):
        rep = gradient(spec, obs, theta, engine)
        if not math.isfinite(rep.cost) or not math.isfinite(rep.norm_sq):
            raise TrainingDiverged(f"cost became non-finite at iteration {it}")
        trace.append(it, rep.cost, rep.norm_sq)
        if it < max_iters:
            theta = opt.step(theta, rep.grad)
    trace.params = theta
    return trace


def cmd_train(cfg: RunConfig) -> TrainTrace:
    spec = build_spec(cfg)
    obs = build_observable(cfg)
    chosen = resolve_chosen_term(cfg, obs)
    kind = cfg.strategies[0]
    strategy = build_strategy_from_config(cfg, kind, spec, obs, chosen)
    theta0 = sample_params(strategy, cfg.seed + SEED_TRAIN)
    # every step needs the full gradient, so "auto" means the adjoint engine here
    engine = "adjoint" if cfg.engine == "auto" else cfg.engine
    trace = train(spec, obs, theta0, cfg.optimizer, cfg.learning_rate, cfg.max_iters, engine)
    summary = {
        "n_qubits": spec.n_qubits,
        "n_blocks": spec.n_blocks,
        "strategy": kind,
        "optimizer": cfg.optimizer,
        "learning_rate": cfg.learning_rate,
        "iterations": cfg.max_iters,
        "initial_cost": trace.costs[0],
        "final_cost": trace.costs[-1],
        "final_grad_norm_sq": trace.grad_norm_sq[-1],
    }
    if spec.n_qubits <= MAX_DENSE_QUBITS:
        e0 = exact_ground_energy(obs)
        summary["ground_energy"] = e0
        summary["relative_error"] = abs(trace.costs[-1] - e0) / abs(e0) if e0 != 0 else None
    trace.summary = summary
    if cfg.out:
        _write_text(cfg.out, trace.to_csv())
        _write_text(Path(cfg.out).with_suffix(".summary.json"), json.dumps(summary, indent=2) + "\n")
    return trace


# ---------------------------------------------------------------------------
# verify, bound, tfim-gen
# ---------------------------------------------------------------------------

def cmd_verify(cfg: RunConfig, cz_table: Optional[dict] = None) -> tuple[list, bool]:
    results = checks.run_all_checks(cfg.trials, cfg.seed + SEED_VERIFY, cz_table)
    report = checks.format_report(results)
    if cfg.out:
        _write_text(cfg.out, report + "\n")
    return results, all(r.passed for r in results)


def cmd_bound(cfg: RunConfig) -> dict:
    """Evaluate every closed-form bound that applies to the configured observable."""
    obs = build_observable(cfg)
    chosen = resolve_chosen_term(cfg, obs)
    L = cfg.n_blocks
    m, members = count_equivalent_terms(obs, chosen)
    out = {
        "n_qubits": obs.n_qubits,
        "n_blocks": L,
        "n_terms": len(obs.terms),
        "chosen_term": chosen,
        "chosen_word": obs.terms[chosen][1].word,
        "equivalent_terms": m,
        "single_term_bound": single_term_bound(L),
        "linear_combination_bound": linear_combination_bound(m, L),
        "nonnegative_bound": None,
    }
    if np.all(obs.coeffs >= 0):
        out["nonnegative_bound"] = nonnegative_bound(obs, chosen, L)
    if cfg.out:
        _write_text(cfg.out, json.dumps(out, indent=2) + "\n")
    return out


def cmd_tfim_gen(cfg: RunConfig) -> Observable:
    obs = gen_tfim(cfg.n_qubits)
    if cfg.out:
        Path(cfg.out).parent.mkdir(parents=True, exist_ok=True)
        save_observable_file(obs, cfg.out)
    return obs
