"""Run configuration loaded from YAML, with command-line overrides.

Layout (every section and key optional)::

    seed: 0
    out: results.csv
    circuit:
      n_qubits: 8
      n_blocks: 8
      entangler: chain          # chain | ring | none | [[0, 1], ...] | per-block lists
      gate_order: RX_RY         # RX_RY | RY_RX | RX_RY_RX
    observable:
      generator: tfim           # tfim | random_global | global
      n_plus: 10                # random_global only
      n_minus: 10
      letter: X                 # global only
      # or: terms: [{coeff: 1.0, pauli: ZZ}, ...]
      # or: file: ham.yaml      (relative to the config file)
    strategy:
      kinds: [table1]
      chosen_term: 0            # index or "random"
      term: XIIIIIII            # explicit word to adapt to, overrides chosen_term
      sigma2: null
      sigma2_scale: 1.0
      z_variant: G1
      identity_dist: G0
      a: 0.07
      alt_order: derived
    sampling:
      n_samples: 100
      engine: auto              # auto | shift | adjoint
      workers: 1
      scan_qubits: [5, 10]      # gradscan sweep; defaults to [n_qubits]
    train:
      optimizer: gd             # gd | adam (β1=0.9, β2=0.999, ε=1e-8)
      learning_rate: 0.01
      max_iters: 200
    verify:
      trials: 50

All randomness derives from ``seed`` by fixed offsets:

* observable generation: ``seed + SEED_OBSERVABLE``
* random chosen term: ``seed + SEED_CHOSEN_TERM``
* Monte-Carlo samples: ``seed + SEED_SAMPLES + i`` for sample ``i``
* training initial point: ``seed + SEED_TRAIN``
* verify instances: ``seed + SEED_VERIFY``
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional, Union

import yaml

from ..ansatz import ENTANGLER_PRESETS, GateOrder
from ..gradient import ENGINES
from ..initstrategy import ALT_ORDER_MODES, STRATEGY_KINDS

SEED_OBSERVABLE = 0
SEED_CHOSEN_TERM = 1
SEED_SAMPLES = 1000
SEED_TRAIN = 2000
SEED_VERIFY = 3000

GENERATORS = ("tfim", "random_global", "global")
OPTIMIZERS = ("gd", "adam")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    n_qubits: int = 4
    n_blocks: int = 2
    entangler: Union[str, list] = "chain"
    gate_order: str = "RX_RY"
    # observable source: exactly one of generator / terms / file
    generator: Optional[str] = "tfim"
    terms: Optional[list] = None
    observable_file: Optional[str] = None
    n_plus: int = 10
    n_minus: int = 10
    letter: str = "X"
    # strategy
    strategies: list = field(default_factory=lambda: ["table1"])
    chosen_term: Union[int, str] = 0
    term: Optional[str] = None
    sigma2: Optional[float] = None
    sigma2_scale: float = 1.0
    z_variant: str = "G1"
    identity_dist: str = "G0"
    a: float = 0.07
    alt_order: str = "derived"
    # sampling
    seed: int = 0
    n_samples: int = 100
    engine: str = "auto"
    workers: int = 1
    scan_qubits: Optional[list] = None
    # training
    optimizer: str = "gd"
    learning_rate: float = 0.01
    max_iters: int = 200
    # verify
    trials: int = 50
    out: Optional[str] = None

    def validate(self) -> "RunConfig":
        if not isinstance(self.n_qubits, int) or self.n_qubits < 1:
            raise ConfigError("n_qubits must be a positive integer")
        if not isinstance(self.n_blocks, int) or self.n_blocks < 1:
            raise ConfigError("n_blocks must be a positive integer")
        if isinstance(self.entangler, str) and self.entangler not in ENTANGLER_PRESETS:
            raise ConfigError(f"entangler must be one of {ENTANGLER_PRESETS} or an edge list")
        try:
            GateOrder(self.gate_order)
        except ValueError:
            raise ConfigError(f"gate_order must be one of {[g.value for g in GateOrder]}") from None
        sources = [self.generator is not None, self.terms is not None, self.observable_file is not None]
        if sum(sources) != 1:
            raise ConfigError("observable needs exactly one of generator, terms or file")
        if self.generator is not None and self.generator not in GENERATORS:
            raise ConfigError(f"observable generator must be one of {GENERATORS}")
        if self.observable_file is not None and not Path(self.observable_file).is_file():
            raise ConfigError(f"observable file {self.observable_file} does not exist")
        if self.n_plus < 0 or self.n_minus < 0:
            raise ConfigError("n_plus and n_minus must be non-negative")
        if not self.strategies:
            raise ConfigError("strategy list is empty")
        for kind in self.strategies:
            if kind not in STRATEGY_KINDS:
                raise ConfigError(f"unknown strategy {kind!r}; expected one of {STRATEGY_KINDS}")
        if not (self.chosen_term == "random" or (isinstance(self.chosen_term, int)
                                                 and self.chosen_term >= 0)):
            raise ConfigError("chosen_term must be a non-negative index or 'random'")
        if self.sigma2 is not None and self.sigma2 < 0:
            raise ConfigError("sigma2 must be non-negative")
        if self.sigma2_scale <= 0:
            raise ConfigError("sigma2_scale must be positive")
        if self.z_variant not in ("G1", "G3") or self.identity_dist not in ("G0", "G1"):
            raise ConfigError("z_variant must be G1 or G3; identity_dist G0 or G1")
        if not 0 < self.a <= 1:
            raise ConfigError("a must lie in (0, 1]")
        if self.alt_order not in ALT_ORDER_MODES:
            raise ConfigError(f"alt_order must be one of {ALT_ORDER_MODES}")
        if self.n_samples < 2:
            raise ConfigError("n_samples must be at least 2")
        if self.engine not in ENGINES:
            raise ConfigError(f"engine must be one of {ENGINES}")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        if self.scan_qubits is not None and (not self.scan_qubits
                                             or any(int(n) < 1 for n in self.scan_qubits)):
            raise ConfigError("scan_qubits must be a non-empty list of positive integers")
        if self.optimizer not in OPTIMIZERS:
            raise ConfigError(f"optimizer must be one of {OPTIMIZERS}")
        if self.learning_rate < 0:
            raise ConfigError("learning_rate must be non-negative")
        if self.max_iters < 0:
            raise ConfigError("max_iters must be non-negative")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        return self

    def with_overrides(self, **overrides) -> "RunConfig":
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise ConfigError(f"unknown config fields {sorted(unknown)}")
        return replace(self, **{k: v for k, v in overrides.items() if v is not None}).validate()


# section -> {yaml key: RunConfig field}
_SECTIONS = {
    None: {"seed": "seed", "out": "out"},
    "circuit": {"n_qubits": "n_qubits", "n_blocks": "n_blocks", "entangler": "entangler",
                "gate_order": "gate_order"},
    "observable": {"generator": "generator", "terms": "terms", "file": "observable_file",
                   "n_plus": "n_plus", "n_minus": "n_minus", "letter": "letter"},
    "strategy": {"kinds": "strategies", "chosen_term": "chosen_term", "term": "term",
                 "sigma2": "sigma2", "sigma2_scale": "sigma2_scale", "z_variant": "z_variant",
                 "identity_dist": "identity_dist", "a": "a", "alt_order": "alt_order"},
    "sampling": {"n_samples": "n_samples", "engine": "engine", "workers": "workers",
                 "scan_qubits": "scan_qubits"},
    "train": {"optimizer": "optimizer", "learning_rate": "learning_rate",
              "max_iters": "max_iters"},
    "verify": {"trials": "trials"},
}


def config_from_dict(data: dict, base_dir: Optional[Path] = None) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping")
    values: dict = {}
    for key, val in data.items():
        if key in _SECTIONS[None]:
            values[_SECTIONS[None][key]] = val
        elif key in _SECTIONS:
            if not isinstance(val, dict):
                raise ConfigError(f"section {key!r} must be a mapping")
            for sub, sval in val.items():
                if sub not in _SECTIONS[key]:
                    raise ConfigError(f"unknown key {key}.{sub}")
                values[_SECTIONS[key][sub]] = sval
        else:
            raise ConfigError(f"unknown top-level key {key!r}")
    obs_keys = {"terms", "observable_file"} & set(values)
    if obs_keys and "generator" not in values:
        values["generator"] = None
    if isinstance(values.get("strategies"), str):
        values["strategies"] = [values["strategies"]]
    if values.get("observable_file") and base_dir is not None:
        path = Path(values["observable_file"])
        if not path.is_absolute():
            values["observable_file"] = str(base_dir / path)
    try:
        cfg = RunConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    return cfg.validate()


def load_config(path=None) -> RunConfig:
    if path is None:
        return RunConfig().validate()
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file {path} does not exist")
    try:
        data = yaml.safe_load(path.read_text()) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML: {exc}") from None
    return config_from_dict(data, path.parent)
