"""Observable generators and the observable file format.

The file format is YAML::

    n_qubits: 2
    terms:
      - {coeff: 1.0, pauli: ZZ}
      - {coeff: -1.0, pauli: XI}

Words use one letter per qubit, qubit 1 first.  Duplicate words are merged by
summing coefficients.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np
import yaml

from ..pauli import Observable, PauliParseError, PauliString, parse_pauli


class ObservableFileError(ValueError):
    pass


def gen_tfim(n_qubits: int) -> Observable:
    """Open-chain transverse-field Ising model Σ Z_i Z_{i+1} - Σ X_i."""
    if n_qubits < 1:
        raise ValueError("need at least one qubit")
    terms = []
    for i in range(n_qubits - 1):
        w = ["I"] * n_qubits
        w[i] = w[i + 1] = "Z"
        terms.append((1.0, "".join(w)))
    for i in range(n_qubits):
        w = ["I"] * n_qubits
        w[i] = "X"
        terms.append((-1.0, "".join(w)))
    return Observable.from_terms(terms, n_qubits)


def gen_global(n_qubits: int, letter: str = "X") -> Observable:
    if letter not in "XYZ" or len(letter) != 1:
        raise ValueError(f"letter must be X, Y or Z, got {letter!r}")
    return Observable.single(letter * n_qubits)


def gen_random_global_ensemble(n_qubits: int, n_plus: int, n_minus: int, seed: int) -> Observable:
    """``n_plus`` terms with +1 and ``n_minus`` with -1, words uniform over {X,Y,Z}^N.

    Duplicate words are redrawn, so every term is distinct.
    """
    if n_qubits < 1:
        raise ValueError("need at least one qubit")
    if n_plus < 0 or n_minus < 0:
        raise ValueError("term counts must be non-negative")
    total = n_plus + n_minus
    if total == 0:
        raise ValueError("need at least one term")
    if total > 3 ** n_qubits:
        raise ValueError(f"cannot draw {total} distinct global words on {n_qubits} qubits")
    rng = np.random.default_rng(seed)
    seen: set[str] = set()
    words = []
    while len(words) < total:
        w = "".join("XYZ"[k] for k in rng.integers(0, 3, n_qubits))
        if w not in seen:
            seen.add(w)
            words.append(w)
    coeffs = [1.0] * n_plus + [-1.0] * n_minus
    return Observable(tuple((c, PauliString(w)) for c, w in zip(coeffs, words)), n_qubits)


def observable_from_records(records, n_qubits=None) -> Observable:
    if not isinstance(records, list) or not records:
        raise ObservableFileError("'terms' must be a non-empty list")
    terms = []
    for k, rec in enumerate(records, 1):
        if not isinstance(rec, dict) or set(rec) != {"coeff", "pauli"}:
            raise ObservableFileError(f"term {k}: expected fields coeff and pauli, got {rec!r}")
        try:
            coeff = float(rec["coeff"])
        except (TypeError, ValueError):
            raise ObservableFileError(f"term {k}: coeff {rec['coeff']!r} is not a number") from None
        word = str(rec["pauli"]).strip()
        if n_qubits is None:
            n_qubits = len(word)
        try:
            p = parse_pauli(word, n_qubits)
        except PauliParseError as exc:
            raise ObservableFileError(f"term {k}: {exc}") from None
        terms.append((coeff, p))
    obs = Observable.from_terms(terms, n_qubits)
    if not obs.terms:
        raise ObservableFileError("all coefficients cancel; observable is zero")
    return obs


def load_observable_file(path) -> Observable:
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ObservableFileError(f"{path}: not valid YAML: {exc}") from None
    if not isinstance(data, dict) or "terms" not in data:
        raise ObservableFileError(f"{path}: expected a mapping with 'n_qubits' and 'terms'")
    n = data.get("n_qubits")
    if n is not None and (not isinstance(n, int) or n < 1):
        raise ObservableFileError(f"{path}: n_qubits must be a positive integer")
    return observable_from_records(data["terms"], n)


def save_observable_file(obs: Observable, path) -> None:
    data = {
        "n_qubits": obs.n_qubits,
        "terms": [{"coeff": float(c), "pauli": p.word} for c, p in obs.terms],
    }
    Path(path).write_text(yaml.safe_dump(data, sort_keys=False))
