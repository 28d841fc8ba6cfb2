"""JSON documents for configurations, states, tables and reports.

Every document is an object ``{"schema_version": "1", "kind": ..., "payload": ...}``.
Complex numbers are ``[re, im]`` pairs, matrices are row-major nested lists,
and floats are written with Python's shortest round-trip repr, so a
parse/serialize cycle reproduces every value bit for bit.  Output uses sorted
keys and a fixed indent, making it deterministic.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .density import DensityMatrix
from .equidistant import EquidistantConfig, StateSet, gram_matrix
from .errors import (
    EqtomoError,
    InvariantViolation,
    MalformedDocument,
    NonFiniteValue,
    SchemaMismatch,
)
from .measurement import ESTIMATED, EXACT, CountTable, ProbabilityTable
from .tomography import ReconstructionReport

SCHEMA_VERSION = "1"
KINDS = ("config", "states", "density", "probabilities", "counts", "report")
STATE_TOL = 1e-10


# -- encoding ---------------------------------------------------------------

def _real(x) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise NonFiniteValue(f"cannot serialize non-finite value {x!r}")
    return x


def _complex_array(a) -> list:
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return [_real(a.real), _real(a.imag)]
    return [_complex_array(x) for x in a]


def _real_array(a) -> list:
    a = np.asarray(a, dtype=float)
    if a.ndim == 0:
        return _real(a)
    return [_real_array(x) for x in a]


def _config_payload(c: EquidistantConfig) -> dict:
    return {"dim": c.dim, "alpha_mod": _real(c.alpha_mod), "theta": _real(c.theta)}


def to_document(value) -> dict:
    if isinstance(value, EquidistantConfig):
        kind, payload = "config", _config_payload(value)
    elif isinstance(value, StateSet):
        kind = "states"
        payload = {"config": _config_payload(value.config), "states": _complex_array(value.states)}
    elif isinstance(value, DensityMatrix):
        kind, payload = "density", {"dim": value.dim, "entries": _complex_array(value.entries)}
    elif isinstance(value, ProbabilityTable):
        kind = "probabilities"
        payload = {
            "dim": value.dim,
            "source": value.source,
            "shots": value.shots,
            "values": _real_array(value.values),
        }
    elif isinstance(value, CountTable):
        kind = "counts"
        payload = {"dim": value.dim, "shots": value.shots, "counts": value.counts.tolist()}
    elif isinstance(value, ReconstructionReport):
        kind = "report"
        payload = {
            "config": _config_payload(value.config),
            "rho_raw": _complex_array(value.rho_raw),
            "rho_physical": (
                None if value.rho_physical is None else _complex_array(value.rho_physical.entries)
            ),
            "projection": value.projection,
            "condition_numbers": [_real(c) for c in value.condition_numbers],
            "residual": _real(value.residual),
        }
    else:
        raise TypeError(f"cannot serialize {type(value).__name__}")
    return {"schema_version": SCHEMA_VERSION, "kind": kind, "payload": payload}


def serialize(value) -> str:
    doc = to_document(value)
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


# -- decoding ---------------------------------------------------------------

def _field(payload: dict, name: str):
    try:
        return payload[name]
    except (KeyError, TypeError):
        raise MalformedDocument(f"payload is missing field {name!r}") from None


def _decode_complex(data, shape_hint: str) -> np.ndarray:
    try:
        a = np.asarray(data, dtype=float)
    except (TypeError, ValueError):
        raise MalformedDocument(f"{shape_hint}: expected nested numeric arrays") from None
    if a.ndim < 1 or a.shape[-1] != 2:
        raise MalformedDocument(f"{shape_hint}: complex entries must be [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]


def _decode_real(data, what: str) -> np.ndarray:
    try:
        return np.asarray(data, dtype=float)
    except (TypeError, ValueError):
        raise MalformedDocument(f"{what}: expected nested numeric arrays") from None


def _decode_config(payload) -> EquidistantConfig:
    dim = _field(payload, "dim")
    if not isinstance(dim, int) or isinstance(dim, bool):
        raise MalformedDocument("config.dim must be an integer")
    return EquidistantConfig(dim, _field(payload, "alpha_mod"), _field(payload, "theta"))


def _check_states(config: EquidistantConfig, states: np.ndarray) -> StateSet:
    n = config.dim
    if states.shape != (n, n, n):
        raise InvariantViolation(f"states must have shape {(n, n, n)}, got {states.shape}")
    norms = np.linalg.norm(states, axis=2)
    if np.max(np.abs(norms - 1.0)) > STATE_TOL:
        raise InvariantViolation("every state must have unit norm")
    lower = np.tril(np.ones((n, n), dtype=bool), -1)
    for s in range(n):
        g = gram_matrix(states[s])
        if np.max(np.abs(g[lower] - config.alpha)) > STATE_TOL:
            raise InvariantViolation(f"set s={s} is not equidistant with alpha={config.alpha}")
    states = states.copy()
    states.setflags(write=False)
    return StateSet(config, states)


def _from_payload(kind: str, payload):
    if not isinstance(payload, dict):
        raise MalformedDocument("payload must be an object")
    if kind == "config":
        return _decode_config(payload)
    if kind == "states":
        config = _decode_config(_field(payload, "config"))
        return _check_states(config, _decode_complex(_field(payload, "states"), "states"))
    if kind == "density":
        entries = _decode_complex(_field(payload, "entries"), "entries")
        if entries.shape[:1] != (_field(payload, "dim"),):
            raise InvariantViolation("density entries do not match dim")
        return DensityMatrix(entries)
    if kind == "probabilities":
        values = _decode_real(_field(payload, "values"), "values")
        source = _field(payload, "source")
        shots = payload.get("shots")
        if source not in (EXACT, ESTIMATED):
            raise InvariantViolation(f"unknown probability source {source!r}")
        if values.shape[:1] != (_field(payload, "dim"),):
            raise InvariantViolation("probability values do not match dim")
        return ProbabilityTable(values, source, shots)
    if kind == "counts":
        counts = _decode_real(_field(payload, "counts"), "counts")
        if counts.shape[:1] != (_field(payload, "dim"),):
            raise InvariantViolation("counts do not match dim")
        return CountTable(counts, _field(payload, "shots"))
    if kind == "report":
        config = _decode_config(_field(payload, "config"))
        raw = _decode_complex(_field(payload, "rho_raw"), "rho_raw")
        if raw.shape != (config.dim, config.dim):
            raise InvariantViolation("rho_raw does not match config.dim")
        raw.setflags(write=False)
        phys = _field(payload, "rho_physical")
        phys = None if phys is None else DensityMatrix(_decode_complex(phys, "rho_physical"))
        conds = tuple(float(c) for c in _decode_real(_field(payload, "condition_numbers"), "condition_numbers"))
        if len(conds) != (config.dim + 1) // 2:
            raise InvariantViolation("one condition number per solved diagonal is required")
        return ReconstructionReport(
            config=config,
            rho_raw=raw,
            rho_physical=phys,
            condition_numbers=conds,
            residual=float(_field(payload, "residual")),
            projection=payload.get("projection"),
        )
    raise SchemaMismatch(kind, KINDS)


def parse(text: str, kind: str | None = None):
    """Parse and validate a document; ``kind`` optionally pins the expected kind."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(exc.msg, exc.pos) from None
    if not isinstance(doc, dict):
        raise MalformedDocument("top level must be an object", 0)
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaMismatch(version, SCHEMA_VERSION)
    found = doc.get("kind")
    if found not in KINDS:
        raise SchemaMismatch(found, KINDS)
    if kind is not None and found != kind:
        raise SchemaMismatch(found, kind)
    if "payload" not in doc:
        raise MalformedDocument("document has no payload")
    try:
        return _from_payload(found, doc["payload"])
    except (MalformedDocument, SchemaMismatch, InvariantViolation):
        raise
    except (EqtomoError, ValueError) as exc:
        raise InvariantViolation(str(exc)) from exc


def write_document(value, path) -> Path:
    path = Path(path)
    path.write_text(serialize(value), encoding="utf-8")
    return path


def read_document(path, kind: str | None = None):
    return parse(Path(path).read_text(encoding="utf-8"), kind)
