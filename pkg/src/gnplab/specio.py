"""Domain-spec JSON loading and deterministic report writers.

Artifacts are reproducible byte for byte: floats go through one fixed
format, JSON keys are sorted, and file names carry a content hash of the
generating configuration (output location excluded, so moving the output
directory does not rename artifacts).
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .geometry import (DEFAULT_SAMPLES, GnpDomain, constant_profile,
                       disc_body, example_profile, fourier_profile,
                       make_domain, polygon_body, segment_body, table_profile)

FLOAT_FMT = "%.12g"


def _require(cond, msg):
    if not cond:
        raise ConfigError(msg)


def build_core(spec: dict, samples: int):
    _require(isinstance(spec, dict) and "kind" in spec,
             "core spec must be an object with a 'kind'")
    kind = spec["kind"]
    params = spec.get("params", {})
    try:
        if kind == "disc":
            return disc_body(tuple(params.get("center", (0.0, 0.0))),
                             float(params["radius"]), samples)
        if kind == "polygon":
            return polygon_body([tuple(p) for p in params["vertices"]], samples)
        if kind == "segment":
            return segment_body(tuple(params["p0"]), tuple(params["p1"]),
                                samples)
    except ConfigError:
        raise
    except KeyError as exc:
        raise ConfigError(f"core kind {kind!r} missing parameter {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad core parameters for kind {kind!r}: {exc}") from exc
    raise ConfigError(f"unknown core kind {kind!r}")


def build_profile(spec: dict, core, x_max: float):
    _require(isinstance(spec, dict) and "kind" in spec,
             "profile spec must be an object with a 'kind'")
    kind = spec["kind"]
    params = spec.get("params", {})
    try:
        if kind == "constant":
            return constant_profile(core, float(params["value"]))
        if kind == "fourier":
            modes = [(int(k), float(a), float(p))
                     for k, a, p in params.get("modes", [])]
            return fourier_profile(core, float(params["base"]), modes)
        if kind == "table":
            return table_profile(core, np.asarray(params["values"], dtype=float))
        if kind == "example_10_3":
            return example_profile(core, x_max=float(params.get("x_max", x_max)))
    except ConfigError:
        raise
    except KeyError as exc:
        raise ConfigError(f"profile kind {kind!r} missing parameter {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad profile parameters for kind {kind!r}: {exc}") from exc
    raise ConfigError(f"unknown profile kind {kind!r}")


def domain_from_spec(spec: dict) -> GnpDomain:
    _require(isinstance(spec, dict), "domain spec must be a JSON object")
    samples = int(spec.get("samples", DEFAULT_SAMPLES))
    _require(samples >= 8, "need at least 8 boundary samples")
    x_max = float(spec.get("x_max", 20.0))
    core = build_core(spec.get("core"), samples)
    profile = build_profile(spec.get("profile"), core, x_max)
    return make_domain(core, profile)


def load_domain_spec(path) -> GnpDomain:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"domain spec not found: {path}")
    try:
        spec = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"domain spec is not valid JSON: {exc}") from exc
    return domain_from_spec(spec)


# ---------------------------------------------------------------------------
# writers

def fmt_float(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    xf = float(x)
    if np.isnan(xf):
        return "nan"
    return FLOAT_FMT % xf


def write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt_float(v) if not isinstance(v, str) else v
                              for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return None if np.isnan(x) else float(FLOAT_FMT % x)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def write_json(path, obj):
    Path(path).write_text(
        json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n")


def artifact_stem(command: str, config: dict) -> str:
    cfg = {k: v for k, v in config.items() if k not in ("out", "out_dir")}
    blob = json.dumps(_jsonable(cfg), sort_keys=True).encode()
    return f"{command}_{hashlib.sha256(blob).hexdigest()[:8]}"
