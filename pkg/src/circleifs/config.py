"""Experiment configuration: one JSON document, validated field by field.

Schema::

    {
      "system": {"name": "demo_contractive"}
                | {"generators": [{"type": "rotation", "angle": 0.3}, ...], "probs": [...]},
      "experiment": "stability" | "classify" | "symmetry" | "omega" | "slln" | "eproperty",
      "parameters": {...},          # per experiment, see PARAMETERS
      "seed": 12345,                # required, 0 <= seed < 2**64
      "output_dir": "runs/demo"     # optional, overridden by --output
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .homeo import from_dict
from .ifs_core import IFSystem, InvalidSystemError
from .systems import FLEET

EXPERIMENTS = ("stability", "classify", "symmetry", "omega", "slln", "eproperty")

INT, REAL, POS_LIST, POINT, POINT_LIST, STR, INITS = "int", "real", "pos_list", "point", "point_list", "str", "inits"

# name -> (kind, default); numeric kinds must be strictly positive
PARAMETERS: dict[str, dict[str, tuple[str, Any]]] = {
    "stability": {
        "n": (INT, 500),
        "n_particles": (INT, 10_000),
        "inits": (INITS, [{"dirac": 0.0}, "uniform"]),
        "threads": (INT, 1),
    },
    "classify": {
        "probe_arcs": (INT, 64),
        "shrink_budget": (INT, 10_000),
        "tol": (REAL, 1e-3),
        "arc_start": (POINT, 0.3),
        "arc_length": (REAL, 0.1),
    },
    "symmetry": {
        "denominator_cap": (INT, 64),
        "tol": (REAL, 1e-9),
        "samples": (INT, 16),
        "resolution": (REAL, 0.01),
        "budget": (INT, 10_000),
        "n_steps": (INT, 2000),
        "n_particles": (INT, 10_000),
    },
    "omega": {
        "n_backward": (INT, 300),
        "n_atoms": (INT, 1000),
        "gap_threshold": (REAL, None),
        "m_cap": (INT, 8),
        "repeats": (INT, 1),
    },
    "slln": {
        "n": (INT, 100_000),
        "starts": (POINT_LIST, [0.0, 0.2, 0.4, 0.6, 0.8]),
        "phi": (STR, "cos"),
        "n_steps": (INT, 2000),
        "n_particles": (INT, 10_000),
    },
    "eproperty": {
        "deltas": (POS_LIST, [1 / 2**k for k in range(3, 11)]),
        "N_horizon": (INT, 200),
        "base_points": (INT, 16),
        "method": (STR, "grid"),
        "samples": (INT, 1000),
        "grid": (INT, 4096),
        "f": (STR, "cos"),
    },
}


class ConfigError(ValueError):
    """A configuration field is missing or invalid; ``field`` names it."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass
class ExperimentConfig:
    system: IFSystem
    system_spec: dict
    experiment: str
    parameters: dict
    seed: int
    output_dir: str | None = None
    raw: dict = field(default_factory=dict, repr=False)


def _is_num(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _check_param(exp: str, name: str, kind: str, v):
    where = f"parameters.{name}"
    if kind == INT:
        if not isinstance(v, int) or isinstance(v, bool) or v <= 0:
            raise ConfigError(where, f"must be a positive integer, got {v!r}")
    elif kind == REAL:
        if not _is_num(v) or not v > 0:
            raise ConfigError(where, f"must be a positive number, got {v!r}")
    elif kind == POINT:
        if not _is_num(v) or not 0 <= v < 1:
            raise ConfigError(where, f"must be a circle point in [0, 1), got {v!r}")
    elif kind == POS_LIST:
        if not isinstance(v, list) or not v or not all(_is_num(x) and x > 0 for x in v):
            raise ConfigError(where, "must be a nonempty list of positive numbers")
    elif kind == POINT_LIST:
        if not isinstance(v, list) or not v or not all(_is_num(x) and 0 <= x < 1 for x in v):
            raise ConfigError(where, "must be a nonempty list of circle points in [0, 1)")
    elif kind == STR:
        if not isinstance(v, str):
            raise ConfigError(where, f"must be a string, got {v!r}")
    elif kind == INITS:
        if not isinstance(v, list) or len(v) < 2:
            raise ConfigError(where, "needs at least two initial measures")
        for item in v:
            if item == "uniform":
                continue
            if not (isinstance(item, dict) and set(item) == {"dirac"} and _is_num(item["dirac"]) and 0 <= item["dirac"] < 1):
                raise ConfigError(where, f"entries are \"uniform\" or {{\"dirac\": x}} with x in [0, 1), got {item!r}")


def _parse_system(spec) -> IFSystem:
    if not isinstance(spec, dict):
        raise ConfigError("system", "must be an object")
    if "name" in spec:
        if spec["name"] not in FLEET:
            raise ConfigError("system.name", f"unknown system {spec['name']!r}; known: {sorted(FLEET)}")
        return FLEET[spec["name"]]()
    if "generators" not in spec:
        raise ConfigError("system", "needs either 'name' or 'generators'")
    try:
        gens = [from_dict(g) for g in spec["generators"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError("system.generators", str(exc)) from None
    try:
        return IFSystem(gens, spec.get("probs"))
    except InvalidSystemError as exc:
        raise ConfigError("system.probs" if "prob" in str(exc) else "system.generators", str(exc)) from None


def parse_config(doc: dict, experiment: str | None = None) -> ExperimentConfig:
    """Validate a decoded document; ``experiment`` (from the CLI) must agree with the document if both are set."""
    if not isinstance(doc, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    if "seed" not in doc:
        raise ConfigError("seed", "missing; every run needs an explicit seed")
    seed = doc["seed"]
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64:
        raise ConfigError("seed", f"must be an integer in [0, 2**64), got {seed!r}")
    exp = doc.get("experiment", experiment)
    if exp is None:
        raise ConfigError("experiment", "missing")
    if exp not in EXPERIMENTS:
        raise ConfigError("experiment", f"unknown experiment {exp!r}; known: {list(EXPERIMENTS)}")
    if experiment is not None and exp != experiment:
        raise ConfigError("experiment", f"config is for {exp!r} but the {experiment!r} command was used")
    if "system" not in doc:
        raise ConfigError("system", "missing")
    system = _parse_system(doc["system"])

    given = doc.get("parameters", {})
    if not isinstance(given, dict):
        raise ConfigError("parameters", "must be an object")
    schema = PARAMETERS[exp]
    unknown = sorted(set(given) - set(schema))
    if unknown:
        raise ConfigError(f"parameters.{unknown[0]}", f"not a parameter of {exp!r}; known: {sorted(schema)}")
    params = {}
    for name, (kind, default) in schema.items():
        v = given.get(name, default)
        if v is not None:
            _check_param(exp, name, kind, v)
        params[name] = v
    out = doc.get("output_dir")
    if out is not None and not isinstance(out, str):
        raise ConfigError("output_dir", "must be a string path")
    return ExperimentConfig(system, doc["system"], exp, params, seed, out, doc)


def load_config(path: str | Path, experiment: str | None = None) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("<file>", f"invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return parse_config(doc, experiment)
