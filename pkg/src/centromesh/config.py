"""JSON run configuration.

A value source (Dirichlet value, Neumann flux or source term) is written as
one of::

    1.5                                   # constant
    {"table": [[i, j, k, value], ...]}    # per node
    {"random": {"low": -1, "high": 1}}    # seeded uniform draw per node

Spacings accept numbers or fraction strings such as ``"1/3"`` and default
to 1. A ``grid`` given in the file replaces the default grid as a whole; a
``bc`` entry replaces only the faces it lists.
"""

from __future__ import annotations

import copy
import json
import os
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import jsonschema
import numpy as np

from .assembly import FACES, BcSpec, FaceBC
from .errors import ConfigurationError
from .mesh import SCHEMES, GridSpec

SEED_ENV = "CENTROMESH_SEED"

_VALUE = {
    "oneOf": [
        {"type": "number"},
        {
            "type": "object",
            "properties": {
                "table": {
                    "type": "array",
                    "items": {
                        "type": "array",
                        "prefixItems": [
                            {"type": "integer"},
                            {"type": "integer"},
                            {"type": "integer"},
                            {"type": "number"},
                        ],
                        "minItems": 4,
                        "maxItems": 4,
                    },
                }
            },
            "required": ["table"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "random": {
                    "type": "object",
                    "properties": {"low": {"type": "number"}, "high": {"type": "number"}},
                    "additionalProperties": False,
                }
            },
            "required": ["random"],
            "additionalProperties": False,
        },
    ]
}

_SPACING = {
    "oneOf": [
        {"type": "number", "exclusiveMinimum": 0},
        {"type": "string", "pattern": r"^\s*\d+(\.\d*)?\s*(/\s*\d+(\.\d*)?\s*)?$"},
    ]
}

_FACE = {
    "type": "object",
    "properties": {"type": {"enum": ["dirichlet", "neumann"]}, "value": _VALUE},
    "required": ["type"],
    "additionalProperties": False,
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "grid": {
            "type": "object",
            "properties": {
                "nx": {"type": "integer", "minimum": 1},
                "ny": {"type": "integer", "minimum": 1},
                "nz": {"type": "integer", "minimum": 2, "multipleOf": 2},
                "hx": _SPACING,
                "hy": _SPACING,
                "hz": _SPACING,
            },
            "required": ["nx", "ny", "nz"],
            "additionalProperties": False,
        },
        "numbering": {"enum": list(SCHEMES)},
        "bc": {
            "type": "object",
            "properties": {f: _FACE for f in FACES},
            "additionalProperties": False,
        },
        "rho": _VALUE,
        "solver": {"enum": ["centro", "dense"]},
        "output_dir": {"type": "string"},
        "seed": {"type": "integer", "minimum": 0},
        "tolerances": {
            "type": "object",
            "properties": {
                "residual": {"type": "number", "exclusiveMinimum": 0},
                "centro": {"type": "number", "minimum": 0},
                "cond_limit": {"type": "number", "exclusiveMinimum": 0},
            },
            "additionalProperties": False,
        },
        "bench": {
            "type": "object",
            "properties": {
                "sizes": {
                    "type": "array",
                    "items": {"type": "integer", "minimum": 2, "multipleOf": 2},
                    "minItems": 1,
                },
                "repeats": {"type": "integer", "minimum": 1},
            },
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}

DEFAULTS = {
    "grid": {"nx": 3, "ny": 3, "nz": 4, "hx": "1/2", "hy": "1/3", "hz": "1/4"},
    "numbering": "centrosymmetric",
    "bc": {
        "x_min": {"type": "neumann", "value": 0.0},
        "x_max": {"type": "dirichlet", "value": 0.0},
        "y_min": {"type": "neumann", "value": 0.0},
        "y_max": {"type": "dirichlet", "value": 0.0},
        "z_min": {"type": "dirichlet", "value": 0.0},
        "z_max": {"type": "dirichlet", "value": 0.0},
    },
    "rho": 0.0,
    "solver": "centro",
    "output_dir": "centromesh-out",
    "seed": 0,
    "tolerances": {"residual": 1e-10, "centro": 1e-12, "cond_limit": 1e12},
    "bench": {"sizes": [256, 512, 1024], "repeats": 5},
}


def _merge(base: dict, extra: dict) -> dict:
    out = copy.deepcopy(base)
    for key, val in extra.items():
        if key == "bc":
            # a face entry replaces the default face as a whole
            out[key].update(copy.deepcopy(val))
        elif key != "grid" and isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = copy.deepcopy(val)
    return out


def _spacing(value, where) -> float:
    if isinstance(value, str):
        try:
            return float(Fraction(value.replace(" ", "")))
        except (ValueError, ZeroDivisionError):
            raise ConfigurationError(f"{where}: cannot parse spacing {value!r}") from None
    return float(value)


@dataclass
class RunConfig:
    """Validated run configuration with defaults filled in."""

    data: dict

    @property
    def seed(self) -> int:
        return int(self.data["seed"])

    @property
    def solver(self) -> str:
        return self.data["solver"]

    @property
    def numbering(self) -> str:
        return self.data["numbering"]

    @property
    def output_dir(self) -> Path:
        return Path(self.data["output_dir"])

    @property
    def tolerances(self) -> dict:
        return self.data["tolerances"]

    @property
    def bench(self) -> dict:
        return self.data["bench"]

    def grid(self) -> GridSpec:
        g = self.data["grid"]
        return GridSpec(
            g["nx"], g["ny"], g["nz"],
            _spacing(g.get("hx", 1.0), "grid.hx"),
            _spacing(g.get("hy", 1.0), "grid.hy"),
            _spacing(g.get("hz", 1.0), "grid.hz"),
        )

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    def sources(self, grid: GridSpec | None = None):
        """Build ``(BcSpec, rho)``; random draws come from one seeded stream.

        Draw order is fixed: ``rho`` first, then the faces in ``FACES`` order.
        """
        grid = grid or self.grid()
        rng = self.rng()
        rho = _value(self.data["rho"], grid, rng, "rho")
        faces = {}
        for name in FACES:
            face = self.data["bc"][name]
            faces[name] = FaceBC(face["type"], _value(face.get("value", 0.0), grid, rng, f"bc.{name}.value"))
        return BcSpec(**faces), rho


def _value(spec, grid: GridSpec, rng: np.random.Generator, where: str):
    if isinstance(spec, (int, float)):
        return float(spec)
    if "table" in spec:
        table = {}
        for row in spec["table"]:
            i, j, k, v = row
            if not grid.contains((i, j, k)):
                raise ConfigurationError(f"{where}.table: node {(i, j, k)} outside grid {grid.shape}")
            table[(i, j, k)] = float(v)
        return table
    r = spec["random"]
    return rng.uniform(r.get("low", -1.0), r.get("high", 1.0), size=grid.shape)


def _error_path(err: jsonschema.ValidationError) -> str:
    path = "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in err.absolute_path)
    return "$" + path


def load_config(source=None, overrides: dict | None = None, environ=None) -> RunConfig:
    """Load, validate and complete a run configuration.

    Parameters
    ----------
    source : path, dict or None
        JSON file path or already-parsed document. ``None`` means defaults.
    overrides : dict, optional
        Values from command-line flags; they take precedence over the file.
    environ : mapping, optional
        Environment used for ``CENTROMESH_SEED`` (defaults to ``os.environ``).
        Precedence for the seed is flag, then environment, then file.
    """
    if source is None:
        doc = {}
    elif isinstance(source, dict):
        doc = source
    else:
        try:
            with open(source) as fh:
                doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"{source}: invalid JSON ({exc})") from None
        except OSError as exc:
            raise ConfigurationError(f"cannot read config {source}: {exc}") from None

    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        lines = [f"{_error_path(e)}: {e.message}" for e in errors]
        raise ConfigurationError("invalid configuration:\n  " + "\n  ".join(lines))

    data = _merge(DEFAULTS, doc)
    environ = os.environ if environ is None else environ
    if SEED_ENV in environ:
        try:
            data["seed"] = int(environ[SEED_ENV])
        except ValueError:
            raise ConfigurationError(f"{SEED_ENV} must be an integer, got {environ[SEED_ENV]!r}") from None
    for key, val in (overrides or {}).items():
        if val is None:
            continue
        if key in ("residual", "centro", "cond_limit"):
            data["tolerances"][key] = val
        else:
            data[key] = val

    errors = list(validator.iter_errors(data))
    if errors:
        lines = [f"{_error_path(e)}: {e.message}" for e in errors]
        raise ConfigurationError("invalid configuration after overrides:\n  " + "\n  ".join(lines))
    cfg = RunConfig(data)
    cfg.grid()
    bc = data["bc"]
    if bc["z_min"]["type"] != bc["z_max"]["type"]:
        raise ConfigurationError(
            f"$.bc: faces z_min and z_max must share a type (got {bc['z_min']['type']} "
            f"and {bc['z_max']['type']})"
        )
    return cfg
