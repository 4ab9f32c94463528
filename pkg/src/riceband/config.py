"""Experiment configuration: JSON schema, validation and defaults."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import jsonschema

from .core import DomainBox
from .ensembles import ENSEMBLE_KINDS, EnsembleSpec

COMMANDS = ("expected-area", "mc-verify", "coarea-check", "kac-asymptotic", "favard-measure", "identities")
SHAPES = ("circle", "sphere", "plane-slice")
COAREA_FUNCTIONS = ("cone", "linear", "paraboloid")


class ConfigError(ValueError):
    """Invalid experiment configuration."""


_number = {"type": "number"}
_pos_int = {"type": "integer", "minimum": 1}
_domain = {
    "oneOf": [
        {"type": "string", "enum": ["R"]},
        {
            "type": "array",
            "minItems": 1,
            "items": {"type": "array", "items": _number, "minItems": 2, "maxItems": 2},
        },
    ]
}

ENSEMBLE_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["kind"],
    "properties": {
        "kind": {"enum": list(ENSEMBLE_KINDS)},
        "d": _pos_int,
        "n": _pos_int,
        "domain": _domain,
        "lambda": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
        "atoms": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["z", "w"],
                "properties": {
                    "z": {"oneOf": [_number, {"type": "array", "items": _number, "minItems": 1}]},
                    "w": {"type": "number", "exclusiveMinimum": 0},
                },
            },
        },
        "seed": {"type": "integer", "minimum": 0},
    },
}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "command": {"enum": list(COMMANDS)},
        "ensemble": ENSEMBLE_SCHEMA,
        "domain": _domain,
        "level": _number,
        "R": {"type": "number", "exclusiveMinimum": 0},
        "grid": {"oneOf": [{"type": "integer", "minimum": 2}, {"type": "array", "items": {"type": "integer", "minimum": 2}}]},
        "replicates": _pos_int,
        "sphere_resolution": _pos_int,
        "seed": {"type": "integer", "minimum": 0},
        "method": {"enum": ["mesh", "favard", "crossings-1d"]},
        "output": {"type": "string"},
        "replicate_csv": {"type": "string"},
        "format": {"enum": ["csv", "json"]},
        "sweep": {"type": "array", "items": _pos_int, "minItems": 1},
        "shape": {"enum": list(SHAPES)},
        "function": {"enum": list(COAREA_FUNCTIONS)},
        "d": _pos_int,
        "radius": {"type": "number", "exclusiveMinimum": 0},
        "offset": _number,
        "lines": _pos_int,
        "samples": {"type": "integer", "minimum": 2},
        "level_nodes": _pos_int,
        "tolerance": {"type": "number", "exclusiveMinimum": 0},
    },
}

REQUIRED = {
    "expected-area": ("ensemble",),
    "mc-verify": ("ensemble",),
    "coarea-check": ("function",),
    "kac-asymptotic": (),
    "favard-measure": ("shape",),
    "identities": (),
}


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    ensemble: Optional[EnsembleSpec] = None
    domain: Optional[DomainBox] = None
    level: float = 0.0
    R: float = 200.0
    grid: Optional[tuple] = None
    replicates: int = 500
    sphere_resolution: Optional[int] = None
    seed: int = 0
    method: str = "mesh"
    output: Optional[str] = None
    replicate_csv: Optional[str] = None
    format: str = "csv"
    sweep: tuple = (10, 100, 1000, 10000)
    shape: Optional[str] = None
    function: Optional[str] = None
    d: int = 2
    radius: float = 1.0
    offset: float = 0.0
    lines: Optional[int] = None
    samples: Optional[int] = None
    level_nodes: int = 32
    tolerance: Optional[float] = None
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def effective_domain(self) -> Optional[DomainBox]:
        if self.domain is not None:
            return self.domain
        return None if self.ensemble is None else self.ensemble.domain


def _path(err) -> str:
    parts = [str(p) for p in err.absolute_path]
    if err.validator == "required":
        missing = err.message.split("'")[1] if "'" in err.message else ""
        parts.append(missing)
    return ".".join(p for p in parts if p) or "<root>"


def parse_config(data, command: Optional[str] = None) -> ExperimentConfig:
    """Validate a JSON config (bytes, str or dict) and fill defaults.

    ``command`` (from the CLI) must agree with a ``"command"`` key when both
    are present. A top-level ``seed`` takes precedence over ``ensemble.seed``. Raises :class:`ConfigError` naming the offending field.
    """
    if isinstance(data, (bytes, bytearray)):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ConfigError(f"config is not UTF-8: {exc}") from None
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    validator = jsonschema.Draft7Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise ConfigError(f"invalid config at {_path(err)}: {err.message}")

    cmd = data.get("command")
    if command is not None and cmd is not None and cmd != command:
        raise ConfigError(f"command: config says {cmd!r} but {command!r} was requested")
    cmd = command or cmd
    if cmd is None:
        raise ConfigError("command: no command given")
    if cmd not in COMMANDS:
        raise ConfigError(f"command: unknown command {cmd!r}")
    for key in REQUIRED[cmd]:
        if key not in data:
            raise ConfigError(f"{key}: required for command {cmd!r}")

    kwargs = {k: data[k] for k in CONFIG_SCHEMA["properties"] if k in data and k not in ("command", "ensemble", "domain")}
    try:
        if "ensemble" in data:
            kwargs["ensemble"] = EnsembleSpec.from_dict(data["ensemble"])
            # the descriptor's own seed applies when the run gives none
            kwargs.setdefault("seed", kwargs["ensemble"].seed)
        if "domain" in data and data["domain"] != "R":
            kwargs["domain"] = DomainBox.from_json(data["domain"])
    except (ValueError, KeyError) as exc:
        field_name = "ensemble" if "ensemble" in data else "domain"
        raise ConfigError(f"{field_name}: {exc}") from None
    if "grid" in kwargs:
        g = kwargs["grid"]
        kwargs["grid"] = tuple(g) if isinstance(g, list) else (g,)
    if "sweep" in kwargs:
        kwargs["sweep"] = tuple(kwargs["sweep"])
    return ExperimentConfig(command=cmd, raw=data, **kwargs)
