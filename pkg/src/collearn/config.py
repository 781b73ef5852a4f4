"""Flat ``key = value`` experiment configs with a typed schema."""
from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass

from .errors import InputError

EXPERIMENTS = (
    "srm-showdown",
    "tau-growth",
    "oig-loo",
    "boosting",
    "nn-sweep",
    "contrastive-sweep",
    "margin-sweep",
    "end-to-end",
)


@dataclass(frozen=True)
class Field:
    kind: str
    default: object
    choices: tuple = ()


SCHEMA = {
    "experiment": Field("str", None, EXPERIMENTS),
    "output": Field("str", ""),
    "seed": Field("int", 0),
    "seeds": Field("int", 5),
    "m": Field("intlist", (32,)),
    "delta": Field("float", 0.1),
    "c_prime": Field("float", 1.0),
    "weight_rule": Field("str", "power2"),
    "support": Field("str", "literal", ("literal", "pair")),
    "tau_mode": Field("str", "sample", ("sample", "upper", "analytic")),
    "trials": Field("int", 20),
    "domain_size": Field("int", 8),
    "noise": Field("float", 0.3),
    "k": Field("intlist", (2,)),
    "r": Field("floatlist", (0.5, 1.0, 2.0)),
    "gamma": Field("floatlist", (0.5, 1.0)),
    "lipschitz": Field("floatlist", (1.0, 2.0)),
    "vc_cap": Field("int", 20),
    "tau_cap": Field("int", 16),
    "class_file": Field("str", ""),
    "metric_file": Field("str", ""),
    "distribution_file": Field("str", ""),
}

_LINE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*?)\s*$")


def _parse_value(kind, raw, where):
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "str":
            return raw
        if kind == "intlist":
            return tuple(int(v) for v in raw.split(",") if v.strip())
        if kind == "floatlist":
            return tuple(float(v) for v in raw.split(",") if v.strip())
    except ValueError as exc:
        raise InputError(f"{where}: cannot read {raw!r} as {kind}") from exc
    raise InputError(f"{where}: unknown field type {kind}")


def _format_value(kind, value):
    if kind == "float":
        return repr(float(value))
    if kind == "intlist":
        return ",".join(str(int(v)) for v in value)
    if kind == "floatlist":
        return ",".join(repr(float(v)) for v in value)
    return str(value)


class ExperimentConfig(dict):
    """Validated mapping of every schema key to a typed value."""

    @property
    def experiment(self):
        return self["experiment"]

    def serialize(self) -> str:
        return "".join(f"{k} = {_format_value(SCHEMA[k].kind, self[k])}\n" for k in sorted(self))

    def digest(self) -> str:
        return hashlib.sha256(self.serialize().encode()).hexdigest()


def build_config(values: dict, source="<dict>") -> ExperimentConfig:
    cfg = ExperimentConfig()
    for key, value in values.items():
        if key not in SCHEMA:
            raise InputError(f"{source}: unknown key {key!r}")
        cfg[key] = value
    for key, f in SCHEMA.items():
        if key not in cfg:
            if f.default is None:
                raise InputError(f"{source}: missing required key {key!r}")
            cfg[key] = f.default
        if f.choices and cfg[key] not in f.choices:
            raise InputError(f"{source}: {key} must be one of {', '.join(f.choices)}; got {cfg[key]!r}")
    if not cfg["output"]:
        cfg["output"] = f"{cfg['experiment']}.csv"
    if cfg["seeds"] < 1:
        raise InputError(f"{source}: seeds must be at least 1")
    if not 0 < cfg["delta"] < 1:
        raise InputError(f"{source}: delta must lie in (0, 1)")
    return cfg


def parse_config(text: str, source="<config>") -> ExperimentConfig:
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        match = _LINE.match(line)
        where = f"{source}:{lineno}"
        if not match:
            raise InputError(f"{where}: expected 'key = value'")
        key, raw = match.groups()
        if key not in SCHEMA:
            raise InputError(f"{where}: unknown key {key!r}")
        if key in values:
            raise InputError(f"{where}: duplicate key {key!r}")
        values[key] = _parse_value(SCHEMA[key].kind, raw, where)
    return build_config(values, source)


def load_config(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc.strerror}") from exc
    return parse_config(text, str(path))
