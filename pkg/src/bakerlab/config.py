"""Experiment configuration: ``key = value`` files plus command-line overrides."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .maps import EntireMap, Fatou, Scaled

COMMANDS = ("render", "trace", "perturb", "classify", "verify")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    command: str = "render"

    # map: alpha * (z + exp(-z) + c)
    c: complex = 1 + 0j
    alpha: complex = 1 + 0j

    # trace
    family: str = "scaled"
    grid: str = "0.5:0.999:100"
    guess: str = "auto"
    escape_radius: float = 100.0
    tol: float = 1e-12

    # perturb
    s_values: str = "5,10,20,50,100"
    ray_direction: complex = 1 + 0j
    ray_anchor: complex = 0j

    # classify
    z0: complex = 1 + 0j
    n: int = 100
    oracle: str = "auto"
    steps: int = 16
    rays: int = 16
    rel_tol: float = 1e-3

    # render
    xmin: float = -2.0
    xmax: float = 12.0
    ymin: float = -6.0
    ymax: float = 6.0
    width: int = 400
    height: int = 400
    max_iter: int = 200

    # verify
    seed: int = 20240601
    samples: int = 1000
    tol_identity: float = 1e-6
    tol_identity_small: float = 1e-5
    tol_koenigs: float = 1e-8
    tol_curve: float = 1e-3
    tol_fixed: float = 1e-12
    tol_derivative: float = 1e-12
    tol_quadrature: float = 1e-9
    tol_multiplier: float = 1e-9

    output: str = ""

    def build_map(self) -> EntireMap:
        base = Fatou(self.c)
        return base if self.alpha == 1 else Scaled(base, self.alpha)

    def output_path(self) -> str:
        default = {"render": "render.pgm", "trace": "trace.csv", "perturb": "perturb.csv",
                   "classify": "classify.txt", "verify": "verify.txt"}
        return self.output or default[self.command]

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.width < 1 or self.height < 1:
            raise ConfigError("pixel counts must be >= 1")
        if not (self.xmax > self.xmin and self.ymax > self.ymin):
            raise ConfigError("window must have positive area")
        for f in dataclasses.fields(self):
            if f.name == "tol" or f.name.startswith("tol_") or f.name == "rel_tol":
                if not getattr(self, f.name) > 0:
                    raise ConfigError(f"{f.name} must be positive")
        for name in ("n", "max_iter", "samples", "steps", "rays"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if not self.escape_radius > 0:
            raise ConfigError("escape_radius must be positive")
        return self


def _parse_complex(text: str) -> complex:
    return complex(text.replace(" ", "").replace("i", "j"))


_PARSERS = {"complex": _parse_complex, "float": float, "int": int, "str": str}


def _coerce(name, kind, text):
    try:
        value = _PARSERS[kind](text.strip())
    except ValueError:
        raise ConfigError(f"bad value for {name}: {text!r}") from None
    if kind in ("float", "complex") and not np.isfinite(complex(value)):
        raise ConfigError(f"{name} must be finite")
    return value


def read_config_file(path) -> dict:
    pairs = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, value = line.split("=", 1)
            pairs[key.strip().replace("-", "_")] = value.strip()
    return pairs


def build_config(pairs: dict) -> ExperimentConfig:
    kinds = {f.name: f.type for f in dataclasses.fields(ExperimentConfig)}
    values = {}
    for key, text in pairs.items():
        if key not in kinds:
            raise ConfigError(f"unknown key {key!r}")
        values[key] = _coerce(key, kinds[key], str(text))
    return ExperimentConfig(**values).validate()


def parse_grid(text: str) -> list:
    """``start:stop[:count]`` (count defaults to 50), a comma list, or one value."""
    text = text.strip()
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) not in (2, 3):
                raise ValueError
            count = int(parts[2]) if len(parts) == 3 else 50
            if count < 1:
                raise ValueError
            return [float(x) for x in np.linspace(float(parts[0]), float(parts[1]), count)]
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"bad grid {text!r}") from None
    if not vals or not all(math.isfinite(v) for v in vals):
        raise ConfigError(f"bad grid {text!r}")
    return vals
