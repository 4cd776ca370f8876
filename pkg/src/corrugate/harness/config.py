"""Flat ``key = value`` experiment configuration."""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

KINDS = ("flat-band", "general-band", "thick", "rates", "curvature-check", "verify-loops")

DEFAULTS = {
    "seed": "0",
    "output": "",
    "domain.n": "3",
    "domain.d": "",
    "domain.margin": "0.1",
    "sweep.N": "8,16,32,64,128,256",
    "grid.per_oscillation": "4",
    "grid.extra": "1",
    "grid.slow": "16",
    "target.k": "1.0",
    "target.k_amplitudes": "0.0",
    "target.k_axis": "1",
    "target.epsilon": "0.1",
    "metric.phi_amplitude": "0.1",
    "metric.phi_axis": "0",
    "lift.size": "16",
    "thick.amplitude": "1.0",
    "thick.plateau": "0.35,0.65",
    "thick.margin": "0.2",
    "thick.region": "0.0,1.0",
    "thick.nu": "0.05",
    "thick.h0": "flat",
    "loops.samples": "64",
    "rates.zero_loops": "false",
    "rates.slow": "8",
    "battery.count": "50",
    "battery.dims": "2,3,4",
    "tol.band_margin": "1e-3",
    "tol.c0": "0.1",
    "tol.loops": "1e-10",
    "tol.slope_min": "-1.3",
    "tol.slope_max": "-0.7",
    "tol.specialization": "1e-9",
    "tol.split": "1e-9",
    "tol.diag": "1e-10",
    "tol.sphere": "1e-8",
    "tol.fd": "1e-6",
}

_SECTION = "experiment"


class ConfigError(ValueError):
    """Malformed or inconsistent configuration."""


@dataclass
class ExperimentConfig:
    kind: str
    values: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        unknown = sorted(set(self.values) - set(DEFAULTS))
        if unknown:
            raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")
        merged = dict(DEFAULTS)
        merged.update(self.values)
        self.values = merged
        self.validate()

    # typed access -----------------------------------------------------------
    def raw(self, key: str) -> str:
        return self.values[key]

    def get_int(self, key: str) -> int:
        try:
            return int(self.values[key])
        except ValueError as exc:
            raise ConfigError(f"{key} must be an integer") from exc

    def get_float(self, key: str) -> float:
        try:
            return float(self.values[key])
        except ValueError as exc:
            raise ConfigError(f"{key} must be a number") from exc

    def get_bool(self, key: str) -> bool:
        v = self.values[key].strip().lower()
        if v in ("1", "true", "yes", "on"):
            return True
        if v in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{key} must be a boolean")

    def get_floats(self, key: str) -> list:
        try:
            return [float(v) for v in self.values[key].split(",") if v.strip()]
        except ValueError as exc:
            raise ConfigError(f"{key} must be a comma-separated list of numbers") from exc

    def get_ints(self, key: str) -> list:
        try:
            return [int(v) for v in self.values[key].split(",") if v.strip()]
        except ValueError as exc:
            raise ConfigError(f"{key} must be a comma-separated list of integers") from exc

    @property
    def seed(self) -> int:
        s = self.get_int("seed")
        if not 0 <= s < 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        return s

    @property
    def sweep(self) -> list:
        return self.get_ints("sweep.N")

    @property
    def n(self) -> int:
        return self.get_int("domain.n")

    def validate(self) -> None:
        sweep = self.sweep
        if not sweep or any(N < 1 for N in sweep):
            raise ConfigError("sweep.N must list positive integers")
        if any(b <= a for a, b in zip(sweep, sweep[1:])):
            raise ConfigError("sweep.N must be strictly increasing")
        if self.get_int("grid.per_oscillation") < 4:
            raise ConfigError("grid.per_oscillation must be at least 4 to resolve the oscillation")
        if self.get_int("grid.extra") < 0 or self.get_int("grid.slow") < 4:
            raise ConfigError("grid.extra must be >= 0 and grid.slow >= 4")
        if self.kind != "curvature-check" and self.n < 3:
            raise ConfigError("domain.n must be at least 3")
        if self.get_float("target.epsilon") <= 0 or self.get_float("thick.nu") <= 0:
            raise ConfigError("tolerances epsilon and nu must be positive")
        self.seed

    def with_overrides(self, **kw) -> "ExperimentConfig":
        vals = {k: v for k, v in self.values.items() if DEFAULTS.get(k) != v}
        vals.update({k: str(v) for k, v in kw.items()})
        return ExperimentConfig(self.kind, vals)

    def echo(self) -> list:
        return [f"{k}={self.values[k]}" for k in sorted(self.values)]


def parse_config(text: str, kind: str) -> ExperimentConfig:
    cp = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"), delimiters=("=",))
    cp.optionxform = str
    try:
        cp.read_string(f"[{_SECTION}]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse configuration: {exc}") from exc
    vals = {k.strip(): v.strip() for k, v in cp.items(_SECTION)}
    file_kind = vals.pop("kind", None)
    if file_kind is not None and file_kind != kind:
        raise ConfigError(f"configuration is for {file_kind!r}, not {kind!r}")
    return ExperimentConfig(kind, vals)


def load_config(path, kind: str) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read configuration {path}: {exc}") from exc
    return parse_config(text, kind)
