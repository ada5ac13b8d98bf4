"""Flat ``key = value`` experiment configuration.

Blank lines and ``#`` comments are ignored. Every key must be known; list
values are comma separated.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path as FsPath

from ..process import AlphaStable, Gaussian, InnovationLaw, ProcessSpec, build_spec

__all__ = ["ConfigError", "ExperimentConfig", "parse_config", "load_config"]

EXPERIMENTS = ("rv_coverage", "ecf_coverage", "custom")


class ConfigError(ValueError):
    """Malformed or inconsistent configuration."""


def _int_list(v: str) -> tuple[int, ...]:
    return tuple(int(x) for x in v.split(",") if x.strip())


def _float_list(v: str) -> tuple[float, ...]:
    return tuple(float(x) for x in v.split(",") if x.strip())


def _bool(v: str) -> bool:
    low = v.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


def _opt_float(v: str):
    return None if v.strip().lower() in ("", "none") else float(v)


@dataclass
class ExperimentConfig:
    experiment: str = "rv_coverage"
    # process
    process: str | None = None
    innovation: str | None = None
    gauss_mean: float = 0.0
    gauss_variance: float = 0.8
    stable_alpha: float = 1.5
    stable_beta: float = 0.0
    stable_gamma: float = 0.5
    stable_mu: float = 0.0
    ma_coef: float = 0.5
    smile_a: float = 0.32
    smile_c: float = 0.04
    ar_amp: float = 0.9
    ar_coef: float = 0.5
    iid_scale: float = 1.0
    # design grid
    T_list: tuple[int, ...] = ()
    L_list: tuple[int, ...] = ()
    TD_list: tuple[int, ...] = ()
    D_list: tuple[float, ...] = ()
    level: float | None = None
    N: int = 200
    B: int = 200
    master_seed: int = 1
    threads: int = 1
    output_dir: str = "out"
    emit_plots: bool = True
    record_timing: bool = False
    # ECF / custom statistic
    ecf_s: float = 6.0
    ecf_u: float = 0.4
    bandwidth_exponent: float = 0.4
    bandwidth: float | None = None
    kernel: str = "epanechnikov"
    family: str = "square"
    family_s: float = 0.0
    weights: str = "unit"
    root_t_scaled: bool = True
    delta: float = 0.4
    T: int | None = None

    # class attribute (unannotated), not a dataclass field
    _parsers = {
        "experiment": str, "process": str, "innovation": str,
        "gauss_mean": float, "gauss_variance": float,
        "stable_alpha": float, "stable_beta": float, "stable_gamma": float, "stable_mu": float,
        "ma_coef": float, "smile_a": float, "smile_c": float,
        "ar_amp": float, "ar_coef": float, "iid_scale": float,
        "T_list": _int_list, "L_list": _int_list, "TD_list": _int_list, "D_list": _float_list,
        "level": float, "N": int, "B": int, "master_seed": int, "threads": int,
        "output_dir": str, "emit_plots": _bool, "record_timing": _bool,
        "ecf_s": float, "ecf_u": float, "bandwidth_exponent": float, "bandwidth": _opt_float,
        "kernel": str, "family": str, "family_s": float, "weights": str,
        "root_t_scaled": _bool, "delta": float, "T": int,
    }

    def __post_init__(self):
        self.apply_defaults()

    def apply_defaults(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {self.experiment!r}")
        ecf = self.experiment == "ecf_coverage"
        if self.process is None:
            self.process = "sin_ar" if ecf else "sigma_smile"
        if self.innovation is None:
            self.innovation = "stable" if ecf else "gaussian"
        if not self.T_list:
            self.T_list = (2000, 5000) if ecf else (1000, 2000)
        if not self.L_list:
            self.L_list = (25,) if ecf else (2, 3, 4, 6, 8)
        if not self.TD_list and not self.D_list:
            self.TD_list = (50, 100, 200, 400) if ecf else (25, 50, 100, 200)
        if self.level is None:
            self.level = 0.95 if ecf else 0.90
        self.validate()

    def validate(self):
        if self.N < 1 or self.B < 1:
            raise ConfigError("N and B must be >= 1")
        if not 0 < self.level < 1:
            raise ConfigError("level must lie in (0, 1)")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.TD_list and self.D_list:
            raise ConfigError("give TD_list or D_list, not both")
        if self.innovation not in ("gaussian", "stable"):
            raise ConfigError("innovation must be 'gaussian' or 'stable'")
        if min(self.T_list) < 1 or min(self.L_list) < 1:
            raise ConfigError("T and L values must be positive")
        if self.weights not in ("unit", "global_root", "kernel"):
            raise ConfigError("weights must be unit, global_root or kernel")
        try:
            self.innovation_law()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError("master_seed must be a 64-bit unsigned integer")

    # -- derived objects ----------------------------------------------------

    def innovation_law(self) -> InnovationLaw:
        if self.innovation == "gaussian":
            return Gaussian(self.gauss_mean, self.gauss_variance)
        return AlphaStable(self.stable_alpha, self.stable_beta, self.stable_gamma, self.stable_mu)

    def process_spec(self) -> ProcessSpec:
        params = {
            "sigma_smile": {"ma_coef": self.ma_coef, "smile_a": self.smile_a, "smile_c": self.smile_c},
            "sin_ar": {"amp": self.ar_amp},
            "constant_ar": {"a": self.ar_coef},
            "iid": {"scale": self.iid_scale},
        }.get(self.process, {})
        try:
            return build_spec(self.process, self.innovation_law(), **params)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def td_values(self, T: int) -> tuple[int, ...]:
        if self.TD_list:
            return self.TD_list
        return tuple(int(round(T * d)) for d in self.D_list)

    def cells(self) -> list[tuple[int, int, int]]:
        return [(T, L, TD) for T in self.T_list for L in self.L_list for TD in self.td_values(T)]

    def bandwidth_for(self, T: int) -> float:
        return self.bandwidth if self.bandwidth is not None else T ** (-self.bandwidth_exponent)

    def to_text(self) -> str:
        """Canonical ``key = value`` rendering (parses back to an equal config)."""
        lines = []
        for f in dataclasses.fields(self):
            if f.name.startswith("_"):
                continue
            v = getattr(self, f.name)
            if v is None:
                v = "none"
            elif isinstance(v, tuple):
                v = ",".join(str(x) for x in v)
            elif isinstance(v, bool):
                v = "true" if v else "false"
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"


_FIELDS = {f.name for f in dataclasses.fields(ExperimentConfig) if not f.name.startswith("_")}


def parse_config(text: str, overrides: dict | None = None) -> ExperimentConfig:
    """Parse ``key = value`` text. Unknown keys and bad values raise ConfigError."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in _FIELDS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        parser = ExperimentConfig._parsers[key]
        try:
            values[key] = None if value.lower() == "none" and key in ("process", "innovation", "T") \
                else parser(value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from None
    values.update(overrides or {})
    try:
        return ExperimentConfig(**values)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path, overrides: dict | None = None) -> ExperimentConfig:
    try:
        text = FsPath(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, overrides)
