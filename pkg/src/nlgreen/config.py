"""Flat ``key = value`` experiment configuration with INI sections."""

from __future__ import annotations

import configparser
import io
import os
from dataclasses import dataclass, fields

from .analysis import SOURCES, Settings
from .expansion import MAX_TERMS

MODELS = ("kdv", "quadratic4", "boussinesq")
SOURCE_KINDS = tuple(sorted(SOURCES)) + ("delta", "custom")

# field name -> (section, key)
_LAYOUT = {
    "model": ("model", "name"),
    "c": ("model", "c"),
    "c0": ("model", "c0"),
    "v": ("model", "v"),
    "modulus": ("model", "modulus"),
    "phi": ("model", "phi"),
    "s": ("model", "s"),
    "kernel": ("model", "kernel"),
    "source": ("source", "kind"),
    "source_path": ("source", "path"),
    "N": ("expansion", "N"),
    "t0": ("grid", "t0"),
    "dt": ("grid", "dt"),
    "T": ("grid", "T"),
    "epsilon": ("mollifier", "epsilon"),
    "window_start": ("fit", "window_start"),
    "window_end": ("fit", "window_end"),
    "plot_step": ("analysis", "plot_step"),
    "method": ("solver", "method"),
    "sweep_sources": ("sweep", "sources"),
    "out": ("output", "dir"),
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    model: str = "kdv"
    c: float = 1.0
    c0: float = 0.0
    v: float = 1.0
    modulus: float = 0.5
    phi: float = 0.0
    s: float = 1.0
    kernel: str = "auto"
    source: str = "exp"
    source_path: str = ""
    N: tuple = (1,)
    t0: float = 0.0
    dt: float = 1e-3
    T: float = 5.0
    epsilon: float = 0.01
    window_start: float | None = None
    window_end: float | None = None
    plot_step: float | None = None
    method: str = "rk4"
    sweep_sources: tuple = ("exp", "sin", "log1p", "linear")
    out: str = "out"

    def validate(self) -> "ExperimentConfig":
        if self.model not in MODELS:
            raise ConfigError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.source not in SOURCE_KINDS:
            raise ConfigError(f"source must be one of {SOURCE_KINDS}, got {self.source!r}")
        if self.source == "custom" and not os.path.exists(self.source_path):
            raise ConfigError(f"custom source table {self.source_path!r} does not exist")
        if self.t0 != 0.0:
            raise ConfigError("grids start at the origin (t0 = 0)")
        if not (self.dt > 0 and self.T > self.t0):
            raise ConfigError("need dt > 0 and T > t0")
        if self.epsilon < 4 * self.dt:
            raise ConfigError(f"mollifier epsilon={self.epsilon} must be at least 4*dt={4 * self.dt}")
        if not self.N or any(n < 0 or n > MAX_TERMS for n in self.N):
            raise ConfigError(f"expansion orders must lie in 0..{MAX_TERMS}")
        if (self.window_start is None) != (self.window_end is None):
            raise ConfigError("give both fit window ends or neither")
        if self.kernel not in ("auto", "closed_form", "homogeneous"):
            raise ConfigError(f"unknown kernel kind {self.kernel!r}")
        return self

    @property
    def fit_window(self):
        if self.window_start is None:
            return None
        return (self.window_start, self.window_end)

    @property
    def settings(self) -> Settings:
        return Settings(T=self.T, dt=self.dt, epsilon=self.epsilon, method=self.method,
                        fit_window=self.fit_window, plot_step=self.plot_step)

    def model_kwargs(self) -> dict:
        if self.model == "kdv":
            return {"c": self.c, "c0": self.c0}
        if self.model == "quadratic4":
            return {"v": self.v}
        return {"v": self.v, "modulus": self.modulus, "phi": self.phi}


def _format(value) -> str:
    if value is None:
        return ""
    if isinstance(value, tuple):
        return ", ".join(_format(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit(config: ExperimentConfig) -> str:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    for f in fields(config):
        section, key = _LAYOUT[f.name]
        if not parser.has_section(section):
            parser.add_section(section)
        parser.set(section, key, _format(getattr(config, f.name)))
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()


def parse(text: str) -> ExperimentConfig:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    parser.read_string(text)
    defaults = ExperimentConfig()
    kwargs = {}
    known = {(sec, key) for sec, key in _LAYOUT.values()}
    for sec in parser.sections():
        for key in parser[sec]:
            if (sec, key) not in known:
                raise ConfigError(f"unknown config key [{sec}] {key}")
    for f in fields(ExperimentConfig):
        section, key = _LAYOUT[f.name]
        if not parser.has_option(section, key):
            continue
        raw = parser.get(section, key).strip()
        default = getattr(defaults, f.name)
        try:
            kwargs[f.name] = _convert(f.name, raw, default)
        except ValueError as exc:
            raise ConfigError(f"bad value for [{section}] {key}: {raw!r}") from exc
    return ExperimentConfig(**kwargs)


def _convert(name: str, raw: str, default):
    if name in ("window_start", "window_end", "plot_step"):
        return None if raw == "" else float(raw)
    if name == "N":
        return tuple(int(x) for x in raw.replace(",", " ").split())
    if name == "sweep_sources":
        return tuple(x.strip() for x in raw.split(",") if x.strip())
    if isinstance(default, float):
        return float(raw)
    return raw


def load(path) -> ExperimentConfig:
    with open(path) as fh:
        return parse(fh.read())
