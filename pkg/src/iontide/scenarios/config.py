"""INI scenario configuration with unit-suffixed values.

A config file has one section per concern::

    [scenario]
    name = fig6
    seed = 0

    [trap]
    f_z = 1MHz
    L4 = -120um

    [grid]
    preset = desk

Every scenario starts from built-in defaults; the file only overrides
keys.  Numbers carry explicit units and are parsed by
:func:`iontide.units.parse_quantity`.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..physcore import IonSpecies, species_preset
from ..units import UnitError, parse_quantity


class ConfigError(ValueError):
    """Invalid or inconsistent scenario configuration."""


# Defaults per scenario.  Transport lengths at desk scale are the full-scale
# values multiplied by ``[grid] scale``; dimensionless groups like z0/L4 are
# kept fixed.
DEFAULTS: dict[str, dict[str, dict[str, str]]] = {
    "fig6": {
        "trap": {"f_z": "1MHz", "L4": "-120um", "L3_end": "140um", "f_z_check": "0.5MHz"},
        "protocol": {"z0": "50um"},
        "grid": {"preset": "desk"},
        "sweep": {"parameter": "inv_L4", "start": "-0.014 1/um", "stop": "0.014 1/um", "samples": "25"},
    },
    "fig7": {
        "trap": {"f_z": "1MHz", "L4": "-120um"},
        "protocol": {"z0": "50um"},
        "grid": {"preset": "desk"},
        "sweep": {"parameter": "f_end", "start": "1MHz", "stop": "3MHz", "samples": "9"},
    },
    "fig9": {
        "trap": {"f_z": "1MHz"},
        "protocol": {"z0": "50um", "tau": "5ns"},
        "sweep": {"parameter": "tau_c", "start": "0.1ns", "stop": "20ns", "samples": "200"},
    },
    "squeeze": {
        "trap": {"f_z": "1.2MHz", "voltage_ratio": "0.1", "f_anharmonic": "1MHz", "L4": "-120um"},
        "protocol": {"cycles": "3"},
        "noise": {"heating_rate": "10 quanta/s", "squeezing": "-20dB", "realizations": "10000"},
        "lifetime": {"threshold": "0.5", "points": "4096", "span_widths": "80", "dt_periods": "0.2", "t_max": "20ms"},
    },
    "kick": {
        "trap": {"f_z": "1MHz"},
        "grid": {"preset": "desk"},
        "sweep": {"parameter": "offset", "start": "0um", "stop": "50um", "samples": "6"},
        "kick": {"targets": "20meV, 25meV"},
    },
    "micromotion": {
        "trap": {"f_z": "1MHz", "drive": "100MHz", "c2": "8e-6 V/m^2", "d2": "4 V/m^2", "C0": "100um"},
        "sweep": {"parameter": "d2", "start": "1 V/m^2", "stop": "8 V/m^2", "samples": "8"},
    },
}

# Grid presets: desk scale shrinks the transport geometry so one propagation
# takes about a second; full scale reproduces the reference resolution.
GRID_PRESETS = {
    "desk": {"scale": "0.02", "points": "16384", "margin": "0.6", "dt": "200ps"},
    "full": {"scale": "1", "points": "16777216", "margin": "0.34", "dt": "360ps"},
}

SCENARIO_NAMES = tuple(DEFAULTS)


@dataclass(frozen=True)
class SweepAxis:
    parameter: str
    start: float
    stop: float
    samples: int

    def __post_init__(self):
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ConfigError("sweep range must be finite")
        if self.samples < 1:
            raise ConfigError("sweep needs at least one sample")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.samples)


_SWEEP_UNITS = {"inv_L4": "1/m", "f_end": "Hz", "tau_c": "s", "offset": "m", "d2": "V/m^2"}


@dataclass
class ScenarioConfig:
    name: str
    sections: dict[str, dict[str, str]]
    out_dir: Path = Path("out")
    slow: bool = False
    seed: int = 0
    jobs: int = 1
    source: str | None = None

    def has(self, section: str, key: str) -> bool:
        return key in self.sections.get(section, {})

    def text(self, section: str, key: str) -> str:
        try:
            return self.sections[section][key]
        except KeyError:
            raise ConfigError(f"missing [{section}] {key}") from None

    def quantity(self, section: str, key: str, unit: str | None = None) -> float:
        raw = self.text(section, key)
        try:
            value = parse_quantity(raw, unit)
        except UnitError as exc:
            raise ConfigError(f"[{section}] {key}: {exc}") from None
        return value

    def integer(self, section: str, key: str) -> int:
        raw = self.text(section, key)
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"[{section}] {key}: expected an integer, got {raw!r}") from None

    def species(self) -> IonSpecies:
        sec = self.sections.get("species", {})
        if "mass" in sec:
            charge = self.quantity("species", "charge") if "charge" in sec else parse_quantity("1e")
            return IonSpecies(self.quantity("species", "mass"), charge, sec.get("label", "custom"))
        try:
            return species_preset(sec.get("name", "Ca40"))
        except KeyError as exc:
            raise ConfigError(str(exc)) from None

    def grid_preset(self) -> str:
        return self.sections.get("grid", {}).get("preset", "desk")

    def sweep(self) -> SweepAxis | None:
        sec = self.sections.get("sweep")
        if not sec:
            return None
        param = sec.get("parameter", "")
        if param not in _SWEEP_UNITS:
            raise ConfigError(f"unknown sweep parameter {param!r}")
        unit = _SWEEP_UNITS[param]
        return SweepAxis(param, self.quantity("sweep", "start", unit), self.quantity("sweep", "stop", unit), self.integer("sweep", "samples"))

    def echo(self) -> dict[str, str]:
        """All raw configuration values, flattened to ``section.key``."""
        return {f"{s}.{k}": v for s, keys in sorted(self.sections.items()) for k, v in sorted(keys.items())}


def _merge(name: str, overrides: dict[str, dict[str, str]]) -> dict[str, dict[str, str]]:
    merged = {s: dict(keys) for s, keys in DEFAULTS[name].items()}
    for section, keys in overrides.items():
        merged.setdefault(section, {}).update(keys)
    preset = merged.get("grid", {}).get("preset")
    if preset is not None:
        if preset not in GRID_PRESETS:
            raise ConfigError(f"unknown grid preset {preset!r}; known: {sorted(GRID_PRESETS)}")
        grid = dict(GRID_PRESETS[preset])
        grid.update(merged["grid"])
        merged["grid"] = grid
    return merged


def build_config(name: str, overrides: dict[str, dict[str, str]] | None = None, **kwargs) -> ScenarioConfig:
    if name not in DEFAULTS:
        raise ConfigError(f"unknown scenario {name!r}; known: {', '.join(SCENARIO_NAMES)}")
    overrides = {s: dict(k) for s, k in (overrides or {}).items()}
    scen = overrides.pop("scenario", {})
    cfg = ScenarioConfig(name, _merge(name, overrides), **kwargs)
    if "seed" in scen:
        cfg.seed = int(scen["seed"])
    if "out" in scen:
        cfg.out_dir = Path(scen["out"])
    if scen.get("slow", "").lower() in ("1", "true", "yes"):
        cfg.slow = True
    cfg.sweep()  # validate early
    return cfg


def load_config(path: str | Path | None, name: str | None = None, **kwargs) -> ScenarioConfig:
    """Read an INI file (or only defaults when ``path`` is None) for scenario ``name``.

    The scenario name comes from ``[scenario] name`` unless given explicitly;
    when both are present they must agree.
    """
    overrides: dict[str, dict[str, str]] = {}
    if path is not None:
        parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
        parser.optionxform = str  # keep L3/L4 case
        try:
            with open(path) as fh:
                parser.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        overrides = {s: dict(parser.items(s)) for s in parser.sections()}
    file_name = overrides.get("scenario", {}).get("name")
    if name and file_name and name != file_name:
        raise ConfigError(f"config is for scenario {file_name!r}, not {name!r}")
    name = name or file_name
    if not name:
        raise ConfigError("no scenario name given")
    cfg = build_config(name, overrides, **kwargs)
    cfg.source = None if path is None else str(path)
    return cfg
