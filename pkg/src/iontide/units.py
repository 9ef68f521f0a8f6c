"""Parsing of SI quantities written with explicit unit suffixes, e.g. ``"50um"``."""

from __future__ import annotations

import math
import re

from .constants import ATOMIC_MASS_UNIT, ELEMENTARY_CHARGE, EV

_PREFIXES = {
    "": 1.0,
    "f": 1e-15,
    "p": 1e-12,
    "n": 1e-9,
    "u": 1e-6,
    "µ": 1e-6,
    "m": 1e-3,
    "k": 1e3,
    "M": 1e6,
    "G": 1e9,
}

# base unit -> factor to SI
_UNITS = {
    "m": 1.0,
    "s": 1.0,
    "Hz": 1.0,
    "V": 1.0,
    "V/m^2": 1.0,
    "V/m2": 1.0,
    "eV": EV,
    "kg": 1.0,
    "u": ATOMIC_MASS_UNIT,
    "e": ELEMENTARY_CHARGE,
    "C": 1.0,
    "rad/s": 1.0,
    "dB": 1.0,
    "quanta/s": 1.0,
    "1/m": 1.0,
    "1/um": 1e6,
}

# suffixes that are spelled differently from their base unit
_CANONICAL = {"1/um": "1/m", "V/m2": "V/m^2"}

_NUMBER = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(.*?)\s*$")


class UnitError(ValueError):
    """A quantity string could not be parsed or has the wrong dimension."""


def _unit_factor(suffix: str) -> tuple[float, str]:
    if suffix in _UNITS:
        return _UNITS[suffix], _CANONICAL.get(suffix, suffix)
    # "um" is micro-metre but "u" alone is atomic mass; try the longest base first
    for base in sorted(_UNITS, key=len, reverse=True):
        if suffix.endswith(base):
            prefix = suffix[: -len(base)]
            if prefix in _PREFIXES:
                return _PREFIXES[prefix] * _UNITS[base], _CANONICAL.get(base, base)
    raise UnitError(f"unknown unit suffix {suffix!r}")


def parse_quantity(text: str | float | int, expect: str | None = None) -> float:
    """Parse ``"<number><unit>"`` into an SI float.

    ``expect`` names the base unit the caller requires (``"m"``, ``"s"``,
    ``"Hz"`` ...); a mismatching suffix raises :class:`UnitError`.  A bare
    number is accepted as already being in SI.  ``"inf"`` and ``"-inf"``
    are passed through.
    """
    if isinstance(text, (int, float)):
        return float(text)
    s = text.strip()
    if s.lower() in ("inf", "+inf", "infinite", "infinity"):
        return math.inf
    if s.lower() in ("-inf", "-infinity"):
        return -math.inf
    match = _NUMBER.match(s)
    if not match:
        raise UnitError(f"cannot parse quantity {text!r}")
    value = float(match.group(1))
    suffix = match.group(2)
    if not suffix:
        return value
    factor, base = _unit_factor(suffix)
    if expect is not None and base != expect:
        raise UnitError(f"{text!r}: expected unit {expect!r}, got {base!r}")
    return value * factor
