"""Axial trap potential with cubic and quartic corrections, and time programs
of the well position for throw-catch transport.

The well is

    V(z) = 2 pi^2 m f_z^2 u^2 (1 + u/L3 + sgn(L4) u^2/L4^2),   u = z - center

where an "infinite" ``L3``/``L4`` drops its term.  During a transition the
well keeps the (f_z, L3, L4) shape of the transport well and is translated
rigidly to the programmed center ``s(t)``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import PchipInterpolator

from .constants import TWO_PI
from .physcore import IonSpecies

# Scale lengths beyond this are treated as absent terms (tables list 1e10 um).
INFINITE_LENGTH_THRESHOLD = 1.0  # m


def _normalize_length(value: float | None) -> float | None:
    if value is None:
        return None
    if value == 0:
        raise ValueError("anharmonic scale length must be non-zero (use None for infinite)")
    if not math.isfinite(value) or abs(value) > INFINITE_LENGTH_THRESHOLD:
        return None
    return float(value)


@dataclass(frozen=True)
class PotentialSpec:
    """One axial well: curvature frequency ``f_z`` (Hz), scale lengths and center (m).

    ``L3``/``L4`` of ``None`` mean the term is absent.  Values beyond
    :data:`INFINITE_LENGTH_THRESHOLD` or infinite floats are normalized to
    ``None`` on construction.
    """

    f_z: float
    L3: float | None = None
    L4: float | None = None
    center: float = 0.0

    def __post_init__(self):
        if not self.f_z > 0:
            raise ValueError(f"f_z must be positive, got {self.f_z}")
        object.__setattr__(self, "L3", _normalize_length(self.L3))
        object.__setattr__(self, "L4", _normalize_length(self.L4))

    @property
    def omega(self) -> float:
        return TWO_PI * self.f_z

    @property
    def is_harmonic(self) -> bool:
        return self.L3 is None and self.L4 is None

    def moved(self, center: float) -> "PotentialSpec":
        return replace(self, center=center)

    def harmonic(self) -> "PotentialSpec":
        return PotentialSpec(self.f_z, None, None, self.center)

    # dimensionless polynomial coefficients of u^3 and u^4 relative to u^2
    def _c3(self) -> float:
        return 0.0 if self.L3 is None else 1.0 / self.L3

    def _c4(self) -> float:
        return 0.0 if self.L4 is None else math.copysign(1.0, self.L4) / self.L4**2


def potential_value(spec: PotentialSpec, species: IonSpecies, z):
    """Potential energy (J) at position(s) ``z``."""
    u = np.asarray(z, dtype=float) - spec.center
    k = 2.0 * math.pi**2 * species.mass * spec.f_z**2
    return k * u**2 * (1.0 + spec._c3() * u + spec._c4() * u**2)


def potential_gradient(spec: PotentialSpec, species: IonSpecies, z):
    """dV/dz in N."""
    u = np.asarray(z, dtype=float) - spec.center
    k = 2.0 * math.pi**2 * species.mass * spec.f_z**2
    return k * (2.0 * u + 3.0 * spec._c3() * u**2 + 4.0 * spec._c4() * u**3)


def potential_curvature(spec: PotentialSpec, species: IonSpecies, z):
    """d^2V/dz^2 including the cubic term."""
    u = np.asarray(z, dtype=float) - spec.center
    k = 2.0 * math.pi**2 * species.mass * spec.f_z**2
    return k * (2.0 + 6.0 * spec._c3() * u + 12.0 * spec._c4() * u**2)


def local_frequency_squared(spec: PotentialSpec, z):
    """omega^2(z) = omega^2(0) (1 + 6 sgn(L4) z^2 / L4^2), measured from the center.

    The cubic term is ignored, as in the quartic-only curvature formula.
    A negative return means the well is locally anti-confining.
    """
    u = np.asarray(z, dtype=float) - spec.center
    return spec.omega**2 * (1.0 + 6.0 * spec._c4() * u**2)


def local_frequency(spec: PotentialSpec, z):
    """Local angular frequency; NaN where the curvature is negative."""
    w2 = np.asarray(local_frequency_squared(spec, z))
    with np.errstate(invalid="ignore"):
        return np.where(w2 >= 0, np.sqrt(np.abs(w2)), np.nan)


def anticonfining_threshold(spec: PotentialSpec) -> tuple[float, float]:
    """Distances from the center where curvature (z1) and force (z2) change sign.

    Returns ``(inf, inf)`` for wells that are always confining (quartic term
    absent or positive).
    """
    if spec.L4 is None or spec.L4 > 0:
        return math.inf, math.inf
    L = abs(spec.L4)
    return L / math.sqrt(6.0), L / math.sqrt(2.0)


# ---------------------------------------------------------------------------
# transitions and protocols


TRANSITION_KINDS = ("instantaneous", "linear", "sinusoidal", "sampled")


@dataclass(frozen=True)
class TransitionShape:
    """Normalized displacement profile ``f(t)`` rising from 0 to 1 over ``duration``.

    For ``sampled`` shapes ``times`` starts at 0 and ``fractions`` holds the
    normalized progress at each time; ``anchor`` optionally records the
    absolute start/end positions the samples were given in, which the
    protocol checks against its wells.
    """

    kind: str
    duration: float = 0.0
    times: tuple[float, ...] | None = None
    fractions: tuple[float, ...] | None = None
    anchor: tuple[float, float] | None = None
    _interp: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in TRANSITION_KINDS:
            raise ValueError(f"unknown transition kind {self.kind!r}")
        if self.duration < 0:
            raise ValueError("duration must be non-negative")
        if (self.kind == "instantaneous") != (self.duration == 0):
            raise ValueError("instantaneous transitions (and only those) have zero duration")
        if self.kind == "sampled":
            t = np.asarray(self.times, dtype=float)
            f = np.asarray(self.fractions, dtype=float)
            if t.ndim != 1 or t.size < 2 or t.shape != f.shape:
                raise ValueError("sampled shape needs matching 1-D times and fractions")
            if np.any(np.diff(t) <= 0):
                raise ValueError("sampled times must be strictly increasing")
            if t[0] != 0.0 or not math.isclose(t[-1], self.duration, rel_tol=1e-12):
                raise ValueError("sampled times must run from 0 to the duration")
            if abs(f[0]) > 1e-12 or abs(f[-1] - 1.0) > 1e-12:
                raise ValueError("sampled fractions must run from 0 to 1")
            object.__setattr__(self, "_interp", PchipInterpolator(t, f, extrapolate=False))

    @classmethod
    def instantaneous(cls) -> "TransitionShape":
        return cls("instantaneous", 0.0)

    @classmethod
    def linear(cls, duration: float) -> "TransitionShape":
        return cls("linear", duration)

    @classmethod
    def sinusoidal(cls, duration: float) -> "TransitionShape":
        return cls("sinusoidal", duration)

    @classmethod
    def sampled(cls, times, positions) -> "TransitionShape":
        """Build from absolute center positions; progress is normalized internally."""
        t = np.asarray(times, dtype=float)
        p = np.asarray(positions, dtype=float)
        if p.size < 2 or p[-1] == p[0]:
            raise ValueError("sampled positions must have distinct endpoints")
        frac = (p - p[0]) / (p[-1] - p[0])
        frac[0], frac[-1] = 0.0, 1.0
        return cls(
            "sampled",
            float(t[-1] - t[0]),
            tuple(t - t[0]),
            tuple(frac),
            (float(p[0]), float(p[-1])),
        )

    @classmethod
    def from_csv(cls, path: str | Path) -> "TransitionShape":
        """Read a two-column CSV (time s, position m); '#' lines and a text header are skipped."""
        rows = []
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].lstrip().startswith("#"):
                    continue
                try:
                    rows.append((float(row[0]), float(row[1])))
                except ValueError:
                    continue
        if len(rows) < 2:
            raise ValueError(f"{path}: need at least two numeric rows")
        t, p = zip(*rows)
        return cls.sampled(t, p)

    def fraction(self, t):
        """Progress in [0, 1] at time ``t`` after the start of the transition."""
        t = np.clip(np.asarray(t, dtype=float), 0.0, self.duration)
        if self.kind == "instantaneous":
            return np.ones_like(t)
        x = t / self.duration
        if self.kind == "linear":
            return x
        if self.kind == "sinusoidal":
            return 0.5 * (1.0 - np.cos(np.pi * x))
        return self._interp(t)

    def rate(self, t):
        """d(fraction)/dt inside the transition (zero outside)."""
        t = np.asarray(t, dtype=float)
        inside = (t >= 0) & (t <= self.duration)
        if self.kind == "instantaneous":
            return np.zeros_like(t)
        if self.kind == "linear":
            out = np.full_like(t, 1.0 / self.duration)
        elif self.kind == "sinusoidal":
            out = 0.5 * np.pi / self.duration * np.sin(np.pi * t / self.duration)
        else:
            out = self._interp.derivative()(np.clip(t, 0.0, self.duration))
        return np.where(inside, out, 0.0)

    def knots(self) -> np.ndarray:
        """Breakpoints inside the transition where the derivative may be non-smooth."""
        if self.kind == "sampled":
            return np.asarray(self.times)
        return np.array([0.0, self.duration])


class ProtocolTimeError(ValueError):
    """Time outside the protocol's span."""


@dataclass(frozen=True)
class TransportProtocol:
    """Throw-catch program.

    The throw ramp runs over ``[0, throw.duration]``; the catch ramp starts at
    ``hold`` (the time ``T`` measured from the start of the throw) and ends at
    ``T + catch.duration``.  This follows the finite-switching analysis, in
    which the catch of a half-period transport starts at ``T = pi/omega``.
    """

    initial_well: PotentialSpec
    transport_well: PotentialSpec
    final_well: PotentialSpec
    throw: TransitionShape
    hold: float
    catch: TransitionShape

    def __post_init__(self):
        if self.hold < self.throw.duration:
            raise ValueError("catch start T must not precede the end of the throw")
        for shape, start, end in (
            (self.throw, self.initial_well.center, self.transport_well.center),
            (self.catch, self.transport_well.center, self.final_well.center),
        ):
            if shape.anchor is not None:
                scale = max(abs(start), abs(end), 1e-12)
                if abs(shape.anchor[0] - start) > 1e-9 * scale or abs(shape.anchor[1] - end) > 1e-9 * scale:
                    raise ValueError(
                        f"sampled shape endpoints {shape.anchor} do not match the wells ({start}, {end})"
                    )

    @property
    def duration(self) -> float:
        return self.hold + self.catch.duration

    @property
    def z0(self) -> float:
        return self.transport_well.center - self.initial_well.center

    def _check_time(self, t: float) -> None:
        if t < 0 or t > self.duration * (1 + 1e-12) + 1e-300:
            raise ProtocolTimeError(f"t={t} outside [0, {self.duration}]")

    def center(self, t: float) -> float:
        self._check_time(t)
        s0, s1, s2 = self.initial_well.center, self.transport_well.center, self.final_well.center
        tau = self.throw.duration
        if t < tau:
            return float(s0 + (s1 - s0) * self.throw.fraction(t))
        if t < self.hold:
            return s1
        if self.catch.duration == 0:
            return s2
        return float(s1 + (s2 - s1) * self.catch.fraction(t - self.hold))

    def velocity(self, t):
        """ds/dt; zero on plateaus and at instantaneous switches."""
        t = np.asarray(t, dtype=float)
        s0, s1, s2 = self.initial_well.center, self.transport_well.center, self.final_well.center
        v = np.zeros_like(t)
        if self.throw.duration > 0:
            v = v + (s1 - s0) * self.throw.rate(t)
        if self.catch.duration > 0:
            v = v + (s2 - s1) * self.catch.rate(t - self.hold)
        return v

    def well_at(self, t: float) -> PotentialSpec:
        """Well acting at time ``t`` (after any switch occurring exactly at ``t``)."""
        self._check_time(t)
        tau, T, tc = self.throw.duration, self.hold, self.catch.duration
        if t < tau:
            return self.transport_well.moved(self.center(t))
        if t < T:
            return self.transport_well
        if tc > 0 and t < T + tc:
            return self.transport_well.moved(self.center(t))
        return self.final_well

    def segments(self):
        """Time pieces as ``(t_start, t_end, static_well_or_None)``.

        ``None`` marks a moving-well piece where :meth:`well_at` must be
        evaluated per step.  Zero-length pieces are omitted.
        """
        tau, T, tc = self.throw.duration, self.hold, self.catch.duration
        pieces = []
        if tau > 0:
            pieces.append((0.0, tau, None))
        if T > tau:
            pieces.append((tau, T, self.transport_well))
        if tc > 0:
            pieces.append((T, T + tc, None))
        return pieces


def protocol_center(protocol: TransportProtocol, t: float) -> float:
    return protocol.center(t)


def throw_catch_protocol(
    z0: float,
    transport: PotentialSpec,
    hold: float,
    throw: TransitionShape | None = None,
    catch: TransitionShape | None = None,
    end_well: PotentialSpec | None = None,
    final_center: float | None = None,
) -> TransportProtocol:
    """Symmetric transport from ``-z0`` to ``final_center`` (default ``+z0``) through ``transport``."""
    end = end_well or transport.harmonic()
    return TransportProtocol(
        initial_well=end.moved(transport.center - z0),
        transport_well=transport,
        final_well=end.moved(transport.center + (z0 if final_center is None else final_center)),
        throw=throw or TransitionShape.instantaneous(),
        hold=hold,
        catch=catch or TransitionShape.instantaneous(),
    )


def classical_turning_point(
    well: PotentialSpec, species: IonSpecies, start: float, max_periods: float = 50.0
) -> tuple[float, float]:
    """Time and position at which a particle released at rest at ``start`` next stops.

    For a symmetric well this is the classical half period at that energy.
    Raises ``ValueError`` if the particle does not turn within
    ``max_periods`` harmonic periods (e.g. released beyond the barrier of an
    anti-confining well).
    """
    omega = well.omega
    scale = abs(start - well.center)
    if scale == 0:
        return math.pi / omega, start
    c3 = well._c3() * scale
    c4 = well._c4() * scale**2

    # u in units of the release distance, time in 1/omega
    def rhs(_t, y):
        u, v = y
        return [v, -0.5 * (2.0 * u + 3.0 * c3 * u**2 + 4.0 * c4 * u**3)]

    def stopped(_t, y):
        return y[1]

    u0 = math.copysign(1.0, start - well.center)
    stopped.terminal = True
    stopped.direction = u0  # velocity crosses zero back toward the release side
    sol = solve_ivp(
        rhs,
        (0.0, TWO_PI * max_periods),
        [u0, 0.0],
        method="DOP853",
        events=stopped,
        rtol=1e-12,
        atol=1e-14,
        first_step=1e-6,
    )
    if not sol.t_events[0].size:
        raise ValueError("particle does not return within the integration window")
    # skip the spurious event at t=0
    t_ev = sol.t_events[0]
    y_ev = sol.y_events[0]
    idx = np.argmax(t_ev > 1e-6) if np.any(t_ev > 1e-6) else None
    if idx is None:
        raise ValueError("particle does not return within the integration window")
    return float(t_ev[idx] / omega), float(well.center + y_ev[idx][0] * scale)
