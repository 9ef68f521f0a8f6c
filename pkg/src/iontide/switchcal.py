"""Error budgets for throw-catch transport: switch timing jitter and finite ramp times.

A harmonic well of angular frequency ``omega`` whose center follows ``s(t)``
leaves an ion that started at rest in its ground state in the coherent state

    alpha(t) = -sqrt(m omega / 2 hbar) exp(-i omega t) * integral s'(t') exp(i omega t') dt'

relative to the instantaneous center.  ``sqrt(m omega/2 hbar) = 1/(2 a0)``, so
a static offset ``z`` corresponds to ``|alpha| = z/(2 a0)`` in the
displacement-operator convention.  The timing budget instead uses
``alpha0 = z0/a0`` as returned by :func:`iontide.physcore.coherent_amplitude`.

For linear and sinusoidal ramps both the exact integrals and their
small-``omega tau`` expansions are available; the exact forms are used for
all results, the expansions for cross-checks only.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .constants import HBAR
from .physcore import IonSpecies
from .potential import TransportProtocol

SMALL_PHASE = 0.3  # warn when omega*tau (or omega*dt) exceeds this in an expansion


class SingularityError(ArithmeticError):
    """A closed form is evaluated at a removable singularity (omega*tau = pi)."""


@dataclass(frozen=True)
class TimingBudget:
    alpha0: float
    omega: float
    dt: float
    overlap: float

    def __post_init__(self):
        if not 0.0 <= self.overlap <= 1.0:
            raise ValueError("overlap must lie in [0, 1]")


@dataclass(frozen=True)
class ResidualExcitation:
    """Coherent amplitude left in the catch well and the hold time it was evaluated at."""

    alpha: complex
    T_min: float
    f: complex  # shape factor (exact form)
    f_approx: complex | None = None  # small-phase expansion of ``f``

    @property
    def overlap(self) -> float:
        """Ground-state population of the catch well, ``exp(-|alpha|^2)``."""
        return math.exp(-abs(self.alpha) ** 2)


# ---------------------------------------------------------------------------
# timing


def timing_overlap(alpha0: float, omega: float, dt: float) -> float:
    """Ground-state overlap ``exp(-(alpha0 omega dt)^2)`` after a catch late by ``dt``."""
    x = omega * dt
    if abs(x) > SMALL_PHASE:
        warnings.warn(f"omega*dt = {x:.3g} is outside the small-phase regime", RuntimeWarning, stacklevel=2)
    return math.exp(-((alpha0 * x) ** 2))


def timing_overlap_exact(alpha0: float, omega: float, dt: float) -> float:
    """``|<a|a e^{-i omega dt}>|^2 = exp(-|a - a e^{-i omega dt}|^2)`` with ``a = alpha0``."""
    return math.exp(-abs(alpha0 * (1.0 - cmath.exp(-1j * omega * dt))) ** 2)


def timing_tolerance(alpha0: float, omega: float, overlap: float) -> float:
    """Largest timing error ``dt = sqrt(-ln P)/(|alpha0| omega)`` keeping the overlap at ``P``."""
    if not 0.0 < overlap < 1.0:
        raise ValueError(f"overlap must lie in (0, 1), got {overlap}")
    return math.sqrt(-math.log(overlap)) / (abs(alpha0) * omega)


def timing_budget(alpha0: float, omega: float, overlap: float) -> TimingBudget:
    return TimingBudget(alpha0, omega, timing_tolerance(alpha0, omega, overlap), overlap)


# ---------------------------------------------------------------------------
# general ramps by quadrature


def alpha_prefactor(species: IonSpecies, omega: float) -> float:
    """``sqrt(m omega / 2 hbar)`` in 1/m."""
    return math.sqrt(species.mass * omega / (2.0 * HBAR))


def _ramp_integral(protocol: TransportProtocol, t0: float, shape, omega: float, jump: float, epsrel: float) -> complex:
    """``integral s'(t) e^{i omega t}`` over one ramp starting at ``t0`` (m)."""
    if jump == 0.0:
        return 0.0
    if shape.duration == 0:
        return jump * cmath.exp(1j * omega * t0)
    knots = t0 + shape.knots()
    scale = abs(jump) / shape.duration

    def integrand(t):
        v = float(protocol.velocity(t))
        if not math.isfinite(v):
            raise ValueError(f"non-finite ramp velocity at t={t}")
        return v / scale * cmath.exp(1j * omega * t)

    total = 0.0
    for a, b in zip(knots[:-1], knots[1:]):
        val, _ = integrate.quad(integrand, a, b, complex_func=True, epsrel=epsrel, epsabs=0.0, limit=200)
        total += val
    return total * scale


def residual_alpha_general(
    protocol: TransportProtocol, species: IonSpecies, omega: float | None = None, epsrel: float = 1e-12
) -> complex:
    """Coherent amplitude relative to the final well after ``protocol``, by adaptive quadrature.

    The wells are treated as one harmonic well of angular frequency
    ``omega`` (default: the transport well's) translated along ``s(t)``.
    Instantaneous switches contribute their jump times the phase at the
    switch.
    """
    omega = protocol.transport_well.omega if omega is None else omega
    s0, s1, s2 = (protocol.initial_well.center, protocol.transport_well.center, protocol.final_well.center)
    total = _ramp_integral(protocol, 0.0, protocol.throw, omega, s1 - s0, epsrel)
    total += _ramp_integral(protocol, protocol.hold, protocol.catch, omega, s2 - s1, epsrel)
    t_end = protocol.duration
    return -alpha_prefactor(species, omega) * cmath.exp(-1j * omega * t_end) * total


# ---------------------------------------------------------------------------
# linear ramps


def _phase_ratio(x: float) -> complex:
    """``(e^{ix} - 1)/(i x)``, continuous at 0."""
    if abs(x) < 1e-8:
        return 1.0 + 0.5j * x
    return (cmath.exp(1j * x) - 1.0) / (1j * x)


def _warn_expansion(*phases: float) -> None:
    if max(phases) > SMALL_PHASE:
        warnings.warn("ramp phase outside the small-phase expansion regime", RuntimeWarning, stacklevel=3)


def shape_factor_linear(omega: float, tau: float, tau_c: float, T: float) -> complex:
    """Exact ``f(T) = e^{-i omega T}(e^{i omega tau} - 1) + (tau/tau_c)(e^{i omega tau_c} - 1)``.

    ``|alpha| = sqrt(m omega/2 hbar) z0 |f| / (omega tau)``.
    """
    x, y = omega * tau, omega * tau_c
    return 1j * x * (cmath.exp(-1j * omega * T) * _phase_ratio(x) + _phase_ratio(y))


def shape_factor_linear_approx(omega: float, tau: float, tau_c: float, T: float) -> complex:
    """Second-order expansion ``omega tau [e^{-i omega T}(i - omega tau/2) + i - omega tau_c/2]``."""
    x, y = omega * tau, omega * tau_c
    return x * (cmath.exp(-1j * omega * T) * (1j - x / 2) + 1j - y / 2)


def _wrap_hold(phase: float, omega: float) -> float:
    return (phase % (2.0 * math.pi)) / omega


def optimal_hold_linear(omega: float, tau: float, tau_c: float, exact: bool = True) -> float:
    """Hold ``T`` in ``[0, 2 pi/omega)`` minimizing ``|f(T)|`` for linear ramps.

    ``|A e^{-i omega T} + B|`` is smallest when ``omega T = arg(-A/B)``.  The
    expanded form gives ``omega T = arg((2i - omega tau)/(-2i + omega tau_c))``,
    close to ``pi + omega (tau - tau_c)/2``.
    """
    if tau < 0 or tau_c < 0:
        raise ValueError("ramp durations must be non-negative")
    x, y = omega * tau, omega * tau_c
    if exact:
        a, b = _phase_ratio(x), _phase_ratio(y)
    else:
        a, b = 1j - x / 2, 1j - y / 2
    return _wrap_hold(cmath.phase(-a / b), omega)


def residual_alpha_linear(
    z0: float, omega: float, tau: float, tau_c: float, T: float | None, species: IonSpecies
) -> ResidualExcitation:
    """Amplitude after linear throw (``tau``) and catch (``tau_c``) ramps over ``z0`` each.

    ``T`` is the catch start measured from the start of the throw; ``None``
    uses :func:`optimal_hold_linear`.
    """
    if tau <= 0 or tau_c <= 0:
        raise ValueError("linear ramps need positive durations")
    if T is None:
        T = optimal_hold_linear(omega, tau, tau_c)
    x, y = omega * tau, omega * tau_c
    bracket = cmath.exp(-1j * omega * T) * _phase_ratio(x) + _phase_ratio(y)
    alpha = -alpha_prefactor(species, omega) * z0 * cmath.exp(-1j * y) * bracket
    return ResidualExcitation(
        alpha=alpha,
        T_min=T,
        f=shape_factor_linear(omega, tau, tau_c, T),
        f_approx=shape_factor_linear_approx(omega, tau, tau_c, T),
    )


def residual_alpha_linear_approx(
    z0: float, omega: float, tau: float, tau_c: float, T: float | None, species: IonSpecies
) -> float:
    """``|alpha|`` from the expanded shape factor (cross-check only)."""
    _warn_expansion(omega * tau, omega * tau_c)
    if T is None:
        T = optimal_hold_linear(omega, tau, tau_c, exact=False)
    f = shape_factor_linear_approx(omega, tau, tau_c, T)
    return alpha_prefactor(species, omega) * z0 * abs(f) / (omega * tau)


# ---------------------------------------------------------------------------
# sinusoidal ramps  s = z0 (1 - cos(pi t / tau)) / 2


def _cos_ramp_factor(x: float) -> complex:
    """``(1 + e^{ix}) / (pi^2 - x^2)`` for ``0 <= x < pi``."""
    if x < 0:
        raise ValueError("ramp duration must be non-negative")
    if x >= math.pi:
        raise SingularityError(f"omega*tau = {x:.6g} reaches pi; the cosine closed form is singular")
    return (1.0 + cmath.exp(1j * x)) / (math.pi**2 - x * x)


def _cos_ramp_factor_approx(x: float) -> complex:
    if x >= math.pi:
        raise SingularityError(f"omega*tau = {x:.6g} reaches pi; the cosine closed form is singular")
    return (2.0 + 1j * x - 0.5 * x * x) / (math.pi**2 - x * x)


def shape_factor_sinusoidal(omega: float, tau: float, tau_c: float, T: float, exact: bool = True) -> complex:
    """``f(T) = g(omega tau) e^{-i omega T} + g(omega tau_c)``; ``|alpha| = sqrt(m omega/2 hbar) z0 pi^2 |f| / 2``."""
    g = _cos_ramp_factor if exact else _cos_ramp_factor_approx
    return g(omega * tau) * cmath.exp(-1j * omega * T) + g(omega * tau_c)


def optimal_hold_sinusoidal(omega: float, tau: float, tau_c: float, exact: bool = True) -> float:
    g = _cos_ramp_factor if exact else _cos_ramp_factor_approx
    return _wrap_hold(cmath.phase(-g(omega * tau) / g(omega * tau_c)), omega)


def residual_alpha_sinusoidal(
    z0: float, omega: float, tau: float, tau_c: float, T: float | None, species: IonSpecies
) -> ResidualExcitation:
    """Amplitude after half-cosine throw and catch ramps over ``z0`` each."""
    if T is None:
        T = optimal_hold_sinusoidal(omega, tau, tau_c)
    f = shape_factor_sinusoidal(omega, tau, tau_c, T)
    alpha = -alpha_prefactor(species, omega) * z0 * 0.5 * math.pi**2 * cmath.exp(-1j * omega * tau_c) * f
    return ResidualExcitation(
        alpha=alpha, T_min=T, f=f, f_approx=shape_factor_sinusoidal(omega, tau, tau_c, T, exact=False)
    )


# ---------------------------------------------------------------------------
# oracles and sweeps


def minimize_over_hold(amplitude, omega: float, samples: int = 64) -> float:
    """Global minimizer of ``amplitude(T)`` over one period: coarse scan, then bounded refinement."""
    period = 2.0 * math.pi / omega
    grid = np.linspace(0.0, period, samples, endpoint=False)
    vals = [amplitude(t) for t in grid]
    i = int(np.argmin(vals))
    lo, hi = grid[i] - period / samples, grid[i] + period / samples
    res = optimize.minimize_scalar(amplitude, bounds=(lo, hi), method="bounded", options={"xatol": 1e-14 * period})
    return float(res.x % period)


@dataclass(frozen=True)
class CatchRampPoint:
    tau_c: float
    T_min: float
    alpha_min: float
    overlap: float
    alpha_min_approx: float


def catch_ramp_sweep(z0: float, omega: float, tau: float, tau_c_values, species: IonSpecies) -> list[CatchRampPoint]:
    """Smallest residual ``|alpha|`` (over the hold) for linear ramps, per catch ramp duration."""
    out = []
    for tc in tau_c_values:
        r = residual_alpha_linear(z0, omega, tau, float(tc), None, species)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            approx = residual_alpha_linear_approx(z0, omega, tau, float(tc), None, species)
        out.append(CatchRampPoint(float(tc), r.T_min, abs(r.alpha), r.overlap, approx))
    return out
