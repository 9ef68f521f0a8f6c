"""The ten acceptance checks, each returning one :class:`Check`.

These functions do their own computation so they can run standalone (from
``iontide check`` or the test suite); scenario runners reuse them for the
criteria their experiment covers.
"""

from __future__ import annotations

import math
import time

import numpy as np

from ..constants import TWO_PI
from ..gaussian import (
    GaussianState,
    SqueezeProtocol,
    evolve_covariance,
    noise_ensemble,
    run_squeeze_protocol,
    squeezed_lifetime_lambda,
    squeezed_noise_overlap_average,
    squeezing_metric,
    displacement_noise_overlap,
)
from ..physcore import CA40, IonSpecies, TrapContext, ground_state_extent, micromotion_coefficients
from ..potential import PotentialSpec, TransitionShape, throw_catch_protocol
from ..qprop import (
    GridSpec,
    energy,
    fock_distribution,
    make_coherent_state,
    make_ground_state,
    propagate,
)
from ..switchcal import alpha_prefactor, catch_ramp_sweep, residual_alpha_general, timing_tolerance
from .experiments import TransportGrid, anharmonic_lifetime, throw_catch_populations
from .report import Check

# reference parameters
F_Z = 1e6
Z0 = 50e-6
L4_ANCHOR = -120e-6
DESK_SCALE = 0.02
DESK_GRID = TransportGrid(points=16384, margin=0.6, dt=200e-12)
FULL_GRID = TransportGrid(points=1 << 24, margin=0.34, dt=360e-12)
TAU = 5e-9


def _check(criterion: int, name: str, expected: str, got: str, tolerance: str, passed: bool | None, note: str = "") -> Check:
    return Check(name, expected, got, tolerance, passed, criterion, note)


# ---------------------------------------------------------------------------
# 1, 2: wavepacket transport


def fig6_anchor(scale: float = DESK_SCALE, grid: TransportGrid = DESK_GRID, species: IonSpecies = CA40, f_z: float = F_Z):
    return throw_catch_populations(species, f_z, L4_ANCHOR * scale, Z0 * scale, grid)


def criterion_1(slow: bool = False, desk=None) -> Check:
    """Quartic transport anchor point: populations of n = 0 and n = 2 in the catch well."""
    desk = desk or fig6_anchor()
    p0, p2 = desk.populations[0], desk.populations[2]
    ok = abs(p0 - 0.90) <= 0.03 and abs(p2 - 0.10) <= 0.03 and desk.wall_time < 60.0
    got = f"P0={p0:.4f} P2={p2:.4f} desk {desk.wall_time:.1f}s"
    note = ""
    if slow:
        full = fig6_anchor(1.0, FULL_GRID)
        shift = max(abs(full.populations[0] - p0), abs(full.populations[2] - p2))
        ok = ok and shift <= 0.01
        got += f" full P0={full.populations[0]:.4f} P2={full.populations[2]:.4f} ({full.wall_time:.0f}s)"
    else:
        note = "full-scale agreement needs --slow"
    return _check(1, "fig6_anchor", "P0=0.90 P2=0.10, desk<60s", got, "+-0.03 (full vs desk 0.01)", ok, note)


def criterion_2() -> Check:
    """Harmonic throw-catch with instantaneous switches ends in the ground state."""
    t0 = time.perf_counter()
    z0 = Z0 * DESK_SCALE
    out = throw_catch_populations(CA40, F_Z, None, z0, DESK_GRID, catch_time=math.pi / (TWO_PI * F_Z), n_max=0)
    dt = time.perf_counter() - t0
    p0 = out.populations[0]
    return _check(2, "harmonic_identity", ">= 1-1e-5, <10s", f"1-P0={1 - p0:.2e} ({dt:.1f}s)", "1e-5", 1 - p0 <= 1e-5 and dt < 10)


# ---------------------------------------------------------------------------
# 3, 4, 5: switching budgets


def criterion_3() -> Check:
    dt = timing_tolerance(4450, TWO_PI * 1e6, 0.9)
    return _check(3, "timing_tolerance", "12 ps", f"{dt * 1e12:.3f} ps", "+-0.5 ps", abs(dt - 12e-12) <= 0.5e-12)


def fig9_points(tau_c_values, species: IonSpecies = CA40, z0: float = Z0, f_z: float = F_Z, tau: float = TAU):
    """Closed-form sweep plus the quadrature value of ``|alpha|`` at each point's optimal hold."""
    omega = TWO_PI * f_z
    transport = PotentialSpec(f_z)
    points = catch_ramp_sweep(z0, omega, tau, tau_c_values, species)
    quad = []
    for p in points:
        proto = throw_catch_protocol(z0, transport, p.T_min, TransitionShape.linear(tau), TransitionShape.linear(p.tau_c))
        quad.append(abs(residual_alpha_general(proto, species, omega)))
    return points, np.array(quad)


def criterion_4(tau_c_values=None) -> Check:
    """Linear ramps: overlap above 0.9 for catch ramps shorter than 1.5 tau; closed form equals quadrature."""
    t0 = time.perf_counter()
    if tau_c_values is None:
        tau_c_values = np.linspace(0.02, 4.0, 200) * TAU
    points, quad = fig9_points(tau_c_values)
    closed = np.array([p.alpha_min for p in points])
    scale = alpha_prefactor(CA40, TWO_PI * F_Z) * Z0
    # relative 1e-6, with an absolute floor at the quadrature's own precision near |alpha| = 0
    dev = np.abs(quad - closed)
    agree = dev <= 1e-6 * closed + 1e-12 * scale
    rel = dev / np.maximum(closed, 1e-6 * scale)
    short = [p.overlap for p in points if p.tau_c < 1.5 * TAU]
    dt = time.perf_counter() - t0
    ok = min(short) > 0.9 and bool(agree.all()) and dt < 5
    return _check(
        4,
        "finite_switching",
        "P_O>0.9 for tau'<1.5tau; quadrature 1e-6",
        f"min P_O={min(short):.4f}, max rel dev={rel.max():.1e} ({dt:.1f}s)",
        "1e-6 rel (+1e-12 abs)",
        ok,
    )


def random_ramp(rng: np.random.Generator, duration: float, start: float, end: float, knots: int = 12) -> TransitionShape:
    """Monotone sampled ramp from ``start`` to ``end`` with random knot spacing and increments."""
    t = np.concatenate([[0.0], np.sort(rng.uniform(0, 1, knots - 2)), [1.0]]) * duration
    steps = rng.uniform(0.05, 1.0, knots - 1)
    frac = np.concatenate([[0.0], np.cumsum(steps) / steps.sum()])
    return TransitionShape.sampled(t, start + (end - start) * frac)


def criterion_5(shapes: int = 50, seed: int = 0) -> Check:
    """Identical throw and catch ramps with tau' = tau and T = pi/omega cancel the excitation."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    omega = TWO_PI * F_Z
    transport = PotentialSpec(F_Z)
    scale = alpha_prefactor(CA40, omega) * Z0
    worst = 0.0
    for _ in range(shapes):
        base = random_ramp(rng, TAU, 0.0, 1.0)
        times = np.asarray(base.times)
        frac = np.asarray(base.fractions)
        throw = TransitionShape.sampled(times, -Z0 + Z0 * frac)
        catch = TransitionShape.sampled(times, Z0 * frac)
        proto = throw_catch_protocol(Z0, transport, math.pi / omega, throw, catch)
        worst = max(worst, abs(residual_alpha_general(proto, CA40, omega)) / scale)
    dt = time.perf_counter() - t0
    return _check(5, "symmetric_cancellation", "|alpha| < 1e-9 * sqrt(m w/2 hbar) z0", f"max {worst:.1e} ({dt:.1f}s)", "1e-9", worst < 1e-9 and dt < 10)


# ---------------------------------------------------------------------------
# 6, 7, 8: squeezing


def criterion_6() -> Check:
    """One switch cycle at voltage ratio 1/10 enhances the variance ratio by 10."""
    w1 = TWO_PI * 1.2e6
    proto = SqueezeProtocol.from_voltage_ratio(w1, 0.1)
    m = squeezing_metric(run_squeeze_protocol(proto)[0])
    literal = squeezing_metric(run_squeeze_protocol(SqueezeProtocol(w1, TWO_PI * 0.4e6))[0])
    return _check(
        6,
        "squeeze_cycle",
        "1/lam^2 = 10",
        f"{m.enhancement:.12g} ({m.db:.3f} dB, hold {proto.hold * 1e9:.1f} ns)",
        "1e-9",
        abs(m.enhancement - 10) <= 1e-9,
        note=f"omega2 = 2pi*0.4 MHz taken literally gives {literal.enhancement:.6g}",
    )


def criterion_7(realizations: int = 10_000, seed: int = 0) -> Check:
    """Heating lifetime closed form, and a Monte-Carlo ensemble of noise kicks against exp(-t/tau)."""
    t0 = time.perf_counter()
    rate, lam_sq = 10.0, 0.01
    tau = squeezed_lifetime_lambda(rate, lam_sq)
    r = -0.5 * math.log(lam_sq)
    times = np.array([0.5, 1.0, 2.0]) * tau
    ens = noise_ensemble(rate, r, TWO_PI * F_Z, times, realizations, seed)
    closed = displacement_noise_overlap(rate, r, times)
    z = np.abs(ens.overlap_mean - closed) / ens.overlap_sem
    ok_tau = abs(tau - 4e-3) <= 0.05 * 4e-3
    dt = time.perf_counter() - t0
    algebraic = squeezed_noise_overlap_average(rate, r, times)
    return _check(
        7,
        "heating_lifetime",
        "tau=4.0ms; MC within 3 SE of exp(-t/tau)",
        f"tau={tau * 1e3:.4f}ms; MC {np.round(ens.overlap_mean, 4).tolist()} vs {np.round(closed, 4).tolist()} "
        f"(z={np.round(z, 1).tolist()}, {dt:.1f}s)",
        "5%, 3 SE",
        ok_tau and bool(np.all(z <= 3)) and dt < 120,
        note=f"ensemble average of the exact overlap is {np.round(algebraic, 4).tolist()}",
    )


def criterion_8(fine: bool = False) -> Check:
    """Overlap lifetime (P = 1/2) of a -20 dB squeezed state in the quartic well."""
    t0 = time.perf_counter()
    kw = dict(points=8192, span_widths=120.0, dt_periods=0.05) if fine else {}
    trace = anharmonic_lifetime(CA40, F_Z, L4_ANCHOR, math.log(10), **kw)
    dt = time.perf_counter() - t0
    life = trace.lifetime
    got = "no crossing" if life is None else f"{life * 1e3:.2f} ms"
    ok = life is not None and 1e-3 <= life <= 10e-3
    return _check(8, "anharmonic_lifetime", "[1, 10] ms", f"{got} ({dt:.0f}s)", "band", ok, note="threshold P_O = 1/2")


# ---------------------------------------------------------------------------
# 9: propagator and covariance properties


def _harmonic_grid(points=1024, half_widths=20.0, dt_fraction=1 / 1400, steps=1400, f_z=F_Z, species=CA40):
    well = PotentialSpec(f_z)
    a0 = ground_state_extent(species, well.omega)
    period = 1 / f_z
    return well, a0, GridSpec(-half_widths * a0, half_widths * a0, points, period * dt_fraction, steps)


def property_norm(species=CA40) -> float:
    """Norm change per step for a displaced packet in a quartic well (1400 steps)."""
    well, a0, g = _harmonic_grid()
    psi = make_coherent_state(g, well, species, 3.0 + 1.0j)
    res = propagate(psi, PotentialSpec(F_Z, None, 400 * a0), species, g)
    return abs(res.final.norm() - psi.norm()) / res.steps_taken


def property_energy_drift(species=CA40) -> float:
    """Relative energy change after 1400 steps in a static quartic well at 360 ps steps."""
    well, a0, g = _harmonic_grid(points=2048, dt_fraction=360e-12 * F_Z)
    anh = PotentialSpec(F_Z, None, -400 * a0)
    psi = make_coherent_state(g, well, species, 3.0)
    e0 = energy(psi, anh, species)
    res = propagate(psi, anh, species, g)
    return abs(energy(res.final, anh, species) - e0) / e0


def property_ehrenfest(species=CA40) -> float:
    """Largest deviation of <z>(t) from z0 cos(omega t) over one period, relative to z0."""
    well, a0, g = _harmonic_grid(dt_fraction=1 / 4000, steps=4000)
    alpha = 3.0
    psi = make_coherent_state(g, well, species, alpha)
    z0 = 2 * a0 * alpha
    res = propagate(psi, well, species, g, trace_every=40)
    t, mz = res.trace[:, 0], res.trace[:, 1]
    return float(np.max(np.abs(mz - z0 * np.cos(well.omega * t))) / z0)


def property_dt_convergence(species=CA40) -> tuple[float, float, float]:
    """Wavefunction error of the reduced-scale quartic transport at dt and dt/2 against dt/8."""
    z0 = 1e-6
    grid = lambda dt: TransportGrid(8192, 0.6, dt)
    kw = dict(species=species, f_z=F_Z, L4=L4_ANCHOR * z0 / Z0, z0=z0)

    def final(dt):
        from ..potential import classical_turning_point

        transport = PotentialSpec(F_Z, None, kw["L4"])
        T, zt = classical_turning_point(transport, species, -z0)
        proto = throw_catch_protocol(z0, transport, T, final_center=zt)
        g = grid(dt).grid(z0, proto.duration)
        psi = make_ground_state(g, proto.initial_well, species)
        return propagate(psi, proto, species, g).final.amplitudes, g.dz

    dt = 1e-9
    ref, dz = final(dt / 8)
    e1 = math.sqrt(np.sum(np.abs(final(dt)[0] - ref) ** 2) * dz)
    e2 = math.sqrt(np.sum(np.abs(final(dt / 2)[0] - ref) ** 2) * dz)
    return e1, e2, e1 / e2


def property_poisson(species=CA40) -> float:
    """Largest deviation of coherent-state Fock populations from the Poisson law, |alpha| <= 3."""
    well, a0, g = _harmonic_grid(points=2048, half_widths=30)
    worst = 0.0
    for alpha in (0.5, 1.0 + 1.0j, 2.0, 3.0, -2.1 + 2.1j):
        psi = make_coherent_state(g, well, species, alpha)
        n = np.arange(0, 40)
        p = fock_distribution(psi, well, species, 39)
        mu = abs(alpha) ** 2
        poisson = np.exp(-mu + n * math.log(mu) - np.array([math.lgamma(k + 1) for k in n]))
        worst = max(worst, float(np.max(np.abs(p - poisson))))
    return worst


def property_covariance(samples: int = 200, seed: int = 0) -> tuple[float, float]:
    """Largest det-sigma change under symplectic evolution, and smallest det over sequences."""
    rng = np.random.default_rng(seed)
    worst, lowest = 0.0, math.inf
    for _ in range(samples):
        state = GaussianState.squeezed_vacuum(rng.uniform(0, 1), rng.uniform(0, TWO_PI))
        for _ in range(3):
            nxt = evolve_covariance(state, rng.uniform(0.3, 3), TWO_PI * 1e6, rng.uniform(0, 2e-6))
            worst = max(worst, abs(nxt.det - state.det))
            lowest = min(lowest, nxt.det)
            state = nxt
    return worst, lowest


def criterion_9() -> Check:
    t0 = time.perf_counter()
    norm = property_norm()
    drift = property_energy_drift()
    ehr = property_ehrenfest()
    _, _, ratio = property_dt_convergence()
    poisson = property_poisson()
    det_change, det_min = property_covariance()
    dt = time.perf_counter() - t0
    parts = {
        "norm/step": (norm, norm < 1e-10),
        "energy": (drift, drift < 1e-6),
        "ehrenfest": (ehr, ehr < 1e-5),
        "dt ratio": (ratio, 3.5 <= ratio <= 4.5),
        "poisson": (poisson, poisson < 1e-6),
        "det change": (det_change, det_change < 1e-12),
        "det min-1/4": (det_min - 0.25, det_min >= 0.25 - 1e-12),
    }
    got = ", ".join(f"{k}={v:.2g}" for k, (v, _) in parts.items()) + f" ({dt:.1f}s)"
    ok = all(p for _, p in parts.values()) and dt < 30
    return _check(9, "propagator_properties", "all properties hold, <30s", got, "per property", ok)


# ---------------------------------------------------------------------------
# 10: micromotion


def micromotion_reference() -> tuple[TrapContext, float]:
    ctx = TrapContext(TWO_PI * 1e6, TWO_PI * 100e6, 8e-6, 4.0)
    return ctx, 100e-6


def criterion_10() -> Check:
    ctx, C0 = micromotion_reference()
    mm = micromotion_coefficients(ctx, CA40, C0)
    ok = all(abs(abs(c) - 2.5e-15) <= 0.15 * 2.5e-15 for c in (mm.C_plus2, mm.C_minus2))
    return _check(
        10, "micromotion", "C+-2 = 2.5 fm", f"C+2={mm.C_plus2 * 1e15:.4f} fm, C-2={mm.C_minus2 * 1e15:.4f} fm", "+-15%", ok
    )


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
}


def run_all(slow: bool = False) -> list[Check]:
    """All criteria; the anharmonic lifetime run (8) and the full-scale anchor only with ``slow``."""
    out = []
    for k, fn in CRITERIA.items():
        if k == 1:
            out.append(fn(slow=slow))
        elif k == 8 and not slow:
            out.append(_check(8, "anharmonic_lifetime", "[1, 10] ms", "not run", "band", None, "needs --slow"))
        else:
            out.append(fn())
    return out
