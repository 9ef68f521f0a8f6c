"""Scenario runners: each turns a :class:`ScenarioConfig` into CSV tables and a :class:`RunReport`."""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..constants import EV, HBAR, TWO_PI
from ..gaussian import (
    CycleRecord,
    GaussianState,
    SqueezeProtocol,
    db_to_r,
    displacement_noise_overlap,
    noise_ensemble,
    run_squeeze_protocol,
    squeezed_lifetime,
    squeezed_noise_overlap_average,
    squeezing_metric,
)
from ..physcore import ResonanceError, TrapContext, ground_state_extent, micromotion_coefficients
from ..potential import PotentialSpec
from ..qprop import (
    GridSpec,
    energy,
    kinetic_energy,
    make_ground_state,
    position_moments,
    potential_energy,
    propagate,
)
from ..units import parse_quantity
from . import acceptance
from .config import ConfigError, ScenarioConfig
from .csvio import Table
from .experiments import TransportGrid, anharmonic_lifetime, throw_catch_populations
from .report import Check, RunReport, within


@dataclass
class ScenarioResult:
    report: RunReport
    tables: dict[str, Table] = field(default_factory=dict)


def _transport_grid(cfg: ScenarioConfig) -> tuple[float, TransportGrid]:
    scale = cfg.quantity("grid", "scale")
    grid = TransportGrid(cfg.integer("grid", "points"), cfg.quantity("grid", "margin"), cfg.quantity("grid", "dt", "s"))
    return scale, grid


def _map(fn, args: list[tuple], jobs: int) -> list:
    """Apply ``fn(*a)`` to each argument tuple, in order, capturing exceptions per point."""

    if jobs <= 1 or len(args) <= 1:
        return [_guarded(fn, a) for a in args]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_guarded, [fn] * len(args), args))


def _guarded(fn, a):
    try:
        return fn(*a)
    except Exception as exc:  # recorded per point; the sweep continues
        return exc


# ---------------------------------------------------------------------------
# wavepacket transport


def _populations_point(species, f_z, L4, z0, grid, f_end=None, end_L3=None):
    return throw_catch_populations(species, f_z, L4, z0, grid, f_end=f_end, end_L3=end_L3)


def _optional_length(cfg: ScenarioConfig, section: str, key: str) -> float | None:
    """Length that may be switched off with ``none`` (or left out)."""
    if not cfg.has(section, key) or cfg.text(section, key).strip().lower() in ("none", "off", ""):
        return None
    return cfg.quantity(section, key, "m")


def run_fig6(cfg: ScenarioConfig) -> ScenarioResult:
    """Fock populations after quartic transport versus 1/L4."""
    species = cfg.species()
    f_z = cfg.quantity("trap", "f_z", "Hz")
    L4 = cfg.quantity("trap", "L4", "m")
    z0_full = cfg.quantity("protocol", "z0", "m")
    scale, grid = _transport_grid(cfg)
    z0 = z0_full * scale
    L3 = _optional_length(cfg, "trap", "L3_end")
    end_L3 = None if L3 is None else L3 * scale
    report = RunReport("fig6", cfg.echo())

    sweep = cfg.sweep()
    inv = sweep.values()
    args = [(species, f_z, None if v == 0 else scale / v, z0, grid, None, end_L3) for v in inv]
    results = _map(_populations_point, args, cfg.jobs)
    table = Table(
        ("inv_L4", "P0", "P2", "P4", "P6", "catch_time"),
        ("1/um", "1", "1", "1", "1", "s"),
    )
    for v, res in zip(inv, results):
        if isinstance(res, Exception):
            report.failures.append(f"1/L4={v * 1e-6:.6g} 1/um: {res}")
            table.append(v * 1e-6, math.nan, math.nan, math.nan, math.nan, math.nan)
        else:
            p = res.populations
            table.append(v * 1e-6, p[0], p[2], p[4], p[6], res.catch_time)

    # harmonic point of the sweep
    harmonic = [r for v, r in zip(inv, results) if v == 0 and not isinstance(r, Exception)]
    if harmonic:
        report.add(within("harmonic_point_P0", harmonic[0].populations[0], 1.0, 1e-4))

    anchor = throw_catch_populations(species, f_z, L4 * scale, z0, grid, end_L3=end_L3)
    report.add(acceptance.criterion_1(slow=cfg.slow, desk=anchor) if scale != 1 else _full_anchor_check(anchor))

    # scale invariance of the dimensionless anharmonicity
    report.add(within("dimensionless_z0_over_L4", z0 / (L4 * scale), z0_full / L4, 1e-12))

    # independence of the axial frequency: same geometry, co-scaled time step
    f_check = cfg.quantity("trap", "f_z_check", "Hz")
    grid_check = TransportGrid(grid.points, grid.margin, grid.dt * f_z / f_check)
    other = throw_catch_populations(species, f_check, L4 * scale, z0, grid_check, end_L3=end_L3)
    shift = float(np.max(np.abs(other.populations - anchor.populations)))
    report.add(within(f"frequency_invariance_{f_check / 1e6:g}MHz", shift, 0.0, 0.01))
    return ScenarioResult(report, {"fig6": table})


def _full_anchor_check(anchor) -> Check:
    p0, p2 = anchor.populations[0], anchor.populations[2]
    ok = abs(p0 - 0.9) <= 0.03 and abs(p2 - 0.1) <= 0.03
    return Check("fig6_anchor_full_scale", "P0=0.90 P2=0.10", f"P0={p0:.4f} P2={p2:.4f}", "+-0.03", ok, 1)


def run_fig7(cfg: ScenarioConfig) -> ScenarioResult:
    """Ground-state population after transport versus the end-well frequency."""
    species = cfg.species()
    f_z = cfg.quantity("trap", "f_z", "Hz")
    L4 = cfg.quantity("trap", "L4", "m")
    scale, grid = _transport_grid(cfg)
    z0 = cfg.quantity("protocol", "z0", "m") * scale
    report = RunReport("fig7", cfg.echo())
    f_end = cfg.sweep().values()
    results = _map(_populations_point, [(species, f_z, L4 * scale, z0, grid, f) for f in f_end], cfg.jobs)
    table = Table(("f_end", "P0", "P2", "initial_var_ratio"), ("Hz", "1", "1", "1"))
    good = []
    for f, res in zip(f_end, results):
        # ground state of the end well, seen from the transport well, is squeezed by f_z/f_end
        a0_t = ground_state_extent(species, TWO_PI * f_z)
        ratio = ground_state_extent(species, TWO_PI * f) ** 2 / a0_t**2
        if isinstance(res, Exception):
            report.failures.append(f"f_end={f:.6g} Hz: {res}")
            table.append(f, math.nan, math.nan, ratio)
        else:
            table.append(f, res.populations[0], res.populations[2], ratio)
            good.append((f, res.populations[0]))
    if len(good) > 1:
        p = np.array([g[1] for g in good])
        steps = np.diff(p)
        report.add(Check("monotone_in_f_end", "increasing", f"min step {steps.min():.3g}", ">0", bool(np.all(steps > 0))))

    # initial state of a stiffer end well against the Gaussian squeeze prediction
    f_hi = float(f_end[-1])
    end = PotentialSpec(f_hi, center=-z0)
    g = grid.grid(z0, 1e-9)
    psi = make_ground_state(g, end, species)
    _, var = position_moments(psi)
    a0_t = ground_state_extent(species, TWO_PI * f_z)
    gauss = GaussianState(cov=np.diag([0.5 * f_z / f_hi, 0.5 * f_hi / f_z]))
    predicted = 2 * gauss.cov[0, 0]
    report.add(within("initial_squeeze_variance", var / a0_t**2, predicted, 1e-6 * predicted))
    report.add(within("enhancement_vs_frequency_ratio", squeezing_metric(gauss).enhancement, f_hi / f_z, 1e-9))
    return ScenarioResult(report, {"fig7": table})


# ---------------------------------------------------------------------------
# finite switching


def run_fig9(cfg: ScenarioConfig) -> ScenarioResult:
    """Residual coherent amplitude versus catch ramp duration for linear ramps."""
    species = cfg.species()
    f_z = cfg.quantity("trap", "f_z", "Hz")
    z0 = cfg.quantity("protocol", "z0", "m")
    tau = cfg.quantity("protocol", "tau", "s")
    report = RunReport("fig9", cfg.echo())
    tau_c = cfg.sweep().values()
    points, quad = acceptance.fig9_points(tau_c, species, z0, f_z, tau)
    table = Table(
        ("tau_c", "T_min", "alpha_min", "P_O", "alpha_quadrature", "alpha_min_expansion", "P_O_expansion"),
        ("s", "s", "1", "1", "1", "1", "1"),
    )
    for p, q in zip(points, quad):
        table.append(p.tau_c, p.T_min, p.alpha_min, p.overlap, q, p.alpha_min_approx, math.exp(-p.alpha_min_approx**2))
    report.add(acceptance.criterion_3())
    report.add(acceptance.criterion_4())
    report.add(acceptance.criterion_5(seed=cfg.seed))
    nearest = min(points, key=lambda p: abs(p.tau_c - tau))
    smallest = min(points, key=lambda p: p.alpha_min)
    step = float(np.max(np.diff(tau_c))) if len(tau_c) > 1 else 0.0
    report.add(
        Check(
            "smallest_alpha_at_equal_ramps",
            f"tau'={tau:.4g} s",
            f"tau'={smallest.tau_c:.4g} s",
            "one sweep step",
            abs(smallest.tau_c - nearest.tau_c) <= 1.01 * step,
        )
    )
    return ScenarioResult(report, {"fig9": table})


# ---------------------------------------------------------------------------
# squeezing


def run_squeeze(cfg: ScenarioConfig) -> ScenarioResult:
    species = cfg.species()
    w1 = TWO_PI * cfg.quantity("trap", "f_z", "Hz")
    ratio = cfg.quantity("trap", "voltage_ratio")
    cycles = cfg.integer("protocol", "cycles")
    report = RunReport("squeeze", cfg.echo())

    proto = SqueezeProtocol.from_voltage_ratio(w1, ratio, cycles)
    _, records = run_squeeze_protocol(proto)
    cyc = Table(CycleRecord.COLUMNS, CycleRecord.UNITS)
    for r in records:
        cyc.append(r.cycle, r.min_variance, r.db, r.det)
    report.add(acceptance.criterion_6())

    rate = cfg.quantity("noise", "heating_rate", "quanta/s")
    r = db_to_r(cfg.quantity("noise", "squeezing", "dB"))
    n = cfg.integer("noise", "realizations")
    tau = squeezed_lifetime(rate, r)
    times = np.array([0.25, 0.5, 1.0, 1.5, 2.0]) * tau
    ens = noise_ensemble(rate, r, w1, times, n, cfg.seed)
    heat = Table(
        ("t", "P_O_closed_form", "P_O_monte_carlo", "standard_error", "P_O_exact_average", "kick_power_over_rate_t"),
        ("s", "1", "1", "1", "1", "1"),
    )
    closed = displacement_noise_overlap(rate, r, times)
    exact = squeezed_noise_overlap_average(rate, r, times)
    for row in zip(times, closed, ens.overlap_mean, ens.overlap_sem, exact, ens.kick_power / (rate * times)):
        heat.append(*map(float, row))
    report.add(acceptance.criterion_7(n, cfg.seed))

    tables = {"squeeze_cycles": cyc, "heating": heat}
    if cfg.slow:
        lt = anharmonic_lifetime(
            species,
            cfg.quantity("trap", "f_anharmonic", "Hz"),
            cfg.quantity("trap", "L4", "m"),
            r,
            points=cfg.integer("lifetime", "points"),
            span_widths=cfg.quantity("lifetime", "span_widths"),
            dt_periods=cfg.quantity("lifetime", "dt_periods"),
            t_max=cfg.quantity("lifetime", "t_max", "s"),
            threshold=cfg.quantity("lifetime", "threshold"),
        )
        life = Table(lt.COLUMNS, lt.UNITS)
        for t, p in zip(lt.times, lt.fidelity):
            life.append(float(t), float(p))
        tables["anharmonic_fidelity"] = life
        got = "no crossing" if lt.lifetime is None else f"{lt.lifetime * 1e3:.2f} ms"
        ok = lt.lifetime is not None and 1e-3 <= lt.lifetime <= 10e-3
        report.add(Check("anharmonic_lifetime", "[1, 10] ms", got, "band", ok, 8, f"threshold {lt.threshold}"))
    else:
        report.add(Check("anharmonic_lifetime", "[1, 10] ms", "not run", "band", None, 8, "needs --slow"))
    return ScenarioResult(report, tables)


# ---------------------------------------------------------------------------
# kick


def run_kick(cfg: ScenarioConfig) -> ScenarioResult:
    """Energy delivered by displacing the well for a quarter or half period and displacing it back."""
    species = cfg.species()
    f_z = cfg.quantity("trap", "f_z", "Hz")
    omega = TWO_PI * f_z
    scale, tgrid = _transport_grid(cfg)
    offsets = cfg.sweep().values()
    report = RunReport("kick", cfg.echo())
    span = max(abs(offsets).max() * scale, 1e-6) * 2.5
    home = PotentialSpec(f_z)
    zero_point = 0.5 * HBAR * omega
    table = Table(
        ("offset", "offset_desk", "E_analytic", "E_kick_well", "KE_quarter", "PE_quarter", "E_after_quarter", "E_after_half"),
        ("m", "m", "J", "J", "J", "J", "J", "J"),
    )
    worst = 0.0
    split_ok = True
    for dz_full in offsets:
        dz = dz_full * scale
        g = GridSpec(-span, span, tgrid.points, tgrid.dt, 1)
        psi = make_ground_state(g, home, species)
        kick = PotentialSpec(f_z, center=dz)
        analytic = 0.5 * species.mass * omega**2 * dz**2
        e_kick = energy(psi, kick, species) - zero_point
        quarter = propagate(psi, kick, species, g, duration=math.pi / (2 * omega)).final
        half = propagate(psi, kick, species, g, duration=math.pi / omega).final
        ke = kinetic_energy(quarter, species) - zero_point / 2
        pe = potential_energy(quarter, kick, species) - zero_point / 2
        e_q = energy(quarter, home, species) - zero_point
        e_h = energy(half, home, species) - zero_point
        e_half_kick = energy(half, kick, species) - zero_point
        s2 = 1.0 / scale**2  # report energies at the configured (full-scale) offset
        table.append(dz_full, dz, analytic * s2, e_kick * s2, ke * s2, pe * s2, e_q * s2, e_h * s2)
        if analytic > 0:
            worst = max(worst, abs(e_kick - analytic) / analytic, abs(e_half_kick - analytic) / analytic)
            split_ok &= abs(e_q - 2 * analytic) <= 1e-6 * analytic and abs(e_h - 4 * analytic) <= 1e-6 * analytic
        else:
            report.add(within("zero_offset_energy", e_q / zero_point, 0.0, 1e-9))
    report.add(within("kick_energy_vs_analytic", worst, 0.0, 1e-6))
    report.add(Check("return_energy_quarter_half", "2x and 4x the kick energy", "ok" if split_ok else "mismatch", "1e-6 rel", split_ok))

    targets = Table(("target_energy", "offset_required"), ("eV", "m"))
    for text in cfg.text("kick", "targets").split(","):
        e = parse_quantity(text.strip(), "eV")
        targets.append(e / EV, math.sqrt(2 * e / species.mass) / omega)
    return ScenarioResult(report, {"kick": table, "kick_targets": targets})


# ---------------------------------------------------------------------------
# micromotion


def run_micromotion(cfg: ScenarioConfig) -> ScenarioResult:
    species = cfg.species()
    w = TWO_PI * cfg.quantity("trap", "f_z", "Hz")
    drive = TWO_PI * cfg.quantity("trap", "drive", "Hz")
    c2 = cfg.quantity("trap", "c2", "V/m^2")
    C0 = cfg.quantity("trap", "C0", "m")
    report = RunReport("micromotion", cfg.echo())
    table = Table(("d2", "a_z", "q_z", "beta_z", "C_plus2", "C_minus2"), ("V/m^2", "1", "1", "1", "m", "m"))
    for d2 in cfg.sweep().values():
        try:
            mm = micromotion_coefficients(TrapContext(w, drive, c2, d2), species, C0)
            table.append(d2, mm.a_z, mm.q_z, mm.beta_z, mm.C_plus2, mm.C_minus2)
        except (ResonanceError, ValueError) as exc:
            report.failures.append(f"d2={d2:.6g}: {exc}")
            table.append(d2, *([math.nan] * 5))
    mm = micromotion_coefficients(TrapContext(w, drive, c2, cfg.quantity("trap", "d2", "V/m^2")), species, C0)
    ok = all(abs(abs(c) - 2.5e-15) <= 0.15 * 2.5e-15 for c in (mm.C_plus2, mm.C_minus2))
    report.add(Check("micromotion", "C+-2 = 2.5 fm", f"{mm.C_plus2 * 1e15:.4f} fm", "+-15%", ok, 10))
    return ScenarioResult(report, {"micromotion": table})


RUNNERS = {
    "fig6": run_fig6,
    "fig7": run_fig7,
    "fig9": run_fig9,
    "squeeze": run_squeeze,
    "kick": run_kick,
    "micromotion": run_micromotion,
}

DESCRIPTIONS = {
    "fig6": "Fock populations after quartic throw-catch transport vs 1/L4",
    "fig7": "ground-state population vs end-well frequency",
    "fig9": "residual excitation vs catch ramp duration (linear ramps)",
    "squeeze": "switch-cycle squeezing, heating lifetime, anharmonic lifetime (--slow)",
    "kick": "energy delivered by a displaced-well kick",
    "micromotion": "axial micromotion sideband amplitudes",
}


def run_scenario(cfg: ScenarioConfig) -> ScenarioResult:
    t0 = time.perf_counter()
    try:
        runner = RUNNERS[cfg.name]
    except KeyError:
        raise ConfigError(f"unknown scenario {cfg.name!r}") from None
    result = runner(cfg)
    result.report.wall_time = time.perf_counter() - t0
    return result
