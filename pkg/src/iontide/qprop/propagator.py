"""Second-order split-operator propagation in real and imaginary time.

Each step applies ``exp(-i V dt/2) exp(-i T dt) exp(-i V dt/2)`` (hbar = 1 in
oscillator units) with the kinetic factor applied in Fourier space.  On a
periodic grid every factor is an exact unitary phase, so the norm is
conserved to rounding.  Within a static stretch adjacent half kicks are
merged; in a moving-well stretch the potential is evaluated at the midpoint
time of each step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
import scipy.fft as sfft

from ..constants import HBAR
from ..physcore import IonSpecies
from ..potential import PotentialSpec, TransportProtocol, potential_value
from . import analysis
from .grid import GridError, GridSpec, NumericalInstabilityError, OscillatorUnits, Wavefunction

NORM_TOLERANCE = 1e-8
EDGE_FRACTION = 0.02
MOMENTUM_SIGMAS = 5.0

Target = Union[PotentialSpec, TransportProtocol]


@dataclass
class PropagationResult:
    final: Wavefunction
    trace: np.ndarray | None = None  # rows: t, <z>, <p>, Var z, Var p, <E>
    norm_drift: float = 0.0
    edge_probability: float = 0.0
    steps_taken: int = 0
    duration: float = 0.0

    TRACE_COLUMNS = ("t", "mean_z", "mean_p", "var_z", "var_p", "energy")
    TRACE_UNITS = ("s", "m", "kg m/s", "m^2", "kg^2 m^2/s^2", "J")


@dataclass
class _Kernel:
    """Precomputed grid quantities in oscillator units of a reference frequency."""

    grid: GridSpec
    species: IonSpecies
    units: OscillatorUnits
    k2: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        k = self.grid.wavenumbers * self.units.length
        self.k2 = k * k

    def potential(self, well: PotentialSpec) -> np.ndarray:
        return potential_value(well, self.species, self.grid.z) / self.units.energy

    def kinetic_phase(self, dt: float) -> np.ndarray:
        return np.exp(-1j * self.k2 * dt)


def _reference_omega(target: Target) -> float:
    if isinstance(target, TransportProtocol):
        return target.transport_well.omega
    return target.omega


def required_momentum(psi: Wavefunction, target: Target, species: IonSpecies) -> float:
    """Estimate of the largest momentum the state reaches under ``target``.

    Classical momentum of the mean plus ``MOMENTUM_SIGMAS`` of the spread,
    where the spread is rotated through phase space by the (transport) well.
    """
    well = target.transport_well if isinstance(target, TransportProtocol) else target
    m = species.mass
    w = well.omega
    (mz, vz), (mp, vp) = analysis.position_moments(psi), analysis.momentum_moments(psi)
    drop = float(potential_value(well, species, mz) - potential_value(well, species, well.center))
    p_cl = math.sqrt(mp**2 + 2.0 * m * max(drop, 0.0))
    sigma = max(math.sqrt(vp), m * w * math.sqrt(vz))
    return p_cl + MOMENTUM_SIGMAS * sigma


def check_momentum_resolution(grid: GridSpec, p_max: float) -> None:
    """Require ``dz < pi hbar / (2 p_max)``, i.e. a factor-two Nyquist margin."""
    limit = math.pi * HBAR / (2.0 * p_max)
    if not grid.dz < limit:
        raise GridError(
            f"grid step {grid.dz:.3e} m does not resolve momentum {p_max:.3e} kg m/s "
            f"(need dz < {limit:.3e} m)"
        )


def _edge_probability(psi: np.ndarray, dz: float) -> float:
    n = max(1, int(EDGE_FRACTION * psi.size))
    rho = np.abs(psi) ** 2
    return float((rho[:n].sum() + rho[-n:].sum()) * dz)


class SplitOperator:
    """Strang-split propagator bound to one grid, species and reference frequency."""

    def __init__(self, grid: GridSpec, species: IonSpecies, omega_ref: float):
        self.grid = grid
        self.species = species
        self.kernel = _Kernel(grid, species, OscillatorUnits(species, omega_ref))

    @property
    def units(self) -> OscillatorUnits:
        return self.kernel.units

    def _observe(self, t: float, psi: np.ndarray, well: PotentialSpec) -> list[float]:
        wf = Wavefunction(self.grid, psi)
        mz, vz = analysis.position_moments(wf)
        mp, vp = analysis.momentum_moments(wf)
        return [t, mz, mp, vz, vp, analysis.energy(wf, well, self.species)]

    def run_static(self, psi, well, duration, t0=0.0, trace_every=0, trace=None):
        """Evolve amplitudes ``psi`` in a fixed ``well``; returns (psi, steps)."""
        n = max(1, math.ceil(duration / self.grid.dt - 1e-9))
        dt = duration / n / self.units.time
        v = self.kernel.potential(well)
        half = np.exp(-0.5j * v * dt)
        full = half * half
        kin = self.kernel.kinetic_phase(dt)
        psi = psi * half
        for i in range(n):
            psi = sfft.fft(psi, overwrite_x=True)
            psi *= kin
            psi = sfft.ifft(psi, overwrite_x=True)
            if i == n - 1:
                psi *= half
            else:
                if trace is not None and trace_every and (i + 1) % trace_every == 0:
                    trace.append(self._observe(t0 + (i + 1) * dt * self.units.time, psi * half, well))
                psi *= full
        return psi, n

    def run_moving(self, psi, well_at, t_start, t_end, trace_every=0, trace=None):
        n = max(1, math.ceil((t_end - t_start) / self.grid.dt - 1e-9))
        h = (t_end - t_start) / n
        dt = h / self.units.time
        kin = self.kernel.kinetic_phase(dt)
        for i in range(n):
            well = well_at(t_start + (i + 0.5) * h)
            half = np.exp(-0.5j * self.kernel.potential(well) * dt)
            psi = psi * half
            psi = sfft.fft(psi, overwrite_x=True)
            psi *= kin
            psi = sfft.ifft(psi, overwrite_x=True)
            psi *= half
            if trace is not None and trace_every and (i + 1) % trace_every == 0:
                trace.append(self._observe(t_start + (i + 1) * h, psi, well))
        return psi, n


def propagate(
    psi: Wavefunction,
    target: Target,
    species: IonSpecies,
    grid: GridSpec | None = None,
    *,
    duration: float | None = None,
    trace_every: int = 0,
    check_momentum: bool = True,
) -> PropagationResult:
    """Evolve ``psi`` under a fixed well or a transport protocol.

    For a fixed well the duration defaults to ``grid.dt * grid.steps``; for
    a protocol it is the protocol's span and the grid budget must cover it.
    ``trace_every`` > 0 records observables every that many steps (and at
    the start and end).
    """
    grid = grid or psi.grid
    if psi.grid != grid:
        raise GridError("wavefunction grid differs from the propagation grid")
    if isinstance(target, TransportProtocol):
        total = target.duration
        if grid.dt * grid.steps < total * (1 - 1e-9):
            raise GridError(f"dt*steps = {grid.dt * grid.steps:.3e} s does not cover the protocol ({total:.3e} s)")
    else:
        total = grid.dt * grid.steps if duration is None else duration
    if check_momentum:
        check_momentum_resolution(grid, required_momentum(psi, target, species))

    prop = SplitOperator(grid, species, _reference_omega(target))
    norm0 = psi.norm()
    amp = psi.amplitudes.copy()
    trace = [] if trace_every else None
    first_well = target.well_at(0.0) if isinstance(target, TransportProtocol) else target
    if trace is not None:
        trace.append(prop._observe(0.0, amp, first_well))

    steps = 0
    drift = 0.0
    pieces = target.segments() if isinstance(target, TransportProtocol) else [(0.0, total, target)]
    for t_start, t_end, well in pieces:
        if well is None:
            amp, n = prop.run_moving(amp, target.well_at, t_start, t_end, trace_every, trace)
        else:
            amp, n = prop.run_static(amp, well, t_end - t_start, t_start, trace_every, trace)
        steps += n
        drift = abs(float(np.vdot(amp, amp).real * grid.dz) - norm0)
        if drift > NORM_TOLERANCE:
            raise NumericalInstabilityError(f"norm drift {drift:.2e} after segment ending at {t_end:.3e} s")

    final = Wavefunction(grid, amp)
    if trace is not None:
        last_well = target.final_well if isinstance(target, TransportProtocol) else target
        trace.append(prop._observe(total, amp, last_well))
    return PropagationResult(
        final=final,
        trace=None if trace is None else np.array(trace),
        norm_drift=drift,
        edge_probability=_edge_probability(amp, grid.dz),
        steps_taken=steps,
        duration=total,
    )


def relax_ground_state(
    grid: GridSpec,
    well: PotentialSpec,
    species: IonSpecies,
    start: np.ndarray,
    schedule=(0.1, 0.02, 0.005),
    tol: float = 1e-12,
    max_iter: int = 20000,
) -> tuple[np.ndarray, float]:
    """Imaginary-time split-operator relaxation with per-step renormalization.

    ``schedule`` lists imaginary time steps (in ``1/omega``) used one after
    another, each until the relative energy change per step drops below
    ``tol``; shrinking the step removes the O(dtau^2) splitting bias of the
    fixed point.  Returns the normalized amplitudes and the energy (J).
    """
    kern = _Kernel(grid, species, OscillatorUnits(species, well.omega))
    v = kern.potential(well)
    dz = grid.dz
    psi = np.asarray(start, dtype=complex).copy()
    psi /= math.sqrt(np.vdot(psi, psi).real * dz)

    def energy_of(p):
        phi = sfft.fft(p)
        w = np.abs(phi) ** 2
        kin = np.dot(w, kern.k2) / w.sum()
        rho = np.abs(p) ** 2
        return kin + np.dot(rho, v) / rho.sum()

    e_old = energy_of(psi)
    for dtau in schedule:
        half = np.exp(-0.5 * v * dtau)
        kin = np.exp(-kern.k2 * dtau)
        for _ in range(max_iter):
            psi = half * sfft.ifft(kin * sfft.fft(half * psi))
            psi /= math.sqrt(np.vdot(psi, psi).real * dz)
            e_new = energy_of(psi)
            if abs(e_new - e_old) <= tol * abs(e_new):
                e_old = e_new
                break
            e_old = e_new
        else:
            raise NumericalInstabilityError("imaginary-time relaxation did not converge")
    return psi, float(e_old * kern.units.energy)
