"""Overlap between a state evolved in a harmonic well and in its anharmonic counterpart."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from ..physcore import IonSpecies
from ..potential import PotentialSpec
from .grid import GridError, GridSpec, NumericalInstabilityError, OscillatorUnits, Wavefunction
from .propagator import NORM_TOLERANCE, _Kernel, check_momentum_resolution, required_momentum

DEFAULT_THRESHOLD = 0.5


@dataclass
class FidelityTrace:
    times: np.ndarray  # s
    fidelity: np.ndarray
    threshold: float
    lifetime: float | None  # s, None if the threshold was never crossed

    COLUMNS = ("t", "overlap")
    UNITS = ("s", "1")


def _crossing(times: np.ndarray, values: np.ndarray, threshold: float) -> float | None:
    below = np.nonzero(values < threshold)[0]
    if below.size == 0:
        return None
    i = below[0]
    if i == 0:
        return float(times[0])
    t0, t1, v0, v1 = times[i - 1], times[i], values[i - 1], values[i]
    return float(t0 + (v0 - threshold) / (v0 - v1) * (t1 - t0))


def harmonic_reference_fidelity(
    psi0: Wavefunction,
    well_harm: PotentialSpec,
    well_anharm: PotentialSpec,
    species: IonSpecies,
    grid: GridSpec | None = None,
    t_max: float | None = None,
    sample_every: int = 100,
    threshold: float = DEFAULT_THRESHOLD,
    stop_below: float | None = None,
) -> FidelityTrace:
    """Evolve ``psi0`` in both wells in lockstep and sample ``|<psi_anharm|psi_harm>|^2``.

    Both copies share the grid and step, so splitting errors largely cancel
    in the overlap.  The lifetime is the first (linearly interpolated) time
    the overlap falls below ``threshold``.  Sampling stops early once the
    overlap drops below ``stop_below`` if that is given.
    """
    grid = grid or psi0.grid
    if psi0.grid != grid:
        raise GridError("wavefunction grid differs from the propagation grid")
    t_max = grid.dt * grid.steps if t_max is None else t_max
    p_max = max(required_momentum(psi0, w, species) for w in (well_harm, well_anharm))
    check_momentum_resolution(grid, p_max)

    kern = _Kernel(grid, species, OscillatorUnits(species, well_harm.omega))
    n = max(1, math.ceil(t_max / grid.dt - 1e-9))
    h = t_max / n
    dt = h / kern.units.time
    half = np.stack([np.exp(-0.5j * kern.potential(w) * dt) for w in (well_harm, well_anharm)])
    full = half * half
    kin = kern.kinetic_phase(dt)

    psi = np.stack([psi0.amplitudes, psi0.amplitudes]).astype(complex)
    norm0 = psi0.norm()
    times, values = [0.0], [1.0 if norm0 == 0 else abs(np.vdot(psi[1], psi[0]) * grid.dz) ** 2 / norm0**2]
    psi *= half
    done = 0
    while done < n:
        chunk = min(sample_every, n - done)
        for _ in range(chunk):
            psi = sfft.ifft(sfft.fft(psi, axis=-1, overwrite_x=True) * kin, axis=-1, overwrite_x=True)
            psi *= full
        done += chunk
        snap = psi / half  # undo the leading half kick of the next step
        norms = np.einsum("ij,ij->i", snap.conj(), snap).real * grid.dz
        if np.max(np.abs(norms - norm0)) > NORM_TOLERANCE:
            raise NumericalInstabilityError(f"norm drift {np.max(np.abs(norms - norm0)):.2e}")
        p = abs(np.vdot(snap[1], snap[0]) * grid.dz) ** 2 / norm0**2
        times.append(done * h)
        values.append(float(p))
        if stop_below is not None and p < stop_below:
            break

    times_a, values_a = np.array(times), np.array(values)
    return FidelityTrace(times_a, values_a, threshold, _crossing(times_a, values_a, threshold))
