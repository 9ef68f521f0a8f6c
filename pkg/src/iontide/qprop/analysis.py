"""Observables and harmonic-oscillator projections of grid wavefunctions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from ..constants import HBAR
from ..physcore import IonSpecies, ground_state_extent
from ..potential import PotentialSpec, potential_value
from .grid import ResolutionError, Wavefunction


@dataclass(frozen=True)
class Moments:
    mean_z: float
    var_z: float
    mean_p: float
    var_p: float


def position_moments(psi: Wavefunction) -> tuple[float, float]:
    rho = psi.density() * psi.grid.dz
    z = psi.grid.z
    mean = float(np.dot(rho, z))
    var = float(np.dot(rho, (z - mean) ** 2))
    return mean, var


def momentum_moments(psi: Wavefunction) -> tuple[float, float]:
    phi = sfft.fft(psi.amplitudes)
    w = np.abs(phi) ** 2
    w /= w.sum()
    p = HBAR * psi.grid.wavenumbers
    mean = float(np.dot(w, p))
    var = float(np.dot(w, (p - mean) ** 2))
    return mean, var


def moments(psi: Wavefunction) -> Moments:
    mz, vz = position_moments(psi)
    mp, vp = momentum_moments(psi)
    return Moments(mz, vz, mp, vp)


def kinetic_energy(psi: Wavefunction, species: IonSpecies) -> float:
    phi = sfft.fft(psi.amplitudes)
    w = np.abs(phi) ** 2
    w /= w.sum()
    p = HBAR * psi.grid.wavenumbers
    return float(np.dot(w, p**2) / (2.0 * species.mass))


def potential_energy(psi: Wavefunction, well: PotentialSpec, species: IonSpecies) -> float:
    rho = psi.density() * psi.grid.dz
    return float(np.dot(rho, potential_value(well, species, psi.grid.z)))


def energy(psi: Wavefunction, well: PotentialSpec, species: IonSpecies) -> float:
    """<H> in J for the given well."""
    return kinetic_energy(psi, species) + potential_energy(psi, well, species)


# ---------------------------------------------------------------------------
# Fock projections

_WINDOW_SIGMAS = 12.0


def _check_fock_resolution(n_max: int, a0: float, dz: float) -> None:
    # the n-th eigenfunction carries wavenumbers up to sqrt(n+1)/a0 (in a0 units k^2 <= n + 1/2)
    k_max = math.sqrt(n_max + 1.0) / a0
    if k_max * dz > math.pi / 4:
        raise ResolutionError(f"Fock state n={n_max} is not resolved by dz={dz:.3g} m")
    # exp(-y^2/4) underflows before the classical turning point 2 sqrt(n+1/2)
    if n_max + 1 > 600:
        raise ResolutionError(f"Fock index {n_max} exceeds the stable recurrence range")


def fock_amplitudes(psi: Wavefunction, well: PotentialSpec, species: IonSpecies, n_max: int) -> np.ndarray:
    """``<n|psi>`` for n = 0..n_max, with |n> the eigenstates of the harmonic part of ``well``.

    Eigenfunctions come from the normalized three-term recurrence
    ``phi_n = (y phi_{n-1} - sqrt(n-1) phi_{n-2}) / sqrt(n)``, ``y = (z - c)/a0``,
    evaluated only inside a window where they are non-negligible.
    """
    if n_max < 0:
        raise ValueError("n must be non-negative")
    grid = psi.grid
    a0 = ground_state_extent(species, well.omega)
    _check_fock_resolution(n_max, a0, grid.dz)
    half_width = a0 * (2.0 * math.sqrt(n_max + 0.5) + _WINDOW_SIGMAS)
    win = grid.index_window(well.center - half_width, well.center + half_width)
    y = (grid.z[win] - well.center) / a0
    amp = psi.amplitudes[win]
    out = np.empty(n_max + 1, dtype=complex)
    norm = (2.0 * math.pi) ** -0.25 / math.sqrt(a0)
    prev = np.zeros_like(y)
    cur = norm * np.exp(-0.25 * y * y)
    out[0] = np.dot(cur, amp) * grid.dz
    for n in range(1, n_max + 1):
        nxt = (y * cur - math.sqrt(n - 1) * prev) / math.sqrt(n)
        prev, cur = cur, nxt
        out[n] = np.dot(cur, amp) * grid.dz
    return out


def fock_distribution(psi: Wavefunction, well: PotentialSpec, species: IonSpecies, n_max: int) -> np.ndarray:
    return np.abs(fock_amplitudes(psi, well, species, n_max)) ** 2


def fock_overlap(psi: Wavefunction, well: PotentialSpec, species: IonSpecies, n: int) -> float:
    """Probability |<n|psi>|^2 in the harmonic reference ``well``."""
    return float(fock_distribution(psi, well, species, n)[n])
