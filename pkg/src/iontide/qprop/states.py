"""Constructors for ground, coherent and squeezed motional states on a grid."""

from __future__ import annotations

import cmath
import math

import numpy as np

from ..constants import HBAR
from ..physcore import IonSpecies, ground_state_extent
from ..potential import PotentialSpec
from .grid import GeometryError, GridSpec, Wavefunction
from .propagator import relax_ground_state

MARGIN_WIDTHS = 5.0


def _require_inside(grid: GridSpec, lo: float, hi: float, what: str) -> None:
    if lo < grid.z_min or hi > grid.z_max:
        raise GeometryError(
            f"{what} spans [{lo:.4g}, {hi:.4g}] m, outside the grid [{grid.z_min:.4g}, {grid.z_max:.4g}] m"
        )


def _normalize(grid: GridSpec, amp: np.ndarray) -> Wavefunction:
    return Wavefunction(grid, amp).normalized()


def _gaussian(grid: GridSpec, center: float, a0: float, q: complex = 1.0, k: float = 0.0) -> np.ndarray:
    # exp(-q y^2 / 4 + i k z), y = (z - center)/a0; q = 1 is the ground state of width a0
    y = (grid.z - center) / a0
    return np.exp(-0.25 * q * y * y + 1j * k * (grid.z - center))


def make_ground_state(grid: GridSpec, well: PotentialSpec, species: IonSpecies) -> Wavefunction:
    """Ground state of ``well``: analytic Gaussian if harmonic, otherwise imaginary-time relaxed.

    Relaxation runs on a power-of-two window of the grid around the well
    (same spacing) and is embedded back, so large transport grids stay cheap.
    """
    a0 = ground_state_extent(species, well.omega)
    _require_inside(grid, well.center - MARGIN_WIDTHS * a0, well.center + MARGIN_WIDTHS * a0, "ground state")
    guess = _gaussian(grid, well.center, a0)
    if well.is_harmonic:
        return _normalize(grid, guess)

    half_width = 40.0 * a0
    n_win = 1 << max(8, math.ceil(math.log2(2 * half_width / grid.dz)))
    if n_win >= grid.points:
        amp, _ = relax_ground_state(grid, well, species, guess)
        return _normalize(grid, amp)
    i_c = int(round((well.center - grid.z_min) / grid.dz))
    i0 = min(max(0, i_c - n_win // 2), grid.points - n_win)
    sub = GridSpec(grid.z[i0], grid.z[i0] + n_win * grid.dz, n_win, grid.dt)
    amp_sub, _ = relax_ground_state(sub, well, species, guess[i0 : i0 + n_win])
    amp = np.zeros(grid.points, dtype=complex)
    amp[i0 : i0 + n_win] = amp_sub
    return _normalize(grid, amp)


def make_coherent_state(grid: GridSpec, well: PotentialSpec, species: IonSpecies, alpha: complex) -> Wavefunction:
    """Displaced ground Gaussian of the harmonic part of ``well``.

    Displacement-operator convention: ``<z> = center + 2 a0 Re(alpha)`` and
    ``<p> = (hbar / a0) Im(alpha)``.
    """
    alpha = complex(alpha)
    a0 = ground_state_extent(species, well.omega)
    zc = well.center + 2.0 * a0 * alpha.real
    _require_inside(grid, zc - MARGIN_WIDTHS * a0, zc + MARGIN_WIDTHS * a0, "coherent state")
    k = alpha.imag / a0  # p / hbar
    return _normalize(grid, _gaussian(grid, zc, a0, 1.0, k))


def squeezing_quadratic(r: float, phi: float) -> complex:
    """Coefficient ``q`` of ``exp(-q y^2/4)`` for the squeezed vacuum ``S(r e^{i phi})|0>``."""
    e = cmath.exp(1j * phi) * math.tanh(r)
    return (1.0 + e) / (1.0 - e)


def make_squeezed_state(
    grid: GridSpec, well: PotentialSpec, species: IonSpecies, r: float, phi: float = 0.0
) -> Wavefunction:
    """Squeezed vacuum; ``phi = 0`` gives position variance ``a0^2 e^{-2r}``.

    The state is annihilated by ``a cosh r + a^dagger e^{i phi} sinh r``.
    """
    a0 = ground_state_extent(species, well.omega)
    widest = a0 * math.exp(abs(r))
    _require_inside(grid, well.center - MARGIN_WIDTHS * widest, well.center + MARGIN_WIDTHS * widest, "squeezed state")
    return _normalize(grid, _gaussian(grid, well.center, a0, squeezing_quadratic(r, phi)))


def momentum_kick(psi: Wavefunction, p: float) -> Wavefunction:
    """Multiply by ``exp(i p z / hbar)``."""
    return Wavefunction(psi.grid, psi.amplitudes * np.exp(1j * p / HBAR * psi.grid.z))
