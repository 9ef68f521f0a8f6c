"""Spatial grid, wavefunction container and oscillator units."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ..constants import HBAR
from ..physcore import IonSpecies


class GridError(ValueError):
    """The grid cannot represent the requested state or dynamics."""


class GeometryError(GridError):
    """A state or well does not fit inside the grid with the required margin."""


class NumericalInstabilityError(RuntimeError):
    """Norm drift beyond tolerance during propagation."""


class ResolutionError(GridError):
    """A basis function oscillates faster than the grid resolves."""


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid ``z_k = z_min + k dz`` with ``dz = (z_max - z_min)/points``.

    ``dt`` is the maximum time step and ``steps * dt`` the time span the grid
    is budgeted for; propagators align steps to protocol switch times and
    may therefore use a slightly shorter step.
    """

    z_min: float
    z_max: float
    points: int
    dt: float
    steps: int = 1

    def __post_init__(self):
        if not self.z_max > self.z_min:
            raise GridError("z_max must exceed z_min")
        if self.points < 16 or self.points & (self.points - 1):
            raise GridError(f"points must be a power of two >= 16, got {self.points}")
        if not self.dt > 0:
            raise GridError("dt must be positive")
        if self.steps < 1:
            raise GridError("steps must be >= 1")

    @property
    def dz(self) -> float:
        return (self.z_max - self.z_min) / self.points

    @property
    def span(self) -> float:
        return self.z_max - self.z_min

    @cached_property
    def z(self) -> np.ndarray:
        return self.z_min + self.dz * np.arange(self.points)

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Angular wavenumbers (1/m) in FFT order."""
        return 2.0 * np.pi * np.fft.fftfreq(self.points, self.dz)

    @property
    def max_momentum(self) -> float:
        """Nyquist momentum ``pi hbar / dz``."""
        return math.pi * HBAR / self.dz

    def index_window(self, lo: float, hi: float) -> slice:
        i0 = max(0, int(math.floor((lo - self.z_min) / self.dz)))
        i1 = min(self.points, int(math.ceil((hi - self.z_min) / self.dz)) + 1)
        return slice(i0, i1)


@dataclass(frozen=True)
class OscillatorUnits:
    """Dimensionless units of a reference well: length ``a0``, time ``1/omega``, energy ``hbar omega``.

    With ``x = z/a0`` the Hamiltonian reads ``H/(hbar omega) = k^2 + V/(hbar omega)``
    and the harmonic part is ``x^2/4``.
    """

    species: IonSpecies
    omega: float

    @property
    def length(self) -> float:
        return math.sqrt(HBAR / (2.0 * self.species.mass * self.omega))

    @property
    def time(self) -> float:
        return 1.0 / self.omega

    @property
    def energy(self) -> float:
        return HBAR * self.omega

    @property
    def momentum(self) -> float:
        return HBAR / self.length


@dataclass
class Wavefunction:
    """Complex amplitudes on ``grid``, normalized so that ``sum |psi|^2 dz = 1``."""

    grid: GridSpec
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (self.grid.points,):
            raise GridError("amplitude array does not match the grid")

    def norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real * self.grid.dz)

    def normalized(self) -> "Wavefunction":
        return Wavefunction(self.grid, self.amplitudes / math.sqrt(self.norm()))

    def copy(self) -> "Wavefunction":
        return Wavefunction(self.grid, self.amplitudes.copy())

    def inner(self, other: "Wavefunction") -> complex:
        """<self|other>."""
        if other.grid != self.grid:
            raise GridError("wavefunctions live on different grids")
        return complex(np.vdot(self.amplitudes, other.amplitudes) * self.grid.dz)

    def overlap(self, other: "Wavefunction") -> float:
        return abs(self.inner(other)) ** 2

    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def next_power_of_two(n: float) -> int:
    return 1 << max(4, math.ceil(math.log2(max(n, 16))))
