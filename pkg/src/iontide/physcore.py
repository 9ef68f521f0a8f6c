"""Ion species, trap context and closed-form trap quantities.

Everything here is a pure function of immutable values.  Lengths are in
metres, angular frequencies in rad/s.

Two conventions for the coherent amplitude of a displaced ground state are
in circulation and differ by a factor of two.  With the ground-state r.m.s.
extent ``a0 = sqrt(hbar / (2 m omega))`` the annihilation operator is
``a = (z / a0 + i p a0 / hbar) / 2``, so a displacement ``z0`` corresponds to
``|alpha| = z0 / (2 a0)``; that is the convention of :mod:`iontide.qprop` and
of the finite-switching kernel in :mod:`iontide.switchcal`.  The transport
literature quotes ``alpha0 = -z0 / a0`` (``|alpha0| ~ 4450`` for 40Ca+ at
1 MHz and 50 um).  :func:`coherent_amplitude` returns that quoted value so the
timing-tolerance numbers derived from it reproduce; the energy of the
displaced state, ``hbar omega |alpha|^2 = m omega^2 z0^2 / 2``, instead implies
``|alpha| ~ 2230`` (see :func:`displacement_energy`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import CA40_ION_MASS, ELEMENTARY_CHARGE, EPSILON_0, HBAR, TWO_PI


class ResonanceError(ArithmeticError):
    """A micromotion denominator vanishes."""


@dataclass(frozen=True)
class IonSpecies:
    mass: float
    charge: float
    label: str = ""

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError(f"mass must be positive, got {self.mass}")
        if self.charge == 0:
            raise ValueError("charge must be non-zero")


CA40 = IonSpecies(mass=CA40_ION_MASS, charge=ELEMENTARY_CHARGE, label="40Ca+")

SPECIES_PRESETS = {"Ca40": CA40, "40Ca+": CA40}


def species_preset(name: str) -> IonSpecies:
    try:
        return SPECIES_PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown species preset {name!r}; known: {sorted(SPECIES_PRESETS)}") from None


@dataclass(frozen=True)
class TrapContext:
    """Secular/drive frequencies and axial curvature coefficients of an rf trap.

    ``dc_axial_curvature`` and ``rf_axial_curvature`` are the second-order
    coefficients (V/m^2) of the static and rf contributions to the axial
    potential.
    """

    secular_angular_frequency: float
    drive_angular_frequency: float
    dc_axial_curvature: float = 0.0
    rf_axial_curvature: float = 0.0

    def __post_init__(self):
        if not self.secular_angular_frequency > 0:
            raise ValueError("secular frequency must be positive")
        if not self.drive_angular_frequency > self.secular_angular_frequency:
            raise ValueError("drive frequency must exceed the secular frequency")


@dataclass(frozen=True)
class MicromotionCoefficients:
    a_z: float
    q_z: float
    beta_z: float
    C0: float
    C_plus2: float
    C_minus2: float
    D2: float | None = None


@dataclass(frozen=True)
class NoiseModel:
    """Electric-field noise either as a spectral density or a heating rate.

    Exactly one of ``spectral_density`` ((V/m)^2/Hz at the secular frequency)
    and ``heating_rate`` (quanta/s) is given.
    """

    spectral_density: float | None = None
    heating_rate: float | None = None

    def __post_init__(self):
        if (self.spectral_density is None) == (self.heating_rate is None):
            raise ValueError("give exactly one of spectral_density or heating_rate")
        value = self.spectral_density if self.heating_rate is None else self.heating_rate
        if value < 0:
            raise ValueError("noise strength must be non-negative")

    def rate(self, species: IonSpecies, omega: float) -> float:
        if self.heating_rate is not None:
            return self.heating_rate
        return heating_rate(species, omega, self.spectral_density)


def _check_omega(omega: float) -> None:
    if not omega > 0:
        raise ValueError(f"angular frequency must be positive, got {omega}")


def ground_state_extent(species: IonSpecies, omega: float) -> float:
    """r.m.s. extent ``a0 = sqrt(hbar / (2 m omega))`` of the ground state."""
    _check_omega(omega)
    return math.sqrt(HBAR / (2.0 * species.mass * omega))


def coherent_amplitude(z0: float, species: IonSpecies, omega: float) -> float:
    """Transport coherent parameter ``alpha0 = -z0 / a0`` as quoted for throw-catch.

    Note the module docstring: this is twice the displacement-operator
    amplitude of the same state.
    """
    return -z0 / ground_state_extent(species, omega)


def displacement_energy(z0: float, species: IonSpecies, omega: float) -> float:
    """Energy above the ground state of a state displaced by ``z0`` (J)."""
    return 0.5 * species.mass * omega**2 * z0**2


def heating_rate(species: IonSpecies, omega: float, spectral_density: float) -> float:
    """Ground-to-first-excited transition rate ``q^2 S_E / (4 m omega hbar)``."""
    _check_omega(omega)
    if spectral_density < 0:
        raise ValueError("spectral density must be non-negative")
    return species.charge**2 * spectral_density / (4.0 * species.mass * omega * HBAR)


def spectral_density_for_rate(species: IonSpecies, omega: float, rate: float) -> float:
    """Inverse of :func:`heating_rate`: field-noise density giving ``rate``."""
    _check_omega(omega)
    if rate < 0:
        raise ValueError("heating rate must be non-negative")
    return rate * 4.0 * species.mass * omega * HBAR / species.charge**2


def mathieu_parameters(ctx: TrapContext, species: IonSpecies) -> tuple[float, float, float]:
    """Axial ``(a_z, q_z, beta_z)`` in the lowest-order approximation for beta."""
    m_omega2 = species.mass * ctx.drive_angular_frequency**2
    a_z = 8.0 * species.charge * ctx.dc_axial_curvature / m_omega2
    q_z = 4.0 * species.charge * ctx.rf_axial_curvature / m_omega2
    beta_sq = a_z + q_z**2 / 2.0
    if beta_sq < 0:
        raise ValueError("a_z + q_z^2/2 < 0: axially unstable")
    return a_z, q_z, math.sqrt(beta_sq)


def micromotion_coefficients(
    ctx: TrapContext, species: IonSpecies, C0: float, D2: float | None = None
) -> MicromotionCoefficients:
    """Sideband amplitudes ``C_{+-2}`` of axial micromotion for secular amplitude ``C0``.

    ``D2`` (the response to a residual homogeneous rf field) is carried
    through unchanged.
    """
    a_z, q_z, beta = mathieu_parameters(ctx, species)
    amps = []
    for sign in (+2.0, -2.0):
        denom = a_z - (sign + beta) ** 2
        if denom == 0.0 or abs(denom) < 1e-300:
            raise ResonanceError(f"vanishing denominator for the {sign:+.0f} sideband")
        amps.append(-C0 * q_z / denom)
    return MicromotionCoefficients(a_z, q_z, beta, C0, amps[0], amps[1], D2)


def ion_separation(species: IonSpecies, omega_z: float) -> float:
    """Equilibrium distance of two identical ions sharing one harmonic well."""
    _check_omega(omega_z)
    return (species.charge**2 / (2.0 * math.pi * species.mass * EPSILON_0 * omega_z**2)) ** (1.0 / 3.0)


def coulomb_coupling_coefficient(species: IonSpecies, d: float, aligned: bool) -> float:
    """Magnitude of the bilinear ``xi1 xi2`` term of the Coulomb energy, J/m^2.

    ``chi = 2`` for excursions along the inter-ion axis, 1 transverse.  The
    expansion itself carries a negative sign in the aligned case (the term is
    ``-2 k xi1 xi2`` with ``k = q^2 / (4 pi eps0 d^3)``); the magnitude is
    what sets the exchange rate.
    """
    if not d > 0:
        raise ValueError("separation must be positive")
    chi = 2.0 if aligned else 1.0
    return species.charge**2 * chi / (4.0 * math.pi * EPSILON_0 * d**3)


def angular(frequency_hz: float) -> float:
    return TWO_PI * frequency_hz
