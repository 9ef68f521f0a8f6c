import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import constants as sc

from iontide.physcore import (
    CA40,
    IonSpecies,
    NoiseModel,
    ResonanceError,
    TrapContext,
    coherent_amplitude,
    coulomb_coupling_coefficient,
    displacement_energy,
    ground_state_extent,
    heating_rate,
    ion_separation,
    mathieu_parameters,
    micromotion_coefficients,
    spectral_density_for_rate,
    species_preset,
)

OMEGA = 2 * math.pi * 1e6


def test_ground_state_extent_against_codata():
    m = 39.962590863 * sc.atomic_mass - sc.electron_mass
    a0 = math.sqrt(sc.hbar / (2 * m * OMEGA))
    assert ground_state_extent(CA40, OMEGA) == pytest.approx(a0, rel=1e-9)
    assert a0 == pytest.approx(11.24e-9, rel=2e-3)


def test_coherent_amplitude_quoted_value():
    alpha0 = coherent_amplitude(50e-6, CA40, OMEGA)
    assert alpha0 < 0
    assert abs(alpha0) == pytest.approx(4450, rel=2e-3)
    # energy of the displaced state corresponds to half that amplitude
    n = displacement_energy(50e-6, CA40, OMEGA) / (sc.hbar * OMEGA)
    assert math.sqrt(n) == pytest.approx(abs(alpha0) / 2, rel=1e-8)


@given(st.floats(1e-16, 1e-8), st.floats(1e5, 1e7))
def test_heating_rate_round_trip(s_e, f):
    w = 2 * math.pi * f
    rate = heating_rate(CA40, w, s_e)
    assert spectral_density_for_rate(CA40, w, rate) == pytest.approx(s_e, rel=1e-12)
    assert NoiseModel(spectral_density=s_e).rate(CA40, w) == rate


def test_noise_model_requires_one_input():
    with pytest.raises(ValueError):
        NoiseModel()
    with pytest.raises(ValueError):
        NoiseModel(spectral_density=1e-12, heating_rate=10)
    with pytest.raises(ValueError):
        NoiseModel(heating_rate=-1)


def test_species_validation():
    with pytest.raises(ValueError):
        IonSpecies(0.0, 1.0)
    with pytest.raises(ValueError):
        IonSpecies(1.0, 0.0)
    assert species_preset("40Ca+") is CA40
    with pytest.raises(KeyError):
        species_preset("Be9")


def test_micromotion_reference_values():
    ctx = TrapContext(OMEGA, 2 * math.pi * 100e6, 8e-6, 4.0)
    a, q, beta = mathieu_parameters(ctx, CA40)
    mm = micromotion_coefficients(ctx, CA40, 100e-6, D2=1.0)
    assert beta == pytest.approx(math.sqrt(a + q * q / 2))
    # lowest order: C+-2 ~ C0 q/4 for small a, q
    assert abs(mm.C_plus2) == pytest.approx(100e-6 * q / 4, rel=0.05)
    assert abs(mm.C_plus2) == pytest.approx(2.5e-15, rel=0.15)
    assert mm.D2 == 1.0


def test_micromotion_resonance():
    # choose a_z so that a_z = (2 - beta)^2 with q = 0
    m_w2 = CA40.mass * (2 * math.pi * 100e6) ** 2
    a = 1.0
    ctx = TrapContext(OMEGA, 2 * math.pi * 100e6, a * m_w2 / (8 * CA40.charge), 0.0)
    with pytest.raises(ResonanceError):
        micromotion_coefficients(ctx, CA40, 1e-6)


def test_trap_context_validation():
    with pytest.raises(ValueError):
        TrapContext(OMEGA, OMEGA / 2)


def test_ion_separation_is_force_balance():
    d = ion_separation(CA40, OMEGA)
    coulomb = CA40.charge**2 / (4 * math.pi * sc.epsilon_0 * d**2)
    spring = CA40.mass * OMEGA**2 * d / 2
    assert coulomb == pytest.approx(spring, rel=1e-12)


def test_coulomb_coupling_is_mixed_derivative():
    d = 5e-6
    k = CA40.charge**2 / (4 * math.pi * sc.epsilon_0)
    h = d * 1e-4

    def energy(x1, x2):
        return k / (d + x2 - x1)

    mixed = (energy(h, h) - energy(h, -h) - energy(-h, h) + energy(-h, -h)) / (4 * h * h)
    assert abs(mixed) == pytest.approx(coulomb_coupling_coefficient(CA40, d, True), rel=1e-6)
    assert coulomb_coupling_coefficient(CA40, d, False) == pytest.approx(
        coulomb_coupling_coefficient(CA40, d, True) / 2
    )
    with pytest.raises(ValueError):
        coulomb_coupling_coefficient(CA40, 0.0, True)


def test_omega_must_be_positive():
    for bad in (0.0, -1.0, np.nan):
        with pytest.raises(ValueError):
            ground_state_extent(CA40, bad)
