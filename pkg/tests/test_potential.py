import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from iontide.physcore import CA40
from iontide.potential import (
    PotentialSpec,
    ProtocolTimeError,
    TransitionShape,
    anticonfining_threshold,
    classical_turning_point,
    local_frequency,
    local_frequency_squared,
    potential_curvature,
    potential_gradient,
    potential_value,
    throw_catch_protocol,
)

F = 1e6
lengths = st.one_of(st.none(), st.floats(20e-6, 1e-3), st.floats(-1e-3, -20e-6))


@given(lengths, lengths, st.floats(-10e-6, 10e-6))
def test_derivatives_match_finite_differences(L3, L4, z):
    spec = PotentialSpec(F, L3, L4, 1e-6)
    h = 1e-9
    fd = (potential_value(spec, CA40, z + h) - potential_value(spec, CA40, z - h)) / (2 * h)
    assert potential_gradient(spec, CA40, z) == pytest.approx(fd, rel=1e-5, abs=1e-30)
    fd2 = (potential_gradient(spec, CA40, z + h) - potential_gradient(spec, CA40, z - h)) / (2 * h)
    assert potential_curvature(spec, CA40, z) == pytest.approx(fd2, rel=1e-5)


def test_harmonic_curvature_gives_frequency():
    spec = PotentialSpec(F)
    assert potential_curvature(spec, CA40, 0.3e-6) == pytest.approx(CA40.mass * spec.omega**2, rel=1e-12)


def test_infinite_lengths_normalized():
    spec = PotentialSpec(F, 1e4, math.inf)
    assert spec.L3 is None and spec.L4 is None and spec.is_harmonic
    with pytest.raises(ValueError):
        PotentialSpec(F, 0.0)
    with pytest.raises(ValueError):
        PotentialSpec(-F)


def test_anticonfining_thresholds():
    spec = PotentialSpec(F, None, -120e-6)
    z1, z2 = anticonfining_threshold(spec)
    assert local_frequency_squared(spec, z1) == pytest.approx(0.0, abs=1e-6 * spec.omega**2)
    assert potential_gradient(spec, CA40, z2) == pytest.approx(0.0, abs=1e-25)
    assert np.isnan(local_frequency(spec, 1.01 * z1))
    assert anticonfining_threshold(PotentialSpec(F, None, 120e-6)) == (math.inf, math.inf)


def _half_period_oracle(spec, z0):
    # V = k u^2 + c u^4; with z = -z0 cos(th) the half period is a smooth integral
    k = 2 * math.pi**2 * CA40.mass * spec.f_z**2
    c = k * spec._c4()

    def dt(th):
        z = -z0 * math.cos(th)
        return 1.0 / math.sqrt(2.0 / CA40.mass * (k + c * (z0 * z0 + z * z)))

    val, _ = integrate.quad(dt, 0.0, math.pi, epsabs=0, epsrel=1e-13)
    return val


@settings(max_examples=20, deadline=None)
@given(st.floats(-0.35, 0.35))
def test_turning_point_against_energy_integral(z0_over_L4):
    z0 = 50e-6
    L4 = None if abs(z0_over_L4) < 1e-6 else z0 / z0_over_L4
    spec = PotentialSpec(F, None, L4)
    t, z = classical_turning_point(spec, CA40, -z0)
    assert z == pytest.approx(z0, rel=1e-8)
    assert t == pytest.approx(_half_period_oracle(spec, z0), rel=1e-8)


def test_turning_point_beyond_barrier_raises():
    spec = PotentialSpec(F, None, -120e-6)
    with pytest.raises(ValueError):
        classical_turning_point(spec, CA40, -100e-6)


def test_protocol_centers_and_velocity():
    tr = PotentialSpec(F, None, -120e-6)
    p = throw_catch_protocol(
        50e-6, tr, 500e-9, TransitionShape.linear(10e-9), TransitionShape.sinusoidal(20e-9)
    )
    assert p.center(0.0) == pytest.approx(-50e-6)
    assert p.center(5e-9) == pytest.approx(-25e-6)
    assert p.center(100e-9) == 0.0
    assert p.center(510e-9) == pytest.approx(25e-6)
    assert p.center(p.duration) == pytest.approx(50e-6)
    assert p.velocity(5e-9) == pytest.approx(50e-6 / 10e-9)
    assert p.velocity(510e-9) == pytest.approx(50e-6 * math.pi / 40e-9)
    assert p.final_well.is_harmonic and p.well_at(100e-9) == tr
    with pytest.raises(ProtocolTimeError):
        p.center(-1e-9)
    with pytest.raises(ValueError):
        throw_catch_protocol(50e-6, tr, 5e-9, TransitionShape.linear(10e-9))


@given(st.lists(st.floats(0.01, 1.0), min_size=3, max_size=10))
def test_sampled_shape_is_normalized(steps):
    t = np.cumsum([0.0] + steps) * 1e-9
    pos = -50e-6 + 100e-6 * np.linspace(0, 1, len(t)) ** 2
    shape = TransitionShape.sampled(t, pos)
    assert shape.fraction(0.0) == pytest.approx(0.0, abs=1e-12)
    assert shape.fraction(shape.duration) == pytest.approx(1.0)
    assert shape.anchor == (pos[0], pos[-1])


def test_sampled_shape_from_csv(tmp_path):
    path = tmp_path / "ramp.csv"
    path.write_text("# ramp\ntime,position\n0,-5e-5\n1e-8,0\n2e-8,5e-5\n")
    shape = TransitionShape.from_csv(path)
    assert shape.duration == pytest.approx(2e-8)
    assert shape.fraction(1e-8) == pytest.approx(0.5)
    bad = tmp_path / "bad.csv"
    bad.write_text("time,position\n0,1\n")
    with pytest.raises(ValueError):
        TransitionShape.from_csv(bad)


def test_sampled_anchor_must_match_wells():
    tr = PotentialSpec(F)
    shape = TransitionShape.sampled([0, 1e-8], [-40e-6, 0.0])
    with pytest.raises(ValueError):
        throw_catch_protocol(50e-6, tr, 1e-6, throw=shape)


def test_transition_validation():
    with pytest.raises(ValueError):
        TransitionShape("cubic", 1.0)
    with pytest.raises(ValueError):
        TransitionShape("linear", 0.0)
    with pytest.raises(ValueError):
        TransitionShape.sampled([0, 1, 1], [0, 1, 2])
