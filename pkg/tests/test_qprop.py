import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gammaln

from iontide.constants import HBAR
from iontide.physcore import CA40, ground_state_extent
from iontide.potential import PotentialSpec, throw_catch_protocol
from iontide.qprop import (
    GeometryError,
    GridError,
    GridSpec,
    ResolutionError,
    Wavefunction,
    energy,
    fock_distribution,
    make_coherent_state,
    make_ground_state,
    make_squeezed_state,
    momentum_kick,
    moments,
    propagate,
    read_wavefunction_binary,
    read_wavefunction_csv,
    relax_ground_state,
    write_wavefunction_binary,
    write_wavefunction_csv,
)
from iontide.scenarios.experiments import TransportGrid, anharmonic_lifetime, throw_catch_populations

F = 1e6
WELL = PotentialSpec(F)
A0 = ground_state_extent(CA40, WELL.omega)
PERIOD = 1 / F


def grid(points=1024, half=20.0, dt=PERIOD / 1000, steps=1000):
    return GridSpec(-half * A0, half * A0, points, dt, steps)


def squeezed_fock(r, n_max):
    # <2k|S(r)|0>^2 = tanh(r)^2k (2k)! / (4^k k!^2 cosh r)
    p = np.zeros(n_max + 1)
    for k in range(n_max // 2 + 1):
        p[2 * k] = math.exp(2 * k * math.log(math.tanh(r)) + gammaln(2 * k + 1) - 2 * k * math.log(2) - 2 * gammaln(k + 1)) / math.cosh(r)
    return p


def test_grid_validation():
    with pytest.raises(GridError):
        GridSpec(0, 1, 1000, 1e-9)
    with pytest.raises(GridError):
        GridSpec(1, 0, 1024, 1e-9)
    with pytest.raises(GridError):
        GridSpec(0, 1, 1024, 0.0)


def test_ground_state_is_stationary():
    g = grid()
    psi = make_ground_state(g, WELL, CA40)
    res = propagate(psi, WELL, CA40, g)
    assert abs(res.final.inner(psi)) ** 2 == pytest.approx(1.0, abs=1e-12)
    assert energy(psi, WELL, CA40) == pytest.approx(0.5 * HBAR * WELL.omega, rel=1e-10)


@settings(max_examples=15, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3))
def test_coherent_state_moments(re, im):
    g = grid(2048, 30.0)
    psi = make_coherent_state(g, WELL, CA40, complex(re, im))
    m = moments(psi)
    assert m.mean_z == pytest.approx(2 * A0 * re, abs=1e-9 * A0)
    assert m.mean_p == pytest.approx(HBAR / A0 * im, abs=1e-9 * HBAR / A0)
    assert m.var_z == pytest.approx(A0**2, rel=1e-9)


@settings(max_examples=10, deadline=None)
@given(st.floats(0.05, 1.5))
def test_squeezed_fock_distribution(r):
    g = grid(4096, 60.0)
    psi = make_squeezed_state(g, WELL, CA40, r)
    n_max = 30
    p = fock_distribution(psi, WELL, CA40, n_max)
    assert np.max(np.abs(p - squeezed_fock(r, n_max))) < 1e-10
    assert moments(psi).var_z == pytest.approx(A0**2 * math.exp(-2 * r), rel=1e-9)


def test_coherent_state_follows_classical_orbit():
    g = grid(1024, 20.0, PERIOD / 2000, 2000)
    psi = make_coherent_state(g, WELL, CA40, 2.0 + 1.0j)
    res = propagate(psi, WELL, CA40, g, trace_every=100)
    t, mz, mp = res.trace[:, 0], res.trace[:, 1], res.trace[:, 2]
    w = WELL.omega
    z_cl = 2 * A0 * (2.0 * np.cos(w * t) + 1.0 * np.sin(w * t))
    p_cl = HBAR / A0 * (1.0 * np.cos(w * t) - 2.0 * np.sin(w * t))
    assert np.max(np.abs(mz - z_cl)) < 1e-5 * A0
    assert np.max(np.abs(mp - p_cl)) < 1e-5 * HBAR / A0
    assert res.norm_drift < 1e-12


def test_relaxed_ground_energy_matches_perturbation():
    L4 = 30 * A0
    well = PotentialSpec(F, None, L4)
    g = grid(1024, 20.0)
    amp, e = relax_ground_state(g, well, CA40, np.exp(-0.25 * (g.z / A0) ** 2))
    e /= HBAR * WELL.omega
    eps = (A0 / L4) ** 2
    # first order 3/4 eps; second order -(21/8) eps^2 (quartic perturbation x^4/4 in hbar omega)
    assert e == pytest.approx(0.5 + 0.75 * eps - 21 / 8 * eps**2, abs=50 * eps**3)
    psi = make_ground_state(g, well, CA40)
    assert energy(psi, well, CA40) / (HBAR * WELL.omega) == pytest.approx(e, abs=1e-9)


def test_odd_populations_vanish_for_even_state():
    g = grid(2048, 40.0, PERIOD / 500, 2500)
    anh = PotentialSpec(F, None, -40 * A0)
    psi = make_squeezed_state(g, WELL, CA40, 0.8)
    res = propagate(psi, anh, CA40, g)
    p = fock_distribution(res.final, WELL, CA40, 9)
    assert np.max(p[1::2]) < 1e-20
    assert p[0] < 0.99


def test_geometry_and_resolution_errors():
    g = grid(256, 6.0)
    with pytest.raises(GeometryError):
        make_coherent_state(g, WELL, CA40, 2.0)
    g = grid(64, 20.0)
    psi = make_ground_state(g, WELL, CA40)
    with pytest.raises(GridError):
        propagate(momentum_kick(psi, 20 * HBAR / A0), WELL, CA40, g)
    with pytest.raises(ResolutionError):
        fock_distribution(psi, WELL, CA40, 40)


def test_protocol_budget_checked():
    z0 = 40 * A0
    proto = throw_catch_protocol(z0, WELL, PERIOD / 2)
    g = GridSpec(-80 * A0, 80 * A0, 4096, PERIOD / 1000, 10)
    psi = make_ground_state(g, proto.initial_well, CA40)
    with pytest.raises(GridError):
        propagate(psi, proto, CA40, g)


def test_harmonic_throw_catch_returns_ground_state():
    out = throw_catch_populations(CA40, F, None, 1e-6, TransportGrid(16384, 0.6, 200e-12))
    assert out.catch_time == pytest.approx(PERIOD / 2, rel=1e-10)
    assert 1 - out.populations[0] < 1e-8


def test_transport_grid_doubling():
    kw = dict(species=CA40, f_z=F, L4=-2.4e-6, z0=1e-6)
    a = throw_catch_populations(grid=TransportGrid(16384, 0.6, 200e-12), **kw).populations
    b = throw_catch_populations(grid=TransportGrid(32768, 0.6, 200e-12), **kw).populations
    assert a[0] == pytest.approx(0.916, abs=5e-3)
    assert np.max(np.abs(a - b)) < 1e-8


def test_time_step_convergence_is_second_order():
    from iontide.scenarios.acceptance import property_dt_convergence

    e1, e2, ratio = property_dt_convergence()
    assert 3.5 < ratio < 4.5


def _fock_lifetime_oracle(r, L4, t):
    # first-order energy shifts of the quartic term, phases on the squeezed-vacuum distribution
    n = np.arange(0, 400)
    p = squeezed_fock(r, n[-1])
    eps = math.copysign(1.0, L4) * (A0 / L4) ** 2
    dE = eps * (6 * n**2 + 6 * n + 3) / 4
    return np.array([abs(np.sum(p * np.exp(-1j * dE * WELL.omega * tt))) ** 2 for tt in np.atleast_1d(t)])


def test_squeezed_overlap_decay_against_fock_oracle():
    r = math.log(10)
    trace = anharmonic_lifetime(CA40, F, -120e-6, r, t_max=1.7e-3)
    t_check = 1.59e-3
    got = np.interp(t_check, trace.times, trace.fidelity)
    assert got == pytest.approx(_fock_lifetime_oracle(r, -120e-6, t_check)[0], abs=0.01)
    assert trace.lifetime is None


def test_wavefunction_io_round_trip(tmp_path):
    g = grid(256, 12.0)
    psi = make_coherent_state(g, WELL, CA40, 0.5 + 0.7j)
    write_wavefunction_binary(psi, tmp_path / "psi.bin")
    back = read_wavefunction_binary(tmp_path / "psi.bin")
    assert back.grid == g and np.array_equal(back.amplitudes, psi.amplitudes)
    write_wavefunction_csv(psi, tmp_path / "psi.csv")
    back = read_wavefunction_csv(tmp_path / "psi.csv", g.dt, g.steps)
    assert np.allclose(back.amplitudes, psi.amplitudes, rtol=0, atol=1e-15 * np.abs(psi.amplitudes).max())
    assert back.grid.dz == pytest.approx(g.dz, rel=1e-12)
    (tmp_path / "junk.bin").write_bytes(b"NOTAWAVEFUNCTION" * 4)
    with pytest.raises(GridError):
        read_wavefunction_binary(tmp_path / "junk.bin")


def test_wavefunction_requires_matching_shape():
    with pytest.raises(GridError):
        Wavefunction(grid(256), np.zeros(128))
