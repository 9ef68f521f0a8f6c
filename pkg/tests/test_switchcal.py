import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iontide.physcore import CA40, coherent_amplitude
from iontide.potential import PotentialSpec, TransitionShape, throw_catch_protocol
from iontide.switchcal import (
    SingularityError,
    alpha_prefactor,
    catch_ramp_sweep,
    minimize_over_hold,
    optimal_hold_linear,
    optimal_hold_sinusoidal,
    residual_alpha_general,
    residual_alpha_linear,
    residual_alpha_linear_approx,
    residual_alpha_sinusoidal,
    shape_factor_linear,
    shape_factor_linear_approx,
    timing_budget,
    timing_overlap,
    timing_overlap_exact,
    timing_tolerance,
)

F = 1e6
W = 2 * math.pi * F
Z0 = 50e-6
WELL = PotentialSpec(F)
SCALE = alpha_prefactor(CA40, W) * Z0


def linear_protocol(tau, tau_c, T):
    return throw_catch_protocol(Z0, WELL, T, TransitionShape.linear(tau), TransitionShape.linear(tau_c))


def test_timing_tolerance_value():
    alpha0 = coherent_amplitude(Z0, CA40, W)
    dt = timing_tolerance(alpha0, W, 0.9)
    assert dt == pytest.approx(11.6e-12, rel=0.01)
    assert timing_overlap(alpha0, W, dt) == pytest.approx(0.9, rel=1e-12)
    assert timing_overlap_exact(alpha0, W, dt) == pytest.approx(0.9, rel=1e-6)
    assert timing_budget(alpha0, W, 0.9).dt == dt
    with pytest.raises(ValueError):
        timing_tolerance(alpha0, W, 1.0)
    with pytest.warns(RuntimeWarning):
        timing_overlap(alpha0, W, 1e-7)


def test_instantaneous_half_period_is_exact():
    proto = throw_catch_protocol(Z0, WELL, math.pi / W)
    assert abs(residual_alpha_general(proto, CA40)) < 1e-9 * SCALE


def test_instantaneous_mistimed_catch():
    # catch late by dt: the amplitude is the displacement 2 z0 projected on the rotated frame
    dt = 5e-9
    proto = throw_catch_protocol(Z0, WELL, math.pi / W + dt)
    expected = SCALE * abs(1 - np.exp(-1j * W * dt))
    assert abs(residual_alpha_general(proto, CA40)) == pytest.approx(expected, rel=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.floats(1e-9, 100e-9), st.floats(1e-9, 100e-9), st.floats(0.0, 1e-6))
def test_linear_closed_form_matches_quadrature(tau, tau_c, extra):
    T = tau + extra
    closed = residual_alpha_linear(Z0, W, tau, tau_c, T, CA40).alpha
    quad = residual_alpha_general(linear_protocol(tau, tau_c, T), CA40)
    assert abs(closed - quad) <= 1e-7 * abs(closed) + 1e-9 * SCALE


@settings(max_examples=25, deadline=None)
@given(st.floats(1e-9, 400e-9), st.floats(1e-9, 400e-9), st.floats(0.0, 1e-6))
def test_sinusoidal_closed_form_matches_quadrature(tau, tau_c, extra):
    T = tau + extra
    closed = residual_alpha_sinusoidal(Z0, W, tau, tau_c, T, CA40).alpha
    proto = throw_catch_protocol(Z0, WELL, T, TransitionShape.sinusoidal(tau), TransitionShape.sinusoidal(tau_c))
    quad = residual_alpha_general(proto, CA40)
    assert abs(closed - quad) <= 1e-7 * abs(closed) + 1e-9 * SCALE


def test_sinusoidal_singularity():
    with pytest.raises(SingularityError):
        residual_alpha_sinusoidal(Z0, W, 0.6 / F, 10e-9, None, CA40)


@settings(max_examples=25, deadline=None)
@given(st.floats(1e-9, 150e-9), st.floats(1e-9, 150e-9))
def test_optimal_hold_is_global_minimum(tau, tau_c):
    T = optimal_hold_linear(W, tau, tau_c)
    T_num = minimize_over_hold(lambda t: abs(shape_factor_linear(W, tau, tau_c, t)), W)
    period = 1 / F
    d = abs(T - T_num) % period
    assert min(d, period - d) < 1e-6 * period
    # |A e^{-iwT} + B| has minimum ||A| - |B||
    f = shape_factor_linear(W, tau, tau_c, T)
    a = abs(shape_factor_linear(W, tau, tau_c, T) - shape_factor_linear(W, tau, tau_c, T + period / 2)) / 2
    assert abs(f) <= a + 1e-12


def test_sinusoidal_optimal_hold():
    T = optimal_hold_sinusoidal(W, 40e-9, 80e-9)
    vals = [abs(residual_alpha_sinusoidal(Z0, W, 40e-9, 80e-9, t, CA40).alpha) for t in np.linspace(0, 1e-6, 401)]
    assert abs(residual_alpha_sinusoidal(Z0, W, 40e-9, 80e-9, T, CA40).alpha) <= min(vals) + 1e-9


@given(st.floats(1e-9, 200e-9))
def test_equal_ramps_cancel(tau):
    for fn in (residual_alpha_linear, residual_alpha_sinusoidal):
        assert abs(fn(Z0, W, tau, tau, None, CA40).alpha) < 1e-9 * SCALE


def test_expansion_agrees_for_short_ramps():
    tau, tau_c = 2e-9, 3e-9
    T = math.pi / W
    exact = shape_factor_linear(W, tau, tau_c, T)
    approx = shape_factor_linear_approx(W, tau, tau_c, T)
    assert abs(exact - approx) < (W * tau_c) ** 3
    r = residual_alpha_linear(Z0, W, tau, tau_c, None, CA40)
    # near the cancellation point only the absolute difference is meaningful
    approx_alpha = residual_alpha_linear_approx(Z0, W, tau, tau_c, None, CA40)
    assert abs(approx_alpha - abs(r.alpha)) < SCALE * (W * tau_c) ** 2
    with pytest.warns(RuntimeWarning):
        residual_alpha_linear_approx(Z0, W, 100e-9, 5e-9, None, CA40)


def test_catch_ramp_sweep_shape():
    pts = catch_ramp_sweep(Z0, W, 5e-9, np.linspace(0, 10e-9, 11)[1:], CA40)
    alphas = np.array([p.alpha_min for p in pts])
    assert np.argmin(alphas) == 4  # tau_c = 5 ns
    assert all(p.overlap > 0.9 for p in pts if p.tau_c < 7.5e-9)
    assert all(0 <= p.T_min < 1 / F for p in pts)


def test_linear_needs_positive_durations():
    with pytest.raises(ValueError):
        residual_alpha_linear(Z0, W, 0.0, 1e-9, None, CA40)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        residual_alpha_linear(Z0, W, 1e-9, 1e-9, None, CA40)
