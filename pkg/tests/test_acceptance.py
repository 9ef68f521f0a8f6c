"""Acceptance criteria, one test each.

Every test prints a ``[PASS]``/``[FAIL]`` line with the measured value; the
lines are repeated in the terminal summary.  Criteria 7 and 8 are known to
fail (see the README); they are reported rather than relaxed.
"""

import pytest

from iontide.scenarios import acceptance


def _assert(check):
    assert check.passed, f"{check.name}: got {check.got}, expected {check.expected} ({check.tolerance})"


def test_criterion_1_quartic_transport_anchor(record_check, slow):
    _assert(record_check(acceptance.criterion_1(slow=slow)))


def test_criterion_2_harmonic_identity(record_check):
    _assert(record_check(acceptance.criterion_2()))


def test_criterion_3_timing_tolerance(record_check):
    _assert(record_check(acceptance.criterion_3()))


def test_criterion_4_finite_switching(record_check):
    _assert(record_check(acceptance.criterion_4()))


def test_criterion_5_symmetric_cancellation(record_check):
    _assert(record_check(acceptance.criterion_5()))


def test_criterion_6_squeeze_cycle(record_check):
    _assert(record_check(acceptance.criterion_6()))


def test_criterion_7_heating_lifetime(record_check):
    _assert(record_check(acceptance.criterion_7()))


def test_criterion_8_anharmonic_lifetime(record_check, slow):
    # the coarse grid resolves the crossing to about 1%; --slow repeats it on a finer grid
    _assert(record_check(acceptance.criterion_8(fine=slow)))


def test_criterion_9_propagator_properties(record_check):
    _assert(record_check(acceptance.criterion_9()))


def test_criterion_10_micromotion(record_check):
    _assert(record_check(acceptance.criterion_10()))


@pytest.mark.slow
def test_criterion_1_full_scale(record_check):
    check = acceptance.criterion_1(slow=True)
    check.name = "fig6_anchor_full_scale"
    _assert(record_check(check))
