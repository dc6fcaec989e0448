import numpy as np
import pytest

from conglobe.exceptions import ArgOutOfRange, BeyondFlip, DoubleContact, \
    InvalidParameter, NoContact, OutOfRange
from conglobe.trigger import activation_force, activation_summary, activation_work, \
    closed_form_work, contact_state, force_curve, force_profile, force_ratio, \
    phi_from_theta2, stroke, theta2_from_x, trigger_curve, trigger_x
from conglobe.types import TriggerGeometry

YAWS = (-30.0, 0.0, 30.0)


@pytest.mark.parametrize('psi, phi, x', [
    (0.0, 0.0, 0.0),
    (30.0, 30.0, 9.0),
    (0.0, 2.608, 0.819),
])
def test_trigger_x_hand_values(psi, phi, x):
    assert trigger_x(TriggerGeometry(), psi, phi) == pytest.approx(x, abs=0.005)


@pytest.mark.parametrize('psi', [-45.0, -20.0, 0.0, 45.0])
def test_no_rotation_no_displacement(psi):
    assert trigger_x(TriggerGeometry(), psi, 0.0) == 0.0


@pytest.mark.parametrize('theta2, phi', [
    (110.0, 0.0),
    (90.0, 2.608),
    (100.0, 1.344),
])
def test_phi_hand_values(theta2, phi):
    assert phi_from_theta2(TriggerGeometry(), theta2, 110.0) == pytest.approx(phi, abs=0.01)


def test_phi_decreases_with_theta2():
    phis = [phi_from_theta2(TriggerGeometry(), t, 110.0) for t in np.linspace(10.0, 110.0, 101)]
    assert np.all(np.diff(phis) < 0)


def test_phi_errors():
    with pytest.raises(NoContact):
        phi_from_theta2(TriggerGeometry(), 111.0, 110.0)
    with pytest.raises(ArgOutOfRange):
        phi_from_theta2(TriggerGeometry(h=50.0, l=1.0), 60.0, 110.0)
    with pytest.raises(InvalidParameter):
        phi_from_theta2(TriggerGeometry(), 0.0, 110.0)


def test_contact_state_in_flight():
    state = contact_state(TriggerGeometry(), 110.0, 110.0, 15.0)
    assert state.phi == 0.0
    assert state.x == 0.0


def test_no_displacement_keeps_flight(calibrated):
    assert theta2_from_x(TriggerGeometry(), calibrated, 0.0, 0.0) == 110.0


def test_full_stroke_reaches_flip(calibrated):
    theta2 = theta2_from_x(TriggerGeometry(), calibrated, 0.819, 0.0)
    assert theta2 == pytest.approx(90.0, abs=0.05)


def test_stroke_depends_on_yaw(calibrated):
    trigger = TriggerGeometry()
    assert theta2_from_x(trigger, calibrated, 0.4, 30.0) != \
        pytest.approx(theta2_from_x(trigger, calibrated, 0.4, 0.0), abs=1e-3)


def test_stroke_tolerance_lands_on_flip(calibrated):
    trigger = TriggerGeometry()
    end = stroke(trigger, 110.0, 0.0)
    for x in (end, end + 1e-4, end + 9e-4):
        assert theta2_from_x(trigger, calibrated, x, 0.0) == 90.0
    assert theta2_from_x(trigger, calibrated, end - 1e-4, 0.0) > 90.0


def test_beyond_flip(calibrated):
    with pytest.raises(BeyondFlip) as err:
        theta2_from_x(TriggerGeometry(), calibrated, 1.0, 0.0)
    assert err.value.stroke == pytest.approx(stroke(TriggerGeometry(), 110.0, 0.0))


def test_displacement_must_be_positive(calibrated):
    with pytest.raises(InvalidParameter):
        theta2_from_x(TriggerGeometry(), calibrated, -0.1, 0.0)


@pytest.mark.parametrize('psi', YAWS)
def test_contact_round_trip(calibrated, psi):
    trigger = TriggerGeometry()
    for theta2 in np.linspace(90.0, 110.0, 21):
        x = trigger_x(trigger, psi, phi_from_theta2(trigger, theta2, 110.0))
        assert theta2_from_x(trigger, calibrated, x, psi) == pytest.approx(theta2, abs=0.05)


@pytest.mark.parametrize('psi', YAWS)
def test_theta2_decreases_with_x(calibrated, psi):
    trigger = TriggerGeometry()
    end = stroke(trigger, 110.0, psi)
    angles = [theta2_from_x(trigger, calibrated, x, psi) for x in np.linspace(0.0, end, 15)]
    assert np.all(np.diff(angles) < 0)


@pytest.mark.parametrize('psi', YAWS)
def test_force_ratio_increases_with_theta2(geometries, psi):
    trigger, linkage, params = geometries
    ratios = [force_ratio(trigger, linkage, params, t, psi)
        for t in np.arange(90.5, 110.0 + 1e-9, 0.5)]
    assert all(r > 0 for r in ratios)
    assert np.all(np.diff(ratios) > 0)


def test_force_ratio_is_scale_free(geometries):
    trigger, linkage, params = geometries
    base = force_ratio(trigger, linkage, params, 105.0, 10.0)
    scaled = force_ratio(trigger.scaled(2.0), linkage, params.scaled(2.0), 105.0, 10.0)
    assert scaled == pytest.approx(base, rel=1e-9)


def test_force_ratio_domain(geometries):
    trigger, linkage, params = geometries
    with pytest.raises(OutOfRange):
        force_ratio(trigger, linkage, params, 90.0, 0.0)
    with pytest.raises(OutOfRange):
        force_ratio(trigger, linkage, params, 110.5, 0.0)
    with pytest.raises(InvalidParameter):
        force_ratio(trigger, linkage, params, 100.0, 50.0)


def test_double_contact(geometries):
    trigger, linkage, params = geometries
    with pytest.raises(DoubleContact):
        force_ratio(trigger, linkage, params, 100.0, -42.0)
    with pytest.raises(DoubleContact):
        force_ratio(trigger, linkage, params, 100.0, -45.0)
    with pytest.raises(DoubleContact):
        force_profile(trigger, linkage, params, -45.0)


@pytest.mark.parametrize('psi', [-34.9] + list(np.arange(-30.0, 45.0, 5.0)) + [44.9, 45.0])
def test_activation_force_is_weight_sized(geometries, psi):
    trigger, linkage, params = geometries
    assert 0.1 <= activation_force(trigger, linkage, params, float(psi)) <= 5.0


def test_activation_work_matches_bench_prediction(geometries):
    # the theta1(110) anchor was set from this work
    trigger, linkage, params = geometries
    work = activation_work(trigger, linkage, params, psi=0.0)
    assert work.closed_form == pytest.approx(0.23, rel=0.10)
    assert work.integral == pytest.approx(0.23, rel=0.10)
    assert work.agreement() < 0.01


def test_activation_work_without_thrust(geometries):
    trigger, linkage, params = geometries
    work = activation_work(trigger, linkage, params, thrust=0.0)
    assert work.closed_form == 0.0
    assert work.integral == 0.0


def test_activation_work_is_yaw_independent(geometries):
    trigger, linkage, params = geometries
    works = [activation_work(trigger, linkage, params, psi).integral for psi in YAWS]
    closed = closed_form_work(linkage, params)
    for work in works:
        assert work == pytest.approx(closed, rel=0.01)
        assert work == pytest.approx(works[1], rel=0.01)


def test_force_profile_spans_the_stroke(geometries):
    trigger, linkage, params = geometries
    x, force = force_profile(trigger, linkage, params, 0.0)
    assert x[0] == 0.0
    assert x[-1] == pytest.approx(stroke(trigger, 110.0, 0.0))
    assert force[0] == pytest.approx(activation_force(trigger, linkage, params, 0.0))
    assert force[-1] == pytest.approx(0.0, abs=1e-6)


def test_activation_summary(geometries):
    trigger, linkage, params = geometries
    summary = activation_summary(trigger, linkage, params, 0.0)
    assert set(summary) == {'psi_deg', 'activation_force_N', 'work_mJ_closed_form',
        'work_mJ_integral', 'double_contact'}
    assert not summary['double_contact']
    flagged = activation_summary(trigger, linkage, params, -42.0)
    assert flagged['double_contact']
    assert flagged['activation_force_N'] is None


def test_curves_as_data(geometries):
    trigger, linkage, params = geometries
    rows = trigger_curve(trigger, linkage, 90.0, 110.0, 21, YAWS)
    assert rows.shape == (63, 5)
    assert rows[20, 4] == 0.0
    ratios = force_curve(trigger, linkage, params, 95.0, 110.0, 4, YAWS)
    assert ratios.shape == (12, 3)
