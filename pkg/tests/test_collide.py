import numpy as np
import pytest

from conglobe.collide import FLIGHT, FOLDED, CollisionScenario, collision_outcome, \
    collision_sweep, equivalent_efficiency, kinetic_energy, min_activation_speed
from conglobe.exceptions import InvalidParameter
from conglobe.trigger import closed_form_work

MASS = 51.2


@pytest.mark.parametrize('speed, energy', [
    (0.0, 0.0),
    (0.2795, 2.0),
    (1.5, 57.6),
])
def test_kinetic_energy(speed, energy):
    assert kinetic_energy(MASS, speed) == pytest.approx(energy, rel=0.01, abs=1e-12)


@pytest.mark.parametrize('work, speed', [
    (2.0, 0.2795),
    (0.23, 0.0948),
    (0.0, 0.0),
])
def test_min_activation_speed(work, speed):
    assert min_activation_speed(MASS, work) == pytest.approx(speed, rel=0.01, abs=1e-12)


def test_lossy_impact_needs_more_speed():
    assert min_activation_speed(MASS, 2.0, 0.5) == \
        pytest.approx(min_activation_speed(MASS, 2.0) * np.sqrt(2.0))


def test_fast_impact_folds(geometries):
    trigger, linkage, params = geometries
    outcome = collision_outcome(CollisionScenario(1.5, required_work=2.0), trigger, linkage,
        params)
    assert outcome.activates
    assert outcome.final_state == FOLDED
    assert outcome.energy_margin == pytest.approx(55.6, rel=1e-3)
    assert len(outcome.arms) == 4
    for arm in outcome.arms:
        assert arm.theta1 == pytest.approx(linkage.theta1_fold_limit, abs=1e-6)


def test_resting_airframe_stays_in_flight(geometries):
    trigger, linkage, params = geometries
    outcome = collision_outcome(CollisionScenario(0.0), trigger, linkage, params)
    assert not outcome.activates
    assert outcome.final_state == FLIGHT
    assert outcome.energy_margin == pytest.approx(-closed_form_work(linkage, params))
    for arm in outcome.arms:
        assert arm.theta2 == pytest.approx(linkage.theta2_max)


def test_threshold_speed_activates(geometries):
    trigger, linkage, params = geometries
    threshold = min_activation_speed(params.mass, 2.0)
    assert collision_outcome(CollisionScenario(threshold, required_work=2.0),
        trigger, linkage, params).activates
    assert not collision_outcome(CollisionScenario(threshold * 0.999, required_work=2.0),
        trigger, linkage, params).activates


def test_margin_grows_with_speed(geometries):
    trigger, linkage, params = geometries
    rows = collision_sweep(np.linspace(0.0, 0.5, 26), trigger, linkage, params,
        required=2.0)
    assert rows.shape == (26, 4)
    assert np.all(np.diff(rows[:, 2]) > 0)
    # activation switches once, from 0 to 1
    assert np.count_nonzero(np.diff(rows[:, 3])) == 1
    assert rows[0, 3] == 0.0 and rows[-1, 3] == 1.0


def test_double_contact_is_flagged(geometries, caplog):
    trigger, linkage, params = geometries
    outcome = collision_outcome(CollisionScenario(1.0, psi=-42.0), trigger, linkage, params)
    assert outcome.double_contact
    assert outcome.activates
    assert 'double contact' in caplog.text


def test_report_keys(geometries):
    trigger, linkage, params = geometries
    report = collision_outcome(CollisionScenario(0.3, required_work=2.0), trigger, linkage,
        params).as_report()
    assert report['activates'] is True
    assert report['final_state'] == FOLDED
    assert len(report['theta1_deg']) == 4


def test_equivalent_efficiency():
    assert equivalent_efficiency(0.23, 2.0) == pytest.approx(0.115)
    with pytest.raises(InvalidParameter):
        equivalent_efficiency(0.23, 0.0)


@pytest.mark.parametrize('kwargs', [
    {'speed': -1.0},
    {'speed': 1.0, 'efficiency': 0.0},
    {'speed': 1.0, 'efficiency': 1.5},
    {'speed': 1.0, 'required_work': -2.0},
])
def test_invalid_scenario(kwargs):
    with pytest.raises(InvalidParameter):
        CollisionScenario(**kwargs)


def test_activation_agrees_with_margin(geometries):
    trigger, linkage, params = geometries
    rng = np.random.default_rng(11)
    for work, efficiency in zip(rng.uniform(0.01, 5.0, 200), rng.uniform(0.05, 1.0, 200)):
        threshold = min_activation_speed(params.mass, work, efficiency)
        for speed in (threshold, np.nextafter(threshold, 0.0), np.nextafter(threshold, 1.0)):
            outcome = collision_outcome(CollisionScenario(float(speed), 0.0, efficiency, work),
                trigger, linkage, params)
            assert outcome.activates == (outcome.energy_margin >= 0.0)
        assert collision_outcome(CollisionScenario(threshold, 0.0, efficiency, work),
            trigger, linkage, params).activates
