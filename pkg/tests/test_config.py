import pytest

from conglobe.config import CONFIG_ENV, ModelConfig, load_config
from conglobe.exceptions import ConfigError


def write(tmp_path, text, name='model.conf'):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_model_file(tmp_path):
    path = write(tmp_path, '# bench airframe\nr_mm = 20   # larger arc\nthrust_N = 0.6\n'
        'theta1_branch = -1\n')
    model = ModelConfig.from_file(path)
    assert model.trigger.r == 20.0
    assert model.robot.thrust_total == 0.6
    assert model.linkage.theta1_branch == -1
    assert model.trigger.h == ModelConfig().trigger.h


def test_loop_keys(tmp_path):
    model = ModelConfig.from_file(write(tmp_path,
        'link_angle_a34_deg = 82\njoint_offset_1_deg = 0.3\n'))
    assert model.linkage.link_angles == (90.0, 90.0, 82.0, 82.0)
    assert model.linkage.joint_offsets[0] == 0.3


@pytest.mark.parametrize('text', [
    'wingspan_mm = 3\n',
    'r_mm = big\n',
    'theta1_branch = 0.5\n',
    '[airframe]\nr_mm = 3\n',
    'r_mm\n',
])
def test_bad_model_file(tmp_path, text):
    with pytest.raises(ConfigError):
        ModelConfig.from_file(write(tmp_path, text))


def test_missing_model_file(tmp_path):
    with pytest.raises(ConfigError):
        ModelConfig.from_file(str(tmp_path / 'absent.conf'))


def test_environment_variable(tmp_path, monkeypatch):
    monkeypatch.setenv(CONFIG_ENV, write(tmp_path, 'mass_g = 60\n'))
    assert load_config().robot.mass == 60.0
    # an explicit path wins
    assert load_config(write(tmp_path, 'mass_g = 70\n', 'other.conf')).robot.mass == 70.0


def test_defaults_without_file(monkeypatch):
    monkeypatch.delenv(CONFIG_ENV, raising=False)
    assert load_config() == ModelConfig()


def test_overrides():
    model = ModelConfig().with_overrides({'d_mm': '60', 'gamma_deg': 0})
    assert model.robot.d == 60.0
    assert model.robot.gamma == 0.0
    assert model.robot.mass == ModelConfig().robot.mass


def test_recalibration_matches_defaults():
    model = ModelConfig.from_mapping({'calibrate': 'true'})
    assert model.linkage.a34 == pytest.approx(ModelConfig().linkage.a34, abs=1e-4)
    assert model.linkage.joint_offsets[0] == \
        pytest.approx(ModelConfig().linkage.joint_offsets[0], abs=1e-4)


def test_model_text_reloads(tmp_path):
    model = ModelConfig().with_overrides({'h_mm': 6, 'arm_count': 4})
    assert ModelConfig.from_file(write(tmp_path, model.to_text())) == model
