import pytest

from conglobe.config import ModelConfig
from conglobe.linkage import calibrate


@pytest.fixture(scope='session')
def model():
    return ModelConfig()


@pytest.fixture(scope='session')
def calibrated():
    '''Loop geometry fitted on the default anchors.
    '''
    return calibrate()


@pytest.fixture(scope='session')
def geometries(model, calibrated):
    return model.trigger, calibrated, model.robot
