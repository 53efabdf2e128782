import pytest

from mantablimp.dataset import OPTIMAL_WING, builtin_dataset
from mantablimp.wing import FlapSetting


@pytest.fixture(scope="session")
def dataset():
    return builtin_dataset()


@pytest.fixture(scope="session")
def optimal_wing():
    return OPTIMAL_WING


@pytest.fixture(scope="session")
def optimal_setting_value():
    return FlapSetting(amplitude_deg=90.0, frequency_hz=1.25)
