import pytest

from chebclust.ppm import to_features
from chebclust.synth import textured_image

import helpers


@pytest.fixture(scope="session")
def crop_image():
    """The 64x64 textured crop the trend and convergence gates run on."""
    return textured_image(64, 64, seed=3)


@pytest.fixture(scope="session")
def crop_features(crop_image):
    return to_features(crop_image)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if helpers.ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in helpers.ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
