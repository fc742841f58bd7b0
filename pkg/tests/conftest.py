from pathlib import Path

import numpy as np
import pytest

from colordenoise.imageio import read_image

DATA = Path(__file__).parent / "data"
TEST_IMAGES = ("astronaut", "chelsea", "coffee")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def images():
    return {name: read_image(DATA / f"{name}.png") for name in TEST_IMAGES}


# acceptance criterion id -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        status, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {status}  {detail}")
