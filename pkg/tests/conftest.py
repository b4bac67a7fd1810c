import json
import os
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

DATA = Path(__file__).parent / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA


def load_fixture(name: str):
    from gamma14.forms import ShiftedInstance

    return ShiftedInstance.from_json(json.loads((DATA / name).read_text()))


def F(x) -> Fraction:
    return Fraction(x)
