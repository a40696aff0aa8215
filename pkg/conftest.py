import os

import hypothesis
import numpy as np
import pytest

from config import settings
from models import CantorSystem

np.seterr(all="warn")

hypothesis.settings.register_profile("default", deadline=None, max_examples=50)
hypothesis.settings.register_profile("fast", deadline=None, max_examples=5)
hypothesis.settings.register_profile("debugger", deadline=None, report_multiple_bugs=False)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(autouse=True)
def restore_settings():
    """CLI runs write budgets and precision into the shared settings"""
    saved = settings.model_dump()
    yield
    for name, value in saved.items():
        setattr(settings, name, value)


@pytest.fixture
def middle_third():
    return CantorSystem(p=3, A=(0, 2))


@pytest.fixture
def shifted_third():
    return CantorSystem(p=3, A=(1, 2))
