import pytest

from app.config import settings
from app.services.size_model import preset_spec


@pytest.fixture
def natural():
    return preset_spec("natural")


@pytest.fixture
def less_natural():
    return preset_spec("less-natural")


@pytest.fixture
def binary():
    return preset_spec("binary")


@pytest.fixture(autouse=True)
def restore_settings():
    """CLI runs copy their resolved values onto the shared settings"""
    saved = settings.model_dump()
    yield
    for key, value in saved.items():
        setattr(settings, key, value)
