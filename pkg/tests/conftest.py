import pytest

from pictobridge.adapt import UserProfile, effective_policy
from pictobridge.composer import Composer
from pictobridge.dialogue import Engine
from pictobridge.lexicon import load_catalog
from pictobridge.mapper import EventMapper


@pytest.fixture(scope="session")
def catalog():
    return load_catalog()


@pytest.fixture(scope="session")
def mapper(catalog):
    return EventMapper(catalog)


@pytest.fixture(scope="session")
def composer(catalog):
    return Composer(catalog)


@pytest.fixture
def policy():
    return effective_policy(UserProfile())


@pytest.fixture
def make_engine(catalog, mapper, composer):
    def _make(**kwargs):
        return Engine(catalog, mapper, composer, **kwargs)

    return _make
