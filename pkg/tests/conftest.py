import pytest

from nodal.config import Config
from nodal.nodepoly import Engine


@pytest.fixture(scope="session")
def config():
    return Config(cache_path="", thread_count=1)


@pytest.fixture(scope="session")
def engine(config):
    return Engine(config)


@pytest.fixture(scope="session")
def engine_alt(config):
    return Engine(config, library_variant=1)
