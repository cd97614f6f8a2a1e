# -*- coding: utf-8 -*-

import pytest

from bench import load_scenarios
from house import load_house
from retrieval import HashingEmbedder, VectorIndex, load_preferences
from tests.helpers import HOUSES, PREFERENCES, SCENARIOS_DIR


def pytest_addoption(parser):
    parser.addoption('--update-golden', action='store_true', default=False,
                     help='rewrite the golden renderings under tests/golden')


@pytest.fixture
def update_golden(request):
    return request.config.getoption('--update-golden')


@pytest.fixture(scope='session')
def scenarios():
    return load_scenarios(SCENARIOS_DIR)


@pytest.fixture(scope='session')
def scenario_by_name(scenarios):
    return {scenario.name: scenario for scenario in scenarios}


@pytest.fixture
def out_of_bed():
    return load_house(HOUSES / 'out_of_bed_night.house')


@pytest.fixture(scope='session')
def embedder():
    return HashingEmbedder()


@pytest.fixture(scope='session')
def preferences():
    return load_preferences(PREFERENCES)


@pytest.fixture(scope='session')
def pref_index(preferences, embedder):
    return VectorIndex.build(preferences, embedder)
