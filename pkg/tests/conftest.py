import time

import pytest

from delay_consensus.cli import dict_to_config
from delay_consensus.sim import run

from _helpers import as_double_integrator, load_scenario_doc, scale_delays


def _timed_run(doc):
    config = dict_to_config(doc)
    start = time.perf_counter()
    trace = run(config)
    elapsed = time.perf_counter() - start
    return config, trace, elapsed


@pytest.fixture(scope="session")
def leaderless_run():
    """Shipped leaderless scenario, run once for the whole session."""
    return _timed_run(load_scenario_doc("leaderless6"))


@pytest.fixture(scope="session")
def doubled_delay_run():
    return _timed_run(scale_delays(load_scenario_doc("leaderless6"), 2.0))


@pytest.fixture(scope="session")
def zero_delay_run():
    return _timed_run(scale_delays(load_scenario_doc("leaderless6"), 0.0))


@pytest.fixture(scope="session")
def double_integrator_run():
    return _timed_run(as_double_integrator(load_scenario_doc("leaderless6"), k=1.0))


@pytest.fixture(scope="session")
def leader_run():
    return _timed_run(load_scenario_doc("leader6"))
