import os
import pytest
import logging
from platospec.config import (
    default_config,
    load_yaml_config
)

logger = logging.getLogger(__name__)


def pytest_addoption(parser):
    parser.addoption("--config", metavar="", default=None, help="path to platospec config file")
    parser.addoption("--workers", metavar="", default=None, help="number of worker threads")


@pytest.fixture(scope="session", autouse=True)
def setup_global(request):
    config = request.config
    config_file = config.getoption("--config")
    workers = config.getoption("--workers")

    config_data = None

    if config_file:
        if os.path.exists(config_file):
            config_data = load_yaml_config(config_file)
        else:
            raise FileNotFoundError(f"The provided config file '{config_file}' does not exist")

    config_ow = {'platospec': {}, 'solver': {}}
    config_ow['platospec']['log_level'] = 'DEBUG'
    config_ow['platospec']['show_progressbar'] = False
    if workers:
        config_ow['platospec']['worker_processes'] = int(workers)

    platospec_config = default_config(config_data=config_data, config_overwrite=config_ow)
    pytest.platospec_config = platospec_config


@pytest.fixture
def executor():
    from platospec.executor import SweepExecutor
    with SweepExecutor(config=pytest.platospec_config, log_level=None) as sweep:
        yield sweep
