#
# (C) Copyright IBM Corp. 2021
# (C) Copyright Cloudlab URV 2021
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
#

import os
import copy
import math
import json
import logging
import platform

from platospec import constants as c
from platospec.version import __version__

logger = logging.getLogger(__name__)


class ConfigError(Exception):
    pass


def load_yaml_config(config_filename):
    """
    Loads a YAML or JSON configuration file. JSON documents are valid YAML,
    so both formats go through the same parser.
    """
    import yaml
    try:
        with open(config_filename, 'r') as config_file:
            data = yaml.safe_load(config_file)
    except FileNotFoundError:
        data = {}
    except yaml.YAMLError as e:
        raise ConfigError(f"Unable to parse config file {config_filename}: {e}")

    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"Config file {config_filename} must contain a mapping")

    return data


def get_default_config_filename():
    """
    First checks PLATOSPEC_CONFIG_FILE environment variable
    then checks .platospec_config
    and as last resort ~/.platospec/config
    """
    if c.CONFIG_FILE_ENV_VAR in os.environ:
        config_filename = os.environ[c.CONFIG_FILE_ENV_VAR]

    elif os.path.exists(c.CONFIG_FILE_LOCAL):
        config_filename = os.path.abspath(c.CONFIG_FILE_LOCAL)

    else:
        config_filename = c.CONFIG_FILE
        if not os.path.exists(config_filename):
            return None

    return config_filename


def load_config(config_file=None, log=True):
    """ Load the configuration """
    config_data = None

    if config_file:
        config_filename = os.path.expanduser(config_file)
        if log:
            logger.debug(f"Loading configuration from {config_filename}")
        if not os.path.exists(config_filename):
            raise FileNotFoundError(f"Config file {config_filename} doesn't exist")
        config_data = load_yaml_config(config_filename)

    elif c.CONFIG_ENV_VAR in os.environ:
        if log:
            logger.debug(f"Loading configuration from env {c.CONFIG_ENV_VAR}")
        try:
            config_data = json.loads(os.environ.get(c.CONFIG_ENV_VAR))
        except json.JSONDecodeError as e:
            raise ConfigError(f"Invalid JSON in {c.CONFIG_ENV_VAR}: {e}")

    else:
        config_filename = get_default_config_filename()
        if config_filename:
            if log:
                logger.debug(f"Loading configuration from {config_filename}")
            config_data = load_yaml_config(config_filename)

    if not config_data:
        if log:
            logger.debug("Config file not found. Using default configuration")
        config_data = {}

    return config_data


def get_log_info(config_file=None, config_data=None):
    """ Return platospec logging information set in configuration """
    config_data = copy.deepcopy(config_data) or load_config(config_file, log=False)

    if 'platospec' not in config_data or not config_data['platospec']:
        config_data['platospec'] = {}

    cl = config_data['platospec']

    if 'log_level' not in cl:
        cl['log_level'] = c.LOGGER_LEVEL
    if 'log_format' not in cl:
        cl['log_format'] = c.LOGGER_FORMAT
    if 'log_stream' not in cl:
        cl['log_stream'] = c.LOGGER_STREAM
    if 'log_filename' not in cl:
        cl['log_filename'] = None

    return cl['log_level'], cl['log_format'], cl['log_stream'], cl['log_filename']


def _threads_cap(worker_processes):
    value = os.environ.get(c.THREADS_ENV_VAR)
    if value is None or value == '':
        return worker_processes
    try:
        cap = int(value)
    except ValueError:
        raise ConfigError(f"{c.THREADS_ENV_VAR} must be an integer, got '{value}'")
    if cap < 1:
        raise ConfigError(f"{c.THREADS_ENV_VAR} must be at least 1, got {cap}")
    return min(worker_processes, cap)


def _check_solver_config(solver):
    unknown = set(solver) - set(c.SOLVER_DEFAULT_CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"Unknown solver config keys: {', '.join(sorted(unknown))}")

    for key in ('k_min', 'scan_step', 'tol_accept', 'promote_tol', 'merge_tol'):
        try:
            solver[key] = float(solver[key])
        except (TypeError, ValueError):
            raise ConfigError(f"Solver option '{key}' must be a number, got {solver[key]!r}")
        if not solver[key] > 0:
            raise ConfigError(f"Solver option '{key}' must be positive, got {solver[key]}")

    for key in ('max_refine_iters', 'max_split_depth', 'chunk_size'):
        try:
            solver[key] = int(solver[key])
        except (TypeError, ValueError):
            raise ConfigError(f"Solver option '{key}' must be an integer, got {solver[key]!r}")
        if solver[key] < 0 or (key != 'max_split_depth' and solver[key] == 0):
            raise ConfigError(f"Solver option '{key}' out of range: {solver[key]}")

    if solver['tol_accept'] >= solver['promote_tol']:
        raise ConfigError("Solver option 'tol_accept' must be smaller than 'promote_tol'")


def _parse_window(value):
    if isinstance(value, (list, tuple)) and len(value) == 2 and not isinstance(value[0], str):
        lo, hi = value
    else:
        lo, sep, hi = str(value).partition(':')
        if not sep:
            raise ConfigError(f"Run option 'window' must look like lo:hi, got {value!r}")
    try:
        window = (float(lo), float(hi))
    except (TypeError, ValueError):
        raise ConfigError(f"Run option 'window' must look like lo:hi, got {value!r}")
    if not 0 <= window[0] < window[1] or not all(math.isfinite(x) for x in window):
        raise ConfigError(f"Run option 'window' is not a well-ordered window: {value!r}")
    return window


def _check_run_config(run):
    unknown = set(run) - set(c.RUN_DEFAULT_CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"Unknown run config keys: {', '.join(sorted(unknown))}")

    for key in ('kmin', 'kmax'):
        if run[key] is None:
            continue
        try:
            run[key] = float(run[key])
        except (TypeError, ValueError):
            raise ConfigError(f"Run option '{key}' must be a number, got {run[key]!r}")
        if not run[key] > 0:
            raise ConfigError(f"Run option '{key}' must be positive, got {run[key]}")

    # one lo:hi window, or a list of them for the commands that check several
    if run['window'] is not None:
        windows = run['window']
        if not isinstance(windows, (list, tuple)) or (len(windows) == 2
                                                      and not isinstance(windows[0], (str, list, tuple))):
            windows = [windows]
        run['window'] = [_parse_window(w) for w in windows]

    if run['format'] not in (None, 'json', 'csv'):
        raise ConfigError(f"Run option 'format' must be json or csv, got {run['format']!r}")

    for key in ('solid', 'graph_file', 'coupling', 'coupling_file', 'output'):
        if run[key] is not None and not isinstance(run[key], str):
            raise ConfigError(f"Run option '{key}' must be a string, got {run[key]!r}")


def default_config(config_file=None, config_data=None, config_overwrite={}):
    """
    Builds the full configuration: loads it as load_config() does, applies
    the overwrite dict section by section and fills in every missing key.
    """
    logger.debug(f'Platospec v{__version__} - Python {platform.python_version()}')

    config_data = copy.deepcopy(config_data) or load_config(config_file)

    for section in ('platospec', 'solver', 'run'):
        if section not in config_data or not config_data[section]:
            config_data[section] = {}
        if not isinstance(config_data[section], dict):
            raise ConfigError(f"Config section '{section}' must be a mapping")
        # overwrite values provided by the user
        if section in config_overwrite:
            config_data[section].update(config_overwrite[section])

    for key in c.PLATOSPEC_DEFAULT_CONFIG_KEYS:
        if key not in config_data['platospec']:
            config_data['platospec'][key] = c.PLATOSPEC_DEFAULT_CONFIG_KEYS[key]

    for key in c.SOLVER_DEFAULT_CONFIG_KEYS:
        if key not in config_data['solver']:
            config_data['solver'][key] = c.SOLVER_DEFAULT_CONFIG_KEYS[key]

    for key in c.RUN_DEFAULT_CONFIG_KEYS:
        if key not in config_data['run']:
            config_data['run'][key] = c.RUN_DEFAULT_CONFIG_KEYS[key]

    _check_solver_config(config_data['solver'])
    _check_run_config(config_data['run'])

    try:
        workers = int(config_data['platospec']['worker_processes'])
    except (TypeError, ValueError):
        raise ConfigError("'worker_processes' must be an integer")
    if workers < 1:
        raise ConfigError(f"'worker_processes' must be at least 1, got {workers}")
    config_data['platospec']['worker_processes'] = _threads_cap(workers)

    return config_data
