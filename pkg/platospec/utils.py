#
# (C) Copyright Cloudlab URV 2020
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

import logging.config

from platospec import constants


logger = logging.getLogger(__name__)


def grid_chunks(grid, size):
    """Split a k-grid into consecutive slices of at most ``size`` points."""
    if size < 1:
        raise ValueError(f'Chunk size must be positive, got {size}')
    return [grid[start:start + size] for start in range(0, len(grid), size)]


def _handler(log_level, stream, filename):
    if filename:
        return {'class': 'logging.FileHandler', 'level': log_level, 'formatter': 'platospec',
                'filename': filename, 'mode': 'a'}
    return {'class': 'logging.StreamHandler', 'level': log_level, 'formatter': 'platospec',
            'stream': stream or constants.LOGGER_STREAM}


def setup_platospec_logger(log_level=constants.LOGGER_LEVEL,
                           log_format=constants.LOGGER_FORMAT,
                           stream=None, filename=None):
    """
    Route the 'platospec' logger to a single handler.

    Logs go to ``filename`` when one is given and to ``stream`` otherwise.
    A level of None or 'none' leaves logging untouched.
    """
    if log_level is None or str(log_level).lower() == 'none':
        return

    if isinstance(log_level, str):
        log_level = logging.getLevelName(log_level.upper())

    logging.config.dictConfig({
        'version': 1,
        'disable_existing_loggers': False,
        'formatters': {'platospec': {'format': log_format or constants.LOGGER_FORMAT}},
        'handlers': {'platospec_handler': _handler(log_level, stream, filename)},
        'loggers': {
            'platospec': {
                'handlers': ['platospec_handler'],
                'level': log_level,
                'propagate': False
            },
        }
    })


def is_notebook():
    """True when running inside a Jupyter kernel, so tqdm bars are kept."""
    try:
        return get_ipython().__class__.__name__ == 'ZMQInteractiveShell'
    except NameError:
        return False
