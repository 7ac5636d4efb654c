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

import os
import math

LOGGER_LEVEL = 'info'
LOGGER_STREAM = 'ext://sys.stderr'
LOGGER_FORMAT = "%(asctime)s [%(levelname)s] %(filename)s:%(lineno)s -- %(message)s"
LOGGER_FORMAT_SHORT = "[%(levelname)s] %(filename)s:%(lineno)s -- %(message)s"
LOGGER_LEVEL_CHOICES = ["debug", "info", "warning", "error", "critical"]

CPU_COUNT = os.cpu_count() or 1

THREADS_ENV_VAR = 'PLATOSPEC_THREADS'
CONFIG_ENV_VAR = 'PLATOSPEC_CONFIG'
CONFIG_FILE_ENV_VAR = 'PLATOSPEC_CONFIG_FILE'

HOME_DIR = os.path.expanduser('~')
CONFIG_DIR = os.path.join(HOME_DIR, '.platospec')
CONFIG_FILE = os.path.join(CONFIG_DIR, 'config')
CONFIG_FILE_LOCAL = '.platospec_config'

# Solver defaults
K_MIN = 0.05
SCAN_STEP = 0.005
TOL_ACCEPT = 1e-8
PROMOTE_TOL = 1e-3
MERGE_TOL = 1e-7
GOLDEN_WIDTH = 1e-12
MAX_REFINE_ITERS = 200
MAX_SPLIT_DEPTH = 4
SPLIT_FACTOR = 8
CHUNK_SIZE = 256
MULT_TOL_SCALE = 1e-6
NULLSPACE_RESIDUAL = 1e-7

UNITARY_TOL = 1e-10

# Asymptotic checks
ENVELOPE_SLACK = 0.5
ENVELOPE_SLACK_K2 = 2.0
DRIFT_RATIO_MAX = 1.5
DRIFT_PAIR_MAX = math.pi / 4
MONOTONICITY_SLACK = 0.1
EXACT_FAMILY_TOL = 1e-7
WINDOW_CAP_LARGE = 100.0
WINDOW_CAP_SMALL = 200.0

THEOREM_CONSTANTS = {
    'tetrahedron': 2 * math.sqrt(3),
    'cube': 2 * math.sqrt(3),
    'dodecahedron': 5.51,
    'icosahedron': 10.84,
}
OCTAHEDRON_ODD_CONSTANT = math.sqrt(10)
OCTAHEDRON_HALF_CONSTANT = 5.0

# Coefficient bounds of the cubic in y = k^2 sin^2 k
FUJIWARA_COEFFICIENTS = {
    'dodecahedron': (20.0, 286.0, 736.0),
    'icosahedron': (104.0, 1544.0, 2424.0),
}

CSV_DIGITS = 17

PLATOSPEC_DEFAULT_CONFIG_KEYS = {
    'log_level': LOGGER_LEVEL,
    'log_format': LOGGER_FORMAT,
    'log_stream': LOGGER_STREAM,
    'log_filename': None,
    'worker_processes': CPU_COUNT,
    'show_progressbar': True,
}

SOLVER_DEFAULT_CONFIG_KEYS = {
    'k_min': K_MIN,
    'scan_step': SCAN_STEP,
    'tol_accept': TOL_ACCEPT,
    'promote_tol': PROMOTE_TOL,
    'merge_tol': MERGE_TOL,
    'max_refine_iters': MAX_REFINE_ITERS,
    'max_split_depth': MAX_SPLIT_DEPTH,
    'chunk_size': CHUNK_SIZE,
}

# Defaults of the command-line flags, overridden by the 'run' config section
RUN_DEFAULT_CONFIG_KEYS = {
    'solid': None,
    'graph_file': None,
    'coupling': 'po',
    'coupling_file': None,
    'kmin': None,
    'kmax': None,
    'window': None,
    'output': None,
    'format': None,
}
