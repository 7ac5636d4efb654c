#
# (C) Copyright IBM Corp. 2020
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

import logging
from collections.abc import Callable
from concurrent.futures import Future, ThreadPoolExecutor
from typing import Any, Dict, List, Optional

from platospec.config import default_config, get_log_info
from platospec.utils import setup_platospec_logger, is_notebook

logger = logging.getLogger(__name__)


class SweepExecutor:
    """
    Runs the independent pieces of a k-sweep (grid chunks, bracket
    refinements) on a pool of threads. Results always come back in
    submission order, so the outcome does not depend on the worker count.

    :param config: Settings passed in here will override those in the platospec config
    :param config_file: Path to the platospec config file
    :param worker_processes: Number of threads. Overrides the config value
    :param show_progressbar: Show a progress bar while collecting results
    :param log_level: Log level printing (INFO, DEBUG, ...). Set it to None to hide all logs.
        If this param is set, all logging params in config are disabled
    """

    def __init__(
        self,
        config: Optional[Dict[str, Any]] = None,
        config_file: Optional[str] = None,
        worker_processes: Optional[int] = None,
        show_progressbar: Optional[bool] = None,
        log_level: Optional[str] = False
    ):
        if log_level:
            setup_platospec_logger(log_level)
        elif log_level is False and logging.getLogger('platospec').getEffectiveLevel() == logging.WARNING:
            setup_platospec_logger(*get_log_info(config_file=config_file, config_data=config))

        config_ow = {'platospec': {}}
        if worker_processes is not None:
            config_ow['platospec']['worker_processes'] = worker_processes
        if show_progressbar is not None:
            config_ow['platospec']['show_progressbar'] = show_progressbar
        self.config = default_config(config_file=config_file, config_data=config, config_overwrite=config_ow)

        self.worker_processes = self.config['platospec']['worker_processes']
        self.show_progressbar = self.config['platospec']['show_progressbar']
        self.futures: List[Future] = []
        self._pool = None
        if self.worker_processes > 1:
            self._pool = ThreadPoolExecutor(max_workers=self.worker_processes)

        logger.debug(f'Sweep executor created with {self.worker_processes} worker threads')

    def __enter__(self):
        """ Context manager method """
        return self

    def __exit__(self, exc_type, exc_value, traceback):
        """ Context manager method """
        self.shutdown()

    def shutdown(self):
        if self._pool is not None:
            self._pool.shutdown(wait=True)
            self._pool = None

    def map(self, map_function: Callable, map_iterdata: List[Any]) -> List[Future]:
        """
        Schedules map_function over every element of map_iterdata.

        :param map_function: The function to map over the data
        :param map_iterdata: A list of input data, one call per element
        :return: A list of futures, in the order of map_iterdata
        """
        futures = []
        for item in map_iterdata:
            if self._pool is None:
                fut = Future()
                try:
                    fut.set_result(map_function(item))
                except Exception as e:
                    fut.set_exception(e)
            else:
                fut = self._pool.submit(map_function, item)
            futures.append(fut)
        self.futures = futures
        return futures

    def get_result(self, fs: Optional[List[Future]] = None, desc: Optional[str] = None) -> List[Any]:
        """
        Collects the results of the given futures (by default those of the
        last map() call), re-raising the first exception found.

        :param fs: Futures list. Default the ones of the last map()
        :param desc: Label of the progress bar
        :return: The list of results, in submission order
        """
        fs = self.futures if fs is None else fs

        pbar = None
        if self.show_progressbar and len(fs) > 1 and logger.getEffectiveLevel() != logging.DEBUG:
            from tqdm.auto import tqdm
            pbar = tqdm(bar_format='  {l_bar}{bar}| {n_fmt}/{total_fmt}  ', desc=desc,
                        total=len(fs), disable=None, leave=is_notebook())

        results = []
        try:
            for fut in fs:
                results.append(fut.result())
                if pbar:
                    pbar.update(1)
        finally:
            if pbar:
                pbar.close()

        return results

    def map_results(self, map_function: Callable, map_iterdata: List[Any], desc: Optional[str] = None) -> List[Any]:
        """ map() followed by get_result() """
        return self.get_result(self.map(map_function, map_iterdata), desc=desc)
