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

import io
import os
import csv
import json
import logging
from typing import Any, Dict, List, Optional, Sequence

from platospec.constants import CSV_DIGITS
from platospec.rootfind import Eigenvalue, RootFindError, Spectrum

logger = logging.getLogger(__name__)

FORMATS = ('json', 'csv')
SPECTRUM_COLUMNS = ['k', 'multiplicity', 'residual']
PLOT_COLUMNS = ['dist', 'scaled_dist']


class ExportError(Exception):
    pass


def fmt_float(value: float) -> str:
    """ CSV_DIGITS significant digits, enough to read the same double back """
    return format(float(value), f'.{CSV_DIGITS}g')


def guess_format(path: str, fmt: Optional[str] = None) -> str:
    if fmt:
        fmt = fmt.lower()
    else:
        fmt = os.path.splitext(path)[1].lstrip('.').lower()
    if fmt not in FORMATS:
        raise ExportError(f"Unknown output format '{fmt}' for {path}. Choose one of: {', '.join(FORMATS)}")
    return fmt


def plot_rows(spectrum: Spectrum, target) -> List[List[float]]:
    """ (dist, k * dist) of each eigenvalue to a ClusterTarget lattice """
    rows = []
    for ev in spectrum:
        dist = target.distance(ev.k)
        rows.append([dist, ev.k * dist])
    return rows


def spectrum_to_csv(spectrum: Spectrum, target=None) -> str:
    out = io.StringIO()
    out.write(f'# window={fmt_float(spectrum.window[0])}:{fmt_float(spectrum.window[1])}\n')
    writer = csv.writer(out, lineterminator='\n')
    writer.writerow(SPECTRUM_COLUMNS + (PLOT_COLUMNS if target is not None else []))
    extra = plot_rows(spectrum, target) if target is not None else [[] for _ in spectrum]
    for ev, more in zip(spectrum, extra):
        writer.writerow([fmt_float(ev.k), ev.multiplicity, fmt_float(ev.residual)]
                        + [fmt_float(x) for x in more])
    return out.getvalue()


def spectrum_from_csv(text: str) -> Spectrum:
    window = None
    lines = []
    for line in text.splitlines():
        if line.startswith('#'):
            key, _, value = line.lstrip('# ').partition('=')
            if key == 'window':
                lo, _, hi = value.partition(':')
                window = (float(lo), float(hi))
            continue
        if line.strip():
            lines.append(line)

    reader = csv.DictReader(lines)
    if reader.fieldnames is None or not set(SPECTRUM_COLUMNS) <= set(reader.fieldnames):
        raise ExportError(f'Spectrum CSV needs the columns {", ".join(SPECTRUM_COLUMNS)}')
    try:
        evs = [Eigenvalue(float(row['k']), int(row['multiplicity']), float(row['residual']),
                          (float(row['k']), float(row['k'])), 'csv')
               for row in reader]
    except (TypeError, ValueError) as e:
        raise ExportError(f'Malformed spectrum CSV: {e}')
    if window is None:
        window = (min((ev.k for ev in evs), default=0.0), max((ev.k for ev in evs), default=0.0))
    return Spectrum(evs, window)


def spectrum_to_json(spectrum: Spectrum, target=None) -> str:
    data = spectrum.to_dict()
    if target is not None:
        for entry, (dist, scaled) in zip(data['eigenvalues'], plot_rows(spectrum, target)):
            entry['dist'] = dist
            entry['scaled_dist'] = scaled
        data['lattice'] = target.label
    return json.dumps(data, indent=2)


def write_spectrum(spectrum: Spectrum, path: str, fmt: Optional[str] = None, target=None) -> str:
    """
    Writes a spectrum as JSON or CSV (columns k, multiplicity, residual,
    and dist, scaled_dist when a plot target is given).

    :return: the format used
    """
    fmt = guess_format(path, fmt)
    text = spectrum_to_json(spectrum, target) if fmt == 'json' else spectrum_to_csv(spectrum, target)
    with open(path, 'w') as out_file:
        out_file.write(text)
    logger.info(f'Spectrum with {len(spectrum)} eigenvalues written to {path}')
    return fmt


def read_spectrum(path: str, fmt: Optional[str] = None) -> Spectrum:
    fmt = guess_format(path, fmt)
    try:
        with open(path, 'r') as in_file:
            text = in_file.read()
    except OSError as e:
        raise ExportError(f'Unable to read spectrum file {path}: {e}')
    if fmt == 'csv':
        return spectrum_from_csv(text)
    try:
        return Spectrum.from_dict(json.loads(text))
    except (json.JSONDecodeError, RootFindError) as e:
        raise ExportError(f'Malformed spectrum file {path}: {e}')


def write_table(rows: Sequence[Sequence[Any]], headers: Sequence[str], path: str, fmt: Optional[str] = None):
    """ Writes a table of numbers as CSV or as a JSON list of records """
    fmt = guess_format(path, fmt)
    with open(path, 'w') as out_file:
        if fmt == 'json':
            json.dump([dict(zip(headers, row)) for row in rows], out_file, indent=2)
        else:
            writer = csv.writer(out_file, lineterminator='\n')
            writer.writerow(headers)
            for row in rows:
                writer.writerow(['' if x is None else fmt_float(x) if isinstance(x, float) else x for x in row])


def write_report(report: Dict[str, Any], path: str):
    with open(path, 'w') as out_file:
        json.dump(report, out_file, indent=2)
    logger.info(f'Report written to {path}')
