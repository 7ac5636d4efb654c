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

import math
import logging
from typing import Any, Dict, List, NamedTuple, Optional, Tuple, Union

import numpy as np

from platospec import constants as c
from platospec.utils import grid_chunks

logger = logging.getLogger(__name__)

INV_PHI = (math.sqrt(5) - 1) / 2  # 1 / phi
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2  # 1 / phi^2


class RootFindError(Exception):
    pass


class RootFindOpts:
    """
    Tunables of the k-sweep. Defaults come from platospec.constants and can be
    overridden from the 'solver' config section or the command line.
    """

    FIELDS = ('k_min', 'scan_step', 'tol_accept', 'promote_tol', 'merge_tol',
              'max_refine_iters', 'max_split_depth', 'chunk_size')

    def __init__(self, k_min=c.K_MIN, scan_step=c.SCAN_STEP, tol_accept=c.TOL_ACCEPT,
                 promote_tol=c.PROMOTE_TOL, merge_tol=c.MERGE_TOL,
                 max_refine_iters=c.MAX_REFINE_ITERS, max_split_depth=c.MAX_SPLIT_DEPTH,
                 chunk_size=c.CHUNK_SIZE):
        self.k_min = float(k_min)
        self.scan_step = float(scan_step)
        self.tol_accept = float(tol_accept)
        self.promote_tol = float(promote_tol)
        self.merge_tol = float(merge_tol)
        self.max_refine_iters = int(max_refine_iters)
        self.max_split_depth = int(max_split_depth)
        self.chunk_size = int(chunk_size)
        if self.scan_step <= 0 or self.k_min <= 0:
            raise RootFindError('scan_step and k_min must be positive')
        if not self.tol_accept < self.promote_tol:
            raise RootFindError('tol_accept must be smaller than promote_tol')

    @classmethod
    def from_config(cls, config: Dict[str, Any]) -> 'RootFindOpts':
        solver = config.get('solver', config)
        return cls(**{key: solver[key] for key in cls.FIELDS if key in solver})

    def replace(self, **changes) -> 'RootFindOpts':
        values = self.to_dict()
        values.update(changes)
        return RootFindOpts(**values)

    def to_dict(self) -> Dict[str, Any]:
        return {key: getattr(self, key) for key in self.FIELDS}

    def __repr__(self):
        return f'RootFindOpts({self.to_dict()})'


class Eigenvalue(NamedTuple):
    k: float
    multiplicity: int
    residual: float
    window: Tuple[float, float]
    provenance: str = 'full'
    cluster: bool = False


class Rejection(NamedTuple):
    k: float
    sigma: float
    window: Tuple[float, float]
    reason: str  # 'spurious' or 'unconverged'


class Spectrum:
    """
    Sorted eigenvalues found in a window, plus the brackets that were
    examined and rejected and some detector statistics.
    """

    def __init__(self, eigenvalues: List[Eigenvalue], window: Tuple[float, float],
                 stats: Optional[Dict[str, Any]] = None, rejections: Optional[List[Rejection]] = None):
        self.eigenvalues = sorted(eigenvalues, key=lambda ev: ev.k)
        self.window = (float(window[0]), float(window[1]))
        self.stats = stats or {}
        self.rejections = rejections or []

    def __len__(self):
        return len(self.eigenvalues)

    def __iter__(self):
        return iter(self.eigenvalues)

    def __getitem__(self, item):
        return self.eigenvalues[item]

    @property
    def ks(self) -> np.ndarray:
        return np.array([ev.k for ev in self.eigenvalues])

    @property
    def multiplicities(self) -> List[int]:
        return [ev.multiplicity for ev in self.eigenvalues]

    def total_multiplicity(self) -> int:
        return sum(ev.multiplicity for ev in self.eigenvalues)

    def expanded(self) -> np.ndarray:
        """ Eigenvalues repeated according to multiplicity """
        return np.repeat(self.ks, self.multiplicities) if self.eigenvalues else np.array([])

    def within(self, k_lo: float, k_hi: float) -> 'Spectrum':
        evs = [ev for ev in self.eigenvalues if k_lo < ev.k <= k_hi]
        return Spectrum(evs, (k_lo, k_hi), dict(self.stats), list(self.rejections))

    def find(self, k: float, tol: float = 1e-7) -> Optional[Eigenvalue]:
        """ The eigenvalue closest to k, if closer than tol """
        if not self.eigenvalues:
            return None
        ks = self.ks
        i = int(np.argmin(np.abs(ks - k)))
        return self.eigenvalues[i] if abs(ks[i] - k) <= tol else None

    @property
    def unconverged(self) -> List[Rejection]:
        return [r for r in self.rejections if r.reason == 'unconverged']

    def to_dict(self) -> Dict[str, Any]:
        return {
            'window': list(self.window),
            'eigenvalues': [{'k': ev.k, 'multiplicity': ev.multiplicity, 'residual': ev.residual,
                             'window': list(ev.window), 'provenance': ev.provenance, 'cluster': ev.cluster}
                            for ev in self.eigenvalues],
            'rejections': [{'k': r.k, 'sigma': r.sigma, 'window': list(r.window), 'reason': r.reason}
                           for r in self.rejections],
            'stats': dict(self.stats),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Spectrum':
        try:
            evs = [Eigenvalue(float(e['k']), int(e['multiplicity']), float(e['residual']),
                              tuple(e.get('window', (e['k'], e['k']))), e.get('provenance', 'full'),
                              bool(e.get('cluster', False)))
                   for e in data['eigenvalues']]
            rejections = [Rejection(float(r['k']), float(r['sigma']), tuple(r['window']), r['reason'])
                          for r in data.get('rejections', [])]
            window = tuple(data['window'])
        except (KeyError, TypeError, ValueError) as e:
            raise RootFindError(f'Malformed spectrum document: {e}')
        return cls(evs, window, data.get('stats', {}), rejections)

    def __repr__(self):
        return (f'Spectrum(window={self.window}, eigenvalues={len(self.eigenvalues)}, '
                f'total_multiplicity={self.total_multiplicity()})')


def golden_section(f, a, b, tol=c.GOLDEN_WIDTH, max_iter=c.MAX_REFINE_ITERS):
    """
    Golden-section search.

    Given a function f with a local minimum in the interval [a, b], returns a
    sub-interval [c, d] of width <= tol (or the one reached after max_iter
    steps) containing it, together with the number of evaluations of f.
    """
    a, b = min(a, b), max(a, b)
    h = b - a
    if h <= tol:
        return a, b, 0

    # Required steps to achieve tolerance
    n = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))
    n = min(n, max_iter)

    c_ = a + INV_PHI_SQUARE * h
    d = a + INV_PHI * h
    yc = f(c_)
    yd = f(d)

    for _ in range(n - 1):
        if yc < yd:
            b = d
            d = c_
            yd = yc
            h = INV_PHI * h
            c_ = a + INV_PHI_SQUARE * h
            yc = f(c_)
        else:
            a = c_
            c_ = d
            yc = yd
            h = INV_PHI * h
            d = a + INV_PHI * h
            yd = f(d)

    if yc < yd:
        return a, d, n + 1
    else:
        return c_, b, n + 1


def merge_eigenvalues(eigenvalues: List[Eigenvalue], merge_tol: float) -> List[Eigenvalue]:
    """
    Sorts and merges entries closer than merge_tol, summing multiplicities.
    The merged entry keeps the position and bracket of the tighter of the two.
    """
    merged = []
    for ev in sorted(eigenvalues, key=lambda ev: ev.k):
        if merged and ev.k - merged[-1].k < merge_tol:
            prev = merged[-1]
            best = min((prev, ev), key=lambda e: (e.window[1] - e.window[0], e.residual))
            merged[-1] = Eigenvalue(best.k, prev.multiplicity + ev.multiplicity,
                                    max(prev.residual, ev.residual), best.window,
                                    prev.provenance, prev.cluster or ev.cluster)
        else:
            merged.append(ev)
    return merged


def scan_grid(k_min: float, k_max: float, step: float) -> np.ndarray:
    """
    Uniform grid covering [k_min, k_max] with one extra point beyond each end,
    so that minima at the window edges are interior grid minima.
    """
    count = int(math.ceil((k_max - k_min) / step)) + 2
    grid = k_min + step * np.arange(-1, count)
    if grid[0] <= 0:
        grid[0] = k_min / 2
    return grid


def local_minima(values: np.ndarray) -> List[int]:
    """ Interior indices i with values[i-1] >= values[i] < values[i+1] """
    v = np.asarray(values)
    if len(v) < 3:
        return []
    idx = np.flatnonzero((v[1:-1] <= v[:-2]) & (v[1:-1] < v[2:])) + 1
    return [int(i) for i in idx]


class _Refined(NamedTuple):
    result: Union[Eigenvalue, Rejection]
    loose: int
    evaluations: int


def _refine(detector, k_lo, k_hi, opts: RootFindOpts, provenance='full') -> _Refined:
    def objective(k):
        return float(detector.singular_values(k)[-1])

    a, b, evaluations = golden_section(objective, k_lo, k_hi, c.GOLDEN_WIDTH, opts.max_refine_iters)
    k = 0.5 * (a + b)
    sv = detector.singular_values(k)
    sigma = float(sv[-1])
    loose = int(np.count_nonzero(sv < opts.promote_tol))
    if sigma <= opts.tol_accept:
        count = max(1, int(np.count_nonzero(sv < detector.mult_tol)))
        ev = Eigenvalue(k, count, sigma, (min(a, k), max(b, k)), provenance)
        return _Refined(ev, loose, evaluations + 1)

    reason = 'unconverged' if sigma <= opts.promote_tol else 'spurious'
    return _Refined(Rejection(k, sigma, (k_lo, k_hi), reason), loose, evaluations + 1)


def refine_root(detector, k_lo: float, k_hi: float, opts: Optional[RootFindOpts] = None) -> Union[Eigenvalue, Rejection]:
    """
    Golden-section minimization of sigma_min on (k_lo, k_hi) down to a bracket
    of width 1e-12. The minimizer is accepted when sigma_min <= tol_accept;
    otherwise a Rejection is returned, 'unconverged' when the minimum is below
    promote_tol and 'spurious' when it is not.

    :param detector: SecularSystem (or any object with singular_values(k) and mult_tol)
    :param k_lo: lower end of the bracket
    :param k_hi: upper end of the bracket
    :param opts: RootFindOpts
    :return: Eigenvalue or Rejection
    """
    opts = opts or RootFindOpts()
    if not 0 < k_lo < k_hi:
        raise RootFindError(f'Invalid bracket ({k_lo}, {k_hi})')
    return _refine(detector, k_lo, k_hi, opts).result


def _sigma_chunk(args):
    detector, ks = args
    return detector.singular_values(ks)[..., -1]


def _scan_brackets(detector, grid, opts, executor, depth, provenance, stats):
    chunks = grid_chunks(grid, opts.chunk_size)
    sigma = np.concatenate(executor.map_results(_sigma_chunk, [(detector, ch) for ch in chunks],
                                                desc='scan' if depth == 0 else None))
    stats['evaluations'] += len(grid)
    minima = local_minima(sigma)
    brackets = [(grid[i - 1], grid[i + 1]) for i in minima]
    stats['brackets'] += len(brackets)

    refined = executor.map_results(lambda br: _refine(detector, br[0], br[1], opts, provenance), brackets,
                                   desc='refine' if depth == 0 else None)

    accepted, rejected = [], []
    for (lo, hi), item in zip(brackets, refined):
        stats['refinements'] += 1
        stats['evaluations'] += item.evaluations
        result = item.result
        if isinstance(result, Eigenvalue) and item.loose > result.multiplicity:
            if depth < opts.max_split_depth:
                stats['splits'] += 1
                logger.debug(f'Splitting bracket ({lo:.10f}, {hi:.10f}): {item.loose} small singular '
                             f'values against multiplicity {result.multiplicity}')
                sub_step = (hi - lo) / (2 * c.SPLIT_FACTOR)
                sub_grid = lo + sub_step * np.arange(2 * c.SPLIT_FACTOR + 1)
                sub_acc, sub_rej = _scan_brackets(detector, sub_grid, opts, executor, depth + 1,
                                                  provenance, stats)
                if sub_acc:
                    accepted.extend(sub_acc)
                    rejected.extend(r for r in sub_rej if r.reason == 'unconverged')
                    continue
            logger.debug(f'Unresolved cluster at k={result.k:.12f} with {item.loose} small singular values')
            result = result._replace(multiplicity=item.loose, cluster=True)
        if isinstance(result, Eigenvalue):
            accepted.append(result)
        else:
            rejected.append(result)

    return accepted, rejected


def scan_spectrum(detector, k_min: float, k_max: float, opts: Optional[RootFindOpts] = None,
                  executor=None, provenance: str = 'full') -> Spectrum:
    """
    Locates every zero of sigma_min(M(k)) in (k_min, k_max].

    The window is sampled on a uniform grid of step opts.scan_step; every
    local minimum of sigma_min on the grid is refined with golden-section
    search and kept if it converges to a zero. Brackets in which more singular
    values are small than the multiplicity found are re-scanned on a finer
    grid to separate nearly coincident roots.

    :param detector: SecularSystem, or any object with singular_values(k) and mult_tol
    :param k_min: lower end of the window, > 0
    :param k_max: upper end of the window
    :param opts: RootFindOpts
    :param executor: SweepExecutor running the chunks. A default one is created if not given
    :param provenance: label stored in every Eigenvalue
    :return: Spectrum
    """
    from platospec.executor import SweepExecutor

    opts = opts or RootFindOpts()
    if not (0 < k_min < k_max) or not (math.isfinite(k_min) and math.isfinite(k_max)):
        raise RootFindError(f'Invalid window ({k_min}, {k_max})')

    own_executor = executor is None
    executor = executor or SweepExecutor()
    stats = {'scan_step': opts.scan_step, 'evaluations': 0, 'brackets': 0,
             'refinements': 0, 'splits': 0}
    try:
        grid = scan_grid(k_min, k_max, opts.scan_step)
        logger.info(f'Scanning ({k_min}, {k_max}] with step {opts.scan_step} '
                    f'({len(grid)} points, {executor.worker_processes} workers)')
        accepted, rejected = _scan_brackets(detector, grid, opts, executor, 0, provenance, stats)
    finally:
        if own_executor:
            executor.shutdown()

    # a root on the upper edge may refine to just past it
    k_top = k_max + opts.merge_tol
    accepted = [ev for ev in accepted if k_min <= ev.k <= k_top]
    rejected = [r for r in rejected if k_min <= r.k <= k_top]
    eigenvalues = merge_eigenvalues(accepted, opts.merge_tol)
    spectrum = Spectrum(eigenvalues, (k_min, k_max), stats, rejected)

    if spectrum.unconverged:
        logger.warning(f'{len(spectrum.unconverged)} brackets did not converge below tol_accept')
    logger.info(f'Found {len(spectrum)} eigenvalues (total multiplicity {spectrum.total_multiplicity()})')
    return spectrum


def eigenfunction_coefficients(system, ev: Eigenvalue) -> np.ndarray:
    """
    Orthonormal basis of the numerical null space of the row-scaled M(k)
    at an accepted eigenvalue.

    :return: complex array of shape (multiplicity, N, 2) holding (a_e, b_e) per edge
    """
    matrix = system.normalized(ev.k)
    _, sv, vh = np.linalg.svd(matrix)
    nullity = int(np.count_nonzero(sv < system.mult_tol))
    if nullity != ev.multiplicity:
        raise RootFindError(f'Null space at k={ev.k} has dimension {nullity}, '
                            f'expected multiplicity {ev.multiplicity}')

    basis = vh[len(sv) - nullity:].conj()
    residual = np.linalg.norm(matrix @ basis.T, axis=0)
    if np.any(residual > c.NULLSPACE_RESIDUAL):
        raise RootFindError(f'Null vector residual {residual.max():.3e} at k={ev.k} exceeds '
                            f'{c.NULLSPACE_RESIDUAL}')

    return basis.reshape(nullity, -1, 2)
