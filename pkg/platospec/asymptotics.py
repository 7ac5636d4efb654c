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
from enum import Enum
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from platospec import constants as c
from platospec.coupling import CouplingAssignment, CouplingSpec
from platospec.oracles import OracleKind
from platospec.platonic import Solid, build_platonic
from platospec.rootfind import RootFindOpts, Spectrum, scan_spectrum
from platospec.secular import SecularSystem

logger = logging.getLogger(__name__)


class AsymptoticsError(Exception):
    pass


class CenterFamily(Enum):
    N_PI = 'n_pi'
    TWO_N_PI = 'two_n_pi'
    PI_PLUS_TWO_N_PI = 'pi_plus_two_n_pi'
    HALF_PI_PLUS_N_PI = 'half_pi_plus_n_pi'
    FIXED = 'fixed'


# (center, period) of each named lattice
_LATTICES = {
    CenterFamily.N_PI: (0.0, math.pi),
    CenterFamily.TWO_N_PI: (0.0, 2 * math.pi),
    CenterFamily.PI_PLUS_TWO_N_PI: (math.pi, 2 * math.pi),
    CenterFamily.HALF_PI_PLUS_N_PI: (math.pi / 2, math.pi),
}


class EnvelopeKind(Enum):
    EXACT = 'exact'
    INVERSE_K = 'inverse_k'
    INVERSE_K2 = 'inverse_k2'


class Envelope(NamedTuple):
    kind: EnvelopeKind
    constant: float = 0.0
    slack: float = 0.0

    def scaled(self, k: float, dist: float) -> float:
        if self.kind is EnvelopeKind.INVERSE_K:
            return k * dist
        if self.kind is EnvelopeKind.INVERSE_K2:
            return k * k * dist
        return dist

    @property
    def bound(self) -> float:
        if self.kind is EnvelopeKind.EXACT:
            return c.EXACT_FAMILY_TOL
        return self.constant + self.slack


class ClusterTarget(NamedTuple):
    """
    Lattice {center + n period} (with -center too when symmetric) around which
    eigenvalues accumulate, and the envelope within which they must lie.
    """
    family: CenterFamily
    center: float
    period: float
    symmetric: bool = False
    envelope: Optional[Envelope] = None

    @classmethod
    def lattice(cls, family: CenterFamily, envelope: Optional[Envelope] = None) -> 'ClusterTarget':
        center, period = _LATTICES[family]
        return cls(family, center, period, False, envelope)

    @classmethod
    def fixed(cls, center: float, period: float, symmetric: bool = True,
              envelope: Optional[Envelope] = None) -> 'ClusterTarget':
        if period <= 0:
            raise AsymptoticsError(f'Lattice period must be positive, got {period}')
        rem = center % period
        # -center is the same lattice when center is 0 or half a period
        if any(math.isclose(rem, x, abs_tol=1e-12) for x in (0.0, period / 2, period)):
            symmetric = False
        return cls(CenterFamily.FIXED, float(center), float(period), symmetric, envelope)

    def distance(self, k: float) -> float:
        """ Distance from k to the nearest lattice point """
        centers = (self.center, -self.center) if self.symmetric else (self.center,)
        half = self.period / 2
        return min(abs((k - x + half) % self.period - half) for x in centers)

    def points(self, k_lo: float, k_hi: float) -> List[float]:
        """ Lattice points in [k_lo, k_hi] """
        centers = (self.center, -self.center) if self.symmetric else (self.center,)
        pts = []
        for x in centers:
            n = math.ceil((k_lo - x) / self.period)
            while x + n * self.period <= k_hi:
                pts.append(x + n * self.period)
                n += 1
        return sorted(pts)

    def contains(self, k: float) -> bool:
        return self.envelope.scaled(k, self.distance(k)) <= self.envelope.bound

    @property
    def label(self) -> str:
        if self.family is not CenterFamily.FIXED:
            return self.family.value
        sign = '+-' if self.symmetric else ''
        return f'{sign}{self.center:.6f}+{self.period:.6f}n'


class TargetReport(NamedTuple):
    target: str
    envelope: str
    constant: float
    slack: float
    count: int
    max_scaled_dist: float
    worst: Optional[float]
    passed: bool
    offenders: List[float]

    def to_dict(self) -> Dict[str, Any]:
        return {'target': self.target, 'envelope': self.envelope, 'constant': self.constant,
                'slack': self.slack, 'count': self.count, 'max_scaled_dist': self.max_scaled_dist,
                'worst': self.worst, 'pass': self.passed, 'offenders': list(self.offenders)}


class AsymptoticReport:
    """
    Outcome of an interval-family check over every eigenvalue of a window.
    Eigenvalues matching no target, or several targets where the classes
    must be exclusive, make the report fail. So does a largest k |sin k|
    above its bound, when `k_sin_k` holds that (value, bound) pair.
    """

    def __init__(self, solid: Solid, window: Tuple[float, float], targets: List[TargetReport],
                 unassigned: Optional[List[float]] = None, ambiguous: Optional[List[float]] = None,
                 extra: Optional[Dict[str, Any]] = None, k_sin_k: Optional[Tuple[float, float]] = None):
        self.solid = solid
        self.window = window
        self.targets = targets
        self.unassigned = unassigned or []
        self.ambiguous = ambiguous or []
        self.extra = extra or {}
        self.k_sin_k = k_sin_k

    @property
    def passed(self) -> bool:
        bounded = self.k_sin_k is None or self.k_sin_k[0] <= self.k_sin_k[1]
        return all(t.passed for t in self.targets) and not self.unassigned and not self.ambiguous and bounded

    def target(self, name: str) -> TargetReport:
        for t in self.targets:
            if t.target == name:
                return t
        raise KeyError(name)

    def to_dict(self) -> Dict[str, Any]:
        data = {'solid': self.solid.value, 'window': list(self.window), 'pass': self.passed,
                'targets': [t.to_dict() for t in self.targets], 'unassigned': self.unassigned,
                'ambiguous': self.ambiguous, **self.extra}
        if self.k_sin_k is not None:
            data['max_k_sin_k'], data['k_sin_k_bound'] = self.k_sin_k
        return data

    def __repr__(self):
        return f'AsymptoticReport({self.solid.value}, window={self.window}, pass={self.passed})'


def theorem_targets(solid: Solid, slack: float = c.ENVELOPE_SLACK,
                    slack_k2: float = c.ENVELOPE_SLACK_K2) -> List[ClusterTarget]:
    """ Interval families that hold the preferred-orientation eigenvalues for large k """
    if solid is Solid.OCTAHEDRON:
        return [
            ClusterTarget.lattice(CenterFamily.TWO_N_PI, Envelope(EnvelopeKind.EXACT)),
            ClusterTarget.fixed(2 * math.pi / 3, 2 * math.pi, True, Envelope(EnvelopeKind.EXACT)),
            ClusterTarget.lattice(CenterFamily.PI_PLUS_TWO_N_PI,
                                  Envelope(EnvelopeKind.INVERSE_K, c.OCTAHEDRON_ODD_CONSTANT, slack)),
            ClusterTarget.lattice(CenterFamily.HALF_PI_PLUS_N_PI,
                                  Envelope(EnvelopeKind.INVERSE_K2, c.OCTAHEDRON_HALF_CONSTANT, slack_k2)),
        ]
    constant = c.THEOREM_CONSTANTS[solid.value]
    return [ClusterTarget.lattice(CenterFamily.N_PI, Envelope(EnvelopeKind.INVERSE_K, constant, slack))]


def _build_spectrum(solid, spec, window, opts, executor):
    opts = opts or RootFindOpts()
    k_lo, k_hi = max(window[0], opts.k_min), window[1]
    if not k_lo < k_hi:
        raise AsymptoticsError(f'Empty analysis window {window}')
    system = SecularSystem(build_platonic(solid), CouplingAssignment(spec))
    return scan_spectrum(system, k_lo, k_hi, opts, executor)


def window_cap(solid: Solid) -> float:
    if solid in (Solid.DODECAHEDRON, Solid.ICOSAHEDRON):
        return c.WINDOW_CAP_LARGE
    return c.WINDOW_CAP_SMALL


def _check_window(solid, window):
    k_lo, k_hi = window
    if not 0 <= k_lo < k_hi:
        raise AsymptoticsError(f'Invalid window {window}')
    if k_hi > window_cap(solid):
        raise AsymptoticsError(f'Window {window} goes beyond k = {window_cap(solid)} for {solid.value}')


def _report_target(target: ClusterTarget, evs) -> TargetReport:
    env = target.envelope
    worst, worst_value, offenders = None, 0.0, []
    for ev in evs:
        value = env.scaled(ev.k, target.distance(ev.k))
        if worst is None or value > worst_value:
            worst, worst_value = ev.k, value
        if value > env.bound:
            offenders.append(ev.k)
    return TargetReport(target.label, env.kind.value, env.constant, env.slack,
                        sum(ev.multiplicity for ev in evs), worst_value, worst, not offenders, offenders)


def check_theorem(solid: Solid, window: Tuple[float, float], spectrum: Optional[Spectrum] = None,
                  opts: Optional[RootFindOpts] = None, executor=None,
                  slack: float = c.ENVELOPE_SLACK, slack_k2: float = c.ENVELOPE_SLACK_K2) -> AsymptoticReport:
    """
    Checks the preferred-orientation eigenvalues of a window against the
    large-k interval families of the solid.

    Tetrahedron, cube, dodecahedron and icosahedron have a single family
    around n pi with envelope C / k. The octahedron eigenvalues must fall in
    exactly one of four classes: exact 2 pi n, exact +-2 pi / 3 + 2 pi n,
    pi + 2 pi n within C / k and pi / 2 + pi n within C / k^2.

    :param solid: Solid
    :param window: (k_lo, k_hi)
    :param spectrum: precomputed spectrum of the window. Computed if not given
    :return: AsymptoticReport
    """
    _check_window(solid, window)
    if spectrum is None:
        spectrum = _build_spectrum(solid, CouplingSpec('preferred_orientation'), window, opts, executor)
    evs = list(spectrum.within(*window)) if spectrum.window != tuple(window) else list(spectrum)
    targets = theorem_targets(solid, slack, slack_k2)

    extra = {'eigenvalues': len(evs), 'total_multiplicity': sum(ev.multiplicity for ev in evs)}
    if len(targets) == 1:
        reports = [_report_target(targets[0], evs)]
        k_sin_k = None
        if solid.value in c.FUJIWARA_COEFFICIENTS:
            # the cubic bound on k^2 sin^2 k, restated at the eigenvalues
            k_sin_k = (max((ev.k * abs(math.sin(ev.k)) for ev in evs), default=0.0),
                       targets[0].envelope.bound)
        report = AsymptoticReport(solid, tuple(window), reports, extra=extra, k_sin_k=k_sin_k)
    else:
        assigned = [[] for _ in targets]
        unassigned, ambiguous = [], []
        for ev in evs:
            hits = [i for i, t in enumerate(targets) if t.contains(ev.k)]
            if len(hits) == 1:
                assigned[hits[0]].append(ev)
            elif hits:
                ambiguous.append(ev.k)
            else:
                unassigned.append(ev.k)
        reports = [_report_target(t, group) for t, group in zip(targets, assigned)]
        report = AsymptoticReport(solid, tuple(window), reports, unassigned, ambiguous, extra)

    level = logging.INFO if report.passed else logging.WARNING
    logger.log(level, f'{solid.value} on {window}: {len(evs)} eigenvalues, '
                      f'{"pass" if report.passed else "FAIL"}')
    return report


def envelope_profile(solid: Solid, windows: Sequence[Tuple[float, float]],
                     opts: Optional[RootFindOpts] = None, executor=None) -> List[float]:
    """ Largest scaled distance to the n pi lattice in each window """
    values = []
    for window in windows:
        report = check_theorem(solid, window, opts=opts, executor=executor)
        values.append(max(t.max_scaled_dist for t in report.targets))
    return values


def is_non_increasing(values: Sequence[float], slack: float = c.MONOTONICITY_SLACK) -> bool:
    return all(b <= a + slack for a, b in zip(values, values[1:]))


class ExactResidual(NamedTuple):
    k: float
    sigma: float
    count: int


def octahedron_exact_residuals(k_max: float = c.WINDOW_CAP_SMALL) -> List[ExactResidual]:
    """ sigma_min and its near-zero count at 2 pi n and +-2 pi / 3 + 2 pi n up to k_max """
    system = SecularSystem(build_platonic(Solid.OCTAHEDRON),
                           CouplingAssignment(CouplingSpec('preferred_orientation')))
    ks = sorted(ClusterTarget.lattice(CenterFamily.TWO_N_PI).points(c.K_MIN, k_max)
                + ClusterTarget.fixed(2 * math.pi / 3, 2 * math.pi).points(c.K_MIN, k_max))
    out = []
    for k in ks:
        sm = system.sigma_min(k)
        out.append(ExactResidual(k, sm.sigma, sm.count))
    return out


class KirchhoffLimit(NamedTuple):
    eigenvalue: float
    multiplicity: int
    cos_k: float
    k: float


def kirchhoff_limits(solid: Solid) -> List[KirchhoffLimit]:
    """
    Accumulation points cos k = lambda / d of the delta eigenvalues, one per
    distinct adjacency eigenvalue lambda of the solid's graph.
    """
    graph = build_platonic(solid)
    degree = graph.vertices[0].degree
    eigenvalues = np.linalg.eigvalsh(graph.adjacency_matrix())
    limits = []
    for lam in eigenvalues:
        if limits and abs(lam - limits[-1].eigenvalue) < 1e-8:
            prev = limits[-1]
            limits[-1] = prev._replace(multiplicity=prev.multiplicity + 1)
            continue
        cos_k = min(1.0, max(-1.0, lam / degree))
        limits.append(KirchhoffLimit(float(lam), 1, cos_k, math.acos(cos_k)))
    return sorted(limits, key=lambda x: x.k)


def fixed_point_targets(solid: Solid, coupling_kind) -> List[ClusterTarget]:
    """
    Values the eigenvalues accumulate at as k grows, as (center, period)
    lattices. Delta: +-arccos(lambda / d) + 2 pi n per adjacency eigenvalue
    plus n pi. Preferred orientation: n pi, except the octahedron families.
    """
    try:
        kind = coupling_kind if isinstance(coupling_kind, OracleKind) else OracleKind.parse(coupling_kind)
    except Exception:
        raise AsymptoticsError(f'No fixed-point targets for coupling {coupling_kind!r}')

    if kind is OracleKind.DELTA:
        targets = [ClusterTarget.fixed(limit.k, 2 * math.pi) for limit in kirchhoff_limits(solid)]
        targets.append(ClusterTarget.fixed(0.0, math.pi))
        return targets
    if solid is Solid.OCTAHEDRON:
        return [ClusterTarget.fixed(0.0, 2 * math.pi),
                ClusterTarget.fixed(2 * math.pi / 3, 2 * math.pi),
                ClusterTarget.fixed(math.pi, 2 * math.pi),
                ClusterTarget.fixed(math.pi / 2, math.pi)]
    return [ClusterTarget.fixed(0.0, math.pi)]


class ApproachPoint(NamedTuple):
    center: float
    nearest: Optional[float]
    distance: float


def approach_profile(spectrum: Spectrum, target: ClusterTarget) -> List[ApproachPoint]:
    """ For each lattice point of the target inside the window, the distance to the nearest eigenvalue """
    ks = spectrum.ks
    profile = []
    for point in target.points(*spectrum.window):
        if len(ks) == 0:
            profile.append(ApproachPoint(point, None, math.inf))
            continue
        i = int(np.argmin(np.abs(ks - point)))
        profile.append(ApproachPoint(point, float(ks[i]), float(abs(ks[i] - point))))
    return profile


class DriftWindow(NamedTuple):
    window: Tuple[float, float]
    max_scaled_drift: float
    worst: Optional[float]
    pairs: List[Tuple[float, float]]
    unpaired: List[float]


class DriftReport:
    """
    Distance between delta and Kirchhoff eigenvalues, scaled by k, over a
    sequence of windows. Passes when every eigenvalue is paired and the
    maximum does not grow by more than DRIFT_RATIO_MAX between windows.
    """

    def __init__(self, solid: Solid, alpha: float, windows: List[DriftWindow]):
        self.solid = solid
        self.alpha = alpha
        self.windows = windows

    @property
    def ratio(self) -> float:
        ratios = [0.0]
        for a, b in zip(self.windows, self.windows[1:]):
            if a.max_scaled_drift > 0:
                ratios.append(b.max_scaled_drift / a.max_scaled_drift)
            elif b.max_scaled_drift > 0:
                ratios.append(math.inf)
        return max(ratios)

    @property
    def passed(self) -> bool:
        return all(not w.unpaired for w in self.windows) and self.ratio <= c.DRIFT_RATIO_MAX

    def to_dict(self) -> Dict[str, Any]:
        return {
            'solid': self.solid.value, 'alpha': self.alpha, 'pass': self.passed,
            'ratio': self.ratio if math.isfinite(self.ratio) else None,
            'windows': [{'window': list(w.window), 'max_scaled_drift': w.max_scaled_drift,
                         'worst': w.worst, 'unpaired': w.unpaired} for w in self.windows],
        }

    def __repr__(self):
        return f'DriftReport({self.solid.value}, alpha={self.alpha}, ratio={self.ratio:.3f}, pass={self.passed})'


def _pair(delta: Spectrum, kirchhoff: Spectrum) -> DriftWindow:
    ks0 = kirchhoff.ks
    pairs, unpaired = [], []
    worst, worst_value = None, 0.0
    for ev in delta:
        if len(ks0) == 0:
            unpaired.append(ev.k)
            continue
        k0 = float(ks0[int(np.argmin(np.abs(ks0 - ev.k)))])
        drift = abs(ev.k - k0)
        if drift > c.DRIFT_PAIR_MAX:
            unpaired.append(ev.k)
            continue
        pairs.append((ev.k, k0))
        if worst is None or ev.k * drift > worst_value:
            worst, worst_value = ev.k, ev.k * drift
    return DriftWindow(delta.window, worst_value, worst, pairs, unpaired)


def kirchhoff_drift(solid: Solid, alpha: float, windows: Sequence[Tuple[float, float]],
                    opts: Optional[RootFindOpts] = None, executor=None) -> DriftReport:
    """
    Pairs each delta(alpha) eigenvalue of every window with the nearest
    Kirchhoff eigenvalue, the Kirchhoff spectrum being taken on the window
    widened by 0.5 on each side.

    :param solid: Solid
    :param alpha: coupling strength
    :param windows: at least two (k_lo, k_hi) windows, in increasing order
    :return: DriftReport
    """
    if len(windows) < 2:
        raise AsymptoticsError('Drift boundedness needs at least two windows')
    results = []
    for window in windows:
        _check_window(solid, window)
        delta = _build_spectrum(solid, CouplingSpec('delta', alpha=alpha), window, opts, executor)
        wide = (max(window[0] - 0.5, 0.0), window[1] + 0.5)
        kirchhoff = _build_spectrum(solid, CouplingSpec('delta', alpha=0.0), wide, opts, executor)
        results.append(_pair(delta, kirchhoff))
        logger.info(f'Drift of {solid.value} (alpha={alpha}) on {window}: '
                    f'max k|k_alpha - k_0| = {results[-1].max_scaled_drift:.6f}')
    return DriftReport(solid, float(alpha), results)


def fujiwara_bound(a2: float, a1: float, a0: float, tol: float = 1e-12,
                   max_iter: int = 1000) -> Tuple[float, float, float]:
    """
    Bound on the roots of y^3 + a2 y^2 + a1 y + a0: the initial bound
    2 max(|a2|, |a1|^(1/2), |a0 / 2|^(1/3)), then the fixed point of
    y <- (|a2| y^2 + |a1| y + |a0|)^(1/3) reached from it.

    :return: (initial, refined, sqrt(refined))
    """
    a2, a1, a0 = abs(a2), abs(a1), abs(a0)
    initial = 2 * max(a2, math.sqrt(a1), (a0 / 2) ** (1 / 3))
    y = initial
    for _ in range(max_iter):
        nxt = (a2 * y * y + a1 * y + a0) ** (1 / 3)
        if abs(nxt - y) <= tol * max(1.0, y):
            y = nxt
            break
        y = nxt
    return initial, y, math.sqrt(y)
