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
from typing import Callable, List, NamedTuple, Optional

import numpy as np

from platospec import constants as c
from platospec.coupling import (BoundaryCondition, CouplingAssignment, CouplingSpec,
                                boundary_rows, coupling_rows)
from platospec.graph import EdgeEnd
from platospec.platonic import COMBINATORICS, RotationSymmetry, Solid, build_platonic, rotation_symmetry
from platospec.rootfind import (Eigenvalue, RootFindOpts, Spectrum, golden_section,
                                local_minima, merge_eigenvalues, scan_grid, scan_spectrum)
from platospec.secular import (SecularError, SecularSystem, TrigSystem,
                               block_diag, end_blocks, trig_matrix)

logger = logging.getLogger(__name__)

SQRT3 = math.sqrt(3)
SQRT5 = math.sqrt(5)

# relative size of |f| at an accepted closed-form root
ROOT_REL_TOL = 1e-6
ROOT_PROBE = 0.02
RANK_TOL = 1e-9


class OracleKind(Enum):
    DELTA = 'delta'
    PO = 'preferred_orientation'

    @classmethod
    def parse(cls, name):
        text = str(name).strip().lower()
        if text in ('delta', 'kirchhoff'):
            return cls.DELTA
        if text in ('po', 'preferred_orientation'):
            return cls.PO
        raise SecularError(f"Unknown oracle coupling kind '{name}'")


class OracleId(NamedTuple):
    solid: Solid
    kind: OracleKind
    branch: int
    alpha: float = 0.0

    @property
    def omega(self) -> complex:
        return np.exp(2j * np.pi * self.branch / self.solid.sector_count)

    def validate(self):
        if not isinstance(self.solid, Solid) or not isinstance(self.kind, OracleKind):
            raise SecularError(f'Unknown oracle {self}')
        if not 0 <= int(self.branch) < self.solid.sector_count:
            raise SecularError(f'Sector {self.branch} out of range for {self.solid.value} '
                               f'({self.solid.sector_count} sectors)')
        return self


class Factor(NamedTuple):
    """ One factor of a closed-form secular function, raised to `power` """
    name: str
    func: Callable
    power: int = 1


def _trig(k):
    k = np.asarray(k, dtype=float)
    return k, np.sin(k), np.cos(k), np.sin(k / 2), np.cos(k / 2)


# Delta coupling on the solids with a sector quotient (d k cos k + alpha sin k
# against the quotient adjacency): each adjacency eigenvalue gives a factor.

def sector_quotient(solid: Solid, branch: int) -> np.ndarray:
    """
    Hermitian adjacency of the quotient of a dodecahedron or icosahedron by
    its five-fold rotation, restricted to sector `branch`. Fixed vertices are
    kept in sector 0 only.
    """
    w = np.exp(2j * np.pi * branch / 5)
    re = 2 * w.real
    if solid is Solid.DODECAHEDRON:
        return np.array([[re, 1, 0, 0],
                         [1, 0, 1 + w.conjugate(), 0],
                         [0, 1 + w, 0, 1],
                         [0, 0, 1, re]], dtype=complex)
    if solid is Solid.ICOSAHEDRON:
        if branch == 0:
            return np.array([[0, SQRT5, 0, 0],
                             [SQRT5, 2, 2, 0],
                             [0, 2, 2, SQRT5],
                             [0, 0, SQRT5, 0]], dtype=complex)
        return np.array([[re, 1 + w.conjugate()],
                         [1 + w, re]], dtype=complex)
    raise SecularError(f'No sector quotient stored for {solid.value}')


def _kirchhoff_factors(solid, branch, alpha):
    _, edges, degree = COMBINATORICS[solid]
    quotient = sector_quotient(solid, branch)
    # E_j - V_j: six edge orbits in every sector
    sin_power = edges // 5 - quotient.shape[0]
    factors = [Factor('sin k', lambda k: _trig(k)[1], sin_power)]
    for lam in np.linalg.eigvalsh(quotient):
        def func(k, lam=lam):
            k, s, cos, _, _ = _trig(k)
            return k * lam - degree * k * cos - alpha * s
        factors.append(Factor(f'k({lam:.6f} - {degree} cos k) - alpha sin k', func))
    return factors


def _tetrahedron(kind, j, w, alpha):
    if kind is OracleKind.DELTA:
        if j == 0:
            def bracket(k):
                k, s, cos, S, C = _trig(k)
                return (k ** 2 * S * (3 * C ** 2 - 1) + alpha / 3 * k * C * (1 - 3 * cos)
                        - alpha ** 2 / 3 * S * C ** 2)
            return [Factor('sin k/2', lambda k: _trig(k)[3]), Factor('j=0 bracket', bracket)]

        def bracket(k):
            k, s, cos, _, _ = _trig(k)
            return k * (w ** 2 - 3 * w * cos + 1) - alpha * w * s
        return [Factor('sin k', lambda k: _trig(k)[1]), Factor('bracket', bracket)]

    def cluster(k):
        k, _, _, _, C = _trig(k)
        h = C ** 2
        return k ** 2 * h + 3 * h - 1

    if j == 0:
        return [Factor('sin k/2', lambda k: _trig(k)[3], 2), Factor('k^2 h + 3h - 1', cluster)]

    sign = (-1) ** j

    def tangent(k):
        k, _, _, S, C = _trig(k)
        return k * S - sign * SQRT3 * C
    return [Factor('sin k/2', lambda k: _trig(k)[3]), Factor('k S -+ sqrt3 C', tangent),
            Factor('k^2 h + 3h - 1', cluster)]


def _cube(kind, j, w, alpha):
    if kind is OracleKind.DELTA:
        def inner(k, s, cos):
            return k * w ** 2 + k - 2 * k * w * cos - alpha * w * s

        def first(k):
            k, s, cos, S, C = _trig(k)
            return S * inner(k, s, cos) - w * k * s * C

        def second(k):
            k, s, cos, S, C = _trig(k)
            return C * inner(k, s, cos) + w * k * s * S
        return [Factor('sin(k/2) bracket', first), Factor('cos(k/2) bracket', second)]

    def sextic(k):
        k, s, cos, _, _ = _trig(k)
        return (k ** 6 * w ** 2 * s ** 2
                + k ** 4 * (w ** 4 + 2 * w ** 3 * cos - 6 * w ** 2 * cos ** 2 + 2 * w * cos + 1)
                + k ** 2 * (-w ** 4 + 6 * w ** 3 * cos - 9 * w ** 2 * cos ** 2 - w ** 2 + 6 * w * cos - 1))
    return [Factor('sin k', lambda k: _trig(k)[1]), Factor('sextic', sextic)]


def _octahedron(kind, j, w, alpha):
    if kind is OracleKind.DELTA:
        if j == 0:
            def shifted(shift):
                def func(k):
                    k, s, cos, _, _ = _trig(k)
                    return 4 * k * cos + alpha * s + shift * k
                return func
            return [Factor('4k cos k + alpha sin k - 4k', shifted(-4)),
                    Factor('4k cos k + alpha sin k', shifted(0)),
                    Factor('4k cos k + alpha sin k + 2k', shifted(2))]

        def bracket(k):
            k, s, cos, _, _ = _trig(k)
            return k * (-w ** 2 + 4 * w * cos - 1) + alpha * w * s
        return [Factor('sin k', lambda k: _trig(k)[1], 2), Factor('bracket', bracket)]

    def h_of(k):
        return _trig(k)[4] ** 2

    exact = Factor('sin k/2', lambda k: _trig(k)[3], 2)
    if j == 0:
        return [exact, Factor('4h - 1', lambda k: 4 * h_of(k) - 1),
                Factor('k^2 h + h - 1/2', lambda k: np.asarray(k) ** 2 * h_of(k) + h_of(k) - 0.5)]
    if j == 2:
        return [exact, Factor('h - 1/4', lambda k: h_of(k) - 0.25),
                Factor('k^2 (h - 1/2) + h', lambda k: np.asarray(k) ** 2 * (h_of(k) - 0.5) + h_of(k))]

    def quartic(k):
        k, _, cos, _, C = _trig(k)
        h = C ** 2
        return 2 * k ** 4 * cos * h + k ** 2 * (1 + 4 * h * cos) + 2 * cos * h
    return [exact, Factor('quartic', quartic)]


def _dodecahedron_po(w):
    def leading(k):
        k, s, cos, _, _ = _trig(k)
        s2, s4, s6 = s ** 2, s ** 4, s ** 6
        return (w * k ** 6 * s6
                + k ** 4 * s4 * (w ** 4 + w ** 3 + 2 * w ** 2 * cos - w ** 2 - 12 * w * cos ** 2 + 2 * cos - 1)
                + k ** 2 * s2 * (w ** 4 * (5 * s2 - 2 * cos - 6) + w ** 3 * (5 * s2 - 2 * cos - 6)
                                 + w ** 2 * (18 * cos * s2 - 5 * s2 - 12 * cos + 4)
                                 + w * (54 * s4 - 88 * s2 - 4 * cos + 36)
                                 + 18 * cos * s2 - 5 * s2 - 12 * cos + 4)
                + w ** 4 * (3 * s4 - 4 * cos * s2) + w ** 3 * (3 * s4 - 4 * cos * s2)
                + w ** 2 * (54 * cos * s4 - 3 * s4 - 48 * cos * s2 + 8 * s2 + 8 * cos - 8)
                + 4 * w * (27 * s6 - 51 * s4 - 2 * cos * s2 + 28 * s2 + 4 * cos - 4)
                + 54 * cos * s4 - 3 * s4 - 48 * cos * s2 + 8 * s2 + 8 * cos - 8)
    return [Factor('leading-order form', leading)]


def _icosahedron_po(w):
    def leading(k):
        k, s, cos, _, _ = _trig(k)
        s2, s4, s6 = s ** 2, s ** 4, s ** 6
        outer = 4 * cos * s2 + s2 - 2 * cos + 2
        ring = 45 * s4 - 20 * cos * s2 - 64 * s2 - 12 * cos + 12
        ring6 = 5 * s6 + 8 * cos * s4 - 12 * s4 - 8 * cos * s2 + 8 * s2
        return (-w ** 2 * k ** 6 * s6
                + k ** 4 * s4 * (w ** 4 * (19 * cos ** 2 + 4 * cos + 1) + 2 * w ** 3 * (21 * cos ** 2 + 2 * cos + 1)
                                 + w ** 2 * (19 * cos ** 2 + 4 * cos + 1) + 2 * w * (cos - 1) + 2 * cos - 2)
                + 2 * k ** 2 * s2 * (-w ** 4 * ring
                                     - 2 * w ** 3 * (65 * s4 - 8 * cos * s2 - 94 * s2 - 24 * cos + 24)
                                     - w ** 2 * ring + 2 * w * outer + 2 * outer)
                + 2 * (w ** 4 * ring6
                       - 2 * w ** 3 * (105 * s6 + 14 * cos * s4 - 176 * s4 - 80 * cos * s2 + 96 * s2 + 32 * cos - 32)
                       + w ** 2 * ring6
                       - 2 * w * (7 * cos * s4 - 4 * cos * s2 + 4 * s2)
                       - 14 * cos * s4 + 8 * cos * s2 - 8 * s2))
    return [Factor('leading-order form', leading)]


def closed_form_factors(oracle: OracleId, alpha: Optional[float] = None) -> List[Factor]:
    """
    Factorised secular function of one symmetry sector.

    :param oracle: OracleId (solid, coupling kind, sector, alpha)
    :param alpha: overrides oracle.alpha; ignored for preferred orientation
    :return: list of Factor, the secular function being their product
    """
    oracle = OracleId(*oracle).validate()
    alpha = float(oracle.alpha if alpha is None else alpha)
    j, w, solid = int(oracle.branch), oracle.omega, oracle.solid

    if solid is Solid.TETRAHEDRON:
        return _tetrahedron(oracle.kind, j, w, alpha)
    if solid is Solid.CUBE:
        return _cube(oracle.kind, j, w, alpha)
    if solid is Solid.OCTAHEDRON:
        return _octahedron(oracle.kind, j, w, alpha)
    if oracle.kind is OracleKind.DELTA:
        return _kirchhoff_factors(solid, j, alpha)
    if solid is Solid.DODECAHEDRON:
        return _dodecahedron_po(w)
    return _icosahedron_po(w)


def closed_form(oracle: OracleId, k, alpha: Optional[float] = None):
    """
    Evaluates the closed-form secular function of a sector at k (scalar or
    array). Its zeros are the eigenvalues of the component operator, except
    for the dodecahedron and icosahedron with preferred orientation, whose
    stored forms are only the leading terms for large k.
    """
    value = np.ones(np.shape(k), dtype=complex)
    for factor in closed_form_factors(oracle, alpha):
        value = value * np.asarray(factor.func(k), dtype=complex) ** factor.power
    return value if np.ndim(k) else complex(value)


def is_exact(solid: Solid, kind: OracleKind) -> bool:
    """ False where the stored closed form is a large-k approximation """
    return not (kind is OracleKind.PO and solid in (Solid.DODECAHEDRON, Solid.ICOSAHEDRON))


def _check_exact(solid: Solid, kind: OracleKind):
    if not is_exact(solid, kind):
        raise SecularError(f'The stored {kind.value} form of the {solid.value} holds only for large k, '
                           f'its zeros are not the spectrum. Use the component operators instead')


class _Root(NamedTuple):
    k: float
    multiplicity: int
    order: int
    residual: float
    window: tuple


def _geometric_mean(func, r, h):
    return math.sqrt(abs(func(r + h)) * abs(func(r - h)))


def factor_roots(func: Callable, k_min: float, k_max: float, opts: RootFindOpts) -> List[_Root]:
    """
    Zeros of one closed-form factor in [k_min, k_max]: |f| is scanned on the
    solver grid, every grid minimum is refined by golden-section search and
    kept when |f| there is negligible against its size a short distance away.
    The order of the zero is read from how that size scales.
    """
    grid = scan_grid(k_min, k_max, opts.scan_step)
    values = np.abs(np.asarray(func(grid), dtype=complex))
    minima = local_minima(values)

    def objective(k):
        return abs(complex(func(k)))

    roots = []
    for pos, i in enumerate(minima):
        a, b, _ = golden_section(objective, grid[i - 1], grid[i + 1], c.GOLDEN_WIDTH, opts.max_refine_iters)
        r = 0.5 * (a + b)
        if not k_min <= r <= k_max + opts.merge_tol:
            continue
        neighbours = [grid[minima[q]] for q in (pos - 1, pos + 1) if 0 <= q < len(minima)]
        gap = min([abs(r - x) for x in neighbours] + [5 * ROOT_PROBE])
        h = min(ROOT_PROBE, gap / 5, r / 2)
        scale = _geometric_mean(objective, r, h)
        if scale == 0 or objective(r) > ROOT_REL_TOL * scale:
            continue
        inner = _geometric_mean(objective, r, h / 4)
        order = max(1, int(round(math.log(scale / inner) / math.log(4)))) if inner > 0 else 1
        roots.append(_Root(r, order, order, objective(r) / scale, (a, b)))
    return roots


def _merge_roots(roots: List[_Root], merge_tol: float, provenance: str) -> List[Eigenvalue]:
    """
    Merges roots closer than merge_tol, summing multiplicities. The merged
    position and bracket are those of the lowest-order root, the best located.
    """
    merged = []
    group = []
    for root in sorted(roots, key=lambda r: r.k) + [None]:
        if group and (root is None or root.k - group[-1].k >= merge_tol):
            best = min(group, key=lambda r: (r.order, r.residual))
            merged.append(Eigenvalue(best.k, sum(r.multiplicity for r in group),
                                     max(r.residual for r in group), best.window, provenance))
            group = []
        if root is not None:
            group.append(root)
    return merged


def closed_form_roots(oracle: OracleId, k_min: float, k_max: float,
                      opts: Optional[RootFindOpts] = None) -> List[_Root]:
    """ Zeros of every factor of one sector, multiplicity = zero order times factor power """
    opts = opts or RootFindOpts()
    roots = []
    for factor in closed_form_factors(oracle):
        for root in factor_roots(factor.func, k_min, k_max, opts):
            roots.append(root._replace(multiplicity=root.order * factor.power))
    return roots


def closed_form_spectrum(oracle: OracleId, k_min: float, k_max: float,
                         opts: Optional[RootFindOpts] = None) -> Spectrum:
    """ Spectrum of one sector from the zeros of its closed form. Large-k forms are refused """
    oracle = OracleId(*oracle).validate()
    _check_exact(oracle.solid, oracle.kind)
    opts = opts or RootFindOpts()
    roots = closed_form_roots(oracle, k_min, k_max, opts)
    evs = _merge_roots(roots, opts.merge_tol, f'closed_form:{oracle.branch}')
    return Spectrum(evs, (k_min, k_max), {'sector': int(oracle.branch), 'roots': len(roots)})


def fixed_vertex_condition(kind, d: int, j: int, alpha: float = 0.0, p: Optional[int] = None) -> BoundaryCondition:
    """
    Condition that a vertex of degree d lying on the rotation axis imposes on
    the edge orbit through it in sector j. The boundary vector there is an
    eigenvector of U with eigenvalue lambda, which leaves the single
    condition f' = i (lambda - 1) / (lambda + 1) f.

    :param kind: OracleKind or coupling kind name
    :param d: vertex degree, equal to the rotation order unless p is given
    :param j: sector
    :param alpha: delta coupling strength
    :param p: rotation order
    """
    kind = kind if isinstance(kind, OracleKind) else OracleKind.parse(kind)
    p = p or d
    omega = np.exp(2j * np.pi * j / p)
    if kind is OracleKind.DELTA:
        if j % p:
            return BoundaryCondition.dirichlet()
        lam = (d - 1j * alpha) / (d + 1j * alpha)
    else:
        lam = omega
    if abs(lam + 1) < c.UNITARY_TOL:
        return BoundaryCondition.dirichlet()
    robin = 1j * (lam - 1) / (lam + 1)
    if abs(robin) < c.UNITARY_TOL:
        return BoundaryCondition.neumann()
    return BoundaryCondition.robin(complex(robin))


def _as_boundary(p, q) -> BoundaryCondition:
    if abs(q) <= RANK_TOL * abs(p):
        return BoundaryCondition.dirichlet()
    robin = -p / q
    if abs(robin) <= RANK_TOL:
        return BoundaryCondition.neumann()
    return BoundaryCondition.robin(complex(robin))


class ComponentSystem(TrigSystem):
    """
    Restriction of a symmetric SecularSystem to the sector in which the
    rotation acts as multiplication by omega_j = exp(2 pi i j / p).

    The unknowns are one (a, b) pair per edge orbit: an edge e = R^m(rep)
    carries omega^-m times the function of its representative, read
    backwards when the orbit flips its orientation. Each vertex orbit
    contributes the conditions of its first vertex; a vertex on the rotation
    axis reduces to a single boundary condition on its edge orbit, stored in
    `fixed_conditions`.

    :param system: SecularSystem on the solid's graph
    :param symmetry: RotationSymmetry of that graph
    :param branch: sector index j, 0 <= j < symmetry.order
    """

    def __init__(self, system: SecularSystem, symmetry: RotationSymmetry, branch: int,
                 mult_tol: Optional[float] = None):
        p = symmetry.order
        if not 0 <= int(branch) < p:
            raise SecularError(f'Sector {branch} out of range for a rotation of order {p}')
        self.system = system
        self.symmetry = symmetry
        self.branch = int(branch)
        self.omega = np.exp(2j * np.pi * self.branch / p)

        representatives, placement = symmetry.edge_orbits()
        column_of = {rep: 2 * i for i, rep in enumerate(representatives)}
        self.dimension = 2 * len(representatives)
        self.mult_tol = mult_tol if mult_tol is not None else c.MULT_TOL_SCALE * math.sqrt(self.dimension)

        def lift(end):
            rep, m, flipped = placement[end.edge]
            rep_end = EdgeEnd(rep, end.end.other if flipped else end.end)
            return rep_end, (column_of[rep], self.omega.conjugate() ** m)

        self._check_invariance()
        graph = system.graph
        a_blocks, b_blocks, ends, columns = [], [], [], []
        self.fixed_conditions = {}
        for orbit in symmetry.vertex_orbits():
            vertex = graph.vertex(orbit[0])
            a_rows, b_rows = coupling_rows(system.couplings[vertex.id])
            lifted = [lift(e) for e in vertex.ends]
            if len(orbit) == p:
                a_blocks.append(a_rows)
                b_blocks.append(b_rows)
                ends.extend(end for end, _ in lifted)
                columns.extend(col for _, col in lifted)
            elif len(orbit) == 1:
                bc, rep_end, column = self._reduce_fixed(vertex, a_rows, b_rows, lifted)
                self.fixed_conditions[vertex.id] = bc
                a_row, b_row = boundary_rows(bc)
                a_blocks.append(a_row)
                b_blocks.append(b_row)
                ends.append(rep_end)
                columns.append(column)
            else:
                raise SecularError(f'Vertex orbit {orbit} has length {len(orbit)}, expected 1 or {p}')

        if len(ends) != self.dimension:
            raise SecularError(f'Component operator has {len(ends)} conditions for {self.dimension} unknowns')
        # two ends of one vertex may share an orbit, leaving rows that vanish at k = n pi
        self.matrix = trig_matrix(block_diag(a_blocks), block_diag(b_blocks),
                                  end_blocks(ends, columns, self.dimension), scaling='envelope')
        logger.debug(f'Component system j={self.branch}: {self.dimension} unknowns, '
                     f'fixed vertices {sorted(self.fixed_conditions)}')

    def _check_invariance(self):
        """ The rotation must carry the coupling of every vertex onto the one of its image """
        graph = self.system.graph
        for vertex in graph.vertices:
            image = graph.vertex(self.symmetry.vertex_map[vertex.id])
            position = {end: i for i, end in enumerate(image.ends)}
            perm = []
            for end in vertex.ends:
                edge, flip = self.symmetry.edge_map[end.edge]
                moved = EdgeEnd(edge, end.end.other if flip else end.end)
                if moved not in position:
                    raise SecularError(f'Rotation maps an end of vertex {vertex.id} outside vertex {image.id}')
                perm.append(position[moved])
            u_v = self.system.couplings[vertex.id].matrix
            u_w = self.system.couplings[image.id].matrix
            if np.abs(u_w[np.ix_(perm, perm)] - u_v).max() > c.UNITARY_TOL:
                raise SecularError(f'Coupling at vertex {image.id} is not the rotated coupling '
                                   f'of vertex {vertex.id}')

    def _reduce_fixed(self, vertex, a_rows, b_rows, lifted):
        rep_ends = {end for end, _ in lifted}
        cols = {col for _, (col, _) in lifted}
        if len(rep_ends) != 1 or len(cols) != 1:
            raise SecularError(f'Ends of fixed vertex {vertex.id} do not form a single edge orbit')
        weights = np.array([weight for _, (_, weight) in lifted])
        pq = np.stack([a_rows @ weights, b_rows @ weights], axis=1)
        sv = np.linalg.svd(pq, compute_uv=False)
        if sv[0] == 0 or sv[-1] > RANK_TOL * sv[0]:
            raise SecularError(f'Coupling at fixed vertex {vertex.id} does not reduce to one '
                               f'condition in sector {self.branch}')
        p, q = pq[int(np.argmax(np.linalg.norm(pq, axis=1)))]
        return _as_boundary(p, q), rep_ends.pop(), (cols.pop(), 1.0)

    def __repr__(self):
        return f'ComponentSystem({self.system.graph!r}, branch={self.branch})'


def component_system(solid: Solid, spec: CouplingSpec, branch: int) -> ComponentSystem:
    system = SecularSystem(build_platonic(solid), CouplingAssignment(spec))
    return ComponentSystem(system, rotation_symmetry(solid), branch)


def _oracle_spec(kind: OracleKind, alpha: float) -> CouplingSpec:
    if kind is OracleKind.DELTA:
        return CouplingSpec('delta', alpha=alpha)
    return CouplingSpec('preferred_orientation')


def component_spectrum(solid: Solid, kind, alpha: float, branch: int, k_min: float, k_max: float,
                       opts: Optional[RootFindOpts] = None, executor=None) -> Spectrum:
    """ Spectrum of one component operator, found with the same sweep as the full graph """
    kind = kind if isinstance(kind, OracleKind) else OracleKind.parse(kind)
    system = component_system(solid, _oracle_spec(kind, alpha), branch)
    spectrum = scan_spectrum(system, k_min, k_max, opts, executor, provenance=f'component:{branch}')
    spectrum.stats['sector'] = branch
    return spectrum


def oracle_union_spectrum(solid: Solid, coupling_kind, alpha: float = 0.0, k_max: float = 4 * math.pi,
                          k_min: Optional[float] = None, method: str = 'auto',
                          opts: Optional[RootFindOpts] = None, executor=None) -> Spectrum:
    """
    Union over all symmetry sectors of the sector spectra, multiplicities
    summed where sectors share an eigenvalue.

    :param solid: Solid
    :param coupling_kind: OracleKind, or 'delta' / 'po'
    :param alpha: delta coupling strength
    :param k_max: upper end of the window
    :param k_min: lower end of the window. Default opts.k_min
    :param method: 'closed_form', 'component', or 'auto' (closed forms where they are exact)
    :return: Spectrum
    """
    kind = coupling_kind if isinstance(coupling_kind, OracleKind) else OracleKind.parse(coupling_kind)
    opts = opts or RootFindOpts()
    k_min = opts.k_min if k_min is None else k_min
    if k_max <= 0:
        raise SecularError(f'Window upper end must be positive, got {k_max}')
    if method == 'auto':
        method = 'closed_form' if is_exact(solid, kind) else 'component'
    if method not in ('closed_form', 'component'):
        raise SecularError(f"Unknown oracle method '{method}'")
    if method == 'closed_form':
        _check_exact(solid, kind)
    if k_max <= k_min:
        return Spectrum([], (k_min, k_max), {'method': method})

    logger.info(f'Oracle spectrum of {solid.value} ({kind.value}, alpha={alpha}) '
                f'on ({k_min}, {k_max}] from {method} sectors')
    if method == 'closed_form':
        sectors = [closed_form_spectrum(OracleId(solid, kind, j, alpha), k_min, k_max, opts)
                   for j in range(solid.sector_count)]
        evs = merge_eigenvalues([ev for sector in sectors for ev in sector], opts.merge_tol)
        merged = [ev._replace(provenance='closed_form') for ev in evs]
        return Spectrum(merged, (k_min, k_max), {'method': method, 'sectors': solid.sector_count,
                                                 'roots': sum(s.stats['roots'] for s in sectors)})

    sectors = [component_spectrum(solid, kind, alpha, j, k_min, k_max, opts, executor)
               for j in range(solid.sector_count)]
    evs = merge_eigenvalues([ev for sector in sectors for ev in sector], opts.merge_tol)
    merged = [ev._replace(provenance='component') for ev in evs]
    rejections = [r for sector in sectors for r in sector.rejections]
    return Spectrum(merged, (k_min, k_max), {'method': method, 'sectors': solid.sector_count}, rejections)
