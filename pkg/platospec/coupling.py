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

import json
import logging
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np

from platospec.constants import UNITARY_TOL

logger = logging.getLogger(__name__)


class CouplingError(Exception):
    pass


class CouplingKind(Enum):
    DELTA = 'delta'
    PREFERRED_ORIENTATION = 'preferred_orientation'
    CUSTOM = 'custom'


class VertexCoupling:
    """
    Unitary coupling matrix U of a vertex of degree d. The vertex condition
    is (U - I) Psi + i (U + I) Psi' = 0, Psi being the boundary values and
    Psi' the outgoing derivatives in the vertex's end order.
    """

    def __init__(self, matrix, kind: CouplingKind = CouplingKind.CUSTOM, alpha: Optional[float] = None):
        matrix = np.array(matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] == 0:
            raise CouplingError(f'Coupling matrix must be square and non-empty, got shape {matrix.shape}')
        defect = unitarity_defect(matrix)
        if defect > UNITARY_TOL:
            raise CouplingError(f'Coupling matrix is not unitary: max|U*U - I| = {defect:.3e}')
        matrix.setflags(write=False)
        self.matrix = matrix
        self.kind = kind
        self.alpha = alpha

    @property
    def degree(self):
        return self.matrix.shape[0]

    def __repr__(self):
        extra = f', alpha={self.alpha}' if self.kind is CouplingKind.DELTA else ''
        return f'VertexCoupling({self.kind.value}, d={self.degree}{extra})'


def unitarity_defect(matrix) -> float:
    matrix = np.asarray(matrix, dtype=complex)
    return float(np.abs(matrix.conj().T @ matrix - np.eye(matrix.shape[0])).max())


def delta_matrix(d: int, alpha: float) -> VertexCoupling:
    """
    Delta coupling of strength alpha: continuity of the values and the sum of
    outgoing derivatives equal to alpha times the common value.

    :param d: vertex degree, at least 1
    :param alpha: coupling strength; alpha = 0 is the Kirchhoff coupling
    """
    if int(d) != d or d < 1:
        raise CouplingError(f'Delta coupling needs a degree >= 1, got {d}')
    d = int(d)
    alpha = float(alpha)
    matrix = 2 / (d + 1j * alpha) * np.ones((d, d)) - np.eye(d)
    return VertexCoupling(matrix, CouplingKind.DELTA, alpha)


def preferred_orientation_matrix(d: int) -> VertexCoupling:
    """
    Cyclic shift coupling: row m has its single 1 in column m + 1 (mod d), so
    a wave entering through an end leaves through the next one in the
    vertex order.
    """
    if int(d) != d or d < 2:
        raise CouplingError(f'Preferred-orientation coupling needs a degree >= 2, got {d}')
    d = int(d)
    matrix = np.roll(np.eye(d), 1, axis=1)
    return VertexCoupling(matrix, CouplingKind.PREFERRED_ORIENTATION)


def custom_coupling(matrix) -> VertexCoupling:
    return VertexCoupling(matrix, CouplingKind.CUSTOM)


def dirichlet_coupling(d: int = 1) -> VertexCoupling:
    return custom_coupling(-np.eye(d))


def neumann_coupling(d: int = 1) -> VertexCoupling:
    return custom_coupling(np.eye(d))


def coupling_rows(coupling: VertexCoupling) -> Tuple[np.ndarray, np.ndarray]:
    """ Returns (A, B) = (U - I, i(U + I)); the condition reads A Psi + B Psi' = 0 """
    identity = np.eye(coupling.degree)
    return coupling.matrix - identity, 1j * (coupling.matrix + identity)


def rank_condition(a_rows: np.ndarray, b_rows: np.ndarray) -> bool:
    """ rank(A|B) = d, necessary for the condition to define a self-adjoint operator """
    return int(np.linalg.matrix_rank(np.hstack([a_rows, b_rows]))) == a_rows.shape[0]


class BoundaryKind(Enum):
    DIRICHLET = 'dirichlet'
    NEUMANN = 'neumann'
    ROBIN = 'robin'


class BoundaryCondition:
    """
    Condition at a single edge end: f = 0 (Dirichlet), f' = 0 (Neumann) or
    f' = c f (Robin), f' being the outgoing derivative.
    """

    def __init__(self, kind: BoundaryKind, c: complex = 0j):
        if kind is BoundaryKind.ROBIN and c == 0:
            kind = BoundaryKind.NEUMANN
        self.kind = kind
        self.c = complex(c) if kind is BoundaryKind.ROBIN else 0j

    @classmethod
    def dirichlet(cls):
        return cls(BoundaryKind.DIRICHLET)

    @classmethod
    def neumann(cls):
        return cls(BoundaryKind.NEUMANN)

    @classmethod
    def robin(cls, c: complex):
        return cls(BoundaryKind.ROBIN, c)

    def __eq__(self, other):
        if not isinstance(other, BoundaryCondition):
            return NotImplemented
        return self.kind is other.kind and self.c == other.c

    def __hash__(self):
        return hash((self.kind, self.c))

    def __repr__(self):
        if self.kind is BoundaryKind.ROBIN:
            return f'Robin({self.c})'
        return self.kind.value.capitalize()


def boundary_rows(bc: BoundaryCondition) -> Tuple[np.ndarray, np.ndarray]:
    """ 1x1 (A, B) rows of a boundary condition """
    if bc.kind is BoundaryKind.DIRICHLET:
        return np.ones((1, 1), dtype=complex), np.zeros((1, 1), dtype=complex)
    if bc.kind is BoundaryKind.NEUMANN:
        return np.zeros((1, 1), dtype=complex), np.ones((1, 1), dtype=complex)
    return np.full((1, 1), -bc.c, dtype=complex), np.ones((1, 1), dtype=complex)


def boundary_to_coupling(bc: BoundaryCondition) -> VertexCoupling:
    """ The degree-1 unitary coupling equivalent to a boundary condition """
    if bc.kind is BoundaryKind.DIRICHLET:
        return dirichlet_coupling(1)
    if bc.kind is BoundaryKind.NEUMANN:
        return neumann_coupling(1)
    if abs(bc.c.imag) > UNITARY_TOL:
        raise CouplingError(f'Robin constant {bc.c} is not real; no unitary coupling reproduces it')
    c = bc.c.real
    return custom_coupling([[(1 - 1j * c) / (1 + 1j * c)]])


class CouplingSpec:
    """
    Degree-independent description of a vertex coupling, as read from the
    command line or a coupling file. build(d) yields the VertexCoupling for a
    vertex of degree d.
    """

    ALIASES = {
        'delta': 'delta',
        'kirchhoff': 'delta',
        'po': 'preferred_orientation',
        'preferred_orientation': 'preferred_orientation',
        'dirichlet': 'dirichlet',
        'neumann': 'neumann',
        'robin': 'robin',
        'custom': 'custom',
    }

    def __init__(self, kind: str, alpha: float = 0.0, c: float = 0.0, matrix=None):
        try:
            self.kind = self.ALIASES[str(kind).strip().lower()]
        except KeyError:
            raise CouplingError(f"Unknown coupling kind '{kind}'")
        self.alpha = float(alpha)
        self.c = float(c)
        self.matrix = None if matrix is None else np.array(matrix, dtype=complex)
        if self.kind == 'custom' and self.matrix is None:
            raise CouplingError('Custom coupling needs a matrix')

    @classmethod
    def parse(cls, text: str) -> 'CouplingSpec':
        """ Parses 'po', 'delta', 'delta:1.5', 'dirichlet', 'neumann' or 'robin:0.3' """
        name, _, value = str(text).partition(':')
        try:
            number = float(value) if value else 0.0
        except ValueError:
            raise CouplingError(f"Invalid coupling parameter in '{text}'")
        if name.strip().lower() == 'robin':
            return cls(name, c=number)
        return cls(name, alpha=number)

    @classmethod
    def from_dict(cls, data: dict) -> 'CouplingSpec':
        if not isinstance(data, dict) or 'kind' not in data:
            raise CouplingError(f'Coupling entry must be a mapping with a "kind" key, got {data!r}')
        matrix = data.get('matrix')
        if matrix is not None:
            matrix = [[complex(*x) if isinstance(x, (list, tuple)) else complex(x) for x in row]
                      for row in matrix]
        try:
            return cls(data['kind'], alpha=data.get('alpha', 0.0), c=data.get('c', 0.0), matrix=matrix)
        except (TypeError, ValueError) as e:
            raise CouplingError(f'Invalid coupling entry {data!r}: {e}')

    def to_dict(self) -> dict:
        data = {'kind': self.kind}
        if self.kind == 'delta':
            data['alpha'] = self.alpha
        elif self.kind == 'robin':
            data['c'] = self.c
        elif self.kind == 'custom':
            data['matrix'] = [[[x.real, x.imag] for x in row] for row in self.matrix]
        return data

    def build(self, d: int) -> VertexCoupling:
        if self.kind == 'delta':
            return delta_matrix(d, self.alpha)
        if self.kind == 'preferred_orientation':
            return preferred_orientation_matrix(d)
        if self.kind == 'dirichlet':
            return dirichlet_coupling(d)
        if self.kind == 'neumann':
            return neumann_coupling(d)
        if self.kind == 'robin':
            factor = (1 - 1j * self.c) / (1 + 1j * self.c)
            return custom_coupling(factor * np.eye(d))
        if self.matrix.shape != (d, d):
            raise CouplingError(f'Custom matrix of shape {self.matrix.shape} does not fit degree {d}')
        return custom_coupling(self.matrix)

    def __repr__(self):
        if self.kind == 'delta':
            return f'delta(alpha={self.alpha})'
        if self.kind == 'robin':
            return f'robin(c={self.c})'
        return self.kind


class CouplingAssignment:
    """ A default CouplingSpec plus per-vertex overrides keyed by vertex id """

    def __init__(self, default: CouplingSpec, overrides: Optional[Dict[int, CouplingSpec]] = None):
        self.default = default
        self.overrides = dict(overrides or {})

    @classmethod
    def from_dict(cls, data: dict) -> 'CouplingAssignment':
        if not isinstance(data, dict):
            raise CouplingError('Coupling document must be a mapping')
        if 'default' not in data:
            return cls(CouplingSpec.from_dict(data))
        overrides = {}
        for vid, entry in (data.get('vertices') or {}).items():
            try:
                overrides[int(vid)] = CouplingSpec.from_dict(entry)
            except ValueError:
                raise CouplingError(f'Vertex override key {vid!r} is not an integer id')
        return cls(CouplingSpec.from_dict(data['default']), overrides)

    def to_dict(self) -> dict:
        data = {'default': self.default.to_dict()}
        if self.overrides:
            data['vertices'] = {str(vid): spec.to_dict() for vid, spec in sorted(self.overrides.items())}
        return data

    def couplings_for(self, graph) -> Dict[int, VertexCoupling]:
        unknown = set(self.overrides) - {v.id for v in graph.vertices}
        if unknown:
            raise CouplingError(f'Coupling overrides for unknown vertices: {sorted(unknown)}')
        return {v.id: self.overrides.get(v.id, self.default).build(v.degree) for v in graph.vertices}

    def __repr__(self):
        if not self.overrides:
            return repr(self.default)
        return f'{self.default!r} + {len(self.overrides)} overrides'


def load_coupling_file(filename: str) -> CouplingAssignment:
    logger.debug(f'Loading coupling assignment from {filename}')
    try:
        with open(filename, 'r') as coupling_file:
            data = json.load(coupling_file)
    except (OSError, json.JSONDecodeError) as e:
        raise CouplingError(f'Unable to read coupling file {filename}: {e}')
    return CouplingAssignment.from_dict(data)
