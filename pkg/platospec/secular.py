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
from typing import Dict, NamedTuple, Union

import numpy as np

from platospec.constants import MULT_TOL_SCALE
from platospec.graph import End, MetricGraph, validate
from platospec.coupling import CouplingAssignment, VertexCoupling, coupling_rows

logger = logging.getLogger(__name__)


class SecularError(Exception):
    pass


class SigmaMin(NamedTuple):
    sigma: float
    count: int


def _check_k(k):
    k = np.asarray(k, dtype=float)
    if not np.all(k > 0):
        raise SecularError(f'Secular matrix needs k > 0, got {k.min()}')
    return k


def row_normalize(matrix: np.ndarray) -> np.ndarray:
    """ Scales every row (of every matrix in a stack) to unit max-norm """
    scale = np.abs(matrix).max(axis=-1, keepdims=True)
    return matrix / np.where(scale > 0, scale, 1.0)


class LinearTrigMatrix:
    """
    Matrix-valued function M(k) = P0 + cos k Pc + sin k Ps + k (Q0 + sin k Qs - cos k Qc).

    Both the full secular matrix and its symmetry-reduced variants have this
    shape; evaluation broadcasts over an array of k values.

    Rows are scaled either to unit max-norm ('max') or by their envelope
    ('envelope'), the bound max_col (|P0| + |Pc| + |Ps| + k (|Q0| + |Qs| + |Qc|)).
    The envelope is continuous in k, so a row that vanishes identically at
    some k stays small around it instead of being blown back up to norm one.
    Reduced systems have such rows wherever two ends of a vertex land on the
    same edge unknowns.
    """

    SCALINGS = ('max', 'envelope')

    def __init__(self, p0, pc, ps, q0, qs, qc, scaling='max'):
        if scaling not in self.SCALINGS:
            raise SecularError(f"Unknown row scaling '{scaling}'")
        self.terms = tuple(np.asarray(t, dtype=complex) for t in (p0, pc, ps, q0, qs, qc))
        self.scaling = scaling
        a0, ac, as_, b0, bs, bc = (np.abs(t) for t in self.terms)
        self._bound_const = a0 + ac + as_
        self._bound_slope = b0 + bs + bc

    @property
    def shape(self):
        return self.terms[0].shape

    def __call__(self, k):
        k = _check_k(k)
        p0, pc, ps, q0, qs, qc = self.terms
        kk = k[..., None, None]
        cos, sin = np.cos(kk), np.sin(kk)
        return p0 + cos * pc + sin * ps + kk * (q0 + sin * qs - cos * qc)

    def envelope(self, k):
        """ Per-row envelope at k, shape (..., rows, 1) """
        kk = _check_k(k)[..., None, None]
        return (self._bound_const + kk * self._bound_slope).max(axis=-1, keepdims=True)

    def normalized(self, k):
        if self.scaling == 'max':
            return row_normalize(self(k))
        scale = self.envelope(k)
        return self(k) / np.where(scale > 0, scale, 1.0)

    def singular_values(self, k):
        """ Singular values of the row-scaled matrix, descending, batched over k """
        return np.linalg.svd(self.normalized(k), compute_uv=False)


def end_blocks(ends, columns, dimension):
    """
    Value and outgoing-derivative coefficient matrices for a list of ends.

    `ends[r]` is an EdgeEnd and `columns[r]` a (column, weight) pair: the end's
    (a, b) unknowns live in columns (column, column + 1) and enter scaled by
    `weight`. With f(x) = a cos kx + b sin kx the value is a at a Zero end and
    a cos k + b sin k at a One end; the outgoing derivative is k b at a Zero
    end and k (a sin k - b cos k) at a One end.
    """
    rows = len(ends)
    v0, vc, vs, d0, ds, dc = (np.zeros((rows, dimension), dtype=complex) for _ in range(6))
    for r, (end, (col, weight)) in enumerate(zip(ends, columns)):
        if end.end is End.ZERO:
            v0[r, col] += weight
            d0[r, col + 1] += weight
        else:
            vc[r, col] += weight
            vs[r, col + 1] += weight
            ds[r, col] += weight
            dc[r, col + 1] += weight
    return v0, vc, vs, d0, ds, dc


def trig_matrix(a_rows, b_rows, blocks, scaling='max') -> LinearTrigMatrix:
    v0, vc, vs, d0, ds, dc = blocks
    return LinearTrigMatrix(a_rows @ v0, a_rows @ vc, a_rows @ vs,
                            b_rows @ d0, b_rows @ ds, b_rows @ dc, scaling=scaling)


def block_diag(blocks):
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = np.zeros((rows, cols), dtype=complex)
    r = c = 0
    for b in blocks:
        out[r:r + b.shape[0], c:c + b.shape[1]] = b
        r += b.shape[0]
        c += b.shape[1]
    return out


class TrigSystem:
    """
    Zero detector over a LinearTrigMatrix. Subclasses set `matrix`,
    `dimension` and `mult_tol`.
    """
    matrix: LinearTrigMatrix
    dimension: int
    mult_tol: float

    def assemble(self, k):
        """ M(k), or a stack of them for an array of k """
        return self.matrix(k)

    def normalized(self, k):
        return self.matrix.normalized(k)

    def singular_values(self, k):
        return self.matrix.singular_values(k)

    def sigma_min(self, k) -> SigmaMin:
        sv = self.singular_values(float(k))
        return SigmaMin(float(sv[-1]), int(np.count_nonzero(sv < self.mult_tol)))

    def determinant(self, k) -> complex:
        """ Determinant of the row-scaled M(k); raw det M(k) overflows at large k """
        return complex(np.linalg.det(self.normalized(float(k))))


class SecularSystem(TrigSystem):
    """
    A metric graph together with a coupling per vertex.

    The unknowns are (a_1, b_1, ..., a_N, b_N), f_e(x) = a_e cos kx + b_e sin kx
    on edge e. Vertex v contributes d_v rows (U_v - I) Psi_v + i (U_v + I) Psi_v'.

    :param graph: a MetricGraph passing validate()
    :param couplings: VertexCoupling per vertex id, or a CouplingAssignment
    """

    def __init__(self, graph: MetricGraph,
                 couplings: Union[Dict[int, VertexCoupling], CouplingAssignment],
                 mult_tol: float = None):
        report = validate(graph)
        if not report.ok:
            raise SecularError(f'Invalid graph: {"; ".join(report.issues)}')
        if isinstance(couplings, CouplingAssignment):
            couplings = couplings.couplings_for(graph)

        self.graph = graph
        self.couplings = {}
        for v in graph.vertices:
            try:
                coupling = couplings[v.id]
            except KeyError:
                raise SecularError(f'No coupling given for vertex {v.id}')
            if coupling.degree != v.degree:
                raise SecularError(f'Coupling of dimension {coupling.degree} at vertex {v.id} '
                                   f'of degree {v.degree}')
            self.couplings[v.id] = coupling

        self.dimension = graph.dimension
        self.mult_tol = mult_tol if mult_tol is not None else MULT_TOL_SCALE * math.sqrt(self.dimension)

        ends = [e for v in graph.vertices for e in v.ends]
        columns = [(2 * e.edge, 1.0) for e in ends]
        a_blocks, b_blocks = zip(*(coupling_rows(self.couplings[v.id]) for v in graph.vertices))
        self.matrix = trig_matrix(block_diag(a_blocks), block_diag(b_blocks),
                                  end_blocks(ends, columns, self.dimension))

    def __repr__(self):
        kinds = sorted({c.kind.value for c in self.couplings.values()})
        return f'SecularSystem({self.graph!r}, couplings={kinds})'


def assemble(system: SecularSystem, k):
    return system.assemble(k)


def sigma_min(system: SecularSystem, k: float) -> SigmaMin:
    return system.sigma_min(k)


def determinant(system: SecularSystem, k: float) -> complex:
    return system.determinant(k)
