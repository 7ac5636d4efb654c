import json
import itertools
import pytest
import numpy as np

from platospec.coupling import (BoundaryCondition, BoundaryKind, CouplingAssignment, CouplingError,
                                CouplingKind, CouplingSpec, boundary_rows, boundary_to_coupling,
                                coupling_rows, custom_coupling, delta_matrix, dirichlet_coupling,
                                load_coupling_file, neumann_coupling, preferred_orientation_matrix,
                                rank_condition, unitarity_defect)
from platospec.platonic import Solid, build_platonic


def permutation_matrix(perm):
    return np.eye(len(perm))[list(perm)]


class TestDelta:

    def test_kirchhoff(self):
        u = delta_matrix(3, 0.0).matrix
        assert np.allclose(u, 2 / 3 * np.ones((3, 3)) - np.eye(3))
        assert np.allclose(u.imag, 0)
        assert np.allclose(u, u.T)

    def test_degree_one(self):
        assert np.allclose(delta_matrix(1, 0.0).matrix, [[1]])

    def test_unitary(self):
        coupling = delta_matrix(4, 1.0)
        assert np.allclose(coupling.matrix, 2 / (4 + 1j) * np.ones((4, 4)) - np.eye(4))
        assert unitarity_defect(coupling.matrix) <= 1e-12
        assert coupling.kind is CouplingKind.DELTA
        assert coupling.alpha == 1.0

    def test_bad_degree(self):
        with pytest.raises(CouplingError):
            delta_matrix(0, 1.0)

    def test_permutation_invariant(self):
        u = delta_matrix(4, 2.5).matrix
        for perm in itertools.permutations(range(4)):
            p = permutation_matrix(perm)
            assert np.allclose(p @ u @ p.T, u)

    def test_rows(self):
        a, b = coupling_rows(delta_matrix(2, 0.0))
        assert np.allclose(a, [[-1, 1], [1, -1]])
        assert np.allclose(b, 1j * np.ones((2, 2)))


class TestPreferredOrientation:

    def test_cyclic_shift(self):
        u = preferred_orientation_matrix(3).matrix
        assert np.allclose(u, [[0, 1, 0], [0, 0, 1], [1, 0, 0]])

    @pytest.mark.parametrize('d', [2, 3, 4, 5])
    def test_order(self, d):
        u = preferred_orientation_matrix(d).matrix
        assert np.allclose(np.linalg.matrix_power(u, d), np.eye(d))

    def test_spectrum(self):
        eigenvalues = np.linalg.eigvals(preferred_orientation_matrix(4).matrix)
        for expected in (1, 1j, -1, -1j):
            assert np.abs(eigenvalues - expected).min() < 1e-12

    def test_bad_degree(self):
        with pytest.raises(CouplingError):
            preferred_orientation_matrix(1)

    def test_rows(self):
        a, b = coupling_rows(preferred_orientation_matrix(3))
        assert np.allclose(a, [[-1, 1, 0], [0, -1, 1], [1, 0, -1]])
        assert np.allclose(b, 1j * np.array([[1, 1, 0], [0, 1, 1], [1, 0, 1]]))

    def test_only_cyclic_symmetry(self):
        u = preferred_orientation_matrix(4).matrix
        cyclic = permutation_matrix([1, 2, 3, 0])
        assert np.allclose(cyclic @ u @ cyclic.T, u)
        transposition = permutation_matrix([1, 0, 2, 3])
        assert not np.allclose(transposition @ u @ transposition.T, u)


class TestCustom:

    def test_dirichlet_rows(self):
        a, b = coupling_rows(custom_coupling(-np.eye(2)))
        assert np.allclose(a, -2 * np.eye(2))
        assert np.allclose(b, 0)

    def test_not_unitary(self):
        with pytest.raises(CouplingError):
            custom_coupling([[1, 0.1], [0, 1]])
        with pytest.raises(CouplingError):
            custom_coupling([[1, 0, 0]])

    def test_read_only(self):
        coupling = neumann_coupling(2)
        with pytest.raises(ValueError):
            coupling.matrix[0, 0] = 2

    @pytest.mark.parametrize('coupling', [delta_matrix(3, 0.0), delta_matrix(5, -1.0),
                                          preferred_orientation_matrix(4), dirichlet_coupling(1),
                                          neumann_coupling(3)])
    def test_rank(self, coupling):
        assert unitarity_defect(coupling.matrix) <= 1e-12
        assert rank_condition(*coupling_rows(coupling))


class TestBoundary:

    def test_robin_zero_is_neumann(self):
        assert BoundaryCondition.robin(0) == BoundaryCondition.neumann()
        assert BoundaryCondition.robin(0.3).kind is BoundaryKind.ROBIN

    def test_rows(self):
        a, b = boundary_rows(BoundaryCondition.dirichlet())
        assert a[0, 0] == 1 and b[0, 0] == 0
        a, b = boundary_rows(BoundaryCondition.robin(0.5))
        # f' = c f  <=>  -c f + f' = 0
        assert a[0, 0] == -0.5 and b[0, 0] == 1

    def test_equivalent_coupling(self):
        c = 0.5
        a, b = coupling_rows(boundary_to_coupling(BoundaryCondition.robin(c)))
        assert abs(a[0, 0] + b[0, 0] * c) < 1e-12
        assert np.allclose(boundary_to_coupling(BoundaryCondition.dirichlet()).matrix, [[-1]])
        with pytest.raises(CouplingError):
            boundary_to_coupling(BoundaryCondition.robin(1j))


class TestSpec:

    def test_parse(self):
        spec = CouplingSpec.parse('delta:1.5')
        assert spec.kind == 'delta' and spec.alpha == 1.5
        assert CouplingSpec.parse('PO').kind == 'preferred_orientation'
        assert CouplingSpec.parse('kirchhoff').alpha == 0.0
        assert CouplingSpec.parse('robin:0.3').c == 0.3

    def test_parse_errors(self):
        with pytest.raises(CouplingError):
            CouplingSpec.parse('magnetic')
        with pytest.raises(CouplingError):
            CouplingSpec.parse('delta:strong')
        with pytest.raises(CouplingError):
            CouplingSpec('custom')

    def test_build(self):
        assert CouplingSpec.parse('delta:2').build(3).alpha == 2.0
        assert CouplingSpec.parse('po').build(5).kind is CouplingKind.PREFERRED_ORIENTATION
        with pytest.raises(CouplingError):
            CouplingSpec('custom', matrix=np.eye(2)).build(3)

    def test_assignment(self):
        graph = build_platonic(Solid.TETRAHEDRON)
        assignment = CouplingAssignment.from_dict({'default': {'kind': 'delta', 'alpha': 1.0},
                                                   'vertices': {'2': {'kind': 'preferred_orientation'}}})
        couplings = assignment.couplings_for(graph)
        assert couplings[0].kind is CouplingKind.DELTA
        assert couplings[2].kind is CouplingKind.PREFERRED_ORIENTATION
        assert CouplingAssignment.from_dict(assignment.to_dict()).to_dict() == assignment.to_dict()

        with pytest.raises(CouplingError):
            CouplingAssignment(CouplingSpec('po'), {7: CouplingSpec('po')}).couplings_for(graph)

    def test_file(self, tmp_path):
        path = tmp_path / 'coupling.json'
        path.write_text(json.dumps({'kind': 'preferred_orientation'}))
        assert load_coupling_file(str(path)).default.kind == 'preferred_orientation'

        path.write_text(json.dumps({'default': {'alpha': 1.0}}))
        with pytest.raises(CouplingError):
            load_coupling_file(str(path))
