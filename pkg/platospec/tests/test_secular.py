import math
import pytest
import numpy as np

from platospec.coupling import (CouplingAssignment, CouplingSpec, custom_coupling, delta_matrix,
                                preferred_orientation_matrix)
from platospec.graph import flip_edge, graph_from_edges, reorder_vertex, rotate_vertex_order
from platospec.platonic import Solid, build_platonic
from platospec.rootfind import RootFindOpts, scan_spectrum
from platospec.secular import (LinearTrigMatrix, SecularError, SecularSystem, assemble, determinant,
                               row_normalize, sigma_min)


def single_edge(kind):
    return SecularSystem(graph_from_edges([(0, 1)]), CouplingAssignment(CouplingSpec(kind)))


def platonic_system(solid, coupling='po', graph=None):
    graph = graph or build_platonic(solid)
    return SecularSystem(graph, CouplingAssignment(CouplingSpec.parse(coupling)))


def same_spectrum(first, second, tol=1e-8):
    if first.multiplicities != second.multiplicities:
        return False
    return bool(np.all(np.abs(first.ks - second.ks) <= tol))


class TestAssemble:

    def test_shape(self):
        system = platonic_system(Solid.CUBE)
        assert assemble(system, 1.3).shape == (24, 24)
        assert assemble(system, np.array([1.0, 2.0, 3.0])).shape == (3, 24, 24)

    def test_non_positive_k(self):
        system = single_edge('dirichlet')
        with pytest.raises(SecularError):
            assemble(system, 0.0)
        with pytest.raises(SecularError):
            sigma_min(system, -1.0)

    def test_dirichlet_edge(self):
        system = single_edge('dirichlet')
        for n in (1, 2, 3):
            assert sigma_min(system, n * math.pi).sigma <= 1e-12
        assert sigma_min(system, 1.5).sigma > 0.1
        assert abs(determinant(system, math.pi)) < 1e-12
        assert abs(abs(determinant(system, math.pi / 2)) - 1) < 1e-12

    def test_neumann_edge(self):
        system = single_edge('neumann')
        assert sigma_min(system, 2 * math.pi).sigma <= 1e-12
        assert sigma_min(system, 4.0).sigma > 0.1

    def test_row_normalize(self):
        matrix = np.array([[2, -4j], [0, 0]])
        normalized = row_normalize(matrix)
        assert np.allclose(np.abs(normalized).max(axis=1), [1, 0])

    def test_envelope_scaling(self):
        # first row is (1 + cos k, -sin k), which vanishes at k = pi
        terms = dict(p0=[[1, 0], [1, 0]], pc=[[1, 0], [0, 0]], ps=[[0, -1], [0, 0]],
                     q0=np.zeros((2, 2)), qs=np.zeros((2, 2)), qc=np.zeros((2, 2)))
        k = math.pi - 1e-4
        by_max = np.abs(LinearTrigMatrix(**terms).normalized(k)).max(axis=1)
        by_envelope = np.abs(LinearTrigMatrix(**terms, scaling='envelope').normalized(k)).max(axis=1)
        assert by_max[0] == pytest.approx(1.0)
        assert by_envelope[0] < 1e-4
        assert by_envelope[1] == pytest.approx(1.0)
        assert LinearTrigMatrix(**terms).envelope(k)[:, 0] == pytest.approx([2.0, 1.0])
        with pytest.raises(SecularError):
            LinearTrigMatrix(**terms, scaling='frobenius')

    def test_coupling_dimension_mismatch(self):
        graph = graph_from_edges([(0, 1)])
        with pytest.raises(SecularError):
            SecularSystem(graph, {0: delta_matrix(2, 0.0), 1: delta_matrix(1, 0.0)})
        with pytest.raises(SecularError):
            SecularSystem(graph, {0: delta_matrix(1, 0.0)})

    def test_invalid_graph(self):
        with pytest.raises(SecularError):
            SecularSystem(graph_from_edges([(0, 1), (2, 3)]), CouplingAssignment(CouplingSpec('neumann')))


class TestSigmaMin:

    def test_tetrahedron_po(self):
        result = sigma_min(platonic_system(Solid.TETRAHEDRON), 2 * math.pi)
        assert result.sigma <= 1e-8
        assert result.count >= 1

    def test_octahedron_po(self):
        system = platonic_system(Solid.OCTAHEDRON)
        assert sigma_min(system, 2 * math.pi).count == 8
        assert sigma_min(system, 2 * math.pi / 3).count == 2
        assert sigma_min(system, 4 * math.pi / 3).count == 2

    def test_mult_tol(self):
        system = platonic_system(Solid.DODECAHEDRON)
        assert system.dimension == 60
        assert system.mult_tol == pytest.approx(1e-6 * math.sqrt(60))

    def test_determinant_same_zeros(self):
        system = platonic_system(Solid.TETRAHEDRON, 'delta')
        k0 = math.acos(-1 / 3)
        assert sigma_min(system, k0).sigma < 1e-10
        assert abs(determinant(system, k0)) < 1e-8 * abs(determinant(system, k0 + 0.3))
        assert sigma_min(system, k0 + 0.3).sigma > 1e-6


class TestInvariance:

    def test_edge_flip(self, executor):
        graph = build_platonic(Solid.TETRAHEDRON)
        original = scan_spectrum(platonic_system(Solid.TETRAHEDRON), 0.05, 20.0, executor=executor)
        for edge in (0, 4):
            flipped = scan_spectrum(platonic_system(Solid.TETRAHEDRON, graph=flip_edge(graph, edge)),
                                    0.05, 20.0, executor=executor)
            assert same_spectrum(original, flipped)

    def test_cyclic_rotation(self, executor):
        graph = build_platonic(Solid.TETRAHEDRON)
        original = scan_spectrum(platonic_system(Solid.TETRAHEDRON), 0.05, 12.0, executor=executor)
        rotated = scan_spectrum(platonic_system(Solid.TETRAHEDRON, graph=rotate_vertex_order(graph, 0, 1)),
                                0.05, 12.0, executor=executor)
        assert same_spectrum(original, rotated)

    def test_transposition_changes_spectrum(self, executor):
        graph = build_platonic(Solid.OCTAHEDRON)
        original = scan_spectrum(platonic_system(Solid.OCTAHEDRON), 0.05, 7.0, executor=executor)
        swapped = scan_spectrum(platonic_system(Solid.OCTAHEDRON, graph=reorder_vertex(graph, 0, [1, 0, 2, 3])),
                                0.05, 7.0, executor=executor)
        assert not same_spectrum(original, swapped)

    def test_delta_conjugate(self, executor):
        # conj(U) of delta(alpha) is delta(-alpha), not a time reversal
        graph = build_platonic(Solid.TETRAHEDRON)
        conjugate = {v.id: custom_coupling(delta_matrix(v.degree, 1.0).matrix.conj()) for v in graph.vertices}
        first = scan_spectrum(platonic_system(Solid.TETRAHEDRON, 'delta:-1'), 0.05, 10.0, executor=executor)
        second = scan_spectrum(SecularSystem(graph, conjugate), 0.05, 10.0, executor=executor)
        assert same_spectrum(first, second, tol=1e-10)

    def test_po_transpose(self, executor):
        # U^T is the time-reversed coupling: reversed cyclic order at every vertex
        graph = build_platonic(Solid.CUBE)
        couplings = {v.id: preferred_orientation_matrix(v.degree) for v in graph.vertices}
        transposed = {vid: custom_coupling(c.matrix.T) for vid, c in couplings.items()}
        first = scan_spectrum(SecularSystem(graph, couplings), 0.05, 10.0, executor=executor)
        second = scan_spectrum(SecularSystem(graph, transposed), 0.05, 10.0, executor=executor)
        assert same_spectrum(first, second)

    @pytest.mark.parametrize('solid', list(Solid), ids=lambda s: s.value)
    @pytest.mark.parametrize('coupling', ['delta', 'po'])
    def test_scan_step_halving(self, solid, coupling, executor):
        system = platonic_system(solid, coupling)
        k_min = RootFindOpts().k_min
        coarse = scan_spectrum(system, k_min, 4 * math.pi, RootFindOpts(), executor)
        fine = scan_spectrum(system, k_min, 4 * math.pi, RootFindOpts(scan_step=0.0025), executor)
        assert same_spectrum(coarse, fine)
        assert coarse.find(4 * math.pi, 1e-8) is not None
