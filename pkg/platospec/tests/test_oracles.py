import math
import pytest
import numpy as np

from platospec.coupling import BoundaryCondition, BoundaryKind, CouplingAssignment, CouplingSpec
from platospec.oracles import (ComponentSystem, OracleId, OracleKind, closed_form, closed_form_factors,
                               closed_form_spectrum, component_system, factor_roots, fixed_vertex_condition, is_exact,
                               oracle_union_spectrum, sector_quotient)
from platospec.platonic import Solid, build_platonic, rotation_symmetry
from platospec.rootfind import RootFindOpts, eigenfunction_coefficients, scan_spectrum
from platospec.secular import SecularError, SecularSystem

# the 2 pi n families sit exactly on the upper edge
K_MAX = 4 * math.pi

PAIRS = [(solid, OracleKind.DELTA, alpha) for solid in Solid for alpha in (0.0, 1.0, -1.0)] \
    + [(solid, OracleKind.PO, 0.0) for solid in Solid]


def pair_id(pair):
    solid, kind, alpha = pair
    return f'{solid.value}-{kind.value}-{alpha}' if kind is OracleKind.DELTA else f'{solid.value}-po'


def full_system(solid, kind, alpha):
    spec = CouplingSpec('delta', alpha=alpha) if kind is OracleKind.DELTA else CouplingSpec('preferred_orientation')
    return SecularSystem(build_platonic(solid), CouplingAssignment(spec))


class TestClosedForms:

    def test_tetrahedron_po(self):
        assert abs(closed_form(OracleId(Solid.TETRAHEDRON, OracleKind.PO, 0), 2 * math.pi)) < 1e-12

    def test_tetrahedron_delta(self):
        oracle = OracleId(Solid.TETRAHEDRON, OracleKind.DELTA, 1, 0.0)
        assert abs(closed_form(oracle, math.acos(-1 / 3))) < 1e-12
        assert abs(closed_form(oracle, 1.5)) > 1e-3

    def test_octahedron_po(self):
        assert abs(closed_form(OracleId(Solid.OCTAHEDRON, OracleKind.PO, 0), 2 * math.pi / 3)) < 1e-12

    def test_alpha_override(self):
        oracle = OracleId(Solid.CUBE, OracleKind.DELTA, 2, 0.0)
        assert closed_form(oracle, 2.0, alpha=1.0) != closed_form(oracle, 2.0)
        po = OracleId(Solid.CUBE, OracleKind.PO, 2)
        assert closed_form(po, 2.0, alpha=1.0) == closed_form(po, 2.0)

    def test_vectorized(self):
        ks = np.linspace(0.5, 3.0, 7)
        values = closed_form(OracleId(Solid.OCTAHEDRON, OracleKind.PO, 1), ks)
        assert values.shape == (7,)
        assert values[3] == pytest.approx(closed_form(OracleId(Solid.OCTAHEDRON, OracleKind.PO, 1), ks[3]))

    def test_invalid(self):
        with pytest.raises(SecularError):
            closed_form_factors(OracleId(Solid.TETRAHEDRON, OracleKind.PO, 3))
        with pytest.raises(SecularError):
            OracleKind.parse('magnetic')
        with pytest.raises(SecularError):
            sector_quotient(Solid.CUBE, 0)

    def test_exactness(self):
        assert is_exact(Solid.OCTAHEDRON, OracleKind.PO)
        assert is_exact(Solid.DODECAHEDRON, OracleKind.DELTA)
        assert not is_exact(Solid.ICOSAHEDRON, OracleKind.PO)

    def test_sector_spectrum(self):
        spectrum = closed_form_spectrum(OracleId(Solid.TETRAHEDRON, OracleKind.PO, 0), 1.0, 10.0)
        assert spectrum.find(2 * math.pi, 1e-8).multiplicity == 2
        assert spectrum.stats['sector'] == 0
        assert all(ev.provenance == 'closed_form:0' for ev in spectrum)

    @pytest.mark.parametrize('solid', [Solid.DODECAHEDRON, Solid.ICOSAHEDRON], ids=lambda s: s.value)
    def test_large_k_forms_refused(self, solid):
        with pytest.raises(SecularError):
            closed_form_spectrum(OracleId(solid, OracleKind.PO, 1), 1.0, 5.0)
        with pytest.raises(SecularError):
            oracle_union_spectrum(solid, 'po', k_max=5.0, method='closed_form')
        assert oracle_union_spectrum(solid, 'delta', k_max=1.0, method='closed_form').stats['method'] == 'closed_form'

    def test_factor_roots_order(self):
        opts = RootFindOpts()
        simple = factor_roots(np.sin, 1.0, 7.0, opts)
        assert [r.order for r in simple] == [1, 1]
        assert np.allclose([r.k for r in simple], [math.pi, 2 * math.pi], atol=1e-10)
        double = factor_roots(lambda k: 1 - np.cos(k), 1.0, 7.0, opts)
        assert [r.order for r in double] == [2]

    def test_sector_quotient_spectrum(self):
        adjacency = build_platonic(Solid.DODECAHEDRON).adjacency_matrix()
        full = np.sort(np.linalg.eigvalsh(adjacency))
        sectors = np.sort(np.concatenate([np.linalg.eigvalsh(sector_quotient(Solid.DODECAHEDRON, j))
                                          for j in range(5)]))
        assert np.allclose(full, sectors, atol=1e-9)


class TestUnion:

    def test_tetrahedron_kirchhoff(self):
        spectrum = oracle_union_spectrum(Solid.TETRAHEDRON, 'delta', 0.0, 10.0)
        k0 = math.acos(-1 / 3)
        for k in (math.pi, 2 * math.pi, 3 * math.pi, k0, 2 * math.pi - k0, 2 * math.pi + k0):
            assert spectrum.find(k, 1e-8) is not None
        assert spectrum.find(k0, 1e-8).multiplicity == 3

    def test_octahedron_po(self):
        spectrum = oracle_union_spectrum(Solid.OCTAHEDRON, OracleKind.PO, k_max=7.0)
        for k, multiplicity in ((2 * math.pi / 3, 2), (4 * math.pi / 3, 2), (2 * math.pi, 8)):
            assert spectrum.find(k, 1e-8).multiplicity == multiplicity

    @pytest.mark.parametrize('solid, expected', [
        (Solid.CUBE, (1.23096, 1.91063)),
        (Solid.DODECAHEDRON, (0.730, 1.231, 2.301, 2.412)),
        (Solid.ICOSAHEDRON, (1.107, 1.772, 2.034)),
    ])
    def test_kirchhoff_values(self, solid, expected):
        spectrum = oracle_union_spectrum(solid, 'kirchhoff', 0.0, 3.0)
        for k in expected:
            assert spectrum.find(k, 1e-3) is not None

    def test_empty_window(self):
        assert len(oracle_union_spectrum(Solid.CUBE, 'po', k_max=0.01)) == 0
        with pytest.raises(SecularError):
            oracle_union_spectrum(Solid.CUBE, 'po', k_max=0.0)
        with pytest.raises(SecularError):
            oracle_union_spectrum(Solid.CUBE, 'po', k_max=5.0, method='symbolic')

    def test_component_matches_closed_form(self, executor):
        opts = RootFindOpts()
        closed = oracle_union_spectrum(Solid.TETRAHEDRON, 'po', k_max=10.0, method='closed_form', opts=opts)
        component = oracle_union_spectrum(Solid.TETRAHEDRON, 'po', k_max=10.0, method='component',
                                          opts=opts, executor=executor)
        assert closed.multiplicities == component.multiplicities
        assert np.allclose(closed.ks, component.ks, atol=1e-8)


class TestComponentSystem:

    def test_dimensions(self):
        assert component_system(Solid.TETRAHEDRON, CouplingSpec('preferred_orientation'), 1).dimension == 4
        assert component_system(Solid.ICOSAHEDRON, CouplingSpec('delta', alpha=1.0), 2).dimension == 12

    def test_fixed_vertex_delta(self):
        spec = CouplingSpec('delta', alpha=1.5)
        sector0 = component_system(Solid.TETRAHEDRON, spec, 0)
        assert list(sector0.fixed_conditions) == [0]
        condition = sector0.fixed_conditions[0]
        assert condition.kind is BoundaryKind.ROBIN
        assert abs(condition.c - 0.5) < 1e-10
        assert component_system(Solid.TETRAHEDRON, spec, 1).fixed_conditions[0] == BoundaryCondition.dirichlet()

    def test_fixed_vertex_po(self):
        spec = CouplingSpec('preferred_orientation')
        sector0 = component_system(Solid.OCTAHEDRON, spec, 0)
        assert sorted(sector0.fixed_conditions) == [4, 5]
        assert all(bc == BoundaryCondition.neumann() for bc in sector0.fixed_conditions.values())
        sector2 = component_system(Solid.OCTAHEDRON, spec, 2)
        assert all(bc == BoundaryCondition.dirichlet() for bc in sector2.fixed_conditions.values())

    def test_no_fixed_vertex(self):
        system = component_system(Solid.CUBE, CouplingSpec('preferred_orientation'), 1)
        assert system.fixed_conditions == {}
        assert system.dimension == 6

    def test_branch_range(self):
        system = full_system(Solid.CUBE, OracleKind.PO, 0.0)
        with pytest.raises(SecularError):
            ComponentSystem(system, rotation_symmetry(Solid.CUBE), 4)

    def test_symmetry_broken(self):
        graph = build_platonic(Solid.CUBE)
        assignment = CouplingAssignment(CouplingSpec('preferred_orientation'), {0: CouplingSpec('delta')})
        with pytest.raises(SecularError):
            ComponentSystem(SecularSystem(graph, assignment), rotation_symmetry(Solid.CUBE), 0)

    @pytest.mark.parametrize('solid, k, counts', [
        (Solid.CUBE, math.pi, [1, 1, 3, 1]),
        (Solid.TETRAHEDRON, 2 * math.pi, [2, 1, 1]),
    ])
    def test_nullity_with_shared_orbit(self, solid, k, counts):
        # rows mixing both ends of one edge orbit vanish at k = n pi
        spec = CouplingSpec('preferred_orientation')
        found = [component_system(solid, spec, j).sigma_min(k).count for j in range(solid.sector_count)]
        assert found == counts
        assert sum(found) == full_system(solid, OracleKind.PO, 0.0).sigma_min(k).count


class TestFixedVertexCondition:

    def test_delta(self):
        bc = fixed_vertex_condition('delta', 3, 0, alpha=1.5)
        assert bc.kind is BoundaryKind.ROBIN
        assert abs(bc.c - 0.5) < 1e-12
        assert fixed_vertex_condition('delta', 3, 0) == BoundaryCondition.neumann()
        assert fixed_vertex_condition('delta', 5, 2, alpha=1.0) == BoundaryCondition.dirichlet()

    def test_po(self):
        assert fixed_vertex_condition('po', 4, 0) == BoundaryCondition.neumann()
        assert fixed_vertex_condition('po', 4, 2) == BoundaryCondition.dirichlet()
        assert abs(fixed_vertex_condition('po', 3, 1).c + math.sqrt(3)) < 1e-12
        assert abs(fixed_vertex_condition('po', 3, 2).c - math.sqrt(3)) < 1e-12
        assert abs(fixed_vertex_condition('po', 4, 1).c + 1) < 1e-12
        assert abs(fixed_vertex_condition('po', 4, 3).c - 1) < 1e-12


class TestEquivalence:

    @pytest.mark.parametrize('pair', PAIRS, ids=pair_id)
    def test_full_graph_matches_sectors(self, pair, executor):
        solid, kind, alpha = pair
        opts = RootFindOpts()
        system = full_system(solid, kind, alpha)
        full = scan_spectrum(system, opts.k_min, K_MAX, opts, executor)
        union = oracle_union_spectrum(solid, kind, alpha, K_MAX, opts=opts, executor=executor)

        assert full.total_multiplicity() == union.total_multiplicity()
        assert full.multiplicities == union.multiplicities
        assert np.allclose(full.ks, union.ks, rtol=0, atol=1e-8)
        assert not full.unconverged

        for ev in full:
            assert eigenfunction_coefficients(system, ev).shape[0] == ev.multiplicity

    @pytest.mark.parametrize('pair', PAIRS, ids=pair_id)
    def test_full_graph_matches_components(self, pair, executor):
        solid, kind, alpha = pair
        opts = RootFindOpts()
        full = scan_spectrum(full_system(solid, kind, alpha), opts.k_min, K_MAX, opts, executor)
        union = oracle_union_spectrum(solid, kind, alpha, K_MAX, method='component', opts=opts, executor=executor)

        assert full.multiplicities == union.multiplicities
        assert np.allclose(full.ks, union.ks, rtol=0, atol=1e-8)
        assert not union.unconverged
