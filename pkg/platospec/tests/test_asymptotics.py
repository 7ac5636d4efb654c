import math
import pytest

from platospec.asymptotics import (AsymptoticReport, AsymptoticsError, CenterFamily, ClusterTarget, Envelope,
                                   EnvelopeKind, approach_profile, check_theorem, envelope_profile,
                                   fixed_point_targets, fujiwara_bound, is_non_increasing, kirchhoff_drift,
                                   kirchhoff_limits, octahedron_exact_residuals)
from platospec.oracles import oracle_union_spectrum
from platospec.platonic import Solid

DRIFT_WINDOWS = [(10.0, 10.0 + 4 * math.pi), (40.0, 40.0 + 4 * math.pi)]


class TestFujiwara:

    def test_dodecahedron(self):
        initial, refined, root = fujiwara_bound(20, 286, 736)
        assert initial == 40
        assert refined <= initial
        assert root == pytest.approx(5.51, abs=0.01)

    def test_icosahedron(self):
        initial, _, root = fujiwara_bound(104, 1544, 2424)
        assert initial == 208
        assert root == pytest.approx(10.84, abs=0.01)

    def test_fixed_point(self):
        _, y, _ = fujiwara_bound(20, 286, 736)
        assert y ** 3 == pytest.approx(20 * y ** 2 + 286 * y + 736, rel=1e-9)


class TestClusterTarget:

    def test_lattice(self):
        target = ClusterTarget.lattice(CenterFamily.N_PI)
        assert target.points(1.0, 10.0) == pytest.approx([math.pi, 2 * math.pi, 3 * math.pi])
        assert target.distance(3.0) == pytest.approx(math.pi - 3.0)
        assert target.label == 'n_pi'

    def test_symmetric(self):
        target = ClusterTarget.fixed(1.0, 2 * math.pi)
        assert target.symmetric
        assert target.distance(2 * math.pi - 1.0) < 1e-12
        assert target.points(0.0, 7.0) == pytest.approx([1.0, 2 * math.pi - 1.0])
        assert target.points(0.0, 7.5) == pytest.approx([1.0, 2 * math.pi - 1.0, 2 * math.pi + 1.0])

    def test_half_period_not_symmetric(self):
        assert not ClusterTarget.fixed(math.pi, 2 * math.pi).symmetric
        assert not ClusterTarget.fixed(0.0, math.pi).symmetric
        with pytest.raises(AsymptoticsError):
            ClusterTarget.fixed(1.0, 0.0)

    def test_envelope(self):
        target = ClusterTarget.lattice(CenterFamily.N_PI, Envelope(EnvelopeKind.INVERSE_K, 2.0, 0.5))
        assert target.contains(10 * math.pi + 0.07)
        assert not target.contains(10 * math.pi + 0.1)
        exact = ClusterTarget.lattice(CenterFamily.TWO_N_PI, Envelope(EnvelopeKind.EXACT))
        assert exact.contains(4 * math.pi + 1e-9)
        assert not exact.contains(4 * math.pi + 1e-5)


class TestTheorem:

    @pytest.mark.parametrize('solid', [Solid.TETRAHEDRON, Solid.CUBE])
    def test_cubic_vertices(self, solid, executor):
        report = check_theorem(solid, (30.0, 30.0 + 2 * math.pi), executor=executor)
        assert report.passed
        assert report.targets[0].count > 0
        assert report.targets[0].max_scaled_dist <= report.targets[0].constant + report.targets[0].slack

    @pytest.mark.parametrize('solid, constant', [(Solid.DODECAHEDRON, 5.51), (Solid.ICOSAHEDRON, 10.84)],
                             ids=['dodecahedron', 'icosahedron'])
    def test_large_solids(self, solid, constant, executor):
        report = check_theorem(solid, (80.0, 80.0 + 2 * math.pi), executor=executor)
        assert report.passed
        data = report.to_dict()
        assert data['pass'] is True
        assert data['k_sin_k_bound'] == pytest.approx(constant + 0.5)
        assert 0 < data['max_k_sin_k'] <= data['k_sin_k_bound']

    def test_k_sin_k_gate(self):
        assert AsymptoticReport(Solid.ICOSAHEDRON, (80.0, 86.0), [], k_sin_k=(10.0, 11.34)).passed
        report = AsymptoticReport(Solid.ICOSAHEDRON, (80.0, 86.0), [], k_sin_k=(12.0, 11.34))
        assert not report.passed
        assert report.to_dict()['max_k_sin_k'] == 12.0
        assert 'max_k_sin_k' not in AsymptoticReport(Solid.CUBE, (30.0, 36.0), []).to_dict()

    def test_octahedron_exact_family(self, executor):
        report = check_theorem(Solid.OCTAHEDRON, (6.0, 6.6), executor=executor)
        assert report.passed
        assert report.target('two_n_pi').count == 8
        assert report.target('two_n_pi').max_scaled_dist <= 1e-7

    def test_octahedron_large_k(self, executor):
        report = check_theorem(Solid.OCTAHEDRON, (90.0, 100.0), executor=executor)
        assert report.passed
        assert not report.unassigned
        assert not report.ambiguous
        assert report.target('two_n_pi').count == 8

    def test_window_cap(self):
        with pytest.raises(AsymptoticsError):
            check_theorem(Solid.DODECAHEDRON, (95.0, 105.0))
        with pytest.raises(AsymptoticsError):
            check_theorem(Solid.CUBE, (5.0, 1.0))

    def test_envelope_profile(self, executor):
        windows = [(2 * math.pi * m + 1, 2 * math.pi * (m + 1) + 1) for m in (3, 6, 9)]
        profile = envelope_profile(Solid.TETRAHEDRON, windows, executor=executor)
        assert len(profile) == 3
        assert is_non_increasing(profile)
        assert max(profile) <= 2 * math.sqrt(3)

    def test_non_increasing(self):
        assert is_non_increasing([3.0, 3.05, 2.0])
        assert not is_non_increasing([1.0, 2.0])


class TestOctahedronResiduals:

    def test_exact_families(self):
        residuals = octahedron_exact_residuals(60.0)
        assert len(residuals) == 28
        for residual in residuals:
            assert residual.sigma <= 1e-8
            on_two_n_pi = abs(residual.k / (2 * math.pi) - round(residual.k / (2 * math.pi))) < 1e-9
            assert residual.count == (8 if on_two_n_pi else 2)


class TestKirchhoffLimits:

    def test_tetrahedron(self):
        limits = kirchhoff_limits(Solid.TETRAHEDRON)
        assert [limit.multiplicity for limit in limits] == [1, 3]
        assert limits[0].k == pytest.approx(0.0, abs=1e-6)
        assert limits[1].k == pytest.approx(1.91063, abs=1e-5)

    def test_cube(self):
        ks = [limit.k for limit in kirchhoff_limits(Solid.CUBE)]
        assert ks == pytest.approx([0.0, 1.23096, 1.91063, math.pi], abs=1e-5)

    @pytest.mark.parametrize('solid, center', [
        (Solid.DODECAHEDRON, 1.23096),
        (Solid.ICOSAHEDRON, 1.77215),
        (Solid.TETRAHEDRON, 1.91063),
    ])
    def test_delta_targets(self, solid, center):
        targets = fixed_point_targets(solid, 'delta')
        assert any(abs(t.center - center) < 1e-5 and t.symmetric for t in targets)
        assert targets[-1].period == pytest.approx(math.pi)

    def test_po_targets(self):
        assert len(fixed_point_targets(Solid.OCTAHEDRON, 'po')) == 4
        assert [t.center for t in fixed_point_targets(Solid.CUBE, 'po')] == [0.0]
        with pytest.raises(AsymptoticsError):
            fixed_point_targets(Solid.CUBE, 'magnetic')

    def test_approach(self):
        spectrum = oracle_union_spectrum(Solid.CUBE, 'delta', 1.0, 40.0)
        target = ClusterTarget.fixed(math.acos(1 / 3), 2 * math.pi)
        profile = approach_profile(spectrum, target)
        assert len(profile) == 13
        assert max(p.distance for p in profile[-3:]) < max(p.distance for p in profile[:3])


class TestDrift:

    @pytest.mark.parametrize('solid', [Solid.TETRAHEDRON, Solid.CUBE])
    def test_bounded(self, solid, executor):
        report = kirchhoff_drift(solid, 1.0, DRIFT_WINDOWS, executor=executor)
        assert report.passed
        assert report.ratio <= 1.5
        assert all(not w.unpaired for w in report.windows)
        assert report.to_dict()['windows'][1]['window'] == list(DRIFT_WINDOWS[1])

    def test_kirchhoff_itself(self, executor):
        report = kirchhoff_drift(Solid.TETRAHEDRON, 0.0, DRIFT_WINDOWS, executor=executor)
        assert all(w.max_scaled_drift <= 1e-6 for w in report.windows)

    def test_single_window(self):
        with pytest.raises(AsymptoticsError):
            kirchhoff_drift(Solid.CUBE, 1.0, DRIFT_WINDOWS[:1])
