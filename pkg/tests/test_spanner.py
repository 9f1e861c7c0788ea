import math

import pytest
import numpy as np
import networkx as nx
from pytest_cases import parametrize, parametrize_with_cases

from spannerlab import defaults
from spannerlab.geometry import ConeSpec, cone_index, dist
from spannerlab.instance import Params, generate_instance
from spannerlab.paths import apsp, largest_component
from spannerlab.spanner import (
    critical_radii, build_cone_table, build_theta_table, cone_table,
    build_E1, build_E2, classify_pairs, build_E3, build_E4,
    assemble_spanner, construct_path, construct_all, yao_path,
    yao_stretch_bound, yao_stretch_all, verify_stretch, stretch_histogram,
    check_far_pairs, cone_occupancy, size_constant, STRETCH_TOL
)
from spannerlab.utils import DisconnectedPairError


def brute_force_table(g, spec, theta=False):
    y = np.full((g.n, spec.tau), -1)
    best = np.full((g.n, spec.tau), np.inf)
    for a in range(g.n):
        for b in g.neighbors(a):
            i = cone_index(g.points[a], g.points[b], spec)
            if theta:
                lower, upper = spec.bounds(i)
                mid = (lower + upper) / 2
                key = ((g.points[b, 0] - g.points[a, 0]) * math.cos(mid) +
                       (g.points[b, 1] - g.points[a, 1]) * math.sin(mid))
            else:
                key = dist(g.points[a], g.points[b])
            if key < best[a, i]:
                best[a, i] = key
                y[a, i] = b
    return y


def path_edge_mask(g, oracle, pairs):
    mask = np.zeros(g.m, dtype=bool)
    for a, b in pairs:
        for u, v in oracle.path(a, b).edges():
            mask[g.edge_index(u, v)] = True
    return mask


class Pipeline:
    """Graph, oracle and cone table of one small instance."""

    def __init__(self, params, cone_kind='yao'):
        self.params = params
        self.g = generate_instance(params)
        self.radii = critical_radii(params)
        self.oracle = apsp(self.g, largest_component(self.g))
        self.table = cone_table(self.g, ConeSpec(params.epsilon), cone_kind)
        self.classes = classify_pairs(self.g, self.radii, self.table,
                                      self.oracle)
        self.spanner = assemble_spanner(self.g, params, oracle=self.oracle,
                                        table=self.table,
                                        classes=self.classes)


@pytest.fixture(scope='module')
def pipeline():
    return Pipeline(Params(n=90, p=0.3, epsilon=0.25, theta=0.5, seed=11))


@pytest.fixture(scope='module')
def sparse_pipeline():
    # smaller M and K so every pair class occurs
    return Pipeline(Params(n=120, p=0.15, epsilon=0.3, theta=0.5, M=0.5,
                           K=1., seed=3))


class TestCriticalRadii:

    @staticmethod
    def test_values():
        params = Params(n=400, p=0.3, theta=0.5, M=2., K=20.)
        radii = critical_radii(params)
        base = 400 * 0.3 ** 1.5
        assert radii.r_eps == pytest.approx(math.sqrt(2 / base))
        assert radii.R_eps == pytest.approx(math.sqrt(20 * math.log(400) /
                                                      base))
        assert radii.to_dict() == {'r_eps': radii.r_eps,
                                   'R_eps': radii.R_eps}

    @staticmethod
    def test_not_clamped():
        radii = critical_radii(Params(n=10, p=0.01, K=400.))
        assert radii.R_eps > math.sqrt(2)


class TestConeTableCases:

    @staticmethod
    @parametrize(epsilon=[0.25, 0.6, math.pi / 2])
    def case_yao(epsilon):
        return build_cone_table, epsilon, 'yao'

    @staticmethod
    @parametrize(epsilon=[0.4, 1.])
    def case_theta(epsilon):
        return build_theta_table, epsilon, 'theta'


class TestConeTables:

    @staticmethod
    @parametrize_with_cases("builder, epsilon, kind", cases=TestConeTableCases)
    def test_brute_force(builder, epsilon, kind):
        g = generate_instance(Params(n=70, p=0.4, seed=2))
        spec = ConeSpec(epsilon)
        table = builder(g, spec)
        assert table.kind == kind
        assert np.array_equal(table.y,
                              brute_force_table(g, spec, kind == 'theta'))

    @staticmethod
    @pytest.mark.parametrize('kind', ['yao', 'theta'])
    def test_dispatch(pipeline, kind):
        table = cone_table(pipeline.g, ConeSpec(0.25), kind)
        assert table.kind == kind

    @staticmethod
    def test_gap_and_neighbour(pipeline):
        table = pipeline.table
        g = pipeline.g
        for a in range(0, g.n, 7):
            for i in range(table.spec.tau):
                y = table.neighbour(a, i)
                if y is None:
                    assert table.gap[a, i] == math.inf
                    assert not table.occupied()[a, i]
                else:
                    assert g.has_edge(a, y)
                    assert table.gap[a, i] == dist(g.points[a], g.points[y])

    @staticmethod
    def test_unknown_kind(pipeline):
        with pytest.raises(ValueError):
            cone_table(pipeline.g, ConeSpec(0.25), 'delaunay')


class TestEdgeSets:

    @staticmethod
    def test_E1(pipeline):
        e1 = build_E1(pipeline.g, pipeline.radii)
        assert np.array_equal(e1, pipeline.g.lengths <= pipeline.radii.r_eps)

    @staticmethod
    def test_E2(pipeline):
        g = pipeline.g
        table = pipeline.table
        e2 = build_E2(table)
        expected = np.zeros(g.m, dtype=bool)
        for a in range(g.n):
            for y in table.y[a]:
                if y >= 0:
                    expected[g.edge_index(a, y)] = True
        assert np.array_equal(e2, expected)
        assert e2.sum() <= table.spec.tau * g.n

    @staticmethod
    def test_classify_brute_force(sparse_pipeline):
        pl = sparse_pipeline
        eps = pl.params.epsilon
        r_eps, R_eps = pl.radii.r_eps, pl.radii.R_eps
        vertices = pl.oracle.sources
        seen = set()
        for a in vertices:
            for b in vertices:
                if a == b:
                    continue
                r = dist(pl.g.points[a], pl.g.points[b])
                d = pl.oracle.distance(a, b)
                i = cone_index(pl.g.points[a], pl.g.points[b], pl.table.spec)
                gap = pl.table.gap[a, i]
                if d >= (1 + eps) * r and r >= r_eps:
                    expected = 'B_eps'
                elif (d <= (1 + eps) * r and r_eps <= r <= R_eps and
                      gap >= eps * r):
                    expected = 'C_eps'
                else:
                    expected = 'neither'
                assert pl.classes.code(a, b) == expected
                seen.add(expected)
        assert seen == {'B_eps', 'C_eps', 'neither'}

    @staticmethod
    def test_classify_counts(sparse_pipeline):
        counts = sparse_pipeline.classes.counts()
        k = len(sparse_pipeline.oracle.sources)
        assert sum(counts.values()) == k * (k - 1)
        assert counts['disconnected'] == 0
        assert len(sparse_pipeline.classes) == k * (k - 1)

    @staticmethod
    def test_records(pipeline):
        records = list(pipeline.classes.records())
        assert len(records) == len(pipeline.classes)
        first = records[0]
        assert first.pair == (int(pipeline.oracle.sources[0]),
                              int(pipeline.oracle.sources[1]))
        assert first.cls in ('B_eps', 'C_eps', 'neither')

    @staticmethod
    @pytest.mark.parametrize('code, builder', [(1, build_E3), (2, build_E4)])
    def test_path_sets(sparse_pipeline, code, builder):
        pl = sparse_pipeline
        pairs = pl.classes.pairs(code)
        assert len(pairs)
        assert np.all(pairs[:, 0] < pairs[:, 1])
        mask = builder(pl.classes, pl.oracle)
        assert np.array_equal(mask, path_edge_mask(pl.g, pl.oracle, pairs))

    @staticmethod
    def test_assemble(sparse_pipeline):
        pl = sparse_pipeline
        spanner = pl.spanner
        assert np.array_equal(spanner.e1, build_E1(pl.g, pl.radii))
        assert np.array_equal(spanner.e2, build_E2(pl.table))
        union = spanner.e1 | spanner.e2 | spanner.e3 | spanner.e4
        assert np.array_equal(spanner.union, union)

        sizes = spanner.sizes()
        assert sizes['E_eps'] == union.sum()
        assert sizes['E_eps'] <= sum(sizes[k] for k in
                                     ('E1', 'E2', 'E3', 'E4'))
        table = spanner.to_dataframe()
        assert len(table) == sizes['E_eps']
        assert table['in_e3'].sum() == sizes['E3']
        assert list(table.columns) == ['u', 'v', 'length', 'in_e1', 'in_e2',
                                       'in_e3', 'in_e4']
        assert np.all(spanner.attribution[union] > 0)
        assert spanner.subgraph().m == sizes['E_eps']

    @staticmethod
    def test_assemble_defaults(pipeline):
        spanner = assemble_spanner(pipeline.g, pipeline.params)
        assert spanner.sizes() == pipeline.spanner.sizes()
        k = spanner.info['component_size']
        assert spanner.info['skipped_pairs'] == \
            pipeline.g.n * (pipeline.g.n - 1) // 2 - k * (k - 1) // 2

    @staticmethod
    def test_theta_spanner():
        params = Params(n=80, p=0.3, epsilon=0.3, seed=4)
        pl = Pipeline(params, cone_kind='theta')
        assert pl.table.kind == 'theta'
        assert np.array_equal(pl.spanner.e2, build_E2(pl.table))
        assert pl.spanner.sizes()['E2'] <= pl.table.spec.tau * params.n
        summary = construct_all(pl.g, pl.radii, pl.table, pl.oracle,
                                spanner=pl.spanner)
        k = len(pl.oracle.sources)
        assert summary.pairs + summary.disconnected == k * (k - 1)

    @staticmethod
    def test_long_path_edges(sparse_pipeline):
        spanner = sparse_pipeline.spanner
        assert spanner.long_path_edges(0.) == (spanner.e3 | spanner.e4).sum()
        assert spanner.long_path_edges(2.) == 0


class TestConstruct:

    @staticmethod
    def test_trace_bound(pipeline):
        pl = pipeline
        eps = pl.params.epsilon
        vertices = pl.oracle.sources
        for a in vertices[::9]:
            for b in vertices[::5]:
                if a == b:
                    continue
                trace = construct_path(pl.g, pl.radii, pl.table, pl.oracle,
                                       a, b)
                d = pl.oracle.distance(a, b)
                assert trace.vertices[0] == a
                assert trace.vertices[-1] == b
                assert trace.length <= (1 + 7 * eps) * d + STRETCH_TOL
                assert trace.length >= d - STRETCH_TOL
                assert all(pl.g.has_edge(u, v) for u, v in trace.edges())
                assert len(trace.branches) == \
                    len(trace.waypoints) - (trace.splice is None)
                assert trace.branches[-1] in ('D1', 'D2', 'D3', 'D4')

    @staticmethod
    def test_summary_matches_traces(pipeline):
        pl = pipeline
        summary = construct_all(pl.g, pl.radii, pl.table, pl.oracle,
                                spanner=pl.spanner)
        k = len(pl.oracle.sources)
        assert summary.pairs == k * (k - 1)
        assert summary.violations == 0
        assert 1. <= summary.max_ratio <= 1 + 7 * pl.params.epsilon + 1e-9
        a, b = summary.argmax
        trace = construct_path(pl.g, pl.radii, pl.table, pl.oracle, a, b)
        assert trace.length / pl.oracle.distance(a, b) == \
            pytest.approx(summary.max_ratio, rel=1e-12)
        assert summary.empirical_constant == pytest.approx(
            (summary.max_ratio - 1) / pl.params.epsilon)
        branches = summary.branches
        assert branches['D1'] + branches['D2'] + branches['D3'] <= \
            summary.pairs
        assert summary.to_dict()['stretch_violations'] == 0

    @staticmethod
    def test_containment_without_far_pairs():
        params = Params(n=80, p=0.4, epsilon=0.25, K=400., seed=5)
        pl = Pipeline(params)
        assert pl.radii.R_eps >= math.sqrt(2)
        summary = construct_all(pl.g, pl.radii, pl.table, pl.oracle,
                                spanner=pl.spanner)
        assert summary.far_traces == 0
        assert summary.containment_far == 0
        if summary.containment_near == 0:
            report = verify_stretch(pl.g, pl.spanner.union, pl.oracle)
            assert report.max_stretch <= 1 + 7 * params.epsilon + 1e-9
        # used edges of contained traces are spanner edges
        assert summary.used.shape == (pl.g.m,)

    @staticmethod
    def test_used_matches_traces():
        pl = Pipeline(Params(n=40, p=0.4, epsilon=0.3, seed=2))
        summary = construct_all(pl.g, pl.radii, pl.table, pl.oracle,
                                spanner=pl.spanner)
        expected = np.zeros(pl.g.m, dtype=bool)
        for a in pl.oracle.sources:
            for b in pl.oracle.sources:
                if a == b:
                    continue
                trace = construct_path(pl.g, pl.radii, pl.table, pl.oracle,
                                       int(a), int(b))
                for u, v in trace.edges():
                    expected[pl.g.edge_index(u, v)] = True
        assert np.array_equal(summary.used, expected)

    @staticmethod
    def test_same_vertex(pipeline):
        with pytest.raises(ValueError):
            construct_path(pipeline.g, pipeline.radii, pipeline.table,
                           pipeline.oracle, 3, 3)

    @staticmethod
    def test_disconnected():
        params = Params(n=60, p=0.03, seed=1)
        g = generate_instance(params)
        component = largest_component(g)
        outside = next(v for v in range(g.n) if v not in set(component))
        oracle = apsp(g)
        table = cone_table(g, ConeSpec(params.epsilon))
        with pytest.raises(DisconnectedPairError):
            construct_path(g, critical_radii(params), table, oracle,
                           int(component[0]), outside)


class TestYaoRouting:

    @staticmethod
    def test_bound():
        assert yao_stretch_bound(0.2) == pytest.approx(1.2798, abs=1e-4)
        assert yao_stretch_bound(1.) == math.inf

    @staticmethod
    def test_complete_graph():
        params = Params(n=60, p=1., epsilon=0.2, seed=7)
        g = generate_instance(params)
        table = build_cone_table(g, ConeSpec(0.2))
        result = yao_stretch_all(table)
        assert result['failures'] == 0
        assert result['violations'] == 0
        assert result['max_ratio'] <= result['bound']

        a, b = result['argmax']
        path = yao_path(table, a, b)
        assert path.vertices[0] == a
        assert path.vertices[-1] == b
        assert path.length / dist(g.points[a], g.points[b]) == \
            pytest.approx(result['max_ratio'])

    @staticmethod
    def test_empty_cone():
        g = generate_instance(Params(n=40, p=0.05, seed=2))
        table = build_cone_table(g, ConeSpec(0.3))
        isolated = np.flatnonzero(g.degree() == 0)
        if len(isolated):
            v = int(isolated[0])
            assert yao_path(table, v, (v + 1) % g.n) is None


class TestVerifyStretch:

    @staticmethod
    def test_full_edge_set(pipeline):
        g = pipeline.g
        report = verify_stretch(g, np.ones(g.m, dtype=bool), pipeline.oracle)
        k = len(pipeline.oracle.sources)
        assert report.max_stretch == 1.
        assert report.pairs == k * (k - 1) // 2
        assert report.infinite_pairs == 0
        assert not report.sampled
        assert report.histogram == {'1.00': report.pairs}

    @staticmethod
    def test_against_networkx():
        g = generate_instance(Params(n=40, p=0.5, seed=6))
        mask = np.zeros(g.m, dtype=bool)
        mask[::2] = True
        oracle = apsp(g)
        report = verify_stretch(g, mask, oracle)

        full = nx.floyd_warshall_numpy(g.to_networkx(), nodelist=range(g.n))
        sub = nx.floyd_warshall_numpy(g.subgraph(mask).to_networkx(),
                                      nodelist=range(g.n))
        upper = np.triu(np.ones_like(full, dtype=bool), k=1)
        finite = upper & np.isfinite(sub)
        assert report.infinite_pairs == np.count_nonzero(
            upper & np.isfinite(full) & ~np.isfinite(sub))
        assert report.max_stretch == pytest.approx(
            (sub[finite] / full[finite]).max(), rel=1e-12)
        assert sum(report.histogram.values()) == finite.sum()

    @staticmethod
    def test_sampled(pipeline):
        g = pipeline.g
        saved = dict(defaults)
        defaults['stretch_full_limit'] = 10
        defaults['stretch_sample_sources'] = 5
        try:
            report = verify_stretch(g, pipeline.spanner.union,
                                    pipeline.oracle, seed=3)
            again = verify_stretch(g, pipeline.spanner.union,
                                   pipeline.oracle, seed=3)
        finally:
            defaults.update(saved)
        k = len(pipeline.oracle.sources)
        assert report.sampled
        assert report.sources == 5
        assert report.pairs == 5 * (k - 1)
        assert report.to_dict() == again.to_dict()

    @staticmethod
    def test_explicit_sources(pipeline):
        g = pipeline.g
        report = verify_stretch(g, np.ones(g.m, dtype=bool), pipeline.oracle,
                                sources=pipeline.oracle.sources[:2])
        assert report.sources == 2
        oracle = apsp(g, [0, 1])
        with pytest.raises(ValueError):
            verify_stretch(g, np.ones(g.m, dtype=bool), oracle,
                           sources=[2])

    @staticmethod
    def test_histogram():
        hist = stretch_histogram(np.array([1., 1.004, 1.013, 1.013, 1.205]))
        assert hist == {'1.00': 2, '1.01': 2, '1.20': 1}

    @staticmethod
    def test_histogram_bucket_edges():
        hist = stretch_histogram(np.array([1.03, 1.15, 1.2, 1.0299]))
        assert hist == {'1.02': 1, '1.03': 1, '1.15': 1, '1.20': 1}


class TestDiagnostics:

    @staticmethod
    def test_far_pairs(sparse_pipeline):
        pl = sparse_pipeline
        eps = pl.params.epsilon
        out = check_far_pairs(pl.g, pl.radii, pl.oracle, eps, table=pl.table)
        vertices = pl.oracle.sources
        far = 0
        violations = 0
        for i, a in enumerate(vertices):
            for b in vertices[i + 1:]:
                r = dist(pl.g.points[a], pl.g.points[b])
                if r >= pl.radii.R_eps:
                    far += 1
                    if pl.oracle.distance(a, b) > (1 + 4 * eps) * r:
                        violations += 1
        assert out['far_pairs'] == far
        assert far > 0
        assert out['distance_violations'] == violations
        assert out['cone_step_violations'] is not None

    @staticmethod
    def test_far_pairs_without_table(pipeline):
        out = check_far_pairs(pipeline.g, pipeline.radii, pipeline.oracle,
                              pipeline.params.epsilon)
        assert out['cone_step_violations'] is None

    @staticmethod
    def test_occupancy(pipeline):
        occupancy = cone_occupancy(pipeline.table, pipeline.g, 0.)
        assert occupancy['interior_vertices'] == pipeline.g.n
        assert occupancy['interior'] == occupancy['all']
        assert occupancy['all'] == pytest.approx(
            pipeline.table.occupied().mean())
        assert math.isnan(cone_occupancy(pipeline.table, pipeline.g,
                                         0.6)['interior'])

    @staticmethod
    def test_size_constant(pipeline):
        spanner = pipeline.spanner
        assert size_constant(spanner, 0.25) == pytest.approx(
            spanner.sizes()['E_eps'] * 0.0625 / pipeline.g.n)


@pytest.mark.slow
class TestAcceptance:

    @staticmethod
    @pytest.mark.parametrize('seed', range(5))
    def test_construct_stretch(seed):
        params = Params(n=400, p=0.3, epsilon=0.25, theta=0.5, M=2., K=20.,
                        seed=seed)
        pl = Pipeline(params)
        summary = construct_all(pl.g, pl.radii, pl.table, pl.oracle,
                                spanner=pl.spanner)
        assert summary.violations == 0
        far = check_far_pairs(pl.g, pl.radii, pl.oracle, params.epsilon)
        assert far['distance_violations'] == 0

    @staticmethod
    @pytest.mark.parametrize('seed', range(5))
    def test_containment(seed):
        params = Params(n=400, p=0.3, epsilon=0.25, theta=0.5, M=2., K=400.,
                        seed=seed)
        pl = Pipeline(params)
        summary = construct_all(pl.g, pl.radii, pl.table, pl.oracle,
                                spanner=pl.spanner)
        assert summary.far_traces == 0
        assert summary.containment_near == 0
        report = verify_stretch(pl.g, pl.spanner.union, pl.oracle)
        assert report.max_stretch <= 1 + 7 * params.epsilon + 1e-9

    @staticmethod
    def test_yao_complete_graph():
        g = generate_instance(Params(n=300, p=1., epsilon=0.2, seed=0))
        result = yao_stretch_all(build_cone_table(g, ConeSpec(0.2)))
        assert result['violations'] == 0
        assert result['failures'] == 0

    @staticmethod
    def test_short_edge_bound():
        n, p = 2000, 0.2
        e1 = []
        e2 = []
        for seed in range(20):
            params = Params(n=n, p=p, theta=0.5, M=2., seed=seed)
            g = generate_instance(params)
            e1.append(build_E1(g, critical_radii(params)).sum())
            spec = ConeSpec(params.epsilon)
            e2.append(build_E2(build_cone_table(g, spec)).sum())
            assert e2[-1] <= spec.tau * n
        r_eps = critical_radii(params).r_eps
        bound = n * (n - 1) / 2 * math.pi * r_eps ** 2 * p
        assert 0.55 * bound <= np.mean(e1) <= bound
