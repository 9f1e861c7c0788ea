# Copyright 2026 The spanner-lab developers
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

import math
from warnings import warn

import numpy as np
import pandas as pd

from typing import Optional, Dict, Iterator, List, Tuple, Any

from spannerlab import defaults
from spannerlab import _accelerated as acc
from spannerlab.geometry import ConeSpec, dist_many
from spannerlab.instance import (
    EmbeddedGraph, Params, rng_stream, STREAM_STRETCH
)
from spannerlab.paths import ApspOracle, Path, apsp, largest_component
from spannerlab.utils import DisconnectedPairError, InvariantError

# Pair classes
NEITHER = 0
B_EPS = 1
C_EPS = 2
DISCONNECTED = 3
CLASS_NAMES = {
    NEITHER: 'neither',
    B_EPS: 'B_eps',
    C_EPS: 'C_eps',
    DISCONNECTED: 'disconnected',
}
BRANCH_NAMES = {
    acc.TAG_D1: 'D1',
    acc.TAG_D2: 'D2',
    acc.TAG_D3: 'D3',
    acc.TAG_D4: 'D4',
}
SET_NAMES = ('e1', 'e2', 'e3', 'e4')
CONE_KINDS = ('yao', 'theta')

# Slack when comparing a trace length with its bound
STRETCH_TOL = 1e-9


class CriticalRadii(object):
    """Short edge radius `r_eps` and far pair radius `R_eps`."""
    __slots__ = ['r_eps', 'R_eps']

    def __init__(self, r_eps: float, R_eps: float):
        self.r_eps = r_eps
        self.R_eps = R_eps

    def __repr__(self):
        return f'CriticalRadii(r_eps={self.r_eps!r}, R_eps={self.R_eps!r})'

    def to_dict(self):
        return {'r_eps': self.r_eps, 'R_eps': self.R_eps}


def critical_radii(params: Params) -> CriticalRadii:
    """r_eps = (M / (n p^(1+theta)))^(1/2) and
    R_eps = (K ln n / (n p^(1+theta)))^(1/2). Values are not clamped to
    the diameter of the square."""
    base = params.n * params.p ** (1 + params.theta)
    return CriticalRadii(
        math.sqrt(params.M / base),
        math.sqrt(params.K * math.log(params.n) / base),
    )


class ConeTable(object):
    """Chosen neighbour of every vertex in every cone.

    Attributes
    ----------
    graph : EmbeddedGraph
    spec : ConeSpec
    kind : str
        'yao' (nearest neighbour) or 'theta' (shortest projection on the
        cone bisector).
    y : numpy.ndarray
        Neighbour ids, shape (n, tau), -1 for an empty cone.
    gap : numpy.ndarray
        Distance from each vertex to its chosen neighbour, inf for an
        empty cone.

    """
    __slots__ = ['graph', 'spec', 'kind', 'y', 'gap']

    def __init__(self, graph: EmbeddedGraph, spec: ConeSpec, y: np.ndarray,
                 kind: str = 'yao'):
        self.graph = graph
        self.spec = spec
        self.kind = kind
        self.y = y
        owner = np.repeat(np.arange(graph.n), spec.tau).reshape(y.shape)
        gap = dist_many(graph.points[owner], graph.points[np.maximum(y, 0)])
        self.gap = np.where(y >= 0, gap, np.inf)

    def __repr__(self):
        return (f'ConeTable(kind={self.kind!r}, n={self.graph.n}, '
                f'tau={self.spec.tau})')

    def neighbour(self, a: int, i: int) -> Optional[int]:
        """Chosen neighbour of `a` in cone `i`, None if the cone is
        empty."""
        y = int(self.y[a, i])
        return None if y < 0 else y

    def occupied(self) -> np.ndarray:
        return self.y >= 0


def _table(g, spec, theta):
    indptr, indices, _, _ = g.csr
    return acc.nearest_in_cones(g.points, indptr, indices, spec.epsilon,
                                spec.tau, theta)


def build_cone_table(g: EmbeddedGraph, spec: ConeSpec) -> ConeTable:
    """Yao table: nearest adjacent neighbour per cone, lowest id on
    ties."""
    return ConeTable(g, spec, _table(g, spec, False), kind='yao')


def build_theta_table(g: EmbeddedGraph, spec: ConeSpec) -> ConeTable:
    """Theta table: adjacent neighbour with the shortest projection onto
    the cone bisector, lowest id on ties."""
    return ConeTable(g, spec, _table(g, spec, True), kind='theta')


def cone_table(g: EmbeddedGraph, spec: ConeSpec,
               kind: Optional[str] = None) -> ConeTable:
    kind = defaults['cone_kind'] if kind is None else kind
    if kind == 'yao':
        return build_cone_table(g, spec)
    if kind == 'theta':
        return build_theta_table(g, spec)
    raise ValueError(f"Unknown cone kind `{kind}`.")


def build_E1(g: EmbeddedGraph, radii: CriticalRadii) -> np.ndarray:
    """Mask of the edges of length at most r_eps."""
    return g.lengths <= radii.r_eps


def build_E2(table: ConeTable) -> np.ndarray:
    """Mask of the edges from every vertex to its cone neighbours."""
    g = table.graph
    owner = np.repeat(np.arange(g.n), table.spec.tau)
    chosen = table.y.ravel()
    keep = chosen >= 0
    mask = np.zeros(g.m, dtype=bool)
    mask[g.edge_index(owner[keep], chosen[keep])] = True
    return mask


class PairClass(object):
    __slots__ = ['pair', 'r', 'd', 'yao_gap', 'cls']

    def __init__(self, pair, r, d, yao_gap, cls):
        self.pair = pair
        self.r = r
        self.d = d
        self.yao_gap = yao_gap
        self.cls = cls

    def __repr__(self):
        return (f'PairClass({self.pair}, r={self.r:.6g}, d={self.d:.6g}, '
                f'yao_gap={self.yao_gap:.6g}, cls={self.cls!r})')


class _PairMatrices(object):
    """Euclidean distance, shortest path distance, cone and cone gap of
    every ordered pair of oracle sources. Shortest path distances are
    read from the row of the lower id vertex so both orientations agree
    bitwise."""

    def __init__(self, g, oracle, table=None, spec=None):
        vertices = oracle.sources
        self.vertices = vertices
        pts = g.points[vertices]
        self.r = dist_many(pts[:, None, :], pts[None, :, :])
        d = oracle.dist[:, vertices]
        k = len(vertices)
        upper = np.arange(k)[None, :] > np.arange(k)[:, None]
        self.d = np.where(upper, d, d.T)
        self.off_diagonal = ~np.eye(k, dtype=bool)
        self.cones = None
        self.gap = None
        if table is not None:
            spec = table.spec
        if spec is not None:
            self.cones = acc.cone_matrix(g.points, vertices, spec.epsilon,
                                         spec.tau)
        if table is not None:
            self.gap = table.gap[vertices[:, None], np.maximum(self.cones, 0)]
            self.gap[~self.off_diagonal] = np.inf


class PairClassification(object):
    """Class of every ordered pair (A, B) of the oracle's sources.

    The C_eps test depends on the cone neighbour of A, so the two
    orientations of a pair can differ. B_eps and disconnected are
    symmetric.

    Attributes
    ----------
    vertices : numpy.ndarray
        Classified vertices (the oracle sources).
    codes : numpy.ndarray
        Class code of (vertices[i], vertices[j]), shape (k, k).
    r, d, gap : numpy.ndarray
        Euclidean distance, shortest path distance and cone gap.

    """
    __slots__ = ['vertices', 'codes', 'r', 'd', 'gap']

    def __init__(self, vertices, codes, r, d, gap):
        self.vertices = vertices
        self.codes = codes
        self.r = r
        self.d = d
        self.gap = gap

    def __len__(self):
        k = len(self.vertices)
        return k * (k - 1)

    def records(self) -> Iterator[PairClass]:
        """PairClass of every ordered pair, row by row."""
        vs = self.vertices
        for i in range(len(vs)):
            for j in range(len(vs)):
                if i == j:
                    continue
                yield PairClass(
                    (int(vs[i]), int(vs[j])), float(self.r[i, j]),
                    float(self.d[i, j]), float(self.gap[i, j]),
                    CLASS_NAMES[int(self.codes[i, j])]
                )

    def code(self, a: int, b: int) -> str:
        i = np.searchsorted(self.vertices, a)
        j = np.searchsorted(self.vertices, b)
        if (i >= len(self.vertices) or j >= len(self.vertices) or
                self.vertices[i] != a or self.vertices[j] != b):
            raise ValueError(f"pair ({a}, {b}) was not classified")
        return CLASS_NAMES[int(self.codes[i, j])]

    def pairs(self, code: int) -> np.ndarray:
        """Unordered pairs (a < b) with `code` in either orientation,
        sorted, shape (k, 2)."""
        hit = self.codes == code
        hit = np.triu(hit | hit.T, k=1)
        i, j = np.nonzero(hit)
        return np.stack((self.vertices[i], self.vertices[j]), axis=1)

    def counts(self) -> Dict[str, int]:
        """Number of ordered pairs per class."""
        off = ~np.eye(len(self.vertices), dtype=bool)
        return {
            name: int(np.count_nonzero((self.codes == code) & off))
            for code, name in CLASS_NAMES.items()
        }


def classify_pairs(g: EmbeddedGraph, radii: CriticalRadii, table: ConeTable,
                   oracle: ApspOracle) -> PairClassification:
    """Sort every ordered pair of oracle sources into B_eps, C_eps,
    neither or disconnected.

    B_eps: d >= (1+eps) r and r >= r_eps. C_eps: not B_eps,
    d <= (1+eps) r, r_eps <= r <= R_eps and a cone gap >= eps r.
    Pairs with infinite d are disconnected and never B_eps.

    """
    eps = table.spec.epsilon
    mats = _PairMatrices(g, oracle, table)
    r, d, gap = mats.r, mats.d, mats.gap
    finite = np.isfinite(d)

    codes = np.full(r.shape, NEITHER, dtype=np.int8)
    b_eps = finite & (d >= (1 + eps) * r) & (r >= radii.r_eps)
    c_eps = (~b_eps & finite & (d <= (1 + eps) * r) &
             (r >= radii.r_eps) & (r <= radii.R_eps) & (gap >= eps * r))
    codes[c_eps] = C_EPS
    codes[b_eps] = B_EPS
    codes[~finite] = DISCONNECTED
    codes[~mats.off_diagonal] = NEITHER
    return PairClassification(mats.vertices, codes, r, d, gap)


def _path_edges(classes, oracle, code):
    g = oracle.graph
    indptr, indices, slot_edge, _ = g.csr
    pairs = classes.pairs(code)
    mask = np.zeros(g.m, dtype=bool)
    acc.mark_paths(indptr, indices, slot_edge, oracle.pred, oracle.row_of,
                   pairs[:, 0].copy(), pairs[:, 1].copy(), mask)
    return mask


def build_E3(classes: PairClassification,
             oracle: ApspOracle) -> np.ndarray:
    """Mask of the edges on the shortest paths of B_eps pairs."""
    return _path_edges(classes, oracle, B_EPS)


def build_E4(classes: PairClassification,
             oracle: ApspOracle) -> np.ndarray:
    """Mask of the edges on the shortest paths of C_eps pairs."""
    return _path_edges(classes, oracle, C_EPS)


class SpannerEdges(object):
    """The four edge sets of the construction as masks over the edge ids
    of `graph`, and their union.

    Attributes
    ----------
    graph : EmbeddedGraph
    e1, e2, e3, e4 : numpy.ndarray
        Boolean masks.
    info : dict
        Component size, skipped pairs and pair class counts.

    """
    __slots__ = ['graph', 'e1', 'e2', 'e3', 'e4', 'info']

    def __init__(self, graph, e1, e2, e3, e4, info=None):
        self.graph = graph
        self.e1 = e1
        self.e2 = e2
        self.e3 = e3
        self.e4 = e4
        self.info = {} if info is None else info

    def __repr__(self):
        sizes = ', '.join(f'{k}={v}' for k, v in self.sizes().items())
        return f'SpannerEdges({sizes})'

    @property
    def union(self) -> np.ndarray:
        return self.e1 | self.e2 | self.e3 | self.e4

    @property
    def attribution(self) -> np.ndarray:
        """Bit i-1 set when the edge is in E_i."""
        return (self.e1.astype(np.uint8) | self.e2.astype(np.uint8) << 1 |
                self.e3.astype(np.uint8) << 2 | self.e4.astype(np.uint8) << 3)

    def sizes(self) -> Dict[str, int]:
        out = {name.upper(): int(np.count_nonzero(getattr(self, name)))
               for name in SET_NAMES}
        out['E_eps'] = int(np.count_nonzero(self.union))
        return out

    def edges(self, name: str = 'union') -> np.ndarray:
        mask = self.union if name == 'union' else getattr(self, name)
        return self.graph.edges[mask]

    def long_path_edges(self, R_eps: float) -> int:
        """Number of E3 or E4 edges longer than R_eps."""
        return int(np.count_nonzero((self.e3 | self.e4) &
                                    (self.graph.lengths > R_eps)))

    def subgraph(self) -> EmbeddedGraph:
        return self.graph.subgraph(self.union)

    def to_dataframe(self) -> pd.DataFrame:
        """Edges of E_eps sorted by (u, v) with their length and set
        membership."""
        mask = self.union
        edges = self.graph.edges[mask]
        return pd.DataFrame({
            'u': edges[:, 0],
            'v': edges[:, 1],
            'length': self.graph.lengths[mask],
            'in_e1': self.e1[mask].astype(np.int8),
            'in_e2': self.e2[mask].astype(np.int8),
            'in_e3': self.e3[mask].astype(np.int8),
            'in_e4': self.e4[mask].astype(np.int8),
        })


def assemble_spanner(g: EmbeddedGraph, params: Params,
                     oracle: Optional[ApspOracle] = None,
                     table: Optional[ConeTable] = None,
                     classes: Optional[PairClassification] = None,
                     cone_kind: Optional[str] = None) -> SpannerEdges:
    """Build E1 to E4 on the largest component of `g`.

    Parameters
    ----------
    g
        Input graph.
    params
        Instance parameters, giving epsilon and the critical radii.
    oracle
        Shortest paths from every vertex of the component. Computed if
        not given.
    table
        Cone table. Built with `cone_kind` if not given.
    classes
        Pair classification. Computed if not given.

    Returns
    -------
    SpannerEdges

    """
    radii = critical_radii(params)
    if table is None:
        table = cone_table(g, ConeSpec(params.epsilon), cone_kind)
    if oracle is None:
        oracle = apsp(g, largest_component(g))
    if classes is None:
        classes = classify_pairs(g, radii, table, oracle)

    k = len(oracle.sources)
    info = {
        'component_size': k,
        'skipped_pairs': g.n * (g.n - 1) // 2 - k * (k - 1) // 2,
        'pair_classes': classes.counts(),
    }
    return SpannerEdges(g, build_E1(g, radii), build_E2(table),
                        build_E3(classes, oracle), build_E4(classes, oracle),
                        info=info)


class ConstructTrace(object):
    """Path built by CONSTRUCT between two vertices.

    Attributes
    ----------
    waypoints : list of int
        Z_0 = A, Z_1, ... visited by D4 steps.
    branches : list of str
        Branch taken at every waypoint, 'D4' for a step.
    splice : Path or None
        Shortest path used to complete the trace.
    length : float
        Total length L.
    far : bool
        D2 or D3 spliced at a waypoint further than R_eps from B.

    """
    __slots__ = ['waypoints', 'branches', 'splice', 'length', 'far']

    def __init__(self, waypoints, branches, splice, length, far):
        self.waypoints = waypoints
        self.branches = branches
        self.splice = splice
        self.length = length
        self.far = far

    def __repr__(self):
        return (f'ConstructTrace({self.vertices}, '
                f'branches={self.branches}, length={self.length!r})')

    @property
    def vertices(self) -> List[int]:
        if self.splice is None:
            return list(self.waypoints)
        return list(self.waypoints) + self.splice.vertices[1:]

    def edges(self) -> List[Tuple[int, int]]:
        vs = self.vertices
        return list(zip(vs[:-1], vs[1:]))


def construct_path(g: EmbeddedGraph, radii: CriticalRadii, table: ConeTable,
                   oracle: ApspOracle, A: int, B: int,
                   epsilon: Optional[float] = None) -> ConstructTrace:
    """Run CONSTRUCT from `A` to `B`.

    From Z_0 = A: D1 splices P_{Z,B} if {Z,B} is an edge of length at
    most r_eps, D2 if the cone step |Z - Y| exceeds eps |Z - B| (an empty
    cone counts as infinite), D3 if d(Y,B) >= (1 + 5 eps) |Y - B|,
    otherwise D4 steps to Z = Y.

    Raises
    ------
    DisconnectedPairError
        If `B` is not reachable from `A`.
    InvariantError
        If the walk does not finish within n steps.

    """
    A = g.check_vertex(A)
    B = g.check_vertex(B)
    if A == B:
        raise ValueError("CONSTRUCT needs two distinct vertices")
    eps = table.spec.epsilon if epsilon is None else float(epsilon)
    if not np.isfinite(oracle.distance(A, B)):
        raise DisconnectedPairError(A, B)

    indptr, indices, slot_edge, slot_length = g.csr
    spanner = np.ones(g.m, dtype=bool)
    used = np.zeros(g.m, dtype=bool)
    waypoints = np.empty(g.n + 1, dtype=np.int64)
    steps, length, splice, tag, status, far, _, _ = acc.construct_walk(
        A, B, g.points, indptr, indices, slot_edge, slot_length, table.y,
        eps, table.spec.tau, radii.r_eps, radii.R_eps, oracle.dist,
        oracle.pred, oracle.row_of, g.n, spanner, used, waypoints
    )
    if status == acc.STATUS_STEP_CAP:
        raise InvariantError(f"CONSTRUCT from {A} to {B} exceeded "
                             f"{g.n} steps")
    if status == acc.STATUS_DISCONNECTED:
        raise DisconnectedPairError(int(splice), B)

    branches = ['D4'] * steps
    path = None
    if splice >= 0:
        branches.append(BRANCH_NAMES[tag])
        path = oracle.path(int(splice), B)
    return ConstructTrace([int(v) for v in waypoints[:steps + 1]], branches,
                          path, float(length), bool(far))


class ConstructSummary(object):
    """CONSTRUCT over every ordered pair of a vertex set.

    Attributes
    ----------
    pairs : int
        Pairs walked.
    max_ratio : float
        Largest L / d.
    argmax : tuple or None
        Pair attaining `max_ratio`.
    violations : int
        Pairs with L > (1 + 7 eps) d + tol.
    far_traces : int
        Traces that spliced by D2 or D3 further than R_eps from the
        target.
    containment_far, containment_near : int
        Traces with an edge outside the spanner, split by whether they
        are far traces.
    monotone_failures : int
        Traces where a D4 step did not move closer to the target.
    branches : dict
        Walks ending in D1, D2 and D3, and the total number of D4 steps.
    disconnected : int
        Pairs skipped because the target is unreachable.
    used : numpy.ndarray
        Mask of every edge used by some trace.

    """

    def __init__(self, epsilon, pairs, max_ratio, argmax, violations,
                 far_traces, containment_far, containment_near,
                 monotone_failures, branches, disconnected, used):
        self.epsilon = epsilon
        self.pairs = pairs
        self.max_ratio = max_ratio
        self.argmax = argmax
        self.violations = violations
        self.far_traces = far_traces
        self.containment_far = containment_far
        self.containment_near = containment_near
        self.monotone_failures = monotone_failures
        self.branches = branches
        self.disconnected = disconnected
        self.used = used

    @property
    def empirical_constant(self) -> float:
        """Smallest c with L <= (1 + c eps) d over all pairs."""
        return max(self.max_ratio - 1, 0.) / self.epsilon

    def to_dict(self) -> Dict[str, Any]:
        return {
            'pairs': self.pairs,
            'max_ratio': self.max_ratio,
            'argmax': None if self.argmax is None else list(self.argmax),
            'empirical_constant': self.empirical_constant,
            'stretch_violations': self.violations,
            'far_traces': self.far_traces,
            'containment_failures_far': self.containment_far,
            'containment_failures_near': self.containment_near,
            'monotone_failures': self.monotone_failures,
            'branches': dict(self.branches),
            'disconnected_pairs': self.disconnected,
        }


def _log_pairs(message, pairs):
    limit = defaults['max_logged_violations']
    for a, b in pairs[:limit]:
        warn(f"{message}: pair ({a}, {b})")
    if len(pairs) > limit:
        warn(f"{message}: {len(pairs) - limit} more pairs not shown")


def construct_all(g: EmbeddedGraph, radii: CriticalRadii, table: ConeTable,
                  oracle: ApspOracle,
                  spanner: Optional[SpannerEdges] = None,
                  epsilon: Optional[float] = None,
                  vertices: Optional[np.ndarray] = None,
                  tol: float = STRETCH_TOL) -> ConstructSummary:
    """Run CONSTRUCT for every ordered pair of `vertices` (the oracle
    sources by default) and check the stretch bound, containment in
    `spanner` and monotonicity.

    Raises
    ------
    InvariantError
        If any walk hits the step cap.

    """
    eps = table.spec.epsilon if epsilon is None else float(epsilon)
    if vertices is None:
        vertices = oracle.sources
    vertices = np.asarray(vertices, dtype=np.int64)
    indptr, indices, slot_edge, slot_length = g.csr
    mask = (np.ones(g.m, dtype=bool) if spanner is None
            else np.ascontiguousarray(spanner.union))
    used = np.zeros(g.m, dtype=bool)

    max_ratio, argmax, counts, status = acc.construct_all(
        vertices, g.points, indptr, indices, slot_edge, slot_length,
        table.y, eps, table.spec.tau, radii.r_eps, radii.R_eps,
        oracle.dist, oracle.pred, oracle.row_of, mask, used, tol
    )
    if status[:, 1].sum():
        raise InvariantError(
            f"CONSTRUCT exceeded the step cap for {status[:, 1].sum()} pairs"
        )

    totals = counts.sum(axis=0)
    best = None
    top = 1.
    if len(vertices) and totals[0]:
        row = int(np.argmax(max_ratio))
        top = float(max_ratio[row])
        best = (int(vertices[row]), int(argmax[row]))

    summary = ConstructSummary(
        eps, int(totals[0]), top, best, int(totals[1]), int(totals[2]),
        int(totals[3]), int(totals[4]), int(totals[5]),
        {'D1': int(totals[6]), 'D2': int(totals[7]), 'D3': int(totals[8]),
         'D4_steps': int(totals[9])},
        int(status[:, 0].sum()), used
    )

    if summary.violations:
        _log_pairs("CONSTRUCT trace longer than (1+7eps)d",
                   _offending(g, radii, table, oracle, vertices, counts[:, 1],
                              lambda t, d: t.length > (1 + 7 * eps) * d + tol))
    if spanner is not None and summary.containment_near:
        union = spanner.union

        def outside(trace, d):
            return not trace.far and not all(
                union[g.edge_index(u, v)] for u, v in trace.edges())

        _log_pairs("CONSTRUCT trace leaves the spanner",
                   _offending(g, radii, table, oracle, vertices,
                              counts[:, 4], outside))
    return summary


def _offending(g, radii, table, oracle, vertices, row_counts, test):
    """Re-walk the rows flagged by the kernel to name offending pairs."""
    limit = defaults['max_logged_violations']
    found = []
    for row in np.flatnonzero(row_counts):
        a = int(vertices[row])
        for b in vertices:
            b = int(b)
            if a == b:
                continue
            d = oracle.distance(a, b)
            if not np.isfinite(d):
                continue
            if test(construct_path(g, radii, table, oracle, a, b), d):
                found.append((a, b))
                if len(found) > limit:
                    return found
    return found


def yao_path(table: ConeTable, A: int, B: int) -> Optional[Path]:
    """Pure cone routing Z_{j+1} = Y(i_{Z_j,B}, Z_j) from `A` to `B`.

    Returns
    -------
    Path or None
        None when an empty cone is met or the walk does not finish in
        n steps.

    """
    g = table.graph
    A = g.check_vertex(A)
    B = g.check_vertex(B)
    eps = table.spec.epsilon
    tau = table.spec.tau
    vertices = [A]
    length = 0.
    z = A
    while z != B:
        i = acc.cone_of(g.points, z, B, eps, tau)
        y = -1 if i < 0 else int(table.y[z, i])
        if y < 0 or len(vertices) > g.n:
            return None
        length += float(acc.euclid(g.points, z, y))
        vertices.append(y)
        z = y
    return Path(vertices, length)


def yao_stretch_bound(epsilon: float) -> float:
    """(cos eps - sin eps)^(-1), the stretch of cone routing on a
    complete graph, inf where it does not apply."""
    c = math.cos(epsilon) - math.sin(epsilon)
    return 1 / c if c > 0 else math.inf


def yao_stretch_all(table: ConeTable, vertices: Optional[np.ndarray] = None,
                    tol: float = STRETCH_TOL) -> Dict[str, Any]:
    """Pure cone routing over all ordered pairs, comparing length / |A-B|
    with :func:`yao_stretch_bound`."""
    g = table.graph
    if vertices is None:
        vertices = np.arange(g.n, dtype=np.int64)
    vertices = np.asarray(vertices, dtype=np.int64)
    bound = yao_stretch_bound(table.spec.epsilon)
    max_ratio, argmax, violations, failures = acc.yao_walk_all(
        vertices, g.points, table.y, table.spec.epsilon, table.spec.tau,
        bound + tol
    )
    best = None
    top = 1.
    if len(vertices) > 1 and np.any(argmax >= 0):
        row = int(np.argmax(max_ratio))
        top = float(max_ratio[row])
        best = [int(vertices[row]), int(argmax[row])]
    return {
        'bound': bound,
        'max_ratio': top,
        'argmax': best,
        'violations': int(violations.sum()),
        'failures': int(failures.sum()),
    }


class StretchReport(object):
    """Stretch of a spanning subgraph against the full graph.

    Attributes
    ----------
    max_stretch : float
        Largest d'/d over connected pairs with finite d'.
    argmax : tuple or None
    histogram : dict
        Pair counts keyed by the lower edge of buckets of width
        `defaults['histogram_width']`, e.g. '1.00'.
    pairs : int
        Pairs checked.
    infinite_pairs : int
        Pairs connected in the graph but not in the subgraph.
    sampled : bool
        Only a sample of sources was checked.
    sources : int

    """

    def __init__(self, max_stretch, argmax, histogram, pairs,
                 infinite_pairs, sampled, sources):
        self.max_stretch = max_stretch
        self.argmax = argmax
        self.histogram = histogram
        self.pairs = pairs
        self.infinite_pairs = infinite_pairs
        self.sampled = sampled
        self.sources = sources

    def __repr__(self):
        return (f'StretchReport(max_stretch={self.max_stretch!r}, '
                f'pairs={self.pairs}, infinite={self.infinite_pairs})')

    def to_dict(self) -> Dict[str, Any]:
        return {
            'max_stretch': self.max_stretch,
            'argmax': None if self.argmax is None else list(self.argmax),
            'histogram': dict(self.histogram),
            'pairs': self.pairs,
            'infinite_pairs': self.infinite_pairs,
            'sampled': self.sampled,
            'sources': self.sources,
        }


def stretch_histogram(ratios: np.ndarray,
                      width: Optional[float] = None) -> Dict[str, int]:
    width = defaults['histogram_width'] if width is None else width
    # snap ratios on a bucket edge into the upper bucket
    offsets = np.round((np.asarray(ratios) - 1) / width, 9)
    buckets = np.maximum(np.floor(offsets), 0).astype(np.int64)
    values, counts = np.unique(buckets, return_counts=True)
    return {f'{1 + b * width:.2f}': int(c) for b, c in zip(values, counts)}


def verify_stretch(g: EmbeddedGraph, S: np.ndarray, oracle: ApspOracle,
                   sources: Optional[np.ndarray] = None,
                   seed: Optional[int] = None) -> StretchReport:
    """Exact stretch of the subgraph (V, S) over the oracle's vertices.

    All unordered pairs are checked when there are at most
    `defaults['stretch_full_limit']` vertices, otherwise all pairs from
    `defaults['stretch_sample_sources']` sources drawn from the stretch
    stream of `seed`.

    Parameters
    ----------
    g
        Full graph.
    S
        Mask over the edges of `g`.
    oracle
        Shortest paths of `g` from every vertex to check.
    sources
        Explicit sources, overriding the full/sampled choice.
    seed
        Seed of the source sample, `g.seed` by default.

    Returns
    -------
    StretchReport

    """
    vertices = oracle.sources
    sampled = False
    if sources is None:
        if len(vertices) <= defaults['stretch_full_limit']:
            sources = vertices
        else:
            seed = (g.seed or 0) if seed is None else seed
            size = min(defaults['stretch_sample_sources'], len(vertices))
            sources = np.sort(rng_stream(seed, STREAM_STRETCH).choice(
                vertices, size=size, replace=False))
            sampled = True
    else:
        sources = np.unique(np.asarray(sources, dtype=np.int64))
        if np.any(oracle.row_of[sources] < 0):
            raise ValueError("stretch sources must be oracle sources")
        sampled = len(sources) < len(vertices)

    sub_oracle = apsp(g.subgraph(np.asarray(S, dtype=bool)), sources)
    d = oracle.dist[oracle.row_of[sources]][:, vertices]
    d_sub = sub_oracle.dist[:, vertices]

    if sampled:
        pair_mask = vertices[None, :] != sources[:, None]
    else:
        pair_mask = vertices[None, :] > sources[:, None]
    pair_mask &= np.isfinite(d)
    infinite = pair_mask & ~np.isfinite(d_sub)
    finite = pair_mask & np.isfinite(d_sub)

    ratio = np.ones_like(d)
    ratio[finite] = d_sub[finite] / d[finite]
    best = None
    top = 1.
    if finite.any():
        masked = np.where(finite, ratio, -np.inf)
        i, j = np.unravel_index(np.argmax(masked), masked.shape)
        top = float(masked[i, j])
        best = (int(sources[i]), int(vertices[j]))

    return StretchReport(top, best, stretch_histogram(ratio[finite]),
                         int(np.count_nonzero(pair_mask)),
                         int(np.count_nonzero(infinite)), sampled,
                         len(sources))


def check_far_pairs(g: EmbeddedGraph, radii: CriticalRadii,
                    oracle: ApspOracle, epsilon: float,
                    table: Optional[ConeTable] = None) -> Dict[str, int]:
    """Empirical checks of the far pair claims.

    Counts unordered pairs with |A-B| >= R_eps and d > (1 + 4 eps) |A-B|,
    and, given a cone table, ordered pairs at range >= R_eps whose cone
    step from A is longer than eps |A-B|. Violations are reported with
    :func:`warnings.warn`, they do not stop a run.

    """
    mats = _PairMatrices(g, oracle, table)
    vs = mats.vertices
    far = mats.off_diagonal & (mats.r >= radii.R_eps)
    finite = np.isfinite(mats.d)
    farx = np.triu(far & finite & (mats.d > (1 + 4 * epsilon) * mats.r), k=1)

    out = {
        'far_pairs': int(np.count_nonzero(np.triu(far, k=1))),
        'distance_violations': int(np.count_nonzero(farx)),
        'cone_step_violations': None,
    }
    if out['distance_violations']:
        i, j = np.nonzero(farx)
        _log_pairs("far pair with d > (1+4eps)|A-B|",
                   list(zip(vs[i].tolist(), vs[j].tolist())))
    if table is not None:
        step = far & (mats.gap > epsilon * mats.r)
        out['cone_step_violations'] = int(np.count_nonzero(step))
        if out['cone_step_violations']:
            i, j = np.nonzero(step)
            _log_pairs("far pair with cone step > eps|A-B|",
                       list(zip(vs[i].tolist(), vs[j].tolist())))
    return out


def cone_occupancy(table: ConeTable, g: EmbeddedGraph,
                   radius: float) -> Dict[str, float]:
    """Fraction of (vertex, cone) slots holding a neighbour, over the
    vertices at least `radius` from the boundary of the square and over
    all vertices."""
    occupied = table.occupied()
    margin = np.minimum(g.points, 1 - g.points).min(axis=1)
    interior = margin >= radius
    return {
        'interior': (float(occupied[interior].mean()) if interior.any()
                     else math.nan),
        'all': float(occupied.mean()) if g.n else math.nan,
        'interior_vertices': int(np.count_nonzero(interior)),
    }


def size_constant(spanner: SpannerEdges, epsilon: float) -> float:
    """C = |E_eps| eps^2 / n."""
    n = spanner.graph.n
    return spanner.sizes()['E_eps'] * epsilon ** 2 / n if n else math.nan
