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

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from typing import Optional, List

from spannerlab import defaults
from spannerlab._accelerated import dijkstra_into, apsp_rows
from spannerlab.instance import EmbeddedGraph
from spannerlab.utils import report_progress, DisconnectedPairError


class DistanceField(object):
    """Single source shortest path distances and predecessors.

    Attributes
    ----------
    source : int
    dist : numpy.ndarray
        Distance to every vertex, inf where unreachable.
    pred : numpy.ndarray
        Predecessor on the shortest path, -1 for the source and
        unreachable vertices.

    """
    __slots__ = ['source', 'dist', 'pred']

    def __init__(self, source: int, dist: np.ndarray, pred: np.ndarray):
        self.source = int(source)
        self.dist = dist
        self.pred = pred

    def __repr__(self):
        return f'DistanceField(source={self.source}, n={len(self.dist)})'


class Path(object):
    __slots__ = ['vertices', 'length']

    def __init__(self, vertices: List[int], length: float):
        self.vertices = vertices
        self.length = length

    def __repr__(self):
        return f'Path({self.vertices}, length={self.length!r})'

    def __len__(self):
        return len(self.vertices)

    def edges(self):
        """Consecutive vertex pairs of the path."""
        return list(zip(self.vertices[:-1], self.vertices[1:]))


def dijkstra(g: EmbeddedGraph, s: int) -> DistanceField:
    """Exact shortest distances from `s`.

    Parameters
    ----------
    g
        Graph to search.
    s
        Source vertex.

    Returns
    -------
    DistanceField

    """
    s = g.check_vertex(s)
    indptr, indices, _, weights = g.csr
    dist = np.empty(g.n)
    pred = np.empty(g.n, dtype=np.int64)
    dijkstra_into(indptr, indices, weights, s, -1, -1, -1, np.inf,
                  dist, pred)
    return DistanceField(s, dist, pred)


def shortest_path(field: DistanceField, t: int) -> Path:
    """Path from the source of `field` to `t` following predecessors.

    Raises
    ------
    DisconnectedPairError
        If `t` is not reachable.

    """
    t = int(t)
    if not 0 <= t < len(field.dist):
        raise ValueError(f"invalid vertex id {t}")
    if not np.isfinite(field.dist[t]):
        raise DisconnectedPairError(field.source, t)
    vertices = [t]
    x = t
    while x != field.source:
        x = int(field.pred[x])
        vertices.append(x)
    vertices.reverse()
    return Path(vertices, float(field.dist[t]))


class ApspOracle(object):
    """Shortest path distances and predecessors from a set of sources.

    Attributes
    ----------
    graph : EmbeddedGraph
    sources : numpy.ndarray
        Sorted source vertices.
    row_of : numpy.ndarray
        Row of each vertex in `dist`/`pred`, -1 for non-sources.
    dist, pred : numpy.ndarray
        Shape (len(sources), n).

    """
    __slots__ = ['graph', 'sources', 'row_of', 'dist', 'pred']

    def __init__(self, graph: EmbeddedGraph, sources: np.ndarray,
                 dist: np.ndarray, pred: np.ndarray):
        self.graph = graph
        self.sources = sources
        self.row_of = np.full(graph.n, -1, dtype=np.int64)
        self.row_of[sources] = np.arange(len(sources))
        self.dist = dist
        self.pred = pred

    def __len__(self):
        return len(self.sources)

    def __repr__(self):
        return f'ApspOracle(sources={len(self)}, n={self.graph.n})'

    def _row(self, v):
        row = self.row_of[self.graph.check_vertex(v)]
        if row < 0:
            raise ValueError(f"vertex {v} is not a source of the oracle")
        return row

    def field(self, s: int) -> DistanceField:
        row = self._row(s)
        return DistanceField(s, self.dist[row], self.pred[row])

    def _canonical_source(self, u, v):
        u = self.graph.check_vertex(u)
        v = self.graph.check_vertex(v)
        lo, hi = min(u, v), max(u, v)
        if self.row_of[lo] >= 0:
            return lo, hi
        if self.row_of[hi] >= 0:
            return hi, lo
        raise ValueError(f"neither {u} nor {v} is a source of the oracle")

    def distance(self, u: int, v: int) -> float:
        """Shortest path distance, read from the row of the lower id
        endpoint when both are sources."""
        s, t = self._canonical_source(u, v)
        return float(self.dist[self.row_of[s], t])

    def path(self, u: int, v: int) -> Path:
        """Canonical shortest path from `u` to `v`. The path is computed
        from the lower id endpoint when both are sources, so
        path(u, v) is path(v, u) reversed."""
        s, t = self._canonical_source(u, v)
        path = shortest_path(self.field(s), t)
        if path.vertices[0] != u:
            path.vertices.reverse()
        return path

    def submatrix(self, vertices) -> np.ndarray:
        """Distances between all pairs of `vertices`, all of which must
        be sources."""
        vertices = np.asarray(vertices, dtype=np.int64)
        rows = self.row_of[vertices]
        if np.any(rows < 0):
            raise ValueError("all vertices must be sources of the oracle")
        return self.dist[np.ix_(rows, vertices)]


@report_progress("computing shortest paths")
def apsp(g: EmbeddedGraph, sources: Optional[np.ndarray] = None):
    """Dijkstra from every source, in chunks of `defaults['apsp_chunk']`
    sources per parallel kernel call.

    Parameters
    ----------
    g
        Graph to search.
    sources
        Source vertices, all vertices if not given.

    Returns
    -------
    ApspOracle

    """
    if sources is None:
        sources = np.arange(g.n, dtype=np.int64)
    else:
        sources = np.unique(np.asarray(sources, dtype=np.int64))
        if len(sources) and (sources[0] < 0 or sources[-1] >= g.n):
            raise ValueError("source vertex id out of range")

    indptr, indices, _, weights = g.csr
    k = len(sources)
    dist = np.empty((k, g.n))
    pred = np.empty((k, g.n), dtype=np.int64)
    chunk = max(int(defaults['apsp_chunk']), 1)
    for start in range(0, k, chunk):
        stop = min(start + chunk, k)
        apsp_rows(indptr, indices, weights, sources[start:stop],
                  dist[start:stop], pred[start:stop])
        yield stop / k

    return ApspOracle(g, sources, dist, pred)


def largest_component(g: EmbeddedGraph) -> np.ndarray:
    """Sorted vertices of the largest connected component. Between
    components of equal size the one holding the lowest vertex id wins."""
    if g.n == 0:
        return np.zeros(0, dtype=np.int64)
    indptr, indices, _, _ = g.csr
    adjacency = csr_matrix(
        (np.ones(len(indices)), indices, indptr), shape=(g.n, g.n)
    )
    _, labels = connected_components(adjacency, directed=False)
    sizes = np.bincount(labels)
    _, first = np.unique(labels, return_index=True)
    largest = np.flatnonzero(sizes == sizes.max())
    label = largest[np.argmin(first[largest])]
    return np.flatnonzero(labels == label).astype(np.int64)
