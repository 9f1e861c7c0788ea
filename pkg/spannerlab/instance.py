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

import numpy as np
import networkx as nx

from typing import Optional, Dict, Any

from spannerlab import defaults
from spannerlab.geometry import dist_many, SpatialGrid
from spannerlab.utils import ConfigError

MODELS = ('gnp', 'rgg')

# Independent random streams of one seed
STREAM_POINTS = 0
STREAM_EDGES = 1
STREAM_STRETCH = 2
STREAM_LONELY = 3


def rng_stream(seed: int, stream: int) -> np.random.Generator:
    """Counter based random generator for one stream of a seed.

    Parameters
    ----------
    seed
        Non-negative 64-bit seed.
    stream
        Stream number, see the `STREAM_*` constants.

    Returns
    -------
    numpy.random.Generator

    """
    seq = np.random.SeedSequence(int(seed), spawn_key=(int(stream),))
    return np.random.Generator(np.random.Philox(seq))


class Params(object):
    """Parameters of one random instance and of the spanner built on it.

    Attributes
    ----------
    n : int
        Number of vertices.
    p : float
        Edge probability, 1 for the geometric model.
    epsilon : float
        Spanner slack and cone width.
    theta : float
        Exponent in the critical radii.
    M, K : float
        Constants of the short edge and far pair radii.
    seed : int
        Seed of all random streams.
    model : str
        'gnp' for a random embedding of G(n,p), 'rgg' for the random
        geometric graph of the given radius.
    radius : float or None
        Connection radius of the geometric model.

    """
    __slots__ = ['n', 'p', 'epsilon', 'theta', 'M', 'K', 'seed', 'model',
                 'radius']

    def __init__(self, n: int, p: float = 1.0, epsilon: float = 0.25,
                 theta: float = 0.5, M: Optional[float] = None,
                 K: Optional[float] = None, seed: int = 0,
                 model: str = 'gnp', radius: Optional[float] = None):
        if model not in MODELS:
            raise ConfigError('model', f"must be one of {', '.join(MODELS)}")
        self.model = model
        self.n = self._check_int('n', n, 2)
        self.seed = self._check_int('seed', seed, 0)
        if self.seed >= 2 ** 64:
            raise ConfigError('seed', "must fit in 64 bits")

        if model == 'rgg':
            if radius is None:
                raise ConfigError('radius', "required by the rgg model")
            radius = self._check_float('radius', radius)
            if not 0 < radius <= math.sqrt(2):
                raise ConfigError('radius', "must be in (0, sqrt(2)]")
            p = 1.0
        elif radius is not None:
            raise ConfigError('radius', "only valid for the rgg model")
        self.radius = radius

        self.p = self._check_float('p', p)
        if not 0 < self.p <= 1:
            raise ConfigError('p', "must be in (0, 1]")
        self.epsilon = self._check_float('epsilon', epsilon)
        if not 0 < self.epsilon <= math.pi / 2:
            raise ConfigError('epsilon', "must be in (0, pi/2]")
        self.theta = self._check_float('theta', theta)
        if self.theta <= 0:
            raise ConfigError('theta', "must be positive")

        self.M = self._check_float('M', defaults['M'] if M is None else M)
        if self.M <= 0:
            raise ConfigError('M', "must be positive")
        self.K = self._check_float('K', defaults['K'] if K is None else K)
        if self.K <= 0:
            raise ConfigError('K', "must be positive")

    @staticmethod
    def _check_int(field, value, minimum):
        try:
            if isinstance(value, float) and not value.is_integer():
                raise ValueError
            value = int(value)
        except (TypeError, ValueError):
            raise ConfigError(field, f"not an integer: {value!r}")
        if value < minimum:
            raise ConfigError(field, f"must be at least {minimum}")
        return value

    @staticmethod
    def _check_float(field, value):
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise ConfigError(field, f"not a number: {value!r}")
        if not math.isfinite(value):
            raise ConfigError(field, "must be finite")
        return value

    def __repr__(self):
        fields = ', '.join(f'{k}={v!r}' for k, v in self.to_dict().items())
        return f'Params({fields})'

    def __eq__(self, other):
        if not isinstance(other, Params):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def to_dict(self) -> Dict[str, Any]:
        return {key: getattr(self, key) for key in self.__slots__}

    def replace(self, **changes) -> 'Params':
        """Copy of the parameters with some fields changed."""
        values = self.to_dict()
        values.update(changes)
        if values['model'] == 'gnp':
            values['radius'] = None
        return Params(**values)


class EmbeddedGraph(object):
    """Undirected graph on points of the unit square with Euclidean edge
    lengths.

    Edges are stored once, as (u, v) with u < v, sorted by (u, v). A CSR
    adjacency with neighbours sorted by id is built on first use.

    Attributes
    ----------
    points : numpy.ndarray
        Coordinates, shape (n, 2).
    edges : numpy.ndarray
        Endpoints, shape (m, 2), int64.
    lengths : numpy.ndarray
        Euclidean length of every edge, shape (m,).
    model : str
        'gnp' or 'rgg'.
    p, radius, seed
        Generation metadata, written to instance files.

    """
    __slots__ = ['points', 'edges', 'lengths', 'model', 'p', 'radius',
                 'seed', '_keys', '_csr']

    def __init__(self, points, edges, model: str = 'gnp',
                 p: Optional[float] = None, radius: Optional[float] = None,
                 seed: Optional[int] = None):
        points = np.ascontiguousarray(points, dtype=np.float64)
        if points.ndim != 2 or points.shape[1] != 2:
            points = points.reshape((-1, 2))
        if np.any((points < 0.) | (points > 1.)):
            raise ValueError("coordinate out of domain")
        n = len(points)

        edges = np.asarray(edges, dtype=np.int64).reshape((-1, 2))
        u = np.minimum(edges[:, 0], edges[:, 1])
        v = np.maximum(edges[:, 0], edges[:, 1])
        if np.any(u == v):
            raise ValueError("self-loop")
        if len(u) and (u.min() < 0 or v.max() >= n):
            raise ValueError("vertex id out of range")
        order = np.lexsort((v, u))
        u, v = u[order], v[order]
        keys = u * n + v
        if np.any(keys[1:] == keys[:-1]):
            raise ValueError("duplicate edge")

        self.points = points
        self.edges = np.ascontiguousarray(np.stack((u, v), axis=1))
        self.lengths = dist_many(points[u], points[v])
        self.model = model
        self.p = p
        self.radius = radius
        self.seed = seed
        self._keys = keys
        self._csr = None

    def __repr__(self):
        return (f'EmbeddedGraph(n={self.n}, m={self.m}, '
                f'model={self.model!r})')

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def csr(self):
        """CSR adjacency (indptr, indices, slot_edge, slot_length), with
        the neighbours of each vertex sorted by id. `slot_edge` maps each
        slot to its edge id."""
        if self._csr is None:
            n = self.n
            m = self.m
            src = np.concatenate((self.edges[:, 0], self.edges[:, 1]))
            dst = np.concatenate((self.edges[:, 1], self.edges[:, 0]))
            eid = np.concatenate((np.arange(m), np.arange(m)))
            order = np.lexsort((dst, src))
            indptr = np.zeros(n + 1, dtype=np.int64)
            np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
            indices = np.ascontiguousarray(dst[order])
            slot_edge = np.ascontiguousarray(eid[order])
            self._csr = (indptr, indices, slot_edge,
                         np.ascontiguousarray(self.lengths[slot_edge]))
        return self._csr

    def check_vertex(self, v) -> int:
        if not (0 <= int(v) < self.n):
            raise ValueError(f"invalid vertex id {v}")
        return int(v)

    def edge_index(self, u, v):
        """Id of edge {u, v}, -1 where it is not an edge. Accepts scalars
        or arrays."""
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        keys = np.minimum(u, v) * self.n + np.maximum(u, v)
        idx = np.searchsorted(self._keys, keys)
        idx_c = np.minimum(idx, max(self.m - 1, 0))
        found = (idx < self.m) & (u != v)
        if self.m:
            found &= self._keys[idx_c] == keys
        out = np.where(found, idx_c, -1)
        return int(out) if out.ndim == 0 else out

    def has_edge(self, u: int, v: int) -> bool:
        return self.edge_index(u, v) >= 0

    def neighbors(self, v: int) -> np.ndarray:
        v = self.check_vertex(v)
        indptr, indices, _, _ = self.csr
        return indices[indptr[v]:indptr[v + 1]]

    def degree(self) -> np.ndarray:
        return np.diff(self.csr[0])

    def subgraph(self, mask) -> 'EmbeddedGraph':
        """Graph on the same points keeping only the edges selected by a
        boolean mask over edge ids."""
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (self.m,):
            raise ValueError("Edge mask must have one entry per edge.")
        return EmbeddedGraph(self.points, self.edges[mask], model=self.model,
                             p=self.p, radius=self.radius, seed=self.seed)

    def to_networkx(self) -> nx.Graph:
        """Export as a networkx graph with `pos` node and `weight` edge
        attributes."""
        graph = nx.Graph()
        for i, (x, y) in enumerate(self.points):
            graph.add_node(i, pos=(float(x), float(y)))
        graph.add_weighted_edges_from(
            (int(u), int(v), float(w))
            for (u, v), w in zip(self.edges, self.lengths)
        )
        return graph

    def identical(self, other: 'EmbeddedGraph') -> bool:
        """Bitwise equality of coordinates and edge set."""
        return (self.points.shape == other.points.shape and
                self.points.tobytes() == other.points.tobytes() and
                np.array_equal(self.edges, other.edges))


def sample_points(n: int, seed: int) -> np.ndarray:
    """`n` points uniform on the unit square, shape (n, 2)."""
    if n < 0:
        raise ValueError("Number of points must be non-negative.")
    return rng_stream(seed, STREAM_POINTS).random((n, 2))


def sample_gnp_embedding(points: np.ndarray, p: float,
                         seed: int) -> EmbeddedGraph:
    """Random embedding of G(n,p): every pair of points is joined
    independently with probability `p`.

    Pairs are drawn in row-major order of the upper triangle from the
    edge stream of `seed`, so the same points can carry several edge
    samples.

    """
    if not 0 <= p <= 1:
        raise ValueError("Edge probability must be in [0, 1].")
    n = len(points)
    rng = rng_stream(seed, STREAM_EDGES)
    u, v = np.triu_indices(n, k=1)
    keep = rng.random(len(u)) < p
    return EmbeddedGraph(points, np.stack((u[keep], v[keep]), axis=1),
                         model='gnp', p=float(p), seed=seed)


def geometric_graph(points: np.ndarray, r: float,
                    seed: Optional[int] = None) -> EmbeddedGraph:
    """Random geometric graph joining points at distance at most `r`."""
    if r < 0:
        raise ValueError("Radius must be non-negative.")
    points = np.asarray(points, dtype=np.float64)
    n = len(points)
    if r >= math.sqrt(2):
        u, v = np.triu_indices(n, k=1)
    else:
        side = max(r, 1. / max(math.ceil(math.sqrt(n)), 1))
        u, v = SpatialGrid(points, side).pairs_within(r)
    return EmbeddedGraph(points, np.stack((u, v), axis=1), model='rgg',
                         radius=float(r), seed=seed)


def generate_instance(params: Params) -> EmbeddedGraph:
    """Sample the graph described by `params`."""
    points = sample_points(params.n, params.seed)
    if params.model == 'rgg':
        return geometric_graph(points, params.radius, seed=params.seed)
    return sample_gnp_embedding(points, params.p, params.seed)


def save_instance(g: EmbeddedGraph, path, overwrite: bool = False) -> None:
    """Write `g` in the instance file format."""
    from spannerlab.file_writers import save_instance as _save
    _save(g, path, overwrite=overwrite)


def load_instance(path) -> EmbeddedGraph:
    """Read a graph from an instance file.

    Raises
    ------
    InstanceFormatError
        If the file is malformed, naming the offending line.

    """
    from spannerlab.file_readers import load_instance as _load
    return _load(path)
