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

"""Lonely edges: edges {A, B} with no common neighbour X inside the
ellipse |X-A| + |X-B| <= (1+eps)|A-B|. Every (1+eps)-spanner must keep
the lonely edges that have no other short detour."""

import math

import numpy as np

from typing import Optional, Dict, Any

from spannerlab import defaults
from spannerlab import _accelerated as acc
from spannerlab.geometry import in_ellipse, ellipse_axes, ellipse_square_area
from spannerlab.instance import EmbeddedGraph, rng_stream, STREAM_LONELY
from spannerlab.paths import ApspOracle
from spannerlab.utils import report_progress

# Samples whose term is provably below this skip the quadrature
NEGLIGIBLE_TERM = 1e-15


def psi(epsilon: float) -> float:
    """Area coefficient of the ellipse, pi(1+eps)(2eps+eps^2)^(1/2)/4,
    so that its area is psi r^2 for foci at distance r."""
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    return math.pi * (1 + epsilon) * math.sqrt(2 * epsilon + epsilon ** 2) / 4


def rho_cutoff(n: int, p: float, epsilon: float) -> float:
    """(20 ln n / (n p psi))^(1/2)."""
    area = psi(epsilon)
    if area == 0:
        return math.inf
    return math.sqrt(20 * math.log(n) / (n * p * area))


def closed_form_bound(n: int, epsilon: float) -> float:
    """n pi / (3 psi)."""
    area = psi(epsilon)
    if area == 0:
        return math.inf
    return n * math.pi / (3 * area)


def is_lonely(g: EmbeddedGraph, A: int, B: int, epsilon: float) -> bool:
    """Whether edge {A, B} has no common neighbour inside its ellipse.

    Raises
    ------
    ValueError
        If {A, B} is not an edge of `g`.

    """
    if not g.has_edge(A, B):
        raise ValueError(f"({A}, {B}) is not an edge")
    a = g.points[A]
    b = g.points[B]
    common = np.intersect1d(g.neighbors(A), g.neighbors(B),
                            assume_unique=True)
    return not any(in_ellipse(a, b, epsilon, g.points[x]) for x in common)


def lonely_edges(g: EmbeddedGraph, epsilon: float) -> np.ndarray:
    """Mask of the lonely edges of `g`."""
    indptr, indices, _, _ = g.csr
    return acc.lonely_mask(g.points, indptr, indices,
                           np.ascontiguousarray(g.edges[:, 0]),
                           np.ascontiguousarray(g.edges[:, 1]),
                           float(epsilon))


def count_lonely(g: EmbeddedGraph, epsilon: float,
                 cutoff: Optional[float] = None,
                 mask: Optional[np.ndarray] = None) -> Dict[str, Any]:
    """Number of lonely edges, and of those with length at most `cutoff`
    (rho_cutoff of the graph's p by default). `mask` is a precomputed
    result of `lonely_edges`."""
    if mask is None:
        mask = lonely_edges(g, epsilon)
    if cutoff is None and g.n > 1:
        cutoff = rho_cutoff(g.n, g.p if g.p else 1., epsilon)
    below = None
    if cutoff is not None:
        below = int(np.count_nonzero(mask & (g.lengths <= cutoff)))
    return {
        'lonely_count': int(np.count_nonzero(mask)),
        'rho_cutoff': cutoff,
        'count_below_cutoff': below,
    }


def _interior_lower_area(minor):
    # quarter of the inscribed disk, which stays in the square
    return math.pi * min(minor, 0.5) ** 2 / 4


@report_progress("estimating expected lonely edges")
def expected_lonely_integral(n: int, p: float, epsilon: float,
                             samples: Optional[int] = None, seed: int = 0,
                             abs_tol: Optional[float] = None):
    """Semi-analytic expectation of the number of lonely edges.

    Draws uniform point pairs (A, B) from the lonely stream of `seed`,
    computes q = area(ellipse(A, B) n [0,1]^2) and averages
    C(n,2) p (1 - p^2 q)^(n-2). The same samples also give the variant
    C(n,2) p (1 - psi r^2 p)^n, which ignores the boundary and counts
    one edge per third point.

    Parameters
    ----------
    n, p, epsilon
        Graph size, edge probability and ellipse slack.
    samples
        Number of point pairs, at least 10^4.
    seed
        Seed of the sample stream.
    abs_tol
        Absolute tolerance of the area quadrature.

    Returns
    -------
    dict
        estimate, stderr, unclipped_estimate, unclipped_stderr, samples.

    """
    samples = defaults['lonely_samples'] if samples is None else int(samples)
    if samples < 10 ** 4:
        raise ValueError("At least 10^4 samples are needed.")
    abs_tol = defaults['quadrature_abs_tol'] if abs_tol is None else abs_tol

    rng = rng_stream(seed, STREAM_LONELY)
    a = rng.random((samples, 2))
    b = rng.random((samples, 2))
    pairs = n * (n - 1) / 2

    terms = np.empty(samples)
    report_every = max(samples // 100, 1)
    for i in range(samples):
        _, minor = ellipse_axes(a[i], b[i], epsilon)
        lower = _interior_lower_area(minor)
        # (1 - p^2 q)^(n-2) <= (1 - p^2 lower)^(n-2)
        if lower > 0 and (n - 2) * math.log1p(-p * p * lower) < \
                math.log(NEGLIGIBLE_TERM):
            terms[i] = 0.
        elif epsilon == 0 or np.array_equal(a[i], b[i]):
            terms[i] = 1.
        else:
            q = ellipse_square_area(a[i], b[i], epsilon, abs_tol=abs_tol)
            base = 1 - p * p * q
            terms[i] = base ** (n - 2) if base > 0 else 0.
        if i % report_every == 0:
            yield i / samples

    r2 = np.sum((a - b) ** 2, axis=1)
    unclipped_base = np.maximum(1 - psi(epsilon) * r2 * p, 0.)
    unclipped_terms = unclipped_base ** n

    scale = pairs * p
    return {
        'estimate': float(scale * terms.mean()),
        'stderr': float(scale * terms.std(ddof=1) / math.sqrt(samples)),
        'unclipped_estimate': float(scale * unclipped_terms.mean()),
        'unclipped_stderr': float(scale * unclipped_terms.std(ddof=1) /
                              math.sqrt(samples)),
        'samples': samples,
    }


class EssentialEdges(object):
    """Edges whose removal pushes the distance between their endpoints
    above (1+eps) times their length.

    Attributes
    ----------
    graph : EmbeddedGraph
    mask : numpy.ndarray
        Essential edges.
    candidates : int
        Edges checked with a deletion Dijkstra.

    """
    __slots__ = ['graph', 'mask', 'candidates']

    def __init__(self, graph, mask, candidates):
        self.graph = graph
        self.mask = mask
        self.candidates = candidates

    def __len__(self):
        return int(np.count_nonzero(self.mask))

    @property
    def count(self) -> int:
        return len(self)

    def edges(self) -> np.ndarray:
        return self.graph.edges[self.mask]

    def missing_from(self, spanner_mask: np.ndarray) -> np.ndarray:
        """Essential edges not in `spanner_mask`, shape (k, 2)."""
        return self.graph.edges[self.mask & ~np.asarray(spanner_mask)]


def essential_edges(g: EmbeddedGraph, epsilon: float,
                    oracle: Optional[ApspOracle] = None,
                    full_scan: bool = False,
                    lonely: Optional[np.ndarray] = None) -> EssentialEdges:
    """Find the essential edges of `g`.

    An edge with a common neighbour inside its ellipse has a two hop
    detour of length at most (1+eps)|A-B| and is not essential, so only
    lonely edges are checked unless `full_scan` is set. With an oracle
    only edges between its sources are considered.

    """
    if full_scan:
        candidates = np.ones(g.m, dtype=bool)
    else:
        candidates = lonely_edges(g, epsilon) if lonely is None else lonely
        candidates = candidates.copy()
    if oracle is not None:
        inside = oracle.row_of >= 0
        candidates &= inside[g.edges[:, 0]] & inside[g.edges[:, 1]]

    ids = np.flatnonzero(candidates)
    indptr, indices, _, weights = g.csr
    exceeds = acc.detour_exceeds(
        indptr, indices, weights,
        np.ascontiguousarray(g.edges[ids, 0]),
        np.ascontiguousarray(g.edges[ids, 1]),
        (1 + epsilon) * g.lengths[ids],
    )
    mask = np.zeros(g.m, dtype=bool)
    mask[ids[exceeds]] = True
    return EssentialEdges(g, mask, len(ids))


class LonelyReport(object):
    """Lower bound side measurements of one instance."""
    __slots__ = ['lonely_count', 'essential_count', 'closed_form_bound',
                 'integral_estimate', 'rho_cutoff', 'count_below_cutoff',
                 'essential_missing']

    def __init__(self, lonely_count, essential_count, closed_form_bound,
                 integral_estimate, rho_cutoff, count_below_cutoff,
                 essential_missing=None):
        self.lonely_count = lonely_count
        self.essential_count = essential_count
        self.closed_form_bound = closed_form_bound
        self.integral_estimate = integral_estimate
        self.rho_cutoff = rho_cutoff
        self.count_below_cutoff = count_below_cutoff
        self.essential_missing = essential_missing

    def to_dict(self) -> Dict[str, Any]:
        return {key: getattr(self, key) for key in self.__slots__}


def lonely_report(g: EmbeddedGraph, epsilon: float,
                  essential: Optional[EssentialEdges] = None,
                  estimate: Optional[Dict[str, Any]] = None,
                  spanner_mask: Optional[np.ndarray] = None,
                  mask: Optional[np.ndarray] = None) -> LonelyReport:
    counts = count_lonely(g, epsilon, mask=mask)
    missing = None
    if essential is not None and spanner_mask is not None:
        missing = int(len(essential.missing_from(spanner_mask)))
    return LonelyReport(
        counts['lonely_count'],
        None if essential is None else essential.count,
        closed_form_bound(g.n, epsilon),
        estimate,
        counts['rho_cutoff'],
        counts['count_below_cutoff'],
        missing,
    )
