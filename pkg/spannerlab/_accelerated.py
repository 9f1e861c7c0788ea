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

"""Compiled kernels. Graphs are passed as CSR arrays (indptr, indices)
with neighbours sorted by id, plus per-slot edge ids and lengths."""

import heapq
import math

from numba import njit, prange
import numpy as np

# Walk outcome
STATUS_OK = 0
STATUS_DISCONNECTED = 1
STATUS_STEP_CAP = 2

# Branch tags of a CONSTRUCT step
TAG_D1 = 1
TAG_D2 = 2
TAG_D3 = 3
TAG_D4 = 4

TWO_PI = 2 * math.pi


@njit(cache=True)
def euclid(points, a, b):
    dx = points[a, 0] - points[b, 0]
    dy = points[a, 1] - points[b, 1]
    return math.sqrt(dx * dx + dy * dy)


@njit(cache=True)
def cone_of(points, apex, target, eps, tau):
    """Cone of `apex` holding `target`, -1 for coincident points."""
    dx = points[target, 0] - points[apex, 0]
    dy = points[target, 1] - points[apex, 1]
    if dx == 0. and dy == 0.:
        return -1
    phi = math.atan2(dy, dx)
    if phi < 0:
        phi += TWO_PI
    i = int(math.floor(phi / eps))
    if i > tau - 1:
        i = tau - 1
    return i


@njit(cache=True)
def find_slot(indptr, indices, u, v):
    """CSR slot of neighbour `v` of `u`, -1 if not adjacent."""
    lo = indptr[u]
    hi = indptr[u + 1]
    k = lo + np.searchsorted(indices[lo:hi], v)
    if k < hi and indices[k] == v:
        return k
    return -1


@njit(cache=True)
def dijkstra_into(indptr, indices, weights, source, skip_u, skip_v,
                  target, limit, dist, pred):
    """Binary heap Dijkstra from `source` writing into `dist` and `pred`.

    Among equal keys the lower vertex id settles first and the
    predecessor with the lowest id is kept. The edge {skip_u, skip_v} is
    ignored (pass -1 for none). The search stops once `target` settles
    or the smallest key exceeds `limit`.

    """
    n = len(indptr) - 1
    for v in range(n):
        dist[v] = np.inf
        pred[v] = -1
    settled = np.zeros(n, dtype=np.bool_)
    dist[source] = 0.
    heap = [(0., source)]
    while len(heap) > 0:
        d, u = heapq.heappop(heap)
        if settled[u]:
            continue
        if d > limit:
            break
        settled[u] = True
        if u == target:
            break
        for k in range(indptr[u], indptr[u + 1]):
            v = indices[k]
            if settled[v]:
                continue
            if (u == skip_u and v == skip_v) or (u == skip_v and v == skip_u):
                continue
            nd = d + weights[k]
            if nd < dist[v]:
                dist[v] = nd
                pred[v] = u
                heapq.heappush(heap, (nd, v))
            elif nd == dist[v] and u < pred[v]:
                pred[v] = u


@njit(parallel=True, cache=True)
def apsp_rows(indptr, indices, weights, sources, dist, pred):
    """One Dijkstra per source, row r of `dist`/`pred` for sources[r]."""
    for r in prange(len(sources)):
        dijkstra_into(indptr, indices, weights, sources[r], -1, -1, -1,
                      np.inf, dist[r], pred[r])


@njit(cache=True)
def pair_dist(dist, row_of, u, v):
    """Shortest path distance read from the row of the lower endpoint."""
    s = min(u, v)
    t = max(u, v)
    row = row_of[s]
    if row < 0:
        row = row_of[t]
        t = s
    if row < 0:
        return np.inf
    return dist[row, t]


@njit(cache=True)
def mark_paths(indptr, indices, slot_edge, pred, row_of, pair_a, pair_b,
               mask):
    """Set `mask` for every edge on the canonical shortest path of each
    pair, walked from the higher endpoint back to the lower one."""
    for k in range(len(pair_a)):
        s = min(pair_a[k], pair_b[k])
        x = max(pair_a[k], pair_b[k])
        row = row_of[s]
        while x != s:
            y = pred[row, x]
            if y < 0:
                break
            mask[slot_edge[find_slot(indptr, indices, x, y)]] = True
            x = y


@njit(parallel=True, cache=True)
def nearest_in_cones(points, indptr, indices, eps, tau, theta):
    """Per vertex and cone the adjacent neighbour minimising distance
    (Yao) or projection onto the cone bisector (Theta), -1 if the cone
    is empty. Ties go to the lowest id."""
    n = len(indptr) - 1
    y = np.full((n, tau), -1, dtype=np.int64)
    for a in prange(n):
        best = np.full(tau, np.inf)
        for k in range(indptr[a], indptr[a + 1]):
            b = indices[k]
            i = cone_of(points, a, b, eps, tau)
            if i < 0:
                continue
            dx = points[b, 0] - points[a, 0]
            dy = points[b, 1] - points[a, 1]
            if theta:
                lower = i * eps
                upper = min((i + 1) * eps, TWO_PI)
                mid = (lower + upper) / 2
                key = dx * math.cos(mid) + dy * math.sin(mid)
            else:
                key = math.sqrt(dx * dx + dy * dy)
            # neighbours are sorted so strict < keeps the lowest id
            if key < best[i]:
                best[i] = key
                y[a, i] = b
    return y


@njit(parallel=True, cache=True)
def cone_matrix(points, vertices, eps, tau):
    """Cone of vertices[j] around vertices[i] for all pairs."""
    k = len(vertices)
    out = np.empty((k, k), dtype=np.int64)
    for i in prange(k):
        for j in range(k):
            out[i, j] = cone_of(points, vertices[i], vertices[j], eps, tau)
    return out


@njit(cache=True)
def _splice(indptr, indices, slot_edge, pred, row_of, z, b, spanner,
            used):
    """Walk the canonical path P_{z,b}, marking `used` and returning
    whether all its edges are in `spanner`."""
    s = min(z, b)
    x = max(z, b)
    row = row_of[s]
    contained = True
    while x != s:
        y = pred[row, x]
        if y < 0:
            break
        e = slot_edge[find_slot(indptr, indices, x, y)]
        if not spanner[e]:
            contained = False
        used[e] = True
        x = y
    return contained


@njit(cache=True)
def construct_walk(a, b, points, indptr, indices, slot_edge, slot_length,
                   y, eps, tau, r_eps, R_eps, dist, pred, row_of, max_steps,
                   spanner, used, waypoints):
    """Run CONSTRUCT from `a` to `b`.

    Returns
    -------
    steps : int
        Number of D4 steps, the waypoints are waypoints[:steps + 1].
    length : float
        Total trace length.
    splice : int
        Vertex where the shortest path was spliced in, -1 if none.
    tag : int
        Branch that ended the walk.
    status : int
        STATUS_* outcome.
    far : bool
        D2 or D3 fired at a waypoint further than R_eps from `b`.
    contained : bool
        Every trace edge is in `spanner`.
    monotone : bool
        Distance to `b` strictly decreased over every D4 step.

    """
    z = a
    length = 0.
    steps = 0
    waypoints[0] = a
    contained = True
    monotone = True
    while True:
        r_zb = euclid(points, z, b)
        tag = TAG_D4
        yv = -1
        slot = find_slot(indptr, indices, z, b)
        if slot >= 0 and slot_length[slot] <= r_eps:
            tag = TAG_D1
        else:
            i = cone_of(points, z, b, eps, tau)
            if i >= 0:
                yv = y[z, i]
            gap = np.inf if yv < 0 else euclid(points, z, yv)
            if gap > eps * r_zb:
                tag = TAG_D2
            elif (pair_dist(dist, row_of, yv, b) >=
                  (1 + 5 * eps) * euclid(points, yv, b)):
                tag = TAG_D3

        if tag != TAG_D4:
            d_zb = pair_dist(dist, row_of, z, b)
            if d_zb == np.inf:
                return (steps, length, z, tag, STATUS_DISCONNECTED, False,
                        False, monotone)
            far = tag != TAG_D1 and r_zb > R_eps
            if not _splice(indptr, indices, slot_edge, pred, row_of, z, b,
                           spanner, used):
                contained = False
            return (steps, length + d_zb, z, tag, STATUS_OK, far, contained,
                    monotone)

        step = euclid(points, z, yv)
        e = slot_edge[find_slot(indptr, indices, z, yv)]
        if not spanner[e]:
            contained = False
        used[e] = True
        if euclid(points, yv, b) >= r_zb:
            monotone = False
        length += step
        steps += 1
        z = yv
        if steps > max_steps:
            return (steps - 1, length, -1, TAG_D4, STATUS_STEP_CAP, False,
                    contained, monotone)
        waypoints[steps] = z
        if z == b:
            return (steps, length, -1, TAG_D4, STATUS_OK, False, contained,
                    monotone)


@njit(parallel=True, cache=True)
def construct_all(vertices, points, indptr, indices, slot_edge, slot_length,
                  y, eps, tau, r_eps, R_eps, dist, pred, row_of, spanner,
                  used, tol):
    """CONSTRUCT over all ordered pairs of `vertices`, summarised per
    source row.

    Returns
    -------
    max_ratio, argmax : per-row largest L/d and its target
    counts : (k, 10) int64 with columns
        0 pairs, 1 stretch violations (L > (1 + 7 eps) d + tol),
        2 far-branch traces, 3 containment failures on far-branch traces,
        4 containment failures on the others, 5 monotonicity failures,
        6 D1, 7 D2, 8 D3 endings, 9 D4 steps
    status : (k, 2) int64
        Disconnected pairs and step-cap hits.

    """
    k = len(vertices)
    n = len(indptr) - 1
    max_ratio = np.zeros(k)
    argmax = np.full(k, -1, dtype=np.int64)
    counts = np.zeros((k, 10), dtype=np.int64)
    status = np.zeros((k, 2), dtype=np.int64)
    bound = 1 + 7 * eps
    # rows share `used`, every write stores True
    for r in prange(k):
        a = vertices[r]
        waypoints = np.empty(n + 1, dtype=np.int64)
        for c in range(k):
            b = vertices[c]
            if a == b:
                continue
            steps, length, splice, tag, st, far, contained, monotone = \
                construct_walk(a, b, points, indptr, indices, slot_edge,
                               slot_length, y, eps, tau, r_eps, R_eps, dist,
                               pred, row_of, n, spanner, used, waypoints)
            if st == STATUS_DISCONNECTED:
                status[r, 0] += 1
                continue
            if st == STATUS_STEP_CAP:
                status[r, 1] += 1
                continue
            d = pair_dist(dist, row_of, a, b)
            ratio = length / d
            counts[r, 0] += 1
            if ratio > max_ratio[r]:
                max_ratio[r] = ratio
                argmax[r] = b
            if length > bound * d + tol:
                counts[r, 1] += 1
            if far:
                counts[r, 2] += 1
                if not contained:
                    counts[r, 3] += 1
            elif not contained:
                counts[r, 4] += 1
            if not monotone:
                counts[r, 5] += 1
            if tag != TAG_D4:
                counts[r, 5 + tag] += 1
            counts[r, 9] += steps
    return max_ratio, argmax, counts, status


@njit(cache=True)
def yao_walk(a, b, points, y, eps, tau, max_steps):
    """Pure cone routing from `a` to `b`. Returns (steps, length,
    status), STATUS_DISCONNECTED when an empty cone is met."""
    z = a
    length = 0.
    steps = 0
    while z != b:
        i = cone_of(points, z, b, eps, tau)
        yv = -1 if i < 0 else y[z, i]
        if yv < 0:
            return steps, length, STATUS_DISCONNECTED
        length += euclid(points, z, yv)
        z = yv
        steps += 1
        if steps > max_steps:
            return steps, length, STATUS_STEP_CAP
    return steps, length, STATUS_OK


@njit(parallel=True, cache=True)
def yao_walk_all(vertices, points, y, eps, tau, bound):
    """Pure cone routing over all ordered pairs of `vertices`. Per row:
    largest length/|a-b|, its target, number of ratios above `bound` and
    number of failed walks."""
    k = len(vertices)
    n = len(points)
    max_ratio = np.zeros(k)
    argmax = np.full(k, -1, dtype=np.int64)
    violations = np.zeros(k, dtype=np.int64)
    failures = np.zeros(k, dtype=np.int64)
    for r in prange(k):
        a = vertices[r]
        for c in range(k):
            b = vertices[c]
            if a == b:
                continue
            steps, length, st = yao_walk(a, b, points, y, eps, tau, n)
            if st != STATUS_OK:
                failures[r] += 1
                continue
            ratio = length / euclid(points, a, b)
            if ratio > max_ratio[r]:
                max_ratio[r] = ratio
                argmax[r] = b
            if ratio > bound:
                violations[r] += 1
    return max_ratio, argmax, violations, failures


@njit(parallel=True, cache=True)
def lonely_mask(points, indptr, indices, edge_u, edge_v, eps):
    """Whether each edge has no common neighbour inside its ellipse."""
    m = len(edge_u)
    out = np.ones(m, dtype=np.bool_)
    for e in prange(m):
        a = edge_u[e]
        b = edge_v[e]
        bound = (1 + eps) * euclid(points, a, b)
        i = indptr[a]
        j = indptr[b]
        while i < indptr[a + 1] and j < indptr[b + 1]:
            x = indices[i]
            w = indices[j]
            if x < w:
                i += 1
            elif w < x:
                j += 1
            else:
                if euclid(points, x, a) + euclid(points, x, b) <= bound:
                    out[e] = False
                    break
                i += 1
                j += 1
    return out


@njit(parallel=True, cache=True)
def detour_exceeds(indptr, indices, weights, edge_u, edge_v, bounds):
    """Whether the shortest u-v distance avoiding edge {u, v} exceeds
    `bounds` for each candidate edge."""
    n = len(indptr) - 1
    m = len(edge_u)
    out = np.zeros(m, dtype=np.bool_)
    for e in prange(m):
        dist = np.empty(n)
        pred = np.empty(n, dtype=np.int64)
        u = edge_u[e]
        v = edge_v[e]
        dijkstra_into(indptr, indices, weights, u, u, v, v, bounds[e],
                      dist, pred)
        out[e] = dist[v] > bounds[e]
    return out
