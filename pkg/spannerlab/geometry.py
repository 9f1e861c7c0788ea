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

"""Planar primitives shared by the rest of the package. Distances are
always computed as ``sqrt(dx*dx + dy*dy)`` so that scalar, vectorised and
compiled versions agree bit for bit."""

import math
from collections import defaultdict
from typing import NamedTuple, Tuple, Iterator

import numpy as np
from scipy import integrate

TWO_PI = 2 * math.pi


class Point(NamedTuple):
    """A point of the embedding domain [0,1]^2."""
    x: float
    y: float

    @classmethod
    def checked(cls, x: float, y: float) -> 'Point':
        """Create a point, raising if it lies outside [0,1]^2."""
        if not (0. <= x <= 1. and 0. <= y <= 1.):
            raise ValueError(f"coordinate out of domain ({x}, {y})")
        return cls(float(x), float(y))


class ConeSpec(object):
    """Partition of directions around an apex into `tau` cones of
    angular width `epsilon`. Cone i covers polar angles
    [i*epsilon, (i+1)*epsilon), the last cone is cut at 2*pi.

    """
    __slots__ = ['epsilon', 'tau']

    def __init__(self, epsilon: float) -> None:
        """
        Parameters
        ----------
        epsilon
            Angular width of a cone in radians, at most pi/2.

        """
        epsilon = float(epsilon)
        if not (0. < epsilon <= math.pi / 2):
            raise ValueError("Cone width must be in (0, pi/2].")
        tau = math.ceil(TWO_PI / epsilon)
        # guard against rounding in the division
        while (tau - 1) * epsilon >= TWO_PI:
            tau -= 1
        while tau * epsilon < TWO_PI:
            tau += 1
        self.epsilon = epsilon
        self.tau = tau

    def __repr__(self):
        return f"ConeSpec(epsilon={self.epsilon!r}, tau={self.tau})"

    def __eq__(self, other):
        if not isinstance(other, ConeSpec):
            return NotImplemented
        return self.epsilon == other.epsilon

    def __hash__(self):
        return hash(self.epsilon)

    def bounds(self, i: int) -> Tuple[float, float]:
        """Lower and upper polar angle of cone `i`."""
        if not 0 <= i < self.tau:
            raise ValueError(f"Cone index {i} out of range.")
        return i * self.epsilon, min((i + 1) * self.epsilon, TWO_PI)

    def bisectors(self) -> np.ndarray:
        """Polar angle of the bisector of every cone, shape (tau,)."""
        lower = np.arange(self.tau) * self.epsilon
        upper = np.minimum(lower + self.epsilon, TWO_PI)
        return (lower + upper) / 2


def cone_bounds(i: int, spec: ConeSpec) -> Tuple[float, float, float]:
    """Lower bound, upper bound and bisector angle of cone `i`."""
    lower, upper = spec.bounds(i)
    return lower, upper, (lower + upper) / 2


def dist(a, b) -> float:
    """Euclidean distance between two points."""
    dx = float(a[0]) - float(b[0])
    dy = float(a[1]) - float(b[1])
    return math.sqrt(dx * dx + dy * dy)


def dist_many(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Element-wise Euclidean distance between two arrays of points,
    shape (..., 2).

    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    dx = a[..., 0] - b[..., 0]
    dy = a[..., 1] - b[..., 1]
    return np.sqrt(dx * dx + dy * dy)


def _polar_angle(dx, dy):
    phi = math.atan2(dy, dx)
    if phi < 0:
        phi += TWO_PI
    return phi


def cone_index(apex, target, spec: ConeSpec) -> int:
    """Cone of `apex` that contains `target`.

    Parameters
    ----------
    apex, target
        Points as (x, y).
    spec
        Cone partition.

    Returns
    -------
    int
        floor(phi / epsilon) where phi in [0, 2pi) is the polar angle of
        target - apex.

    Raises
    ------
    ValueError
        If the points coincide.

    """
    dx = float(target[0]) - float(apex[0])
    dy = float(target[1]) - float(apex[1])
    if dx == 0. and dy == 0.:
        raise ValueError("undefined direction")
    i = int(math.floor(_polar_angle(dx, dy) / spec.epsilon))
    # phi can round up to 2pi
    return min(i, spec.tau - 1)


def cone_index_many(apex: np.ndarray, target: np.ndarray,
                    spec: ConeSpec) -> np.ndarray:
    """Vectorised :func:`cone_index`. Coincident pairs give -1."""
    apex = np.asarray(apex, dtype=float)
    target = np.asarray(target, dtype=float)
    dx = target[..., 0] - apex[..., 0]
    dy = target[..., 1] - apex[..., 1]
    phi = np.arctan2(dy, dx)
    phi = np.where(phi < 0, phi + TWO_PI, phi)
    idx = np.floor(phi / spec.epsilon).astype(np.int64)
    idx = np.minimum(idx, spec.tau - 1)
    return np.where((dx == 0.) & (dy == 0.), -1, idx)


def in_ellipse(a, b, epsilon: float, x) -> bool:
    """Whether `x` lies in the ellipse with foci `a`, `b` made of the
    points whose distances to the foci sum to at most
    (1 + epsilon) |a - b|. The boundary is included.

    Raises
    ------
    ValueError
        If the foci coincide.

    """
    r = dist(a, b)
    if r == 0.:
        raise ValueError("degenerate ellipse")
    return dist(x, a) + dist(x, b) <= (1 + epsilon) * r


def ellipse_axes(a, b, epsilon: float) -> Tuple[float, float]:
    """Semi-major and semi-minor axis of the ellipse of :func:`in_ellipse`.
    The full axes are (1+eps)r and (2eps+eps^2)^(1/2) r.

    """
    r = dist(a, b)
    return (1 + epsilon) * r / 2, math.sqrt(2 * epsilon + epsilon ** 2) * r / 2


class _EllipseChords(object):
    """Vertical and horizontal chords of a rotated ellipse, used to
    integrate its area over the unit square."""

    def __init__(self, a, b, epsilon):
        self.cx = (float(a[0]) + float(b[0])) / 2
        self.cy = (float(a[1]) + float(b[1])) / 2
        r = dist(a, b)
        self.major, self.minor = ellipse_axes(a, b, epsilon)
        self.cos = (float(b[0]) - float(a[0])) / r
        self.sin = (float(b[1]) - float(a[1])) / r
        inv_a2 = 1 / self.major ** 2
        inv_b2 = 1 / self.minor ** 2
        # s^2/a^2 + t^2/b^2 as q_xx dx^2 + 2 q_xy dx dy + q_yy dy^2
        self.q_xx = self.cos ** 2 * inv_a2 + self.sin ** 2 * inv_b2
        self.q_yy = self.sin ** 2 * inv_a2 + self.cos ** 2 * inv_b2
        self.q_xy = self.cos * self.sin * (inv_a2 - inv_b2)
        self.half_width = math.sqrt(
            (self.major * self.cos) ** 2 + (self.minor * self.sin) ** 2)
        self.half_height = math.sqrt(
            (self.major * self.sin) ** 2 + (self.minor * self.cos) ** 2)

    def inside_square(self):
        return (self.cx - self.half_width >= 0. and
                self.cx + self.half_width <= 1. and
                self.cy - self.half_height >= 0. and
                self.cy + self.half_height <= 1.)

    @staticmethod
    def _roots(qa, qb, qc):
        disc = qb * qb - 4 * qa * qc
        if disc < 0:
            return None
        sq = math.sqrt(disc)
        return (-qb - sq) / (2 * qa), (-qb + sq) / (2 * qa)

    def vertical(self, x):
        dx = x - self.cx
        roots = self._roots(self.q_yy, 2 * self.q_xy * dx,
                            self.q_xx * dx * dx - 1)
        if roots is None:
            return None
        return self.cy + roots[0], self.cy + roots[1]

    def horizontal(self, y):
        dy = y - self.cy
        roots = self._roots(self.q_xx, 2 * self.q_xy * dy,
                            self.q_yy * dy * dy - 1)
        if roots is None:
            return None
        return self.cx + roots[0], self.cx + roots[1]

    def clipped_chord(self, x):
        chord = self.vertical(x)
        if chord is None:
            return 0.
        return max(0., min(chord[1], 1.) - max(chord[0], 0.))


def ellipse_square_area(a, b, epsilon: float, abs_tol: float = 1e-9,
                        exact_interior: bool = True) -> float:
    """Area of the intersection of the ellipse of :func:`in_ellipse`
    with the unit square.

    The inner integral over y is evaluated exactly from the chord of the
    ellipse, the outer integral over x with adaptive quadrature split at
    every x where the clipping to the square changes.

    Parameters
    ----------
    a, b
        Foci, inside the unit square.
    epsilon
        Stretch slack of the ellipse.
    abs_tol
        Absolute tolerance passed to the quadrature.
    exact_interior
        Return pi*a*b directly when the ellipse lies inside the square.

    Returns
    -------
    float

    """
    if epsilon == 0.:
        return 0.
    if dist(a, b) == 0.:
        raise ValueError("degenerate ellipse")
    chords = _EllipseChords(a, b, epsilon)
    if exact_interior and chords.inside_square():
        return math.pi * chords.major * chords.minor

    x_lo = max(chords.cx - chords.half_width, 0.)
    x_hi = min(chords.cx + chords.half_width, 1.)
    if x_hi <= x_lo:
        return 0.
    breaks = {x_lo, x_hi}
    for y in (0., 1.):
        crossing = chords.horizontal(y)
        if crossing is None:
            continue
        breaks.update(x for x in crossing if x_lo < x < x_hi)
    breaks = sorted(breaks)

    area = 0.
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        if hi <= lo:
            continue
        piece, _ = integrate.quad(chords.clipped_chord, lo, hi,
                                  epsabs=abs_tol, epsrel=0., limit=200)
        area += piece
    return area


class SpatialGrid(object):
    """Uniform bucket grid over the unit square used to find close pairs
    of points without an all-pairs scan.

    Attributes
    ----------
    side : float
        Side length of a cell.
    cells : dict
        Point ids in each occupied cell, keyed by (cx, cy).

    """
    # offsets covering every neighbouring cell pair exactly once
    _forward = ((0, 0), (1, 0), (-1, 1), (0, 1), (1, 1))

    def __init__(self, points: np.ndarray, side: float) -> None:
        if side <= 0:
            raise ValueError("Cell side must be positive.")
        self.points = np.asarray(points, dtype=float)
        self.side = float(side)
        n_cells = max(int(math.ceil(1. / self.side)), 1)
        cell = np.floor(self.points / self.side).astype(np.int64)
        cell = np.clip(cell, 0, n_cells - 1)

        cells = defaultdict(list)
        for i, (cx, cy) in enumerate(cell):
            cells[(cx, cy)].append(i)
        self.cells = {k: np.array(v, dtype=np.int64) for k, v in cells.items()}

    def candidate_pairs(self) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
        """Candidate pairs (i, j) of points in the same or in adjacent
        cells, yielded in blocks. Every unordered pair of points in
        adjacent cells appears once, with i != j.

        """
        for (cx, cy) in sorted(self.cells):
            here = self.cells[(cx, cy)]
            for (ox, oy) in self._forward:
                there = self.cells.get((cx + ox, cy + oy))
                if there is None:
                    continue
                ii, jj = np.meshgrid(here, there, indexing='ij')
                ii = ii.ravel()
                jj = jj.ravel()
                if (ox, oy) == (0, 0):
                    keep = ii < jj
                    ii, jj = ii[keep], jj[keep]
                yield ii, jj

    def pairs_within(self, radius: float) -> Tuple[np.ndarray, np.ndarray]:
        """All pairs (u, v), u < v, at distance at most `radius`, sorted
        by (u, v). The radius must not exceed the cell side.

        """
        if radius > self.side:
            raise ValueError("Radius larger than the grid cell side.")
        us = []
        vs = []
        for ii, jj in self.candidate_pairs():
            d = dist_many(self.points[ii], self.points[jj])
            keep = d <= radius
            us.append(np.minimum(ii[keep], jj[keep]))
            vs.append(np.maximum(ii[keep], jj[keep]))
        if not us:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
        u = np.concatenate(us)
        v = np.concatenate(vs)
        order = np.lexsort((v, u))
        return u[order], v[order]
