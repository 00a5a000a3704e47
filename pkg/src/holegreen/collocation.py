"""Method-of-fundamental-solutions building blocks shared by the hole kernel and the oracle.

A harmonic field is represented as a combination of fundamental solutions
centred at sources placed off the domain (plus an optional constant), with
coefficients fixed by least squares on boundary nodes.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from .geometry import DimensionConstants, HoleShape, norm

log = logging.getLogger(__name__)

SVD_CUTOFF = 1e-12
SOURCE_SHRINK = 0.7
SOURCE_INFLATE = 1.3
# hole-exterior solves need sources deeper (3D) or closer (2D, elongated holes)
# than SOURCE_SHRINK to reach a 1e-10 boundary residual
HOLE_SHRINK = {2: 0.9, 3: 0.4}
# 3D outer sources at 1.3 R leave a 1e-7 residual on the outer sphere
OUTER_INFLATE = {2: SOURCE_INFLATE, 3: 2.0}
# ellipses/spheroids: ratio of the confocal source ellipse's minor axis to the hole's
ELLIPSE_SHRINK = {2: 0.5, 3: 0.2}


class CollocationError(RuntimeError):
    pass


def fibonacci_sphere(count: int) -> np.ndarray:
    """Nearly uniform unit vectors on S^2."""
    i = np.arange(count) + 0.5
    z = 1.0 - 2.0 * i / count
    phi = math.pi * (1.0 + math.sqrt(5.0)) * i
    s = np.sqrt(1.0 - z * z)
    return np.column_stack([s * np.cos(phi), s * np.sin(phi), z])


def circle(count: int, offset: float = 0.0) -> np.ndarray:
    t = 2.0 * math.pi * (np.arange(count) + offset) / count
    return np.column_stack([np.cos(t), np.sin(t)])


def unit_directions(n: int, count: int, offset: float = 0.0) -> np.ndarray:
    if n == 2:
        return circle(count, offset)
    if n == 3:
        d = fibonacci_sphere(count)
        if offset:
            # rotate about z so check points fall between nodes
            a = 2.0 * math.pi * offset / max(count, 1) * 7.0
            rot = np.array([[math.cos(a), -math.sin(a), 0], [math.sin(a), math.cos(a), 0], [0, 0, 1]])
            d = d @ rot.T
        return d
    raise CollocationError("collocation is implemented for n = 2 and n = 3")


def star_points(hole: HoleShape, directions: np.ndarray, factor: float = 1.0) -> np.ndarray:
    return (factor * hole.radius(directions))[:, None] * directions


def _ellipse_axes(hole: HoleShape, n: int) -> np.ndarray:
    a, b = (hole.scale * v for v in hole.axes)
    return np.array([a] + [b] * (n - 1))


def hole_boundary(hole: HoleShape, n: int, count: int, offset: float = 0.0) -> np.ndarray:
    """Collocation nodes on the unit-scale hole boundary.

    Star-shaped profiles use radial projection of uniform directions.
    Ellipses use the affine image of the uniform sphere, which keeps the
    nodes dense enough at the tips of elongated shapes.
    """
    d = unit_directions(n, count, offset)
    if hole.kind == "ellipse":
        return d * _ellipse_axes(hole, n)
    return star_points(hole, d)


def hole_sources(hole: HoleShape, n: int, count: int, shrink: float | None = None) -> np.ndarray:
    """Source points inside the hole.

    Ellipses get sources on a confocal inner ellipse (minor axis scaled by
    ``shrink``), so they stay outside the focal set where the exterior
    solution continues singularly; other shapes use the boundary shrunk radially.
    """
    d = unit_directions(n, count, 0.5)
    if hole.kind == "ellipse":
        ax = _ellipse_axes(hole, n)
        tau = ELLIPSE_SHRINK[n] if shrink is None else shrink
        delta = (1.0 - tau**2) * ax.min() ** 2
        return d * np.sqrt(ax**2 - delta)
    return star_points(hole, d, HOLE_SHRINK[n] if shrink is None else shrink)


def fundamental_matrix(consts: DimensionConstants, points: np.ndarray, sources: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - sources[None, :, :]
    return consts.fundamental(norm(diff))


class RegularizedSolver:
    """Truncated-SVD least squares with column equilibration.

    Singular values below ``cutoff`` times the largest are discarded; the
    factorization is reused for every right-hand side.
    """

    def __init__(self, matrix: np.ndarray, cutoff: float = SVD_CUTOFF):
        self.shape = matrix.shape
        self.colscale = 1.0 / np.maximum(np.linalg.norm(matrix, axis=0), 1e-300)
        u, s, vt = np.linalg.svd(matrix * self.colscale, full_matrices=False)
        keep = s > cutoff * s[0]
        self.rank = int(keep.sum())
        self.condition = float(s[0] / s[-1]) if s[-1] > 0 else math.inf
        self._u = u[:, keep]
        self._sinv = 1.0 / s[keep]
        self._vt = vt[keep]
        self.matrix = matrix
        log.debug("collocation solve %s rank %d cond %.3e", matrix.shape, self.rank, self.condition)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        w = (self._u.T @ rhs) * (self._sinv if rhs.ndim == 1 else self._sinv[:, None])
        coef = self._vt.T @ w
        return coef * (self.colscale if rhs.ndim == 1 else self.colscale[:, None])

    def residual(self, coef: np.ndarray, rhs: np.ndarray) -> np.ndarray:
        return self.matrix @ coef - rhs


class SourceBasis:
    """Fundamental solutions at ``sources`` plus optional constant column.

    With ``unit_total`` the source strengths are constrained to sum to one,
    eliminated through the last source: q_last = 1 - sum(others).
    """

    def __init__(self, consts: DimensionConstants, sources: np.ndarray, constant: bool = False,
                 unit_total: bool = False):
        self.consts = consts
        self.sources = np.asarray(sources, dtype=float)
        self.constant = constant
        self.unit_total = unit_total

    @property
    def size(self) -> int:
        return len(self.sources) - (1 if self.unit_total else 0) + (1 if self.constant else 0)

    def design(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Return (matrix, offset) so that field = matrix @ w + offset."""
        a = fundamental_matrix(self.consts, points, self.sources)
        offset = np.zeros(len(points))
        if self.unit_total:
            last = a[:, -1]
            a = a[:, :-1] - last[:, None]
            offset = last
        if self.constant:
            a = np.column_stack([a, np.ones(len(points))])
        return a, offset

    def strengths(self, w: np.ndarray) -> np.ndarray:
        """Source strengths (without the constant) from solved unknowns."""
        q = w[:-1] if self.constant else w
        if self.unit_total:
            q = np.concatenate([q, 1.0 - q.sum(axis=0, keepdims=True)])
        return q

    def constant_term(self, w: np.ndarray):
        return w[-1] if self.constant else 0.0

    def evaluate(self, points: np.ndarray, w: np.ndarray) -> np.ndarray:
        """Field values; w has shape (size,) or (size, m) paired with points (m, n)."""
        a, offset = self.design(points)
        if w.ndim == 1:
            return a @ w + offset
        return np.einsum("ik,ki->i", a, w) + offset
