"""Dirichlet Green's function of a ball/disk and its regular part (Kelvin images)."""

from __future__ import annotations

import math

import numpy as np

from .geometry import DimensionConstants, GeometryError, PerforationConfig, as_points, norm


def kelvin_quadratic(x, y, center, radius):
    """Q(x, y) = |x-c|^2 |y-c|^2 / R^2 - 2 (x-c).(y-c) + R^2.

    Q equals ((|y-c|/R) |x - y*|)^2 with y* the reflection of y in the sphere;
    it is symmetric, polynomial, and positive for interior x, y.
    """
    a = np.asarray(x, dtype=float) - center
    b = np.asarray(y, dtype=float) - center
    aa = np.sum(a * a, axis=-1)
    bb = np.sum(b * b, axis=-1)
    ab = np.sum(a * b, axis=-1)
    return aa * bb / radius**2 - 2.0 * ab + radius**2


def image_regular(q, consts: DimensionConstants):
    """Regular part written through the Kelvin quadratic."""
    if consts.n == 2:
        return -np.log(q) / (4.0 * math.pi)
    return consts.fundamental_coefficient * q ** ((2 - consts.n) / 2)


class OuterKernel:
    """Green's function G and regular part H of the outer ball of a scene."""

    def __init__(self, config: PerforationConfig):
        self.config = config
        self.n = config.n
        self.constants = config.constants
        self.center = config.center
        self.radius = config.outer_radius
        self.tol = 1e-12

    def _check(self, *pts):
        out = []
        for p in pts:
            p = as_points(p, self.n)
            if np.any(norm(p - self.center) > self.radius * (1 + self.tol)):
                raise GeometryError("point outside Omega")
            out.append(p)
        return out

    def fundamental(self, x, y):
        return self.constants.fundamental(norm(np.asarray(x) - np.asarray(y)))

    def regular(self, x, y):
        """H(x, y); smooth up to and including x = y."""
        x, y = self._check(x, y)
        return image_regular(kelvin_quadratic(x, y, self.center, self.radius), self.constants)

    def green(self, x, y):
        x, y = self._check(x, y)
        r = norm(x - y)
        if np.any(r == 0):
            raise GeometryError("coincident points")
        return self.constants.fundamental(r) - self.regular(x, y)

    def regular_at_origin_y(self, x):
        """H(x, 0)."""
        x, = self._check(x)
        return self.regular(x, np.zeros(self.n))

    def regular_at_origin_x(self, y):
        """H(0, y)."""
        y, = self._check(y)
        return self.regular(np.zeros(self.n), y)

    def regular_origin(self) -> float:
        """H(0, 0)."""
        c2 = float(self.center @ self.center)
        q = (self.radius - c2 / self.radius) ** 2
        return float(image_regular(q, self.constants))

    def green_at_origin(self, x):
        """G(x, 0) = G(0, x)."""
        x, = self._check(x)
        r = norm(x)
        if np.any(r == 0):
            raise GeometryError("coincident points")
        return self.constants.fundamental(r) - self.regular_at_origin_y(x)

    def conformal_radius(self) -> float:
        """R_Omega = exp(-2 pi H(0, 0)), planar scenes only."""
        if self.n != 2:
            raise GeometryError("conformal radius is defined for n = 2")
        return math.exp(-2.0 * math.pi * self.regular_origin())
