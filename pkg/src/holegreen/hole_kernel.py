"""Unit-scale exterior quantities of the hole F.

For n >= 3: exterior Green's function g, its regular part h, the equilibrium
potential P and the harmonic capacity cap(F).  For n = 2: g, h, the limit
zeta(eta) of g at infinity, its log-asymptote constant zeta_inf and the inner
conformal radius r_F = exp(-2 pi zeta_inf).
"""

from __future__ import annotations

import logging
import math

import numpy as np

from . import collocation as mfs
from .geometry import DimensionConstants, GeometryError, HoleShape, as_points, norm
from .outer_kernel import image_regular, kelvin_quadratic

log = logging.getLogger(__name__)

FAR_FIELD_WINDOW = (10.0, 100.0)
ZETA_RADIUS = 1e4


class HoleKernel:
    """Common surface; subclasses supply the regular part and the potentials."""

    backend = "abstract"

    def __init__(self, shape: HoleShape, n: int):
        self.shape = shape
        self.n = n
        self.constants = DimensionConstants(n)

    def _exterior(self, *pts, tol=1e-12):
        out = []
        for p in pts:
            p = as_points(p, self.n)
            if np.any(norm(p) < self.shape.radius(p) * (1 - tol)):
                raise GeometryError("point inside the hole")
            out.append(p)
        return out

    def _need_n(self, planar: bool):
        if planar and self.n != 2:
            raise GeometryError("this quantity is defined for n = 2 only")
        if not planar and self.n < 3:
            raise GeometryError("this quantity is defined for n >= 3 only (use zeta for n = 2)")

    def regular(self, xi, eta):
        raise NotImplementedError

    def green(self, xi, eta):
        """g(xi, eta) = fundamental(xi - eta) - h(xi, eta)."""
        xi, eta = self._exterior(xi, eta)
        r = norm(xi - eta)
        if np.any(r == 0):
            raise GeometryError("coincident points")
        return self.constants.fundamental(r) - self.regular(xi, eta)

    def equilibrium_potential(self, xi):
        raise NotImplementedError

    def capacity(self) -> float:
        raise NotImplementedError

    def zeta(self, eta):
        raise NotImplementedError

    def zeta_infinity(self) -> float:
        raise NotImplementedError

    def conformal_radius(self) -> float:
        """Inner conformal radius r_F = exp(-2 pi zeta_inf)."""
        self._need_n(planar=True)
        return math.exp(-2.0 * math.pi * self.zeta_infinity())

    def far_field_capacity(self, window=FAR_FIELD_WINDOW, directions: int = 24,
                           radii: int = 16, degree: int = 6) -> float:
        """cap(F) from a least-squares fit of P(xi) |xi|^{n-2} over a radius window.

        Along each direction P |xi|^{n-2} is expanded in powers of 1/|xi|; the
        constant term is shared by all directions.
        """
        self._need_n(planar=False)
        dirs = mfs.unit_directions(self.n, directions) if self.n <= 3 else _random_dirs(self.n, directions)
        r = np.geomspace(window[0], window[1], radii)
        pts = (r[:, None, None] * dirs[None, :, :]).reshape(-1, self.n)
        vals = self.equilibrium_potential(pts) * norm(pts) ** (self.n - 2)
        vals = vals.reshape(len(r), len(dirs))
        # unknowns: shared constant, then per direction the 1/r^k coefficients
        rows = []
        for j in range(len(dirs)):
            block = np.zeros((len(r), 1 + degree * len(dirs)))
            block[:, 0] = 1.0
            for k in range(1, degree + 1):
                block[:, 1 + j * degree + (k - 1)] = (window[0] / r) ** k
            rows.append(block)
        a = np.vstack(rows)
        b = vals.T.reshape(-1)
        coef, *_ = np.linalg.lstsq(a, b, rcond=None)
        return float(coef[0] / self.constants.fundamental_coefficient)


def _random_dirs(n, count):
    rng = np.random.default_rng(12345)
    v = rng.standard_normal((count, n))
    return v / norm(v)[:, None]


class AnalyticBallHole(HoleKernel):
    """Closed forms for the unit ball / unit disk hole (exterior Kelvin images)."""

    backend = "analytic"

    def __init__(self, n: int):
        super().__init__(HoleShape.ball(), n)
        self._origin = np.zeros(n)

    def regular(self, xi, eta):
        xi, eta = self._exterior(xi, eta)
        return image_regular(kelvin_quadratic(xi, eta, self._origin, 1.0), self.constants)

    def equilibrium_potential(self, xi):
        self._need_n(planar=False)
        xi, = self._exterior(xi)
        return norm(xi) ** (2 - self.n)

    def capacity(self) -> float:
        self._need_n(planar=False)
        return (self.n - 2) * self.constants.sphere_area

    def zeta(self, eta):
        self._need_n(planar=True)
        eta, = self._exterior(eta)
        return np.log(norm(eta)) / (2.0 * math.pi)

    def zeta_infinity(self) -> float:
        self._need_n(planar=True)
        return 0.0


class CollocationHole(HoleKernel):
    """Fundamental-solution solver for the exterior of a smooth star-shaped hole.

    Sources sit inside the hole (see ``collocation.hole_sources``); nodes on the boundary.
    For n = 3 only decaying fundamental solutions are used.  For n = 2 a
    constant is added and the source strengths are constrained to total one,
    which reproduces the required logarithmic growth at infinity.
    """

    backend = "collocation"

    def __init__(self, shape: HoleShape, n: int, sources: int | None = None, nodes: int | None = None,
                 shrink: float | None = None, tol: float = 1e-10, regular_tol: float = 1e-6):
        super().__init__(shape, n)
        if n not in (2, 3):
            raise GeometryError("collocation hole kernel supports n = 2 and n = 3")
        if sources is None:
            sources = 320 if n == 2 else 800
        if nodes is None:
            nodes = 2 * sources
        self.tol = tol
        self.regular_tol = regular_tol
        consts = self.constants
        self.source_points = mfs.hole_sources(shape, n, sources, shrink)
        self.nodes = mfs.hole_boundary(shape, n, nodes)
        self.check_nodes = mfs.hole_boundary(shape, n, nodes, 0.5)
        planar = n == 2
        self.basis = mfs.SourceBasis(consts, self.source_points, constant=planar, unit_total=planar)
        design, self._node_offset = self.basis.design(self.nodes)
        self.solver = mfs.RegularizedSolver(design)
        self._check_design = self.basis.design(self.check_nodes)

        if planar:
            # Robin function u: zero on the boundary, -(2pi)^-1 log|xi| + c at infinity
            self._robin = self.solver.solve(-self._node_offset)
            self.residual = self._check_residual(self._robin, np.zeros(len(self.nodes)), "Robin function")
        else:
            self._potential = self.solver.solve(np.ones(len(self.nodes)))
            self.residual = self._check_residual(self._potential, np.ones(len(self.nodes)), "equilibrium potential")

    def _check_residual(self, coef, target_at_nodes, what):
        basis = self.basis
        res_nodes = np.max(np.abs(basis.evaluate(self.nodes, coef) - target_at_nodes))
        res_check = np.max(np.abs(basis.evaluate(self.check_nodes, coef) - target_at_nodes[0]))
        res = max(res_nodes, res_check)
        log.info("hole collocation (%s, n=%d): %d sources, rank %d, cond %.2e, residual %.2e",
                 what, self.n, len(self.source_points), self.solver.rank, self.solver.condition, res)
        if res > self.tol:
            raise mfs.CollocationError(
                f"{what}: boundary residual {res:.3e} exceeds tolerance {self.tol:.1e} "
                f"({len(self.source_points)} sources, condition {self.solver.condition:.2e})")
        return float(res)

    def _boundary_data(self, pts, eta):
        return self.constants.fundamental(norm(pts[:, None, :] - eta[None, :, :]))

    def _regular_coeffs(self, eta):
        return self.solver.solve(self._boundary_data(self.nodes, eta) - self._node_offset[:, None])

    def regular(self, xi, eta):
        """h(xi, eta), paired over leading axes.

        The boundary data fundamental(. - eta) is nearly singular when eta is
        close to the hole, so each pair is solved with the point farther from
        the boundary (relative to the local radius) as the pole; h is symmetric.
        Raises CollocationError if the boundary residual exceeds ``regular_tol``.
        """
        xi, eta = self._exterior(xi, eta)
        xi, eta = np.broadcast_arrays(xi, eta)
        shape = xi.shape[:-1]
        xi2, eta2 = xi.reshape(-1, self.n), eta.reshape(-1, self.n)
        swap = norm(xi2) / self.shape.radius(xi2) > norm(eta2) / self.shape.radius(eta2)
        pole = np.where(swap[:, None], xi2, eta2)
        probe = np.where(swap[:, None], eta2, xi2)
        w = self._regular_coeffs(pole)
        res = self._regular_check(w, pole)
        if res > self.regular_tol:
            raise mfs.CollocationError(
                f"regular part: boundary residual {res:.3e} exceeds {self.regular_tol:.1e} "
                "(both points too close to the hole boundary)")
        return self.basis.evaluate(probe, w).reshape(shape)

    def _regular_check(self, w, eta):
        a, off = self._check_design
        return float(np.max(np.abs(a @ w + off[:, None] - self._boundary_data(self.check_nodes, eta)), initial=0.0))

    def regular_residual(self, eta) -> float:
        """Max boundary mismatch of the regular-part solve for sources eta."""
        eta = as_points(eta, self.n).reshape(-1, self.n)
        return self._regular_check(self._regular_coeffs(eta), eta)

    def equilibrium_potential(self, xi):
        self._need_n(planar=False)
        xi, = self._exterior(xi)
        shape = xi.shape[:-1]
        return self.basis.evaluate(xi.reshape(-1, self.n), self._potential).reshape(shape)

    def total_charge(self) -> float:
        """Sum of potential source strengths; equals cap(F) exactly for this representation."""
        self._need_n(planar=False)
        return float(np.sum(self._potential))

    def capacity(self) -> float:
        return self.far_field_capacity()

    def zeta(self, eta):
        """zeta(eta) = -u(eta) with u the Robin function of the exterior."""
        self._need_n(planar=True)
        eta, = self._exterior(eta)
        shape = eta.shape[:-1]
        return -self.basis.evaluate(eta.reshape(-1, 2), self._robin).reshape(shape)

    def zeta_infinity(self) -> float:
        self._need_n(planar=True)
        return -float(self.basis.constant_term(self._robin))

    def zeta_richardson(self, eta, radius: float = ZETA_RADIUS, direction=(0.6, 0.8)) -> np.ndarray:
        """zeta(eta) from g at |xi| = radius and 2 radius, extrapolated in 1/|xi|."""
        eta = as_points(eta, 2).reshape(-1, 2)
        d = np.asarray(direction, float)
        d = d / norm(d)
        g1 = self.green(np.broadcast_to(radius * d, eta.shape), eta)
        g2 = self.green(np.broadcast_to(2 * radius * d, eta.shape), eta)
        return 2.0 * g2 - g1

    def zeta_infinity_richardson(self, radius: float = ZETA_RADIUS, direction=(0.6, 0.8)) -> float:
        d = np.asarray(direction, float)
        d = d / norm(d)
        v = []
        for r in (radius, 2 * radius):
            v.append(float(self.zeta(r * d)) - math.log(r) / (2 * math.pi))
        return 2.0 * v[1] - v[0]


class NoHole(HoleKernel):
    """Degenerate stub with cap(F) = 0 and P = 0; reduces the expansion to G."""

    backend = "none"

    def __init__(self, n: int):
        super().__init__(HoleShape.ball(), n)

    def _exterior(self, *pts, tol=1e-12):
        return [as_points(p, self.n) for p in pts]

    def regular(self, xi, eta):
        xi, eta = self._exterior(xi, eta)
        return np.zeros(np.broadcast_shapes(xi.shape, eta.shape)[:-1])

    def equilibrium_potential(self, xi):
        xi, = self._exterior(xi)
        return np.zeros(xi.shape[:-1])

    def capacity(self) -> float:
        return 0.0


def make_hole_kernel(shape: HoleShape, n: int, backend: str = "auto", **kw) -> HoleKernel:
    if backend == "auto":
        backend = "analytic" if shape.is_ball else "collocation"
    if backend == "analytic":
        if not shape.is_ball:
            raise GeometryError("analytic backend only covers the unit ball/disk")
        return AnalyticBallHole(n)
    if backend == "collocation":
        return CollocationHole(shape, n, **kw)
    raise ValueError(f"unknown backend {backend!r}")
