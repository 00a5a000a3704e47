"""Reference values of G_eps and of the capacitary potential of Omega_eps.

Two independent routes:

* ``AnnulusSeries``: separation of variables for a ball/disk hole concentric
  with the outer ball/disk.  Per angular mode the radial Green's function is
  built from r^l, r^{-l-1} (or r^m, r^{-m}, and logs for m = 0); the parts of
  the mode sum that are geometric are summed in closed form through the
  Legendre / Fourier generating functions and the remainder is truncated
  adaptively.
* ``CollocationOracle``: fundamental-solution collocation on the actual
  boundaries, for off-centre balls and star-shaped holes.

Both return the regular part ``G_eps - fundamental`` as well, which is what
callers should compare when |x - y| is small.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from . import collocation as mfs
from .geometry import GeometryError, PerforationConfig, as_points, norm
from .outer_kernel import image_regular, kelvin_quadratic

log = logging.getLogger(__name__)

SERIES_TOL = 1e-12
SERIES_MAX_TERMS = 2000


class OracleError(RuntimeError):
    pass


def _pair_geometry(x, y):
    r = norm(x)
    s = norm(y)
    with np.errstate(invalid="ignore", divide="ignore"):
        mu = np.sum(x * y, axis=-1) / (r * s)
    return r, s, np.clip(np.nan_to_num(mu), -1.0, 1.0)


class AnnulusSeries:
    """Green's function of eps < |x| < R by separation of variables (n = 2, 3)."""

    def __init__(self, n: int, epsilon: float, outer_radius: float = 1.0, tol: float = SERIES_TOL):
        if n not in (2, 3):
            raise OracleError("series oracle supports n = 2 and n = 3")
        if not 0 < epsilon < outer_radius:
            raise OracleError("need 0 < eps < R")
        self.n = n
        self.epsilon = float(epsilon)
        self.outer_radius = float(outer_radius)
        self.tol = tol
        self.truncation = self._truncation()

    @classmethod
    def from_config(cls, config: PerforationConfig, **kw) -> "AnnulusSeries":
        if not config.is_concentric or not config.hole.is_ball:
            raise OracleError("series oracle needs a ball/disk hole concentric with the outer ball")
        return cls(config.n, config.epsilon, config.outer_radius, **kw)

    def _truncation(self) -> int:
        # every remainder term is bounded by 4 (eps/R)^l / eps
        q = self.epsilon / self.outer_radius
        bound = 4.0 / self.epsilon
        for L in range(1, SERIES_MAX_TERMS):
            bound_l = bound * q ** L
            if bound_l < self.tol * 1e-1:
                return L
        raise OracleError(f"series truncation not converged: tail estimate {bound * q ** SERIES_MAX_TERMS:.2e}")

    def _check(self, x, y):
        x = as_points(x, self.n)
        y = as_points(y, self.n)
        for p in (x, y):
            rp = norm(p)
            if np.any(rp < self.epsilon * (1 - 1e-12)) or np.any(rp > self.outer_radius * (1 + 1e-12)):
                raise GeometryError("point outside the annulus")
        return np.broadcast_arrays(x, y)

    def regular(self, x, y, terms: int | None = None):
        """G_eps(x, y) - fundamental(x - y); smooth across x = y."""
        x, y = self._check(x, y)
        L = self.truncation if terms is None else terms
        eps, R = self.epsilon, self.outer_radius
        r, s, mu = _pair_geometry(x, y)
        rl, rg = np.minimum(r, s), np.maximum(r, s)
        t = r * s / R**2
        tau = eps**2 / (r * s)
        q = eps / R
        if self.n == 3:
            k = 1.0 / (4.0 * math.pi)
            closed = -k / (R * np.sqrt(1 - 2 * mu * t + t * t)) - k * (eps / (r * s)) / np.sqrt(1 - 2 * mu * tau + tau * tau)
            rest = np.zeros_like(r)
            p_prev, pl = np.zeros_like(mu), np.ones_like(mu)
            for ell in range(0, L + 1):
                w = q ** (2 * ell + 1)
                bracket = (rg / rl) ** ell / rl + (rl / rg) ** ell / rg - t**ell / R - tau**ell * eps / (r * s)
                rest += pl * w * bracket / (1 - w)
                p_prev, pl = pl, ((2 * ell + 1) * mu * pl - ell * p_prev) / (ell + 1)
            return closed + k * rest
        theta = np.arccos(mu)
        k = 1.0 / (2.0 * math.pi)
        mode0 = np.log(rl / eps) * np.log(R / rg) / math.log(R / eps)
        closed = mode0 + np.log(rg) + 0.5 * np.log(1 - 2 * mu * t + t * t) + 0.5 * np.log(1 - 2 * mu * tau + tau * tau)
        rest = np.zeros_like(r)
        for m in range(1, L + 1):
            w = q ** (2 * m)
            bracket = (rg / rl) ** m + (rl / rg) ** m - t**m - tau**m
            rest += np.cos(m * theta) * w * bracket / (m * (1 - w))
        return k * (closed + rest)

    def green(self, x, y, terms: int | None = None):
        x, y = self._check(x, y)
        d = norm(x - y)
        if np.any(d == 0):
            raise GeometryError("coincident points")
        if self.n == 2:
            free = -np.log(d) / (2.0 * math.pi)
        else:
            free = 1.0 / (4.0 * math.pi * d)
        return free + self.regular(x, y, terms)

    def potential(self, x):
        """Capacitary potential: 1 on the hole, 0 on the outer sphere."""
        x = as_points(x, self.n)
        r = norm(x)
        eps, R = self.epsilon, self.outer_radius
        if self.n == 2:
            return np.log(R / r) / math.log(R / eps)
        return (1.0 / r - 1.0 / R) / (1.0 / eps - 1.0 / R)


class CollocationOracle:
    """Fundamental-solution solver for Dirichlet problems in Omega_eps.

    Sources lie outside Omega on the outer sphere inflated by ``inflate`` and
    inside the hole as in ``collocation.hole_sources``.  For Green's
    function evaluations the Kelvin image regular parts of the ball pieces
    are subtracted first, so the collocated data stays smooth even when the
    pole approaches a boundary; only harmonicity of the subtracted terms
    matters for correctness.
    """

    def __init__(self, config: PerforationConfig, outer_sources: int | None = None,
                 hole_sources: int | None = None, inflate: float | None = None,
                 shrink: float | None = None, tol: float = 1e-9, cutoff: float = mfs.SVD_CUTOFF):
        n = config.n
        if n not in (2, 3):
            raise OracleError("collocation oracle supports n = 2 and n = 3")
        self.config = config
        self.n = n
        self.tol = tol
        consts = config.constants
        self.constants = consts
        if outer_sources is None:
            outer_sources = 160 if n == 2 else 700
        if hole_sources is None:
            # ball holes have their image subtracted, so the hole data stays smooth
            hole_sources = 160 if n == 2 else (500 if config.hole.is_ball else 1000)
        if inflate is None:
            inflate = mfs.OUTER_INFLATE[n]
        c, R, eps, hole = config.center, config.outer_radius, config.epsilon, config.hole

        d_out = mfs.unit_directions(n, outer_sources, 0.5)
        sources = np.vstack([c + inflate * R * d_out, eps * mfs.hole_sources(hole, n, hole_sources, shrink)])
        self.sources = sources

        self.n_outer_nodes = 2 * outer_sources
        self.nodes = np.vstack([c + R * mfs.unit_directions(n, 2 * outer_sources),
                                eps * mfs.hole_boundary(hole, n, 2 * hole_sources)])
        self.check_nodes = np.vstack([c + R * mfs.unit_directions(n, 2 * outer_sources, 0.5),
                                      eps * mfs.hole_boundary(hole, n, 2 * hole_sources, 0.5)])
        self._outer_mask = np.zeros(len(self.nodes), bool)
        self._outer_mask[: self.n_outer_nodes] = True
        self.basis = mfs.SourceBasis(consts, sources, constant=(n == 2))
        design, _ = self.basis.design(self.nodes)
        self.solver = mfs.RegularizedSolver(design, cutoff)
        self._check_design, _ = self.basis.design(self.check_nodes)
        self.last_residual = 0.0
        self._potential = None
        log.info("collocation oracle %s eps=%.4g: %d unknowns, %d nodes, rank %d, cond %.2e",
                 config.scene_id, eps, self.basis.size, len(self.nodes), self.solver.rank, self.solver.condition)

    def _subtracted(self, x, y):
        cfg = self.config
        sub = image_regular(kelvin_quadratic(x, y, cfg.center, cfg.outer_radius), self.constants)
        if cfg.hole.is_ball:
            sub = sub + image_regular(kelvin_quadratic(x, y, np.zeros(self.n), cfg.epsilon), self.constants)
        return sub

    def _data(self, pts, y):
        """free(pts - y) - subtracted(pts, y) as a (len(pts), len(y)) array."""
        p = pts[:, None, :]
        q = y[None, :, :]
        return self.constants.fundamental(norm(p - q)) - self._subtracted(p, q)

    def _check_residual(self, coef, y=None, target=None):
        if y is not None:
            target = self._data(self.check_nodes, y)
        res = float(np.max(np.abs(self._check_design @ coef - target)))
        self.last_residual = res
        if res > self.tol:
            raise OracleError(f"collocation residual {res:.3e} exceeds {self.tol:.1e} "
                              f"(scene {self.config.scene_id}, eps={self.config.epsilon:g}, "
                              f"condition {self.solver.condition:.2e})")
        return res

    def regular(self, x, y):
        """G_eps(x, y) - fundamental(x - y), paired over leading axes."""
        x = as_points(x, self.n)
        y = as_points(y, self.n)
        x, y = np.broadcast_arrays(x, y)
        shape = x.shape[:-1]
        x2, y2 = x.reshape(-1, self.n), y.reshape(-1, self.n)
        self.config.check_points(x2, y2)
        if not self.config.hole.is_ball:
            # G_eps is symmetric: use the point farther from the hole as the pole,
            # since the hole data is nearly singular for a pole close to it
            hole = self.config.hole
            swap = norm(x2) / hole.radius(x2) > norm(y2) / hole.radius(y2)
            x2, y2 = np.where(swap[:, None], y2, x2), np.where(swap[:, None], x2, y2)
        w = self.solver.solve(self._data(self.nodes, y2))
        self._check_residual(w, y=y2)
        v = self.basis.evaluate(x2, w)
        return (-self._subtracted(x2, y2) - v).reshape(shape)

    def green(self, x, y):
        x = as_points(x, self.n)
        y = as_points(y, self.n)
        d = norm(x - y)
        if np.any(d == 0):
            raise GeometryError("coincident points")
        return self.constants.fundamental(d) + self.regular(x, y)

    def potential(self, x):
        """Capacitary potential of Omega_eps: 0 on the outer boundary, 1 on the hole."""
        x = as_points(x, self.n)
        if self._potential is None:
            target = (~self._outer_mask).astype(float)
            self._potential = self.solver.solve(target)
            check_target = np.zeros(len(self.check_nodes))
            check_target[self.n_outer_nodes:] = 1.0
            self._check_residual(self._potential, target=check_target)
        shape = x.shape[:-1]
        x2 = x.reshape(-1, self.n)
        self.config.check_points(x2)
        return self.basis.evaluate(x2, self._potential).reshape(shape)


def make_oracle(config: PerforationConfig, kind: str = "auto", **kw):
    if kind == "auto":
        kind = "series" if (config.is_concentric and config.hole.is_ball and config.n in (2, 3)) else "collocation"
    if kind == "series":
        return AnnulusSeries.from_config(config, **kw)
    if kind == "collocation":
        return CollocationOracle(config, **kw)
    raise ValueError(f"unknown oracle kind {kind!r}")
