"""Uniform asymptotic approximations of G_eps in Omega_eps and their simplified forms.

All evaluators are vectorised over leading axes of x and y (paired).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .geometry import GeometryError, PerforationConfig, as_points, norm
from .hole_kernel import HoleKernel, make_hole_kernel
from .outer_kernel import OuterKernel

DENOMINATOR_GUARD = 1e-8
CLOSE_PAIR = 1e-2


class ValidityError(ValueError):
    """Points outside the region where a simplified formula applies."""


@dataclass
class Scene:
    """A normalized configuration with its outer and unit-scale hole kernels.

    The hole kernel does not depend on eps, so ``at`` reuses it.
    """

    config: PerforationConfig
    outer: OuterKernel
    hole: HoleKernel

    @classmethod
    def build(cls, config: PerforationConfig, backend: str = "auto", hole: HoleKernel | None = None,
              **hole_kw) -> "Scene":
        if hole is None:
            hole = make_hole_kernel(config.hole, config.n, backend, **hole_kw)
        return cls(config, OuterKernel(config), hole)

    def at(self, eps: float) -> "Scene":
        return replace(self, config=self.config.with_epsilon(eps))

    @property
    def n(self) -> int:
        return self.config.n

    @property
    def epsilon(self) -> float:
        return self.config.epsilon

    def planar_denominator(self) -> float:
        """(2 pi)^-1 log eps + H(0, 0) - zeta_inf."""
        return (math.log(self.epsilon) / (2 * math.pi) + self.outer.regular_origin()
                - self.hole.zeta_infinity())


@dataclass
class UniformExpansion:
    value: np.ndarray
    terms: dict[str, np.ndarray]
    weight: np.ndarray
    regular: np.ndarray = field(repr=False)
    """value - fundamental(x - y), summed without the singular pieces."""

    def term_sum(self) -> np.ndarray:
        return symmetric_sum(self.terms)


# terms that trade places when x and y are swapped; adding each pair first
# makes the floating-point sum exactly invariant under the swap
SWAP_PARTNERS = (("H0y_Px", "Hx0_Py"), ("zeta_x", "zeta_y"))


def symmetric_sum(terms: dict[str, np.ndarray]) -> np.ndarray:
    seen, parts = set(), []
    for a, b in SWAP_PARTNERS:
        if a in terms and b in terms:
            parts.append(terms[a] + terms[b])
            seen.update((a, b))
    parts.extend(v for k, v in terms.items() if k not in seen)
    return sum(parts)


@dataclass
class EquilibriumPotential2D:
    value: np.ndarray
    numerator: np.ndarray
    denominator: float
    p_bound: float
    conformal_value: np.ndarray


def _prepare(x, y, scene: Scene):
    n = scene.n
    x = as_points(x, n)
    y = as_points(y, n)
    x, y = np.broadcast_arrays(x, y)
    scene.config.check_points(x, y)
    if np.any(norm(x - y) == 0):
        raise GeometryError("coincident points")
    return x, y


def remainder_weight(x, y, scene: Scene) -> np.ndarray:
    """eps^{n-1} (min(|x|, |y|) + eps)^{2-n} for n >= 3 and eps for n = 2."""
    eps, n = scene.epsilon, scene.n
    m = np.minimum(norm(np.asarray(x, float)), norm(np.asarray(y, float)))
    if n == 2:
        return np.full(m.shape, eps)
    return eps ** (n - 1) * (m + eps) ** (2 - n)


def uniform_green_nd(x, y, scene: Scene) -> UniformExpansion:
    """Uniform approximation of G_eps for n >= 3."""
    if scene.n < 3:
        raise GeometryError("uniform_green_nd needs n >= 3 (use uniform_green_2d)")
    x, y = _prepare(x, y, scene)
    n, eps = scene.n, scene.epsilon
    outer, hole, consts = scene.outer, scene.hole, scene.outer.constants
    xi, eta = x / eps, y / eps
    scale = eps ** (2 - n)
    Px = hole.equilibrium_potential(xi)
    Py = hole.equilibrium_potential(eta)
    Hx0 = outer.regular_at_origin_y(x)
    H0y = outer.regular_at_origin_x(y)
    H00 = outer.regular_origin()
    Hxy = outer.regular(x, y)
    hxy = hole.regular(xi, eta)
    fund = consts.fundamental(norm(x - y))
    smooth = {
        "H0y_Px": H0y * Px,
        "Hx0_Py": Hx0 * Py,
        "H00_PxPy": -H00 * (Px * Py),
        "capacity_cross": -eps ** (n - 2) * hole.capacity() * (Hx0 * H0y),
    }
    terms = {
        "outer_G": fund - Hxy,
        "scaled_hole_g": scale * (consts.fundamental(norm(xi - eta)) - hxy),
        "fundamental_subtraction": -fund,
        **smooth,
    }
    regular = -Hxy - scale * hxy + symmetric_sum(smooth)
    return UniformExpansion(symmetric_sum(terms), terms, remainder_weight(x, y, scene), regular)


def uniform_green_2d(x, y, scene: Scene) -> UniformExpansion:
    """Uniform approximation of G_eps for n = 2."""
    if scene.n != 2:
        raise GeometryError("uniform_green_2d needs n = 2")
    x, y = _prepare(x, y, scene)
    eps = scene.epsilon
    outer, hole = scene.outer, scene.hole
    xi, eta = x / eps, y / eps
    k = 1.0 / (2.0 * math.pi)
    D = scene.planar_denominator()
    if abs(D) < DENOMINATOR_GUARD:
        raise GeometryError(f"planar denominator {D:.3e} too close to zero (eps too large)")
    zx, zy, zinf = hole.zeta(xi), hole.zeta(eta), hole.zeta_infinity()
    log_eps = k * math.log(eps)
    ax = log_eps + zx - zinf + outer.regular_at_origin_y(x)
    ay = log_eps + zy - zinf + outer.regular_at_origin_x(y)
    Hxy = outer.regular(x, y)
    hxy = hole.regular(xi, eta)
    d = norm(x - y)
    smooth = {
        "rational_log_term": ax * ay / D,
        "zeta_x": -zx,
        "zeta_y": -zy,
        "zeta_inf": np.full(d.shape, zinf),
    }
    terms = {
        "outer_G": -k * np.log(d) - Hxy,
        "scaled_hole_g": -k * np.log(norm(xi - eta)) - hxy,
        "fundamental_subtraction": k * np.log(d / eps),
        **smooth,
    }
    regular = -Hxy - hxy + symmetric_sum(smooth)
    return UniformExpansion(symmetric_sum(terms), terms, remainder_weight(x, y, scene), regular)


def uniform_green(x, y, scene: Scene) -> UniformExpansion:
    return uniform_green_2d(x, y, scene) if scene.n == 2 else uniform_green_nd(x, y, scene)


def equilibrium_potential_2d(x, scene: Scene) -> EquilibriumPotential2D:
    """Approximate capacitary potential of Omega_eps (1 on the hole, 0 outside)."""
    if scene.n != 2:
        raise GeometryError("equilibrium_potential_2d needs n = 2")
    x = as_points(x, 2)
    scene.config.check_points(x)
    r = norm(x)
    if np.any(r == 0):
        raise GeometryError("x must differ from the origin")
    eps = scene.epsilon
    k = 1.0 / (2.0 * math.pi)
    outer, hole = scene.outer, scene.hole
    zinf = hole.zeta_infinity()
    D = scene.planar_denominator()
    if not D < 0:
        raise GeometryError(f"planar denominator {D:.3e} is not negative")
    Gx0 = outer.green_at_origin(x)
    zx = hole.zeta(x / eps)
    num = -Gx0 + zx - k * np.log(r / eps) - zinf
    r_F = hole.conformal_radius()
    R_O = outer.conformal_radius()
    conformal = (-Gx0 + zx - k * np.log(r / (eps * r_F))) / (k * math.log(eps * r_F / R_O))
    return EquilibriumPotential2D(num / D, num, D, eps / abs(math.log(eps)), conformal)


def _validity(cond, what):
    if not np.all(cond):
        raise ValidityError(what)


def corollary_far(x, y, scene: Scene):
    """Simplified G_eps for min(|x|, |y|) > 2 eps."""
    x, y = _prepare(x, y, scene)
    eps = scene.epsilon
    _validity(np.minimum(norm(x), norm(y)) > 2 * eps, "corollary_far needs min(|x|, |y|) > 2 eps")
    outer = scene.outer
    G = outer.green(x, y)
    Gx0 = outer.green_at_origin(x)
    G0y = outer.green_at_origin(y)
    if scene.n == 2:
        return G + Gx0 * G0y / scene.planar_denominator()
    return G - eps ** (scene.n - 2) * scene.hole.capacity() * Gx0 * G0y


def corollary_near(x, y, scene: Scene):
    """Simplified G_eps for max(|x|, |y|) < 1/2."""
    x, y = _prepare(x, y, scene)
    eps = scene.epsilon
    _validity(np.maximum(norm(x), norm(y)) < 0.5, "corollary_near needs max(|x|, |y|) < 1/2")
    hole = scene.hole
    xi, eta = x / eps, y / eps
    g = hole.green(xi, eta)
    if scene.n == 2:
        return g + hole.zeta(xi) * hole.zeta(eta) / scene.planar_denominator()
    Px = hole.equilibrium_potential(xi)
    Py = hole.equilibrium_potential(eta)
    return eps ** (2 - scene.n) * g - scene.outer.regular_origin() * (Px - 1) * (Py - 1)


def unperturbed_green(x, y, scene: Scene):
    """G(x, y) of Omega alone, ignoring the hole."""
    x, y = _prepare(x, y, scene)
    return scene.outer.green(x, y)
