"""Perforated-domain scenes: outer ball, scaled hole, normalization and sampling."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
from scipy import optimize, special

EPS_MAX = 0.25
BOUNDARY_MARGIN = 1e-6
NEAR_HOLE_FACTOR = 2.0
NEAR_OUTER_WIDTH = 0.1
NEAR_DIAGONAL_RADIUS = 0.05
# bulk points stay outside B_{1/4}, which holds every admissible hole, so the
# bulk region (and hence a seeded bulk sample) does not depend on eps
BULK_INNER = EPS_MAX
STRATA = ("bulk", "near-hole", "near-outer-boundary", "near-diagonal")


class GeometryError(ValueError):
    pass


def as_points(p, n: int | None = None) -> np.ndarray:
    """Coerce to a float array of shape (..., n)."""
    a = np.asarray(p, dtype=float)
    if a.ndim == 0:
        raise GeometryError("a point needs at least one coordinate")
    if n is not None and a.shape[-1] != n:
        raise GeometryError(f"expected {n} coordinates, got {a.shape[-1]}")
    return a


def norm(p: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(p * p, axis=-1))


@dataclass(frozen=True)
class DimensionConstants:
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise GeometryError("dimension must be >= 2")

    @cached_property
    def sphere_area(self) -> float:
        """Measure of the unit sphere S^{n-1}."""
        return 2.0 * math.pi ** (self.n / 2) / special.gamma(self.n / 2)

    @cached_property
    def fundamental_coefficient(self) -> float:
        if self.n == 2:
            return 1.0 / (2.0 * math.pi)
        return 1.0 / ((self.n - 2) * self.sphere_area)

    def fundamental(self, r):
        """Fundamental solution of -Laplace as a function of the distance r."""
        r = np.asarray(r, dtype=float)
        if self.n == 2:
            return -np.log(r) / (2.0 * math.pi)
        return self.fundamental_coefficient * r ** (2 - self.n)


def _legendre_series(coeffs: Sequence[float], t):
    return np.polynomial.legendre.legval(t, np.asarray(coeffs, dtype=float))


@dataclass(frozen=True)
class HoleShape:
    """Unit-scale hole F, star-shaped about the origin.

    ``kind`` is ``"ball"`` for the unit ball/disk; otherwise the boundary is
    r = radius(angle), where angle is the polar angle in 2D and the angle
    from the +z axis in 3D (zonal, axisymmetric profiles).
    """

    kind: str = "ball"
    coeffs: tuple[float, ...] = ()
    sin_coeffs: tuple[float, ...] = ()
    axes: tuple[float, float] | None = None
    scale: float = 1.0

    @classmethod
    def ball(cls) -> "HoleShape":
        return cls("ball")

    @classmethod
    def fourier(cls, cos_coeffs: Sequence[float], sin_coeffs: Sequence[float] = ()) -> "HoleShape":
        """2D profile rho = a0 + sum a_k cos(k t) + b_k sin(k t), k >= 1."""
        return cls("fourier", tuple(map(float, cos_coeffs)), tuple(map(float, sin_coeffs)))._normalized()

    @classmethod
    def zonal(cls, coeffs: Sequence[float]) -> "HoleShape":
        """3D axisymmetric profile rho = sum c_l P_l(cos theta)."""
        return cls("zonal", tuple(map(float, coeffs)))._normalized()

    @classmethod
    def ellipse(cls, a: float, b: float) -> "HoleShape":
        """Ellipse (2D) or spheroid (3D) with semi-axis a along x and b across."""
        return cls("ellipse", axes=(float(a), float(b)))._normalized()

    def _raw_radius(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "ball":
            return np.ones_like(t)
        if self.kind == "fourier":
            k = np.arange(len(self.coeffs))
            r = np.cos(np.multiply.outer(t, k)) @ np.asarray(self.coeffs)
            if self.sin_coeffs:
                ks = np.arange(1, len(self.sin_coeffs) + 1)
                r = r + np.sin(np.multiply.outer(t, ks)) @ np.asarray(self.sin_coeffs)
            return r
        if self.kind == "zonal":
            return _legendre_series(self.coeffs, np.cos(t))
        if self.kind == "ellipse":
            a, b = self.axes
            return a * b / np.sqrt((b * np.cos(t)) ** 2 + (a * np.sin(t)) ** 2)
        raise GeometryError(f"unknown hole kind {self.kind!r}")

    def _angle_range(self) -> float:
        return math.pi if self.kind == "zonal" else 2.0 * math.pi

    def _normalized(self) -> "HoleShape":
        top = self._raw_max()
        if self._raw_min() <= 0:
            raise GeometryError("hole radial profile must be positive")
        return replace(self, scale=1.0 / top)

    def _raw_max(self) -> float:
        span = self._angle_range()
        t = np.linspace(0.0, span, 4097)
        r = self._raw_radius(t)
        i = int(np.argmax(r))
        lo, hi = t[max(i - 1, 0)], t[min(i + 1, len(t) - 1)]
        res = optimize.minimize_scalar(lambda s: -self._raw_radius(s), bounds=(lo, hi),
                                       method="bounded", options={"xatol": 1e-13})
        return max(float(r[i]), float(-res.fun))

    def _raw_min(self) -> float:
        t = np.linspace(0.0, self._angle_range(), 4097)
        return float(np.min(self._raw_radius(t)))

    @property
    def is_ball(self) -> bool:
        return self.kind == "ball"

    def radius_at_angle(self, t):
        return self.scale * self._raw_radius(t)

    def radius(self, directions: np.ndarray) -> np.ndarray:
        """Boundary radius along the given (not necessarily unit) directions."""
        d = np.asarray(directions, dtype=float)
        if self.is_ball:
            return np.ones(d.shape[:-1])
        if d.shape[-1] == 2:
            t = np.arctan2(d[..., 1], d[..., 0])
        else:
            # zonal about the last axis; ellipse/spheroid about the first one
            axis = d[..., 0] if self.kind == "ellipse" else d[..., -1]
            t = np.arccos(np.clip(axis / norm(d), -1.0, 1.0))
        return self.radius_at_angle(t)

    def max_radius(self) -> float:
        return 1.0 if self.is_ball else self.scale * self._raw_max()

    def min_radius(self) -> float:
        return 1.0 if self.is_ball else self.scale * self._raw_min()

    def contains(self, xi: np.ndarray, margin: float = 0.0) -> np.ndarray:
        """True where xi is inside the closed hole enlarged by margin."""
        xi = np.asarray(xi, dtype=float)
        return norm(xi) <= self.radius(xi) + margin

    def describe(self) -> str:
        if self.kind == "ball":
            return "ball"
        if self.kind == "ellipse":
            return f"ellipse {self.axes[0]:g} {self.axes[1]:g}"
        parts = " ".join(f"{c:g}" for c in self.coeffs)
        if self.sin_coeffs:
            parts += " | " + " ".join(f"{c:g}" for c in self.sin_coeffs)
        return f"{self.kind} {parts}"


@dataclass(frozen=True)
class PerforationConfig:
    """Scene Omega_eps = Omega minus eps*F with Omega a ball of radius R about c."""

    n: int
    outer_center: tuple[float, ...]
    outer_radius: float
    hole: HoleShape = field(default_factory=HoleShape.ball)
    epsilon: float = 0.1
    rescale_factor: float = 1.0
    scene_id: str = "scene"

    def __post_init__(self):
        c = tuple(float(v) for v in np.broadcast_to(np.asarray(self.outer_center, float), (self.n,)))
        object.__setattr__(self, "outer_center", c)
        if self.n < 2:
            raise GeometryError("dimension must be >= 2")
        if not self.outer_radius > 0:
            raise GeometryError("outer radius must be positive")
        if not self.epsilon > 0:
            raise GeometryError("epsilon must be positive")
        if math.hypot(*c) >= self.outer_radius:
            raise GeometryError("origin is not interior to the outer ball")

    @property
    def center(self) -> np.ndarray:
        return np.asarray(self.outer_center)

    @property
    def constants(self) -> DimensionConstants:
        return DimensionConstants(self.n)

    @property
    def origin_distance(self) -> float:
        """dist(O, boundary of Omega)."""
        return self.outer_radius - math.hypot(*self.outer_center)

    @property
    def is_concentric(self) -> bool:
        return math.hypot(*self.outer_center) == 0.0

    def is_normalized(self, tol: float = 1e-12) -> bool:
        return (abs(self.origin_distance - 1.0) <= tol
                and abs(self.hole.max_radius() - 1.0) <= tol
                and 0 < self.epsilon <= EPS_MAX)

    def with_epsilon(self, eps: float) -> "PerforationConfig":
        if not 0 < eps <= EPS_MAX:
            raise GeometryError(f"epsilon {eps} outside (0, {EPS_MAX}]")
        return replace(self, epsilon=float(eps))

    def to_original(self, x: np.ndarray) -> np.ndarray:
        """Map normalized coordinates back to the coordinates of the input scene."""
        return np.asarray(x, dtype=float) / self.rescale_factor

    def from_original(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=float) * self.rescale_factor

    def outer_distance(self, x: np.ndarray) -> np.ndarray:
        return self.outer_radius - norm(np.asarray(x, dtype=float) - self.center)

    def hole_clearance(self, x: np.ndarray) -> np.ndarray:
        """Radial gap |x| - eps*rho(x/|x|) between x and the hole boundary."""
        x = np.asarray(x, dtype=float)
        return norm(x) - self.epsilon * self.hole.radius(x)

    def inside(self, x: np.ndarray, margin: float = 0.0) -> np.ndarray:
        """Membership in Omega_eps, at least `margin` away from both boundaries."""
        x = np.asarray(x, dtype=float)
        return (self.outer_distance(x) >= margin) & (self.hole_clearance(x) >= margin)

    def check_points(self, *pts: np.ndarray) -> None:
        for p in pts:
            p = as_points(p, self.n)
            if np.any(self.outer_distance(p) < 0):
                raise GeometryError("point outside Omega")
            if np.any(self.hole_clearance(p) < 0):
                raise GeometryError("point inside the hole")


def normalize(config: PerforationConfig) -> PerforationConfig:
    """Rescale so that dist(O, boundary) = 1 and the hole's max radius is 1."""
    d = config.origin_distance
    if d <= 0:
        raise GeometryError("origin is not interior to the outer ball")
    hole_max = config.hole.max_radius()
    if abs(d - 1.0) <= 1e-12 and abs(hole_max - 1.0) <= 1e-12:
        if not 0 < config.epsilon <= EPS_MAX:
            raise GeometryError(f"epsilon {config.epsilon} outside (0, {EPS_MAX}]")
        return config
    s = 1.0 / d
    eps = config.epsilon * s * hole_max
    if not 0 < eps <= EPS_MAX:
        raise GeometryError(f"rescaled epsilon {eps} outside (0, {EPS_MAX}]")
    hole = config.hole
    if abs(hole_max - 1.0) > 1e-12:
        hole = replace(hole, scale=hole.scale / hole_max)
    return replace(
        config,
        outer_center=tuple(v * s for v in config.outer_center),
        outer_radius=config.outer_radius * s,
        hole=hole,
        epsilon=eps,
        rescale_factor=config.rescale_factor * s,
    )


def unit_directions(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    v = rng.standard_normal((count, n))
    return v / norm(v)[:, None]


def _fill(draw: Callable[[int], np.ndarray], accept: Callable[[np.ndarray], np.ndarray],
          count: int, what: str, max_rounds: int = 200) -> np.ndarray:
    out = []
    have = 0
    for _ in range(max_rounds):
        cand = draw(max(4 * (count - have), 16))
        cand = cand[accept(cand)]
        out.append(cand)
        have += len(cand)
        if have >= count:
            return np.concatenate(out)[:count]
    raise GeometryError(f"empty admissible region for {what}")


def _bulk(config, rng, count, margin):
    n = config.n
    R = config.outer_radius

    def draw(m):
        r = R * rng.random(m) ** (1.0 / n)
        return config.center + r[:, None] * unit_directions(rng, m, n)

    def accept(p):
        return config.inside(p, margin) & (norm(p) >= BULK_INNER)

    return _fill(draw, accept, count, "bulk")


def sample_pairs(config: PerforationConfig, count: int, seed: int,
                 stratum: str = "bulk", margin: float = BOUNDARY_MARGIN):
    """Deterministic admissible point pairs (x, y), each of shape (count, n).

    The stratum constrains x; y is drawn from the bulk except in the
    near-diagonal stratum, where |x - y| <= 0.05.
    """
    if count < 1:
        raise GeometryError("count must be >= 1")
    if stratum not in STRATA:
        raise GeometryError(f"unknown stratum {stratum!r}; expected one of {STRATA}")
    n, eps = config.n, config.epsilon
    rng = np.random.default_rng([seed, STRATA.index(stratum)])

    if stratum == "near-hole":
        lo, hi = eps, NEAR_HOLE_FACTOR * eps
        if hi >= config.origin_distance - margin:
            raise GeometryError("empty admissible region for near-hole stratum")

        def draw(m):
            r = (lo ** n + (hi ** n - lo ** n) * rng.random(m)) ** (1.0 / n)
            return r[:, None] * unit_directions(rng, m, n)

        x = _fill(draw, lambda p: config.inside(p, margin), count, stratum)
    elif stratum == "near-outer-boundary":
        R = config.outer_radius
        lo = R - NEAR_OUTER_WIDTH
        if lo <= NEAR_HOLE_FACTOR * eps:
            raise GeometryError("empty admissible region for near-outer-boundary stratum")

        def draw(m):
            r = (lo ** n + ((R - margin) ** n - lo ** n) * rng.random(m)) ** (1.0 / n)
            return config.center + r[:, None] * unit_directions(rng, m, n)

        x = _fill(draw, lambda p: config.inside(p, margin), count, stratum)
    else:
        x = _bulk(config, rng, count, margin)

    if stratum == "near-diagonal":
        # redraw offsets until y is admissible; x stays fixed per slot
        y = np.empty_like(x)
        todo = np.arange(count)
        for _ in range(500):
            m = len(todo)
            if m == 0:
                break
            rad = NEAR_DIAGONAL_RADIUS * rng.random(m) ** (1.0 / n)
            rad = np.maximum(rad, 10 * margin)
            cand = x[todo] + rad[:, None] * unit_directions(rng, m, n)
            ok = config.inside(cand, margin)
            y[todo[ok]] = cand[ok]
            todo = todo[~ok]
        if len(todo):
            raise GeometryError("empty admissible region for near-diagonal stratum")
    else:
        y = _bulk(config, rng, count, margin)
        same = norm(x - y) < 10 * margin
        if np.any(same):
            y[same] = _bulk(config, rng, int(same.sum()), margin)
    return x, y


# ---------------------------------------------------------------------------
# plain-text config files
# ---------------------------------------------------------------------------

def _floats(text: str) -> list[float]:
    return [float(t) for t in text.replace(",", " ").split()]


def parse_hole(text: str, n: int) -> HoleShape:
    """Parse a hole description: ``ball``, ``ellipse a b``, ``fourier a0 a1 ... [| b1 b2 ...]``,
    ``zonal c0 c1 ...``."""
    words = text.strip().split(None, 1)
    if not words:
        raise GeometryError("empty hole description")
    kind = words[0].lower()
    rest = words[1] if len(words) > 1 else ""
    if kind == "ball" or kind == "disk":
        return HoleShape.ball()
    if kind == "ellipse":
        a, b = _floats(rest)
        return HoleShape.ellipse(a, b)
    if kind == "fourier":
        if n != 2:
            raise GeometryError("fourier hole profiles are 2D only")
        cos_part, _, sin_part = rest.partition("|")
        return HoleShape.fourier(_floats(cos_part), _floats(sin_part))
    if kind == "zonal":
        if n != 3:
            raise GeometryError("zonal hole profiles are 3D only")
        return HoleShape.zonal(_floats(rest))
    raise GeometryError(f"unknown hole kind {kind!r}")


def read_config(path, eps: Sequence[float] | None = None) -> tuple[PerforationConfig, list[float]]:
    """Read a ``key = value`` scene file. Returns the normalized scene and the eps list.

    Keys: scene_id, dimension, outer_center, outer_radius, hole, eps.
    ``#`` starts a comment.  ``eps`` given here replaces the file's list
    (same units as the file).
    """
    values: dict[str, str] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, val = line.partition("=")
            if not sep:
                raise GeometryError(f"{path}:{lineno}: expected key = value")
            values[key.strip().lower()] = val.strip()
    if eps is not None:
        values["eps"] = " ".join(repr(float(e)) for e in eps)
    return config_from_mapping(values)


def config_from_mapping(values: dict[str, str]) -> tuple[PerforationConfig, list[float]]:
    try:
        n = int(values["dimension"])
    except KeyError:
        raise GeometryError("config is missing 'dimension'") from None
    center = _floats(values.get("outer_center", "0")) or [0.0]
    if len(center) == 1:
        center = center * n
    eps_list = _floats(values.get("eps", "0.1"))
    cfg = PerforationConfig(
        n=n,
        outer_center=tuple(center),
        outer_radius=float(values.get("outer_radius", "1")),
        hole=parse_hole(values.get("hole", "ball"), n),
        epsilon=eps_list[0],
        scene_id=values.get("scene_id", "scene"),
    )
    scaled = normalize(cfg)
    ratio = scaled.epsilon / cfg.epsilon
    return scaled, [e * ratio for e in eps_list]


def format_config(config: PerforationConfig, eps_list: Sequence[float] | None = None) -> str:
    eps_list = list(eps_list) if eps_list is not None else [config.epsilon]
    return "\n".join([
        f"scene_id = {config.scene_id}",
        f"dimension = {config.n}",
        "outer_center = " + " ".join(repr(v) for v in config.outer_center),
        f"outer_radius = {config.outer_radius!r}",
        f"hole = {config.hole.describe()}",
        "eps = " + ", ".join(repr(e) for e in eps_list),
        "",
    ])
