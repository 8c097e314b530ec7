"""The Ferrand invariant lambda: exact values where a closed form exists,
certified intervals elsewhere.

Unit ball: lambda(x, y) = tau(sinh^2(rho/2)) / 2 with rho the hyperbolic
distance.  Punctured plane: lambda(x, y) = min(p(y/x), p(x/y)), where
p(z) is the extremal modulus of continua joining {0, 1} to {z, inf}.  p is
known on the real axis and on the unit circle; at other ratios lambda is
boxed by

    tau(|x - y| / m) <= lambda <= tau(|x - y| / (2 m)),   m = min(|x|, |y|),

together with p(z) >= tau(min(|z|, |z - 1|)).  In a general domain G with
r = |x - y| / d_G(x) < 1,

    tau(r^2 / (1 - r^2)) / 2 <= lambda_G(x, y) <= tau(r / 2).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .capacities import PLANE, CapacityEvaluator
from .elliptic import agm

# exactness classification of the ratio y/x
ANGLE_TOL = 1e-12
CIRCLE_TOL = 1e-12
# relative slack allowed when intersecting bounds that meet at a point
INTERSECT_RTOL = 1e-12


class EmptyIntersectionError(ArithmeticError):
    """Two supposedly valid bounds on the same quantity do not overlap."""


@dataclass(frozen=True)
class BoundedValue:
    lower: float
    upper: float
    exact: bool = False

    def __post_init__(self):
        if not (self.lower >= 0 and self.upper > 0):
            raise ValueError(f"bad bounds [{self.lower!r}, {self.upper!r}]")
        if self.lower > self.upper:
            raise ValueError(f"lower {self.lower!r} exceeds upper {self.upper!r}")
        if self.exact and self.lower != self.upper:
            raise ValueError("an exact value needs lower == upper")

    @classmethod
    def exactly(cls, v: float) -> "BoundedValue":
        return cls(v, v, True)

    @property
    def value(self) -> float | None:
        return self.lower if self.exact else None

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, v: float, rtol: float = 0.0) -> bool:
        slack = rtol * abs(v)
        return self.lower - slack <= v <= self.upper + slack

    def intersect(self, other: "BoundedValue") -> "BoundedValue":
        lo = max(self.lower, other.lower)
        hi = min(self.upper, other.upper)
        if lo > hi:
            if lo - hi > INTERSECT_RTOL * hi:
                raise EmptyIntersectionError(
                    f"bounds [{self.lower!r}, {self.upper!r}] and "
                    f"[{other.lower!r}, {other.upper!r}] do not overlap"
                )
            # touching up to rounding: keep the exact side if there is one
            lo = hi = self.lower if self.exact else other.lower if other.exact else hi
        exact = self.exact or other.exact or lo == hi
        if self.exact:
            lo = hi = self.lower
        elif other.exact:
            lo = hi = other.lower
        return BoundedValue(lo, hi, exact)

    def to_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "exact": self.exact}


def as_point(x) -> np.ndarray:
    """Point from a complex number or a coordinate sequence."""
    if isinstance(x, (complex, np.complexfloating, float, int, np.floating, np.integer)):
        x = complex(x)
        return np.array([x.real, x.imag])
    p = np.atleast_1d(np.asarray(x, dtype=float))
    if p.ndim != 1 or p.size < 2 or not np.all(np.isfinite(p)):
        raise ValueError(f"not a point: {x!r}")
    return p


def as_complex(x) -> complex:
    if isinstance(x, (complex, np.complexfloating, float, int)):
        return complex(x)
    p = as_point(x)
    if p.size != 2:
        raise ValueError(f"expected a planar point, got {x!r}")
    return complex(p[0], p[1])


# ---------------------------------------------------------------------------
# unit ball


def _ball_ratio(x, y) -> float:
    """sinh^2(rho/2) = |x - y|^2 / ((1 - |x|^2)(1 - |y|^2))."""
    x, y = as_point(x), as_point(y)
    if x.shape != y.shape:
        raise ValueError("points of different dimension")
    ax, ay = np.linalg.norm(x), np.linalg.norm(y)
    if not (ax < 1 and ay < 1):
        raise ValueError("points must lie inside the unit ball")
    d = np.linalg.norm(x - y)
    # sorted factors keep the ratio exactly symmetric in x and y
    lo, hi = sorted(((1 - ax) * (1 + ax), (1 - ay) * (1 + ay)))
    return float(d * d / (lo * hi))


def hyperbolic_distance_ball(x, y) -> float:
    return 2.0 * math.asinh(math.sqrt(_ball_ratio(x, y)))


def lambda_ball(x, y, evaluator: CapacityEvaluator = PLANE) -> BoundedValue:
    s = _ball_ratio(x, y)
    if s == 0:
        raise ValueError("lambda is infinite at coincident points")
    return BoundedValue.exactly(0.5 * evaluator.tau(s))


# ---------------------------------------------------------------------------
# p and the punctured plane


def p_axis(s: float, evaluator: CapacityEvaluator = PLANE) -> float:
    """p(s e1) = tau(s - 1) for s > 1."""
    s = float(s)
    if not s > 1:
        raise ValueError(f"p_axis needs s > 1, got {s!r}")
    return evaluator.tau(s - 1.0)


def p_negative_axis(t: float, evaluator: CapacityEvaluator = PLANE) -> float:
    """p(-t e1) = tau(t) for t > 0.

    The continua [0, e1] and [-t e1, inf] realise tau(t) after a reflection,
    and tau(t) is also the lower bound tau(min(|x|, |x - e1|)) at x = -t e1.
    """
    t = float(t)
    if not t > 0:
        raise ValueError(f"p_negative_axis needs t > 0, got {t!r}")
    return evaluator.tau(t)


def p_unit_circle(theta: float) -> float:
    """p(e^{i theta}) = K(s)/K(c) + K(c)/K(s), s = sin(theta/4), c = cos(theta/4)."""
    theta = float(theta)
    if not 0 < theta < 2 * math.pi:
        raise ValueError(f"theta must lie in (0, 2 pi), got {theta!r}")
    s, c = math.sin(0.25 * theta), math.cos(0.25 * theta)
    # K(s) / K(c) = agm(1, s) / agm(1, c) since s and c are complementary
    a = agm(1.0, s) / agm(1.0, c)
    return a + 1.0 / a


def p_lower(z: complex, evaluator: CapacityEvaluator = PLANE) -> float:
    """tau(min(|z|, |z - 1|)), a lower bound for p(z)."""
    return evaluator.tau(min(abs(z), abs(z - 1)))


@dataclass(frozen=True)
class PuncturedPair:
    x: complex
    y: complex

    def __post_init__(self):
        x, y = as_complex(self.x), as_complex(self.y)
        if x == 0 or y == 0:
            raise ValueError("points of the punctured plane must be nonzero")
        if x == y:
            raise ValueError("lambda is infinite at coincident points")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def ratio(self) -> complex:
        """r_x(y) for the similarity r_x fixing 0 with r_x(x) = 1."""
        return self.y / self.x

    @property
    def m(self) -> float:
        return min(abs(self.x), abs(self.y))

    def classify(self) -> str:
        """"positive-axis", "negative-axis", "unit-circle" or "generic"."""
        q = self.ratio
        if abs(q.imag) <= ANGLE_TOL * abs(q):
            return "positive-axis" if q.real > 0 else "negative-axis"
        if abs(abs(q) - 1.0) <= CIRCLE_TOL:
            return "unit-circle"
        return "generic"

    def swapped(self) -> "PuncturedPair":
        return PuncturedPair(self.y, self.x)

    def mapped(self, f: Callable[[complex], complex]) -> "PuncturedPair":
        return PuncturedPair(f(self.x), f(self.y))


def sandwich_punctured(pair: PuncturedPair, evaluator: CapacityEvaluator = PLANE) -> BoundedValue:
    """tau(|x - y| / m) <= lambda <= tau(|x - y| / (2 m))."""
    d = abs(pair.x - pair.y) / pair.m
    return BoundedValue(evaluator.tau(d), evaluator.tau(0.5 * d))


def lambda_punctured(x, y=None, evaluator: CapacityEvaluator = PLANE) -> BoundedValue:
    """lambda in the punctured plane; accepts a PuncturedPair or two points."""
    pair = x if isinstance(x, PuncturedPair) else PuncturedPair(x, y)
    if evaluator.dimension != 2:
        raise ValueError("the punctured-space classification is planar")
    # lambda is symmetric; a fixed argument order makes it so bit for bit
    if (pair.y.real, pair.y.imag) < (pair.x.real, pair.x.imag):
        pair = pair.swapped()
    kind = pair.classify()
    ax, ay = abs(pair.x), abs(pair.y)
    big, small = max(ax, ay), min(ax, ay)
    if kind == "positive-axis":
        # max/min - 1 without cancellation for nearby points
        return BoundedValue.exactly(evaluator.tau(abs(pair.x - pair.y) / small))
    if kind == "negative-axis":
        return BoundedValue.exactly(evaluator.tau(big / small))
    if kind == "unit-circle":
        theta = cmath.phase(pair.ratio) % (2 * math.pi)
        return BoundedValue.exactly(p_unit_circle(theta))
    q = pair.ratio
    # min(p(q), p(1/q)) >= min of the two lower bounds; tau is decreasing
    eq5 = evaluator.tau(max(min(abs(q), abs(q - 1)), min(1 / abs(q), abs(1 / q - 1))))
    bounds = sandwich_punctured(pair, evaluator)
    return bounds.intersect(BoundedValue(eq5, math.inf))


# ---------------------------------------------------------------------------
# general domains


DOMAIN_KINDS = ("unit-ball", "punctured", "general")


@dataclass(frozen=True)
class DomainSpec:
    kind: str = "punctured"
    boundary_distance: Callable[[np.ndarray], float] | None = field(default=None, repr=False)
    evaluator: CapacityEvaluator = PLANE

    def __post_init__(self):
        if self.kind not in DOMAIN_KINDS:
            raise ValueError(f"domain kind must be one of {DOMAIN_KINDS}")
        if (self.kind == "general") != (self.boundary_distance is not None):
            raise ValueError("a boundary distance is given exactly for general domains")

    @property
    def n(self) -> int:
        return self.evaluator.dimension

    def distance(self, x) -> float:
        p = as_point(x)
        if self.kind == "unit-ball":
            d = 1.0 - float(np.linalg.norm(p))
        elif self.kind == "punctured":
            d = float(np.linalg.norm(p))
        else:
            d = float(self.boundary_distance(p))
        if not d > 0:
            raise ValueError(f"boundary distance must be positive, got {d!r}")
        return d


def lambda_general_bounds(domain: DomainSpec, x, y) -> BoundedValue:
    """tau(r^2/(1 - r^2))/2 <= lambda_G(x, y) <= tau(r/2), r = |x - y| / d_G(x) < 1."""
    px, py = as_point(x), as_point(y)
    r = float(np.linalg.norm(px - py)) / domain.distance(px)
    if r == 0:
        raise ValueError("lambda is infinite at coincident points")
    if not r < 1:
        raise ValueError(f"y lies outside the ball B(x, d_G(x)): r = {r!r} >= 1")
    ev = domain.evaluator
    return BoundedValue(0.5 * ev.tau(r * r / ((1 - r) * (1 + r))), ev.tau(0.5 * r))


# ---------------------------------------------------------------------------
# metric spheres


class TraceError(ValueError):
    """A bound never crosses the requested level within the search range."""


@dataclass(frozen=True)
class MetricSphereTrace:
    """Per-ray radii around ``center`` for the level set lambda(center, .) = M.

    lambda > M is certified for |y - center| < inner along each ray and
    lambda < M for |y - center| > outer.
    """

    center: complex
    level: float
    angles: np.ndarray
    inner: np.ndarray
    outer: np.ndarray
    exact: np.ndarray

    def points(self, which: str = "inner") -> np.ndarray:
        radii = self.inner if which == "inner" else self.outer
        return self.center + radii * np.exp(1j * self.angles)

    def rows(self):
        for k in range(len(self.angles)):
            yield (float(self.angles[k]), float(self.inner[k]), float(self.outer[k]),
                   bool(self.exact[k]))


def _ray_bounds(center: complex, u: complex, rho: float) -> tuple[float, float]:
    y = center + rho * u
    if y == 0:
        return 0.0, 0.0
    b = lambda_punctured(center, y)
    return b.lower, b.upper


def _first_drop(f, rhos, vals, level):
    """First rho where f falls to level, scanning from the inside."""
    below = np.flatnonzero(vals <= level)
    if below.size == 0:
        return None
    k = below[0]
    if k == 0:
        raise TraceError("level too high: the lower bound is below it at the innermost sample")
    return brentq(lambda r: f(r) - level, rhos[k - 1], rhos[k], xtol=1e-15, rtol=1e-14)


def _last_drop(f, rhos, vals, level):
    """Last rho where f is still at or above level."""
    above = np.flatnonzero(vals >= level)
    if above.size == 0:
        raise TraceError("level too high: the upper bound is below it at the innermost sample")
    k = above[-1]
    if k == len(rhos) - 1:
        return None
    return brentq(lambda r: f(r) - level, rhos[k], rhos[k + 1], xtol=1e-15, rtol=1e-14)


def _beyond(f, start: float, level: float, limit: float) -> float:
    """Crossing past ``start`` where f is monotone decreasing."""
    a = start
    b = 2.0 * a
    while f(b) >= level:
        a, b = b, 2.0 * b
        if b > limit:
            raise TraceError(f"level {level!r} too low: no crossing within radius {limit:g}")
    return brentq(lambda r: f(r) - level, a, b, xtol=1e-15, rtol=1e-14)


def trace_metric_sphere(center, level: float, rays: int = 64,
                        samples: int = 400) -> MetricSphereTrace:
    """Trace inner and outer certified radii of lambda(center, .) = level.

    Each ray is sampled on (0, 2|center|] (geometrically near the centre,
    uniformly elsewhere) and the crossings are refined by Brent's method.
    Past 2|center| both bounds decrease along every ray.
    """
    c = as_complex(center)
    if c == 0:
        raise ValueError("the centre must be a point of the punctured plane")
    if not level > 0:
        raise ValueError(f"level must be positive, got {level!r}")
    if rays < 3:
        raise ValueError("need at least three rays")
    R = abs(c)
    rhos = R * np.unique(np.concatenate([np.geomspace(1e-12, 2.0, samples),
                                         np.linspace(0.0, 2.0, samples)[1:]]))
    # rays at multiples of 2 pi / rays measured from the direction of the centre
    angles = cmath.phase(c) + 2 * math.pi * np.arange(rays) / rays
    inner = np.empty(rays)
    outer = np.empty(rays)
    exact = np.zeros(rays, dtype=bool)
    for k, phi in enumerate(angles):
        u = cmath.exp(1j * phi)
        lo = lambda r: _ray_bounds(c, u, r)[0]
        hi = lambda r: _ray_bounds(c, u, r)[1]
        vals = np.array([_ray_bounds(c, u, r) for r in rhos])
        r_in = _first_drop(lo, rhos, vals[:, 0], level)
        if r_in is None:
            r_in = _beyond(lo, rhos[-1], level, 1e15 * R)
        r_out = _last_drop(hi, rhos, vals[:, 1], level)
        if r_out is None:
            r_out = _beyond(hi, rhos[-1], level, 1e15 * R)
        # on exact rays both crossings solve the same equation; keep them ordered
        inner[k], outer[k] = r_in, max(r_out, r_in)
        exact[k] = abs((u * c.conjugate()).imag) <= ANGLE_TOL * R
    return MetricSphereTrace(c, float(level), angles, inner, outer, exact)
