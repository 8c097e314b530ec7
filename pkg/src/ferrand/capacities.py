"""Grötzsch and Teichmüller ring capacities with monotone inverses.

gamma_n(t), t > 1, is the capacity of the ring between the closed unit ball
and the ray [t e1, inf]; tau_n(s), s > 0, the capacity of the ring between
[-e1, 0] and [s e1, inf].  They are tied by gamma_n(t) = 2^(n-1) tau_n(t^2 - 1).

In the plane gamma_2(t) = 2 pi / mu(1/t).  No evaluation route exists for
n >= 3; an evaluator in that dimension is abstract unless the caller plugs in
a Grötzsch function, and then only the identity and the inverse machinery
are provided on top of it.

Near t = 1 (s = 0) the arguments are carried as the excess d = t - 1 so the
complementary modulus is never formed by cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from scipy.optimize import brentq

from .elliptic import mu

# Search ranges for the inverses, as (lower, upper) bounds on the excess t - 1
# for gamma and on s for tau.
EXCESS_RANGE = (1e-300, 1e300)
TAU_RANGE = (1e-300, 1e300)


class AbstractModeError(RuntimeError):
    """Evaluation requested from an evaluator that has no formula."""


class BracketError(ValueError):
    """No sign change found inside the admissible argument range."""


def invert_decreasing(
    f: Callable[[float], float],
    y: float,
    lo: float,
    hi: float,
    start: float = 1.0,
) -> float:
    """Solve f(x) = y for a strictly decreasing positive-argument f.

    The bracket is grown geometrically around ``start`` (doubling steps in
    log x, clamped to [lo, hi]) and then refined with Brent's method in log x.
    """
    if not (y > 0 and math.isfinite(y)):
        raise ValueError(f"inverse needs a positive finite value, got {y!r}")
    ulo, uhi = math.log(lo), math.log(hi)
    u0 = min(max(math.log(start), ulo), uhi)

    def g(u: float) -> float:
        return f(math.exp(u)) - y

    g0 = g(u0)
    if g0 == 0:
        return math.exp(u0)
    # f decreasing: g0 > 0 means the root lies to the right.
    direction = 1.0 if g0 > 0 else -1.0
    step = 1.0
    a, ga = u0, g0
    while True:
        b = min(max(a + direction * step, ulo), uhi)
        gb = g(b)
        if gb == 0:
            return math.exp(b)
        if (gb > 0) != (ga > 0):
            break
        if b in (ulo, uhi):
            raise BracketError(
                f"no solution of f(x) = {y!r} for x in [{lo:g}, {hi:g}]"
            )
        a, ga = b, gb
        step *= 2.0
    left, right = (a, b) if a < b else (b, a)
    u = brentq(g, left, right, xtol=1e-15, rtol=8.9e-16, maxiter=200)
    return math.exp(u)


@dataclass(frozen=True)
class CapacityEvaluator:
    """Ring capacities in dimension ``dimension``.

    ``grotzsch`` optionally supplies gamma_n for n >= 3 as a callable of t.
    """

    dimension: int = 2
    grotzsch: Callable[[float], float] | None = None

    def __post_init__(self):
        if int(self.dimension) != self.dimension or self.dimension < 2:
            raise ValueError(f"dimension must be an integer >= 2, got {self.dimension!r}")
        if self.dimension == 2 and self.grotzsch is not None:
            raise ValueError("the planar evaluator is exact; it takes no plug-in")

    @property
    def mode(self) -> str:
        return "exact" if self.dimension == 2 else "abstract"

    @property
    def evaluable(self) -> bool:
        return self.dimension == 2 or self.grotzsch is not None

    @property
    def identity_factor(self) -> float:
        """2^(n-1) in gamma_n(t) = 2^(n-1) tau_n(t^2 - 1)."""
        return 2.0 ** (self.dimension - 1)

    def _require_evaluable(self):
        if not self.evaluable:
            raise AbstractModeError(
                f"no evaluation route for gamma_{self.dimension}; "
                "supply a grotzsch callable to use the abstract machinery"
            )

    # forward evaluations -------------------------------------------------

    def gamma_excess(self, d: float) -> float:
        """gamma_n(1 + d) for d > 0."""
        self._require_evaluable()
        d = float(d)
        if not d > 0:
            raise ValueError(f"gamma needs t > 1, got t - 1 = {d!r}")
        if math.isinf(d):
            return 0.0
        if self.grotzsch is not None:
            return float(self.grotzsch(1.0 + d))
        t = 1.0 + d
        return 2.0 * math.pi / mu(1.0 / t, math.sqrt(d * (2.0 + d)) / t)

    def gamma(self, t: float) -> float:
        t = float(t)
        if not t > 1:
            raise ValueError(f"gamma needs t > 1, got {t!r}")
        return self.gamma_excess(t - 1.0)

    def tau(self, s: float) -> float:
        """tau_n(s) = gamma_n(sqrt(1 + s)) / 2^(n-1)."""
        s = float(s)
        if not s > 0:
            raise ValueError(f"tau needs s > 0, got {s!r}")
        if math.isinf(s):
            return 0.0
        # sqrt(1 + s) - 1 without cancellation
        d = s / (math.sqrt(1.0 + s) + 1.0)
        return self.gamma_excess(d) / self.identity_factor

    # inverses -------------------------------------------------------------

    def gamma_inv_excess(self, y: float) -> float:
        """The excess t - 1 of the t > 1 with gamma_n(t) = y."""
        self._require_evaluable()
        return invert_decreasing(self.gamma_excess, y, *EXCESS_RANGE)

    def gamma_inv(self, y: float) -> float:
        return 1.0 + self.gamma_inv_excess(y)

    def tau_inv(self, y: float) -> float:
        self._require_evaluable()
        return invert_decreasing(self.tau, y, *TAU_RANGE)

    def identity_residual(self, t: float) -> float:
        """Relative gap |gamma(t) - 2^(n-1) tau(t^2 - 1)| / gamma(t)."""
        t = float(t)
        g = self.gamma(t)
        return abs(g - self.identity_factor * self.tau((t - 1.0) * (t + 1.0))) / g


PLANE = CapacityEvaluator(2)


def gamma(t: float) -> float:
    return PLANE.gamma(t)


def tau(s: float) -> float:
    return PLANE.tau(s)


def gamma_inv(y: float) -> float:
    return PLANE.gamma_inv(y)


def tau_inv(y: float) -> float:
    return PLANE.tau_inv(y)
