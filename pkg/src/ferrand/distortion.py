"""Distortion functions phi_K and psi_K built on the Grötzsch capacity.

phi_K(r) = 1 / gamma^-1(K gamma(1/r)) on (0, 1) with phi_K(0) = 0 and
phi_K(1) = 1, and psi_K(r) = sqrt(1 - phi_{1/K}(sqrt(1 - r^2))^2).

Internally a radius r in (0, 1) is carried as the excess d = 1/r - 1 of
its reciprocal, which is what gamma consumes.  Then phi = 1/(1 + d*) for the
image excess d* and 1 - phi^2 = d*(2 + d*)/(1 + d*)^2, so neither phi near 1
nor psi near 0 is formed by cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .capacities import PLANE, CapacityEvaluator


@dataclass(frozen=True)
class DistortionParams:
    K: float
    evaluator: CapacityEvaluator = field(default=PLANE)

    def __post_init__(self):
        if not (self.K > 0 and math.isfinite(self.K)):
            raise ValueError(f"K must be positive and finite, got {self.K!r}")

    @property
    def n(self) -> int:
        return self.evaluator.dimension

    def inverse(self) -> "DistortionParams":
        return DistortionParams(1.0 / self.K, self.evaluator)


def _as_params(params) -> DistortionParams:
    return params if isinstance(params, DistortionParams) else DistortionParams(float(params))


def _check_unit(r: float) -> float:
    r = float(r)
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"radius must lie in [0, 1], got {r!r}")
    return r


def image_excess(params, d: float) -> float:
    """d* with 1 + d* = gamma^-1(K gamma(1 + d)), the excess form of phi_K."""
    p = _as_params(params)
    if p.K == 1.0:
        return d
    ev = p.evaluator
    return ev.gamma_inv_excess(p.K * ev.gamma_excess(d))


def phi(params, r: float) -> float:
    p = _as_params(params)
    r = _check_unit(r)
    if r in (0.0, 1.0) or p.K == 1.0:
        return r
    d = image_excess(p, (1.0 - r) / r)
    return 1.0 / (1.0 + d)


def psi(params, r: float) -> float:
    p = _as_params(params)
    r = _check_unit(r)
    if r in (0.0, 1.0) or p.K == 1.0:
        return r
    x = math.sqrt((1.0 - r) * (1.0 + r))
    # 1/x - 1 = r^2 / ((1 + x) x)
    d = image_excess(p.inverse(), r * r / ((1.0 + x) * x))
    return math.sqrt(d * (2.0 + d)) / (1.0 + d)


def tau_inv_scaled(params, t: float) -> float:
    """(1 - phi_K(u)^2) / phi_K(u)^2 with u = 1/sqrt(1 + t).

    This equals tau^-1(K tau(t)); compare :func:`tau_inv_composed`.
    """
    p = _as_params(params)
    t = float(t)
    if not t > 0:
        raise ValueError(f"t must be positive, got {t!r}")
    # 1/u - 1 = sqrt(1 + t) - 1
    d = image_excess(p, t / (math.sqrt(1.0 + t) + 1.0))
    return d * (2.0 + d)


def tau_inv_composed(params, t: float) -> float:
    """tau^-1(K tau(t)) evaluated literally."""
    p = _as_params(params)
    ev = p.evaluator
    return ev.tau_inv(p.K * ev.tau(t))


@dataclass(frozen=True)
class PsiBounds:
    """Power-law sandwiches for psi_K and psi_{1/K}, K >= 1.

    r^(1/K) <= psi_K(r) <= 2^(2 - 1/K) r^(1/K) and
    2^(1 - 2K) r^K <= psi_{1/K}(r) <= r^K.
    """

    K: float
    r: float
    psi_K: float
    psi_inv: float
    lower_K: float
    upper_K: float
    lower_inv: float
    upper_inv: float

    @property
    def holds(self) -> bool:
        return (self.lower_K <= self.psi_K <= self.upper_K
                and self.lower_inv <= self.psi_inv <= self.upper_inv)

    @property
    def margin(self) -> float:
        """Smallest relative slack over the four inequalities (negative if violated)."""
        return min(self.psi_K / self.lower_K - 1.0, 1.0 - self.psi_K / self.upper_K,
                   self.psi_inv / self.lower_inv - 1.0, 1.0 - self.psi_inv / self.upper_inv)


def psi_bounds(K: float, r: float, evaluator: CapacityEvaluator = PLANE) -> PsiBounds:
    if not K >= 1:
        raise ValueError(f"the psi sandwich needs K >= 1, got {K!r}")
    r = _check_unit(r)
    if r == 0:
        raise ValueError("the psi sandwich is stated for r > 0")
    p = DistortionParams(K, evaluator)
    a = r ** (1.0 / K)
    b = r**K
    return PsiBounds(K, r, psi(p, r), psi(p.inverse(), r),
                     a, 2.0 ** (2.0 - 1.0 / K) * a, 2.0 ** (1.0 - 2.0 * K) * b, b)
