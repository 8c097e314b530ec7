"""Complete elliptic integral of the first kind and the Grötzsch ring modulus.

Everything here runs on the arithmetic-geometric mean, so only double
precision arithmetic is involved.  Functions that are sensitive near the
modulus ``r -> 1`` also accept the complementary modulus ``r' = sqrt(1 - r^2)``
explicitly; callers that know ``r'`` to full relative precision should pass it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

AGM_RTOL = 1e-15
AGM_MAX_ITER = 64

HALF_PI = 0.5 * math.pi
PI2_OVER_4 = 0.25 * math.pi**2


class ConvergenceError(ArithmeticError):
    """An iteration hit its cap before meeting its tolerance."""


@dataclass(frozen=True)
class EllipticResult:
    value: float
    iterations: int
    residual: float


def agm_report(a: float, b: float) -> EllipticResult:
    """AGM of ``a`` and ``b`` with iteration count and final relative gap."""
    a = float(a)
    b = float(b)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError(f"agm needs finite arguments, got {a!r}, {b!r}")
    if a < 0 or b < 0 or (a == 0 and b == 0):
        raise ValueError(f"agm needs a, b >= 0 and not both zero, got {a!r}, {b!r}")
    if a == 0 or b == 0:
        return EllipticResult(0.0, 0, 0.0)
    for it in range(AGM_MAX_ITER + 1):
        gap = abs(a - b) / max(a, b)
        if gap < AGM_RTOL:
            return EllipticResult(0.5 * (a + b), it, gap)
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    raise ConvergenceError(f"agm did not converge in {AGM_MAX_ITER} iterations")


def agm(a: float, b: float) -> float:
    return agm_report(a, b).value


def complement(r: float) -> float:
    """sqrt(1 - r^2) evaluated as sqrt((1 - r)(1 + r))."""
    return math.sqrt((1.0 - r) * (1.0 + r))


def _check_modulus(r: float, name: str = "r") -> float:
    r = float(r)
    if not math.isfinite(r):
        raise ValueError(f"{name} must be finite, got {r!r}")
    return r


def ellint_K(r: float, rc: float | None = None) -> float:
    """Complete elliptic integral K(r) = pi / (2 agm(1, r')) for 0 <= r < 1.

    ``rc`` is the complementary modulus; it is computed from ``r`` when omitted.
    """
    r = _check_modulus(r)
    if not 0.0 <= r < 1.0:
        raise ValueError(f"K(r) needs 0 <= r < 1, got {r!r}")
    if rc is None:
        rc = complement(r)
    return HALF_PI / agm(1.0, rc)


def mu(r: float, rc: float | None = None) -> float:
    """Grötzsch ring modulus mu(r) = (pi/2) K(r') / K(r), 0 < r < 1.

    Written as (pi/2) agm(1, r') / agm(1, r), which needs no K evaluation
    close to the logarithmic singularity.
    """
    r = _check_modulus(r)
    if rc is None:
        if not 0.0 < r < 1.0:
            raise ValueError(f"mu(r) needs 0 < r < 1, got {r!r}")
        rc = complement(r)
    if not (r > 0.0 and rc > 0.0):
        raise ValueError(f"mu needs r, r' > 0, got {r!r}, {rc!r}")
    return HALF_PI * agm(1.0, rc) / agm(1.0, r)
