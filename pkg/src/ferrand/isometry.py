"""Candidate plane maps and measurements of how they distort lambda.

Maps are Möbius transformations, radial powers z |z|^(a-1), and ordered
compositions of those.  A map is tested as a lambda-isometry of the punctured
plane on pairs whose lambda is known exactly on both sides, and its linear
dilatation is sampled on shrinking circles.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import distortion
from .capacities import PLANE
from .condenser.geometry import Ray, Segment
from .condenser.solver import DEFAULT_CONFIG, SolveReport, SolverConfig, estimate_capacity
from .condenser.spec import CondenserSpec
from .metrics import PuncturedPair, lambda_punctured

ISOMETRY_TOL = 1e-10
PUNCTURED_DILATATION_BOUND = 4.0
GENERAL_DILATATION_BOUND = 256.0


class PoleError(ValueError):
    """A map was evaluated at (or sampled across) one of its singularities."""


class NotAnIsometryError(ValueError):
    """Isometry certification failed."""


# ---------------------------------------------------------------------------
# maps


@dataclass(frozen=True)
class Mobius:
    """z -> (a z + b) / (c z + d)."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        for k in "abcd":
            object.__setattr__(self, k, complex(getattr(self, k)))
        if self.a * self.d - self.b * self.c == 0:
            raise ValueError("degenerate Möbius map: ad - bc = 0")

    @classmethod
    def identity(cls) -> "Mobius":
        return cls(1, 0, 0, 1)

    @classmethod
    def scaling(cls, c: complex) -> "Mobius":
        return cls(c, 0, 0, 1)

    @classmethod
    def inversion(cls, c: complex = 1) -> "Mobius":
        """z -> c / z."""
        return cls(0, c, 1, 0)

    def __call__(self, z: complex) -> complex:
        z = complex(z)
        den = self.c * z + self.d
        if den == 0:
            raise PoleError(f"{z!r} is the pole of {self}")
        return (self.a * z + self.b) / den

    def then(self, other: "Mobius") -> "Mobius":
        """other after self, as a matrix product."""
        a, b, c, d = self.a, self.b, self.c, self.d
        A, B, C, D = other.a, other.b, other.c, other.d
        return Mobius(A * a + B * c, A * b + B * d, C * a + D * c, C * b + D * d)

    def inverse(self) -> "Mobius":
        return Mobius(self.d, -self.b, -self.c, self.a)

    @property
    def singularities(self) -> tuple[complex, ...]:
        return (-self.d / self.c,) if self.c != 0 else ()

    @property
    def punctured_compatible(self) -> bool:
        """True when {0, inf} is mapped onto itself."""
        return (self.b == 0 and self.c == 0) or (self.a == 0 and self.d == 0)


@dataclass(frozen=True)
class RadialPower:
    """z -> z |z|^(a - 1)."""

    a: float

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"radial power needs a > 0, got {self.a!r}")

    def __call__(self, z: complex) -> complex:
        z = complex(z)
        return z if z == 0 else z * abs(z) ** (self.a - 1.0)

    def inverse(self) -> "RadialPower":
        return RadialPower(1.0 / self.a)

    @property
    def singularities(self) -> tuple[complex, ...]:
        # not conformal at the origin unless a = 1
        return () if self.a == 1 else (0j,)

    punctured_compatible = True


@dataclass(frozen=True)
class Composition:
    """Apply ``maps`` left to right."""

    maps: tuple

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(self.maps))
        if not self.maps:
            raise ValueError("a composition needs at least one map")

    def __call__(self, z: complex) -> complex:
        for f in self.maps:
            z = f(z)
        return z

    def inverse(self) -> "Composition":
        return Composition(tuple(f.inverse() for f in reversed(self.maps)))

    @property
    def singularities(self) -> tuple[complex, ...]:
        # pull each stage's singular points back to the input plane
        out = []
        for k, f in enumerate(self.maps):
            back = Composition(self.maps[:k]).inverse() if k else None
            for s in f.singularities:
                try:
                    out.append(back(s) if back else s)
                except PoleError:
                    pass
        return tuple(out)

    @property
    def punctured_compatible(self) -> bool:
        return all(f.punctured_compatible for f in self.maps)


def compose(*maps):
    """Map applying ``maps`` in order; adjacent Möbius factors are multiplied out."""
    flat = []
    for f in maps:
        flat.extend(f.maps if isinstance(f, Composition) else [f])
    merged = []
    for f in flat:
        if merged and isinstance(f, Mobius) and isinstance(merged[-1], Mobius):
            merged[-1] = merged[-1].then(f)
        else:
            merged.append(f)
    return merged[0] if len(merged) == 1 else Composition(tuple(merged))


def apply(f, z: complex) -> complex:
    return f(z)


# ---------------------------------------------------------------------------
# isometry testing


def certified_pairs() -> list[PuncturedPair]:
    """Fixed pairs with exactly known lambda: collinear with the origin or
    with |x| = |y|, spread over rotations and scales."""
    ratios = [2.0, 3.5, 1.25, 0.2, -1.0, -3.0, -0.4,
              cmath.exp(1j * math.pi / 3), cmath.exp(2j * math.pi / 3), 1j,
              cmath.exp(-0.3j), cmath.exp(2.9j)]
    pairs = []
    for k in range(5):
        rot = cmath.exp(2j * math.pi * k / 5 + 0.1j)
        for scale in (0.5, 1.0, 3.0):
            x = scale * rot
            pairs.extend(PuncturedPair(x, q * x) for q in ratios)
    return pairs


@dataclass(frozen=True)
class LambdaDistortionReport:
    max_discrepancy: float
    discrepancies: tuple[float, ...]
    checked: int
    skipped: tuple[int, ...]

    @property
    def any_skipped(self) -> bool:
        return bool(self.skipped)

    def to_dict(self) -> dict:
        return {"max_discrepancy": self.max_discrepancy, "checked": self.checked,
                "skipped": list(self.skipped)}


def lambda_distortion(f, pairs=None) -> LambdaDistortionReport:
    """max |lambda(f x, f y) - lambda(x, y)| over pairs with exact values on
    both sides.  Pairs without an exact value before or after mapping are
    skipped and listed by index."""
    if not f.punctured_compatible:
        raise ValueError("the map does not preserve the punctured plane")
    if pairs is None:
        pairs = certified_pairs()
    diffs, skipped = [], []
    for k, pair in enumerate(pairs):
        image = pair.mapped(f)
        if pair.classify() == "generic" or image.classify() == "generic":
            skipped.append(k)
            continue
        before = lambda_punctured(pair).value
        after = lambda_punctured(image).value
        diffs.append(abs(after - before))
    if not diffs:
        raise ValueError("no pair has an exact value on both sides")
    return LambdaDistortionReport(max(diffs), tuple(diffs), len(diffs), tuple(skipped))


def certify_isometry(f, pairs=None, tol: float = ISOMETRY_TOL) -> LambdaDistortionReport:
    report = lambda_distortion(f, pairs)
    if report.max_discrepancy > tol:
        raise NotAnIsometryError(
            f"lambda changes by up to {report.max_discrepancy:.3e} (> {tol:g})"
        )
    return report


# ---------------------------------------------------------------------------
# linear dilatation


@dataclass(frozen=True)
class DilatationReport:
    x: complex
    radii: tuple[float, ...]
    ratios: tuple[float, ...]
    samples: int

    @property
    def limsup(self) -> float:
        """Largest ratio over the three smallest radii."""
        order = np.argsort(self.radii)[:3]
        return float(max(self.ratios[k] for k in order))

    def to_dict(self) -> dict:
        return {"x": [self.x.real, self.x.imag], "radii": list(self.radii),
                "ratios": list(self.ratios), "samples": self.samples,
                "limsup": self.limsup}


# the limsup uses the three smallest, so the window sits well inside the first radius
DEFAULT_RADII = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5)


def linear_dilatation(f, x: complex, radii=None, samples: int = 64) -> DilatationReport:
    """Sampled max/min of |f(x) - f(y)| over |y - x| = r for each r."""
    x = complex(x)
    if samples < 8:
        raise ValueError("need at least 8 angular samples")
    sing = f.singularities
    reach = min((abs(x - s) for s in sing), default=math.inf)
    if reach == 0:
        raise PoleError(f"{x!r} is a singular point of the map")
    if radii is None:
        radii = tuple(r * min(1.0, reach, abs(x) or 1.0) for r in DEFAULT_RADII)
    radii = tuple(float(r) for r in radii)
    if any(r <= 0 for r in radii):
        raise ValueError("radii must be positive")
    if max(radii) >= reach:
        raise PoleError(f"radius {max(radii)!r} reaches a singularity at distance {reach!r}")
    fx = f(x)
    w = np.exp(2j * np.pi * np.arange(samples) / samples)
    ratios = []
    for r in radii:
        d = np.array([abs(f(x + r * e) - fx) for e in w])
        ratios.append(float(d.max() / d.min()))
    return DilatationReport(x, radii, tuple(ratios), samples)


DEFAULT_POINTS = (0.5 + 0j, 2 + 0j, 3j, -1.5 + 0.7j, 0.3 - 0.4j, -2 - 2j)


@dataclass(frozen=True)
class PuncturedDilatationCheck:
    certification: LambdaDistortionReport
    reports: tuple[DilatationReport, ...]
    bound: float = PUNCTURED_DILATATION_BOUND

    @property
    def max_estimate(self) -> float:
        return max(r.limsup for r in self.reports)

    @property
    def holds(self) -> bool:
        return self.max_estimate <= self.bound

    def to_dict(self) -> dict:
        return {"max_estimate": self.max_estimate, "bound": self.bound, "holds": self.holds,
                "max_discrepancy": self.certification.max_discrepancy,
                "points": [r.to_dict() for r in self.reports]}


def punctured_dilatation_check(f, points=DEFAULT_POINTS, radii=None,
                               samples: int = 64) -> PuncturedDilatationCheck:
    """Certify f as a lambda-isometry of the punctured plane, then sample its
    linear dilatation at ``points``; the estimates should not exceed 4."""
    cert = certify_isometry(f)
    reports = tuple(linear_dilatation(f, p, radii, samples) for p in points)
    return PuncturedDilatationCheck(cert, reports)


# ---------------------------------------------------------------------------
# dilatation bound profile


@dataclass(frozen=True)
class BoundProfile:
    """Values of the dilatation bound ratio at r.

    ``tau_form`` is 2 tau^-1(tau(r^2/(1-r^2))/2) / sqrt(v/(1+v)) with
    v = tau^-1(2 tau(r/2)); ``psi_form`` is the same quantity rewritten with
    psi and phi, 2 psi_2(r)^2 / (a^2 psi_{1/2}(sqrt(r/(r+2)))) with
    a = phi_{1/2}(sqrt(1 - r^2)).  ``leading_form`` drops the factor a^2,
    which tends to 1 as r -> 0, and ``majorant`` = 128 (r + 2) bounds the
    leading form through the power-law sandwiches for psi; its limit is 256.
    Only the limit r -> 0 matters for the dilatation: away from 0 the full
    ratio grows without bound as r -> 1.
    """

    r: float
    tau_form: float
    psi_form: float
    leading_form: float
    majorant: float

    @property
    def route_gap(self) -> float:
        return abs(self.tau_form - self.psi_form) / self.tau_form

    def to_dict(self) -> dict:
        return {"r": self.r, "tau_form": self.tau_form, "psi_form": self.psi_form,
                "leading_form": self.leading_form, "majorant": self.majorant}


def dilatation_bound_profile(r: float) -> BoundProfile:
    r = float(r)
    if not 0 < r < 1:
        raise ValueError(f"r must lie in (0, 1), got {r!r}")
    ev = PLANE
    num = 2.0 * ev.tau_inv(0.5 * ev.tau(r * r / ((1 - r) * (1 + r))))
    v = ev.tau_inv(2.0 * ev.tau(0.5 * r))
    tau_form = num / math.sqrt(v / (1.0 + v))

    rc = math.sqrt((1 - r) * (1 + r))
    a = distortion.phi(0.5, rc)
    p2 = distortion.psi(2.0, r)
    ph = distortion.psi(0.5, math.sqrt(r / (r + 2.0)))
    leading = 2.0 * p2 * p2 / ph
    return BoundProfile(r, tau_form, leading / (a * a), leading, 128.0 * (r + 2.0))


# ---------------------------------------------------------------------------
# sphere ordering


@dataclass(frozen=True)
class SphereMargin:
    r: float
    theta: float
    closed_form: float
    oracle: SolveReport = field(repr=False)

    @property
    def oracle_value(self) -> float:
        return self.oracle.best

    @property
    def margin(self) -> float:
        return self.closed_form - self.oracle_value

    @property
    def relative_margin(self) -> float:
        return self.margin / self.closed_form

    def to_dict(self) -> dict:
        return {"r": self.r, "theta": self.theta, "closed_form": self.closed_form,
                "oracle": self.oracle_value, "margin": self.margin,
                "relative_margin": self.relative_margin}


def sphere_condenser(r: float, theta: float) -> CondenserSpec:
    """[0, e1] against the radial ray from r e^{i theta} to infinity."""
    z = r * cmath.exp(1j * theta)
    return CondenserSpec((Segment(0j, 1 + 0j, "unit"),), (Ray(z, z, "ray"),), "auto")


def sphere_ordering_margins(r: float, thetas, config: SolverConfig = DEFAULT_CONFIG):
    """tau(r - 1) minus the grid modulus of ([0, e1], [r e^{i theta}, inf])
    for each theta; positive margins mean the point on the axis is farthest
    in lambda among the points of the circle |z| = r."""
    r = float(r)
    if not r > 1:
        raise ValueError(f"r must exceed 1, got {r!r}")
    closed = PLANE.tau(r - 1.0)
    out = []
    for theta in thetas:
        theta = float(theta)
        if math.remainder(theta, 2 * math.pi) == 0:
            raise ValueError("theta = 0 is the equality case")
        out.append(SphereMargin(r, theta, closed,
                                estimate_capacity(sphere_condenser(r, theta), config=config)))
    return out
