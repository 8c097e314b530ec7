"""Invariant suites run by ``ferrand verify``.

Each suite is a function yielding Check records; nothing here raises on a
failed property, so one broken invariant never hides the others.
"""

from __future__ import annotations

import cmath
import math
import time
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from . import distortion, elliptic, isometry, metrics
from .capacities import PLANE
from .condenser.geometry import Arc, Disk, Ray, Segment
from .condenser.solver import estimate_capacity
from .condenser.spec import CondenserSpec


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.suite}: {self.name}  {self.detail}"


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


def elliptic_suite() -> Iterator[Check]:
    s = "elliptic"
    rs = np.geomspace(1e-6, 1 - 1e-6, 50)
    # each factor gets its complement exactly: sqrt(1 - r'^2) = r
    err = max(_rel(elliptic.mu(r) * elliptic.mu(elliptic.complement(r), r), elliptic.PI2_OVER_4)
              for r in rs)
    yield Check(s, "mu(r) mu(r') = pi^2/4", err <= 1e-12, f"max rel err {err:.2e}")
    k = [elliptic.ellint_K(r) for r in np.linspace(0, 0.999999, 200)]
    m = [elliptic.mu(r) for r in rs]
    yield Check(s, "K increasing, mu decreasing",
                bool(np.all(np.diff(k) > 0) and np.all(np.diff(m) < 0)))
    g = elliptic.agm(3.0, 7.0)
    yield Check(s, "agm homogeneous and between its arguments",
                3 <= g <= 7 and _rel(elliptic.agm(6.0, 14.0), 2 * g) <= 1e-14)


def capacity_suite() -> Iterator[Check]:
    s = "capacities"
    e1 = _rel(PLANE.gamma(math.sqrt(2)), 4.0)
    e2 = _rel(PLANE.tau(1.0), 2.0)
    yield Check(s, "gamma(sqrt 2) = 4, tau(1) = 2", max(e1, e2) <= 1e-10,
                f"rel err {max(e1, e2):.2e}")
    ts = 1 + np.geomspace(1e-6, 99, 100)
    err = max(PLANE.identity_residual(t) for t in ts)
    yield Check(s, "gamma(t) = 2 tau(t^2 - 1)", err <= 1e-10, f"max rel err {err:.2e}")
    err = max(max(_rel(PLANE.tau_inv(PLANE.tau(x)), x), _rel(PLANE.gamma_inv(PLANE.gamma(1 + x)), 1 + x))
              for x in (0.1, 1.0, 7.0))
    yield Check(s, "inverse round trips", err <= 1e-10, f"max rel err {err:.2e}")
    vals = [PLANE.tau(x) for x in np.geomspace(1e-6, 1e6, 100)]
    yield Check(s, "tau strictly decreasing", bool(np.all(np.diff(vals) < 0)))


def distortion_suite() -> Iterator[Check]:
    s = "distortion"
    err = 0.0
    for K in (0.5, 1.0, 2.0, 4.0):
        for t in np.geomspace(1e-3, 1e3, 31):
            err = max(err, _rel(distortion.tau_inv_scaled(K, t), distortion.tau_inv_composed(K, t)))
    yield Check(s, "tau^-1(K tau(t)) routes agree", err <= 1e-9, f"max rel err {err:.2e}")
    margin = min(distortion.psi_bounds(K, r).margin
                 for K in (1.0, 2.0, 4.0) for r in np.linspace(0.005, 1.0, 200))
    yield Check(s, "psi power-law sandwiches", margin >= 0, f"min slack {margin:.2e}")
    err = max(abs(distortion.phi(2, distortion.phi(3, r)) - distortion.phi(6, r))
              for r in (0.1, 0.5, 0.9))
    yield Check(s, "phi_K o phi_K' = phi_KK'", err <= 1e-9, f"max err {err:.2e}")


def _exact_pairs(count: int = 200) -> list[metrics.PuncturedPair]:
    """Deterministic pairs alternating collinear and equal-modulus configurations."""
    pairs = []
    for k in range(count):
        rot = cmath.exp(1j * (0.37 * k))
        x = (0.3 + (k % 7) * 0.45) * rot
        if k % 4 == 0:
            q = 1.05 + 0.173 * (k % 23)
        elif k % 4 == 1:
            q = -(0.1 + 0.211 * (k % 19))
        elif k % 4 == 2:
            q = 1 / (1.1 + 0.3 * (k % 11))
        else:
            q = cmath.exp(1j * (0.05 + (2 * math.pi - 0.1) * ((k * 0.618034) % 1)))
        pairs.append(metrics.PuncturedPair(x, q * x))
    return pairs


def metrics_suite() -> Iterator[Check]:
    s = "metrics"
    bad7 = bad31 = 0
    for pair in _exact_pairs():
        v = metrics.lambda_punctured(pair).value
        if v is None:
            bad7 += 1
            continue
        if not metrics.sandwich_punctured(pair).contains(v, 1e-12):
            bad7 += 1
        dom = metrics.DomainSpec("punctured")
        # the local estimate needs y inside B(x, |x|)
        for a, b in ((pair.x, pair.y), (pair.y, pair.x)):
            if abs(a - b) < abs(a):
                if not metrics.lambda_general_bounds(dom, a, b).contains(v, 1e-12):
                    bad31 += 1
    yield Check(s, "punctured sandwich brackets exact lambda", bad7 == 0, f"{bad7} violations")
    yield Check(s, "local sandwich brackets exact lambda", bad31 == 0, f"{bad31} violations")
    err = max(abs(metrics.lambda_punctured(p).value - metrics.lambda_punctured(p.swapped()).value)
              for p in _exact_pairs(40))
    yield Check(s, "lambda symmetric", err == 0.0, f"max diff {err:.2e}")
    circle = [metrics.p_unit_circle(t) for t in np.linspace(0.1, 2 * math.pi - 0.1, 64)]
    ok = all(metrics.p_unit_circle(t) >= metrics.p_lower(cmath.exp(1j * t)) for t in
             np.linspace(0.1, 2 * math.pi - 0.1, 64)) and min(circle) >= 2 - 1e-12
    yield Check(s, "unit-circle p above its lower bound and >= 2",
                ok and abs(metrics.p_unit_circle(math.pi) - 2) <= 1e-12)
    lam = [metrics.lambda_ball(0, t).value for t in np.linspace(0.01, 0.99, 50)]
    yield Check(s, "ball lambda decreasing along a radius", bool(np.all(np.diff(lam) < 0)))
    tr = metrics.trace_metric_sphere(1, 2.0, rays=16)
    yield Check(s, "traced inner radii within outer radii", bool(np.all(tr.inner <= tr.outer)),
                f"axis crossing {tr.inner[0]:.12f}")


def isometry_suite() -> Iterator[Check]:
    s = "isometry"
    for name, f in (("z -> 3z", isometry.Mobius.scaling(3)),
                    ("z -> 2/z", isometry.Mobius.inversion(2)),
                    ("z -> (1+i)/z", isometry.Mobius.inversion(1 + 1j))):
        try:
            chk = isometry.punctured_dilatation_check(f)
            yield Check(s, f"{name} certified, dilatation <= 4", chk.holds,
                        f"disc {chk.certification.max_discrepancy:.1e}, H {chk.max_estimate:.4f}")
        except isometry.NotAnIsometryError as exc:
            yield Check(s, f"{name} certified, dilatation <= 4", False, str(exc))
    f = isometry.RadialPower(2.0)
    pair = metrics.PuncturedPair(1, 2)
    d = isometry.lambda_distortion(f, [pair]).max_discrepancy
    want = PLANE.tau(1) - PLANE.tau(3)
    yield Check(s, "radial power a = 2 detected", d > 0 and _rel(d, want) <= 1e-12,
                f"discrepancy {d:.15g}")
    h = isometry.linear_dilatation(f, 1).limsup
    yield Check(s, "radial power dilatation near 2", _rel(h, 2.0) <= 0.05, f"{h:.6f}")
    profile = [isometry.dilatation_bound_profile(r) for r in np.geomspace(1e-3, 0.3, 12)]
    top = max(p.tau_form for p in profile)
    gap = max(p.route_gap for p in profile)
    yield Check(s, "bound profile <= 256", top <= 256, f"max {top:.6f}")
    yield Check(s, "bound profile routes agree", gap <= 1e-8, f"max gap {gap:.2e}")


def oracle_suite() -> Iterator[Check]:
    s = "oracle"
    cases = [
        ("annulus", CondenserSpec((Arc(0j, 1.0, 0.0, 2 * math.pi),),
                                  (Arc(0j, math.e, 0.0, 2 * math.pi),)), 2 * math.pi, 0.01),
        ("Teichmüller s = 1", CondenserSpec((Segment(-1 + 0j, 0j),), (Ray(1 + 0j, 1 + 0j),), "auto"),
         2.0, 0.02),
        ("Grötzsch t = sqrt 2", CondenserSpec((Disk(0j, 1.0),), (Ray(math.sqrt(2) + 0j, 1 + 0j),),
                                              "auto"), 4.0, 0.02),
    ]
    for name, spec, exact, tol in cases:
        r = estimate_capacity(spec)
        err = _rel(r.best, exact)
        yield Check(s, f"{name} capacity", err <= tol, f"{r.best:.6f} vs {exact:.6f} ({err:.2%})")
    margins = isometry.sphere_ordering_margins(2.0, (math.pi / 4, math.pi / 2, math.pi))
    for m in margins:
        yield Check(s, f"sphere ordering at theta = {m.theta:.4f}", m.relative_margin > 0.02,
                    f"oracle {m.oracle_value:.6f}, margin {m.relative_margin:.2%}")


SUITES: dict[str, Callable[[], Iterator[Check]]] = {
    "elliptic": elliptic_suite,
    "capacities": capacity_suite,
    "distortion": distortion_suite,
    "metrics": metrics_suite,
    "isometry": isometry_suite,
    "oracle": oracle_suite,
}


def run_suites(names=None, report: Callable[[Check], None] | None = None) -> list[Check]:
    out = []
    for name in names or SUITES:
        t = time.perf_counter()
        try:
            for check in SUITES[name]():
                out.append(check)
                if report:
                    report(check)
        except Exception as exc:  # a crashing suite is a failed suite
            check = Check(name, "suite raised", False, f"{type(exc).__name__}: {exc}")
            out.append(check)
            if report:
                report(check)
        if report:
            report(Check(name, "elapsed", True, f"{time.perf_counter() - t:.1f}s"))
    return out
