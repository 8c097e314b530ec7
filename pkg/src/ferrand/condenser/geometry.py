"""Plate primitives for planar condensers.

Points are complex numbers.  Every primitive knows its Euclidean distance
field, a bounding box, a dense sampling, its image under the inversion
z -> 1 / (z - w), and where it meets horizontal grid edges (``hits``: the
first and last contact as fractions of the edge; vertical edges are handled
by reflecting the primitive in the diagonal with ``swapped``).

Inversions send segments, rays, arcs and circles to segments or arcs, and
closed disks not containing w to closed disks.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi


class GeometryError(ValueError):
    pass


def invert(z, w: complex):
    """z -> 1 / (z - w); the point at infinity goes to 0."""
    if isinstance(z, np.ndarray):
        return 1.0 / (z - w)
    if z is None or (isinstance(z, complex) and cmath.isinf(z)):
        return 0j
    if z == w:
        raise GeometryError("inversion centre lies on a plate")
    return 1.0 / (z - w)


def _swap(z: complex) -> complex:
    """Reflection in the diagonal, (x, y) -> (y, x)."""
    return complex(z.imag, z.real)


def _segment_distance(p: np.ndarray, a: complex, b: complex) -> np.ndarray:
    ab = b - a
    L2 = abs(ab) ** 2
    if L2 == 0:
        return np.abs(p - a)
    t = np.clip(((p - a) * np.conj(ab)).real / L2, 0.0, 1.0)
    return np.abs(p - (a + t * ab))


def _collinear(p0: complex, p1: complex, p2: complex, rtol: float = 1e-12) -> bool:
    cross = ((p1 - p0) * np.conj(p2 - p0)).imag
    scale = max(abs(p1 - p0), abs(p2 - p0), abs(p2 - p1)) ** 2
    return abs(cross) <= rtol * scale


def _circumcircle(p0: complex, p1: complex, p2: complex) -> tuple[complex, float]:
    # solve |c - p|^2 equal for the three points
    a = p1 - p0
    b = p2 - p0
    d = 2.0 * (a.real * b.imag - a.imag * b.real)
    if d == 0:
        raise GeometryError("points are collinear")
    aa = abs(a) ** 2
    bb = abs(b) ** 2
    cx = (b.imag * aa - a.imag * bb) / d
    cy = (a.real * bb - b.real * aa) / d
    c = complex(cx, cy)
    return p0 + c, abs(c)


def arc_through(p0: complex, pm: complex, p1: complex, ident: str = "") -> "Segment | Arc":
    """The circular arc (or segment) from p0 to p1 passing through pm."""
    if _collinear(p0, pm, p1):
        return Segment(p0, p1, ident)
    c, R = _circumcircle(p0, pm, p1)
    a0 = math.atan2((p0 - c).imag, (p0 - c).real)
    am = math.atan2((pm - c).imag, (pm - c).real)
    a1 = math.atan2((p1 - c).imag, (p1 - c).real)
    sweep = (a1 - a0) % TWO_PI
    if (am - a0) % TWO_PI <= sweep:
        return Arc(c, R, a0, sweep, ident)
    return Arc(c, R, a1, TWO_PI - sweep, ident)


@dataclass(frozen=True)
class Segment:
    a: complex
    b: complex
    ident: str = ""
    kind: str = field(default="segment", init=False)
    unbounded = False

    def distance(self, p: np.ndarray) -> np.ndarray:
        return _segment_distance(p, self.a, self.b)

    def bbox(self):
        return (min(self.a.real, self.b.real), max(self.a.real, self.b.real),
                min(self.a.imag, self.b.imag), max(self.a.imag, self.b.imag))

    def samples(self, spacing: float) -> np.ndarray:
        n = max(2, int(math.ceil(abs(self.b - self.a) / spacing)) + 1)
        return self.a + (self.b - self.a) * np.linspace(0.0, 1.0, n)

    def scale(self, c: complex) -> "Segment":
        return Segment(self.a * c, self.b * c, self.ident)

    def swapped(self) -> "Segment":
        return Segment(_swap(self.a), _swap(self.b), self.ident)

    def hits(self, x0: np.ndarray, y0: np.ndarray, length: np.ndarray):
        a, b = self.a, self.b
        lo = np.full(x0.shape, np.nan)
        hi = np.full(x0.shape, np.nan)
        if a.imag == b.imag:
            on = np.abs(y0 - a.imag) <= 1e-12 * max(abs(a), abs(b), 1e-300)
            s0 = np.maximum(x0, min(a.real, b.real))
            s1 = np.minimum(x0 + length, max(a.real, b.real))
            ok = on & (s0 <= s1)
            lo[ok] = ((s0 - x0) / length)[ok]
            hi[ok] = ((s1 - x0) / length)[ok]
            return lo, hi
        s = (y0 - a.imag) / (b.imag - a.imag)
        xs = a.real + s * (b.real - a.real)
        t = (xs - x0) / length
        ok = (s >= 0) & (s <= 1) & (t >= 0) & (t <= 1)
        lo[ok] = t[ok]
        hi[ok] = t[ok]
        return lo, hi

    def inverted(self, w: complex):
        if self.distance(np.array([w]))[0] == 0:
            raise GeometryError(f"inversion centre lies on plate {self.ident!r}")
        return arc_through(invert(self.a, w), invert(0.5 * (self.a + self.b), w),
                           invert(self.b, w), self.ident)


@dataclass(frozen=True)
class Ray:
    """The ray {start + t * direction : t >= 0} together with infinity."""

    start: complex
    direction: complex
    ident: str = ""
    kind: str = field(default="ray", init=False)
    unbounded = True

    def __post_init__(self):
        if self.direction == 0:
            raise GeometryError("ray direction must be nonzero")
        object.__setattr__(self, "direction", self.direction / abs(self.direction))

    def distance(self, p: np.ndarray) -> np.ndarray:
        t = np.maximum(((p - self.start) * np.conj(self.direction)).real, 0.0)
        return np.abs(p - (self.start + t * self.direction))

    def bbox(self):
        raise GeometryError(f"plate {self.ident!r} is unbounded; compactify first")

    def samples(self, spacing: float, length: float = 1.0) -> np.ndarray:
        n = max(2, int(math.ceil(length / spacing)) + 1)
        return self.start + self.direction * np.linspace(0.0, length, n)

    def scale(self, c: complex) -> "Ray":
        return Ray(self.start * c, self.direction * c / abs(c), self.ident)

    def swapped(self) -> "Ray":
        return Ray(_swap(self.start), _swap(self.direction), self.ident)

    def inverted(self, w: complex):
        if self.distance(np.array([w]))[0] == 0:
            raise GeometryError(f"inversion centre lies on plate {self.ident!r}")
        p0 = invert(self.start, w)
        # any interior point of the ray maps strictly between p0 and 0
        scale = max(abs(self.start - w), 1.0)
        pm = invert(self.start + scale * self.direction, w)
        return arc_through(p0, pm, 0j, self.ident)


@dataclass(frozen=True)
class Arc:
    """Circular arc from angle ``start`` counterclockwise through ``sweep``."""

    center: complex
    radius: float
    start: float
    sweep: float
    ident: str = ""
    kind: str = field(default="arc", init=False)
    unbounded = False

    def __post_init__(self):
        if not self.radius > 0:
            raise GeometryError("arc radius must be positive")
        if not 0 < self.sweep <= TWO_PI:
            raise GeometryError("arc sweep must lie in (0, 2 pi]")

    @property
    def full(self) -> bool:
        return self.sweep >= TWO_PI

    def point(self, angle: float) -> complex:
        return self.center + self.radius * cmath.exp(1j * angle)

    def distance(self, p: np.ndarray) -> np.ndarray:
        rel = p - self.center
        on_circle = np.abs(np.abs(rel) - self.radius)
        if self.full:
            return on_circle
        ang = (np.angle(rel) - self.start) % TWO_PI
        ends = np.minimum(np.abs(p - self.point(self.start)),
                          np.abs(p - self.point(self.start + self.sweep)))
        return np.where(ang <= self.sweep, on_circle, ends)

    def samples(self, spacing: float) -> np.ndarray:
        n = max(3, int(math.ceil(self.radius * self.sweep / spacing)) + 1)
        ang = self.start + np.linspace(0.0, self.sweep, n)
        return self.center + self.radius * np.exp(1j * ang)

    def bbox(self):
        pts = self.samples(self.radius * 1e-3)
        return (pts.real.min(), pts.real.max(), pts.imag.min(), pts.imag.max())

    def scale(self, c: complex) -> "Arc":
        return Arc(self.center * c, self.radius * abs(c),
                   self.start + cmath.phase(c), self.sweep, self.ident)

    def swapped(self) -> "Arc":
        # reflection in the diagonal maps angle a to pi/2 - a
        return Arc(_swap(self.center), self.radius,
                   0.5 * math.pi - self.start - self.sweep, self.sweep, self.ident)

    def hits(self, x0: np.ndarray, y0: np.ndarray, length: np.ndarray):
        c, R = self.center, self.radius
        dy = y0 - c.imag
        disc = R * R - dy * dy
        lo = np.full(x0.shape, np.nan)
        hi = np.full(x0.shape, np.nan)
        with np.errstate(invalid="ignore"):
            dx = np.sqrt(disc)
        for sign in (-1.0, 1.0):
            xs = c.real + sign * dx
            t = (xs - x0) / length
            ok = (disc >= 0) & (t >= 0) & (t <= 1)
            if not self.full:
                ang = (np.arctan2(dy, sign * dx) - self.start) % TWO_PI
                ok &= ang <= self.sweep
            lo = np.where(ok, np.fmin(lo, t), lo)
            hi = np.where(ok, np.fmax(hi, t), hi)
        return lo, hi

    def inverted(self, w: complex):
        if self.distance(np.array([w]))[0] == 0:
            raise GeometryError(f"inversion centre lies on plate {self.ident!r}")
        if self.full:
            if abs(abs(w - self.center) - self.radius) <= 1e-14 * self.radius:
                raise GeometryError("inversion centre lies on a circle plate")
            q = [invert(self.point(self.start + k * TWO_PI / 3), w) for k in range(3)]
            c, R = _circumcircle(*q)
            return Arc(c, R, 0.0, TWO_PI, self.ident)
        return arc_through(invert(self.point(self.start), w),
                           invert(self.point(self.start + 0.5 * self.sweep), w),
                           invert(self.point(self.start + self.sweep), w), self.ident)


@dataclass(frozen=True)
class Disk:
    """Closed disk."""

    center: complex
    radius: float
    ident: str = ""
    kind: str = field(default="disk", init=False)
    unbounded = False

    def __post_init__(self):
        if not self.radius > 0:
            raise GeometryError("disk radius must be positive")

    def distance(self, p: np.ndarray) -> np.ndarray:
        return np.maximum(np.abs(p - self.center) - self.radius, 0.0)

    def bbox(self):
        c, R = self.center, self.radius
        return (c.real - R, c.real + R, c.imag - R, c.imag + R)

    def samples(self, spacing: float) -> np.ndarray:
        # boundary suffices for distances measured from outside
        n = max(8, int(math.ceil(TWO_PI * self.radius / spacing)))
        return self.center + self.radius * np.exp(1j * np.linspace(0.0, TWO_PI, n, endpoint=False))

    def scale(self, c: complex) -> "Disk":
        return Disk(self.center * c, self.radius * abs(c), self.ident)

    def swapped(self) -> "Disk":
        return Disk(_swap(self.center), self.radius, self.ident)

    def hits(self, x0: np.ndarray, y0: np.ndarray, length: np.ndarray):
        c, R = self.center, self.radius
        dy = y0 - c.imag
        disc = R * R - dy * dy
        with np.errstate(invalid="ignore"):
            dx = np.sqrt(disc)
        s0 = np.maximum(x0, c.real - dx)
        s1 = np.minimum(x0 + length, c.real + dx)
        ok = (disc >= 0) & (s0 <= s1)
        lo = np.where(ok, (s0 - x0) / length, np.nan)
        hi = np.where(ok, (s1 - x0) / length, np.nan)
        return lo, hi

    def inverted(self, w: complex):
        if abs(w - self.center) <= self.radius:
            raise GeometryError(f"inversion centre lies on plate {self.ident!r}")
        q = [invert(self.center + self.radius * cmath.exp(2j * math.pi * k / 3), w)
             for k in range(3)]
        c, R = _circumcircle(*q)
        return Disk(c, R, self.ident)


Primitive = Segment | Ray | Arc | Disk


def plate_distance(plate: tuple, p: np.ndarray) -> np.ndarray:
    d = np.full(p.shape, np.inf)
    for prim in plate:
        d = np.minimum(d, prim.distance(p))
    return d


def plate_bbox(plate: tuple):
    boxes = [prim.bbox() for prim in plate]
    return (min(b[0] for b in boxes), max(b[1] for b in boxes),
            min(b[2] for b in boxes), max(b[3] for b in boxes))
