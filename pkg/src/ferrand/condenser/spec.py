"""Condenser descriptions and their compactification."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.spatial import cKDTree

from .geometry import GeometryError, Ray, plate_bbox

FAR_FIELD_KINDS = ("stretched", "insulating")

# fractions of the segment between the closest plate points tried as the
# inversion centre
_CENTRE_FRACTIONS = np.linspace(0.1, 0.9, 17)


def _scene_scale(plates) -> float:
    pts = []
    for plate in plates:
        for prim in plate:
            if isinstance(prim, Ray):
                pts.append(abs(prim.start))
            else:
                b = prim.bbox()
                pts.extend([abs(complex(b[0], b[2])), abs(complex(b[1], b[3]))])
    scale = max(pts)
    return scale if scale > 0 else 1.0


def _plate_samples(plate, spacing: float, ray_length: float) -> np.ndarray:
    chunks = []
    for prim in plate:
        if isinstance(prim, Ray):
            chunks.append(prim.samples(spacing, ray_length))
        else:
            chunks.append(prim.samples(spacing))
    return np.concatenate(chunks)


def closest_points(plate_e, plate_f, resolution: int = 4000) -> tuple[complex, complex, float]:
    """Approximate closest pair (p in E, q in F) from dense boundary samples."""
    scale = _scene_scale((plate_e, plate_f))
    spacing = scale / resolution
    pe = _plate_samples(plate_e, spacing, 4.0 * scale)
    pf = _plate_samples(plate_f, spacing, 4.0 * scale)
    tree = cKDTree(np.column_stack([pf.real, pf.imag]))
    dist, idx = tree.query(np.column_stack([pe.real, pe.imag]))
    k = int(np.argmin(dist))
    return complex(pe[k]), complex(pf[idx[k]]), float(dist[k])


def separation(plate_e, plate_f, resolution: int = 4000) -> float:
    """Distance between two bounded plates, from dense samples."""
    return closest_points(plate_e, plate_f, resolution)[2]


@dataclass(frozen=True)
class CondenserSpec:
    """Two disjoint plates E (potential 1) and F (potential 0) in the plane.

    ``compactification`` is the centre w of the inversion z -> 1/(z - w)
    used when a plate passes through infinity; "auto" picks w on the segment
    joining the closest points of the plates.  ``box`` optionally fixes the
    uniformly meshed core rectangle (xmin, xmax, ymin, ymax) in the plane in
    which the problem is solved; ``far_field`` selects an insulating box
    boundary at the core edge or a geometrically stretched far field.
    """

    plate_e: tuple
    plate_f: tuple
    compactification: complex | str | None = None
    far_field: str = "stretched"
    box: tuple[float, float, float, float] | None = None

    def __post_init__(self):
        object.__setattr__(self, "plate_e", tuple(self.plate_e))
        object.__setattr__(self, "plate_f", tuple(self.plate_f))
        if not self.plate_e or not self.plate_f:
            raise GeometryError("both plates need at least one primitive")
        if self.far_field not in FAR_FIELD_KINDS:
            raise GeometryError(f"far_field must be one of {FAR_FIELD_KINDS}")
        if self.unbounded and self.compactification is None:
            raise GeometryError("a plate through infinity needs a compactification")

    @property
    def unbounded(self) -> bool:
        return any(p.unbounded for p in self.plate_e + self.plate_f)

    def scaled(self, c: complex) -> "CondenserSpec":
        w = self.compactification
        if w is not None and not isinstance(w, str):
            w = w * c
        box = self.box
        if box is not None:
            if complex(c).imag != 0 or complex(c).real <= 0:
                raise GeometryError("an explicit box only scales by positive reals")
            # the inversion turns a scaling by c into one by 1/c
            k = float(complex(c).real)
            k = 1.0 / k if w is not None else k
            box = tuple(v * k for v in box)
        return replace(self, plate_e=tuple(p.scale(c) for p in self.plate_e),
                       plate_f=tuple(p.scale(c) for p in self.plate_f),
                       compactification=w, box=box)

    def inversion_centre(self) -> complex | None:
        w = self.compactification
        if w is None:
            return None
        if not isinstance(w, str):
            return complex(w)
        if w != "auto":
            raise GeometryError(f"unknown compactification {w!r}")
        p, q, _ = closest_points(self.plate_e, self.plate_f)
        best, best_cost = None, math.inf
        for frac in _CENTRE_FRACTIONS:
            cand = p + frac * (q - p)
            try:
                e = tuple(prim.inverted(cand) for prim in self.plate_e)
                f = tuple(prim.inverted(cand) for prim in self.plate_f)
            except GeometryError:
                continue
            x0, x1, y0, y1 = plate_bbox(e + f)
            sep = separation(e, f, resolution=1000)
            # proportional to the node count of a grid resolving the gap
            cost = (x1 - x0 + 2 * sep) * (y1 - y0 + 2 * sep) / sep**2
            if cost < best_cost:
                best, best_cost = cand, cost
        if best is None:
            raise GeometryError("no admissible inversion centre between the plates")
        return best

    def solve_plane(self) -> tuple[tuple, tuple]:
        """Plates in the plane where the grid lives (inverted if compactified)."""
        w = self.inversion_centre()
        if w is None:
            return self.plate_e, self.plate_f
        return (tuple(p.inverted(w) for p in self.plate_e),
                tuple(p.inverted(w) for p in self.plate_f))
