"""Condenser files: a JSON description of the two plates.

Schema (points are ``[x, y]`` pairs, angles in radians)::

    {
      "plate_e": [primitive, ...],          potential 1
      "plate_f": [primitive, ...],          potential 0
      "compactification": null | "auto" | [x, y],
      "far_field": "stretched" | "insulating",       optional
      "box": [xmin, xmax, ymin, ymax],                optional
      "h": coarse grid spacing,                       optional
      "levels": 1 or 3                                optional
    }

    primitive is one of
      {"type": "segment", "a": [x, y], "b": [x, y]}
      {"type": "ray", "start": [x, y], "direction": [x, y]}
      {"type": "arc", "center": [x, y], "radius": R, "start": a0, "sweep": da}
      {"type": "disk", "center": [x, y], "radius": R}
    each with an optional "id" string.

A plate containing a ray passes through infinity and needs a
compactification.  ``levels = 3`` (the default) solves on h, h/2, h/4 and
extrapolates; ``levels = 1`` solves once at h.
"""

from __future__ import annotations

import json
from pathlib import Path

import jsonschema

from .geometry import Arc, Disk, Ray, Segment
from .spec import FAR_FIELD_KINDS, CondenserSpec

_POINT = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}


def _prim(kind: str, **fields) -> dict:
    props = {"type": {"const": kind}, "id": {"type": "string"}, **fields}
    return {"type": "object", "properties": props,
            "required": ["type", *fields], "additionalProperties": False}


PRIMITIVE_SCHEMA = {
    "oneOf": [
        _prim("segment", a=_POINT, b=_POINT),
        _prim("ray", start=_POINT, direction=_POINT),
        _prim("arc", center=_POINT, radius={"type": "number", "exclusiveMinimum": 0},
              start={"type": "number"}, sweep={"type": "number", "exclusiveMinimum": 0}),
        _prim("disk", center=_POINT, radius={"type": "number", "exclusiveMinimum": 0}),
    ]
}

CONDENSER_SCHEMA = {
    "type": "object",
    "properties": {
        "plate_e": {"type": "array", "items": PRIMITIVE_SCHEMA, "minItems": 1},
        "plate_f": {"type": "array", "items": PRIMITIVE_SCHEMA, "minItems": 1},
        "compactification": {"oneOf": [{"type": "null"}, {"const": "auto"}, _POINT]},
        "far_field": {"enum": list(FAR_FIELD_KINDS)},
        "box": {"type": "array", "items": {"type": "number"}, "minItems": 4, "maxItems": 4},
        "h": {"type": "number", "exclusiveMinimum": 0},
        "levels": {"enum": [1, 3]},
    },
    "required": ["plate_e", "plate_f"],
    "additionalProperties": False,
}


def _pt(v) -> complex:
    return complex(v[0], v[1])


def _xy(z: complex) -> list[float]:
    return [z.real, z.imag]


def primitive_from_dict(d: dict):
    ident = d.get("id", "")
    kind = d["type"]
    if kind == "segment":
        return Segment(_pt(d["a"]), _pt(d["b"]), ident)
    if kind == "ray":
        return Ray(_pt(d["start"]), _pt(d["direction"]), ident)
    if kind == "arc":
        return Arc(_pt(d["center"]), float(d["radius"]), float(d["start"]),
                   float(d["sweep"]), ident)
    return Disk(_pt(d["center"]), float(d["radius"]), ident)


def primitive_to_dict(p) -> dict:
    if isinstance(p, Segment):
        out = {"type": "segment", "a": _xy(p.a), "b": _xy(p.b)}
    elif isinstance(p, Ray):
        out = {"type": "ray", "start": _xy(p.start), "direction": _xy(p.direction)}
    elif isinstance(p, Arc):
        out = {"type": "arc", "center": _xy(p.center), "radius": p.radius,
               "start": p.start, "sweep": p.sweep}
    else:
        out = {"type": "disk", "center": _xy(p.center), "radius": p.radius}
    if p.ident:
        out["id"] = p.ident
    return out


def spec_from_dict(doc: dict) -> tuple[CondenserSpec, dict]:
    """Validated spec plus the solver options (``h``, ``levels``) found in ``doc``."""
    jsonschema.validate(doc, CONDENSER_SCHEMA)
    w = doc.get("compactification")
    if isinstance(w, list):
        w = _pt(w)
    spec = CondenserSpec(
        tuple(primitive_from_dict(p) for p in doc["plate_e"]),
        tuple(primitive_from_dict(p) for p in doc["plate_f"]),
        compactification=w,
        far_field=doc.get("far_field", "stretched"),
        box=tuple(doc["box"]) if "box" in doc else None,
    )
    options = {k: doc[k] for k in ("h", "levels") if k in doc}
    return spec, options


def spec_to_dict(spec: CondenserSpec, **options) -> dict:
    w = spec.compactification
    doc = {
        "plate_e": [primitive_to_dict(p) for p in spec.plate_e],
        "plate_f": [primitive_to_dict(p) for p in spec.plate_f],
        "compactification": _xy(complex(w)) if w is not None and not isinstance(w, str) else w,
        "far_field": spec.far_field,
    }
    if spec.box is not None:
        doc["box"] = list(spec.box)
    doc.update(options)
    return doc


def load_spec(path: str | Path) -> tuple[CondenserSpec, dict]:
    with open(path) as fh:
        return spec_from_dict(json.load(fh))
