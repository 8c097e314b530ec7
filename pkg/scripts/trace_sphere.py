"""Trace lambda-spheres around a point of the punctured plane at several
levels and write one SVG and one CSV per level."""

import argparse
from pathlib import Path

from ferrand.cli import trace_csv, trace_svg
from ferrand.metrics import trace_metric_sphere


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--center", type=complex, default=1 + 0j)
    ap.add_argument("--levels", nargs="*", type=float, default=[1.0, 2.0, 4.0])
    ap.add_argument("--rays", type=int, default=96)
    ap.add_argument("--out", type=Path, default=Path("sphere_traces"))
    args = ap.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    for level in args.levels:
        tr = trace_metric_sphere(args.center, level, args.rays)
        stem = args.out / f"level_{level:g}"
        with open(stem.with_suffix(".csv"), "w") as fh:
            trace_csv(tr, fh)
        with open(stem.with_suffix(".svg"), "w") as fh:
            trace_svg(tr, fh)
        width = max(o - i for i, o in zip(tr.inner, tr.outer))
        print(f"level {level:g}: {int(tr.exact.sum())}/{len(tr.exact)} exact rays, "
              f"widest bracket {width:.3e}, written to {stem}.*")


if __name__ == "__main__":
    main()
