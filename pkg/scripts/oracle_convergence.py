"""Grid convergence of the condenser oracle against closed-form moduli.

For each configuration solve at several resolutions (cells across the plate
gap) and print the raw and extrapolated relative errors and the fitted order.

    python scripts/oracle_convergence.py --cells 8 12 16 24
"""

import argparse
import math
import time
import warnings

from ferrand.capacities import PLANE
from ferrand.condenser.geometry import Arc, Disk, Ray, Segment
from ferrand.condenser.solver import SolverConfig, estimate_capacity
from ferrand.condenser.spec import CondenserSpec

CONFIGS = {
    "annulus": (CondenserSpec((Arc(0j, 1.0, 0.0, 2 * math.pi),),
                              (Arc(0j, math.e, 0.0, 2 * math.pi),)), 2 * math.pi),
    "teichmuller-0.5": (CondenserSpec((Segment(-1 + 0j, 0j),), (Ray(0.5 + 0j, 1 + 0j),), "auto"),
                        PLANE.tau(0.5)),
    "teichmuller-1": (CondenserSpec((Segment(-1 + 0j, 0j),), (Ray(1 + 0j, 1 + 0j),), "auto"),
                      PLANE.tau(1.0)),
    "teichmuller-3": (CondenserSpec((Segment(-1 + 0j, 0j),), (Ray(3 + 0j, 1 + 0j),), "auto"),
                      PLANE.tau(3.0)),
    "grotzsch": (CondenserSpec((Disk(0j, 1.0),), (Ray(math.sqrt(2) + 0j, 1 + 0j),), "auto"),
                 PLANE.gamma(math.sqrt(2))),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", nargs="*", choices=sorted(CONFIGS), default=sorted(CONFIGS))
    ap.add_argument("--cells", nargs="*", type=int, default=[8, 16])
    ap.add_argument("--boundary", choices=["cut", "nodes"], default="cut")
    args = ap.parse_args()

    print("config,cells,raw_rel_err,best_rel_err,order,refused,seconds")
    for name in args.config:
        spec, exact = CONFIGS[name]
        for cells in args.cells:
            cfg = SolverConfig(cells_per_gap=cells, boundary=args.boundary)
            t0 = time.perf_counter()
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                r = estimate_capacity(spec, config=cfg)
            dt = time.perf_counter() - t0
            raw = abs(r.capacity - exact) / exact
            best = abs(r.best - exact) / exact
            order = "" if r.order is None else f"{r.order:.3f}"
            print(f"{name},{cells},{raw:.3e},{best:.3e},{order},{int(r.extrapolation_refused)},{dt:.1f}",
                  flush=True)


if __name__ == "__main__":
    main()
