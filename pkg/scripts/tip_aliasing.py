"""Single-grid capacities of a slit condenser as the free tip of an oblique
plate moves relative to the grid.

E = [-1, 0] and F = [1 + i s, 2 + i (s + 1/2)].  For s = 0 the tip of F sits
on a grid line and the sequence converges smoothly; for generic s the tip
snaps to the last grid-line crossing and the values scatter by O(h).
"""

import argparse

from ferrand.condenser.geometry import Segment
from ferrand.condenser.solver import SolverConfig, solve_capacity
from ferrand.condenser.spec import CondenserSpec


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--offsets", nargs="*", type=float, default=[0.0, 0.2, 0.37, 0.5])
    ap.add_argument("--cells", nargs="*", type=int, default=[8, 12, 16, 24, 32])
    args = ap.parse_args()

    print("offset," + ",".join(f"cells_{c}" for c in args.cells))
    for s in args.offsets:
        spec = CondenserSpec((Segment(-1 + 0j, 0j),), (Segment(1 + s * 1j, 2 + (s + 0.5) * 1j),))
        caps = [solve_capacity(spec, config=SolverConfig(cells_per_gap=c)).capacity
                for c in args.cells]
        print(f"{s}," + ",".join(f"{c:.6f}" for c in caps), flush=True)


if __name__ == "__main__":
    main()
