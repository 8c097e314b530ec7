"""Dilatation bound profile as r -> 0: both algebraic routes, the form
without the phi factor, and the majorant 128 (r + 2)."""

import argparse

import numpy as np

from ferrand.isometry import dilatation_bound_profile


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rmin", type=float, default=1e-6)
    ap.add_argument("--rmax", type=float, default=0.9)
    ap.add_argument("--steps", type=int, default=25)
    args = ap.parse_args()

    print("r,tau_form,psi_form,route_gap,leading_form,majorant")
    for r in np.geomspace(args.rmin, args.rmax, args.steps):
        p = dilatation_bound_profile(r)
        print(f"{r:.6e},{p.tau_form:.12f},{p.psi_form:.12f},{p.route_gap:.2e},"
              f"{p.leading_form:.12f},{p.majorant:.6f}")


if __name__ == "__main__":
    main()
