"""Grid moduli of ([0, e1], [r e^{i theta}, inf)) around the circle |z| = r,
against tau(r - 1), the value at theta = 0."""

import argparse
import math
import warnings

import numpy as np

from ferrand.isometry import sphere_ordering_margins
from ferrand.metrics import lambda_punctured


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--r", type=float, default=2.0)
    ap.add_argument("--thetas", type=int, default=8, help="equispaced angles in (0, pi]")
    args = ap.parse_args()

    print("theta,oracle,closed_form,relative_margin,lambda_lower,lambda_upper")
    for th in np.linspace(math.pi / args.thetas, math.pi, args.thetas):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            (m,) = sphere_ordering_margins(args.r, [th])
        lam = lambda_punctured(1, args.r * complex(math.cos(th), math.sin(th)))
        print(f"{th:.6f},{m.oracle_value:.6f},{m.closed_form:.6f},{m.relative_margin:.4f},"
              f"{lam.lower:.6f},{lam.upper:.6f}", flush=True)


if __name__ == "__main__":
    main()
