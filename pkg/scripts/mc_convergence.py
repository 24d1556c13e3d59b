"""Monte Carlo error scaling for a built-in model, written as CSV to stdout."""

import argparse
import math
import sys

from bell_lab.core import axis_from_planar_angle
from bell_lab.correlator import mc_convergence_scan
from bell_lab.models import get_model


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--model", default="sign_sphere")
    p.add_argument("--theta", type=float, default=60.0, help="included angle, degrees")
    p.add_argument("--max-n", type=int, default=4**10)
    p.add_argument("--seed", type=int, default=42)
    args = p.parse_args()

    n_list = [4**k for k in range(int(math.log(args.max_n, 4)) + 1)]
    a, b = axis_from_planar_angle(0.0), axis_from_planar_angle(math.radians(args.theta))
    rows = mc_convergence_scan(get_model(args.model), a, b, n_list, args.seed)
    out = sys.stdout
    out.write("n,estimate,exact,abs_error,stderr,error_over_stderr\n")
    for r in rows:
        z = r["abs_error"] / r["stderr"] if r["stderr"] > 0 else math.nan
        out.write(f"{r['n']},{r['estimate']:.9g},{r['exact']:.9g},{r['abs_error']:.9g},{r['stderr']:.9g},{z:.3g}\n")


if __name__ == "__main__":
    main()
