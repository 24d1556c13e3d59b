"""Compare the CHSH landscape of every built-in source on a planar grid.

Prints the maximum S per source and how many grid points exceed the local bound.
"""

import argparse
import math

from bell_lab.models import get_model
from bell_lab.search import angle_sweep


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--step", type=float, default=15.0, help="grid step, degrees")
    args = p.parse_args()
    for name in ("sign_sphere", "local_noise", "quantum_singlet", "signaling_demo"):
        rows = angle_sweep("chsh", get_model(name), math.radians(args.step))
        best = max(rows, key=lambda r: r["value"])
        where = tuple(round(math.degrees(best[k]), 3) for k in ("a", "a2", "b", "b2"))
        violating = sum(not r["satisfied"] for r in rows)
        print(f"{name:16s} max S = {best['value']:.6f} at {where}; {violating}/{len(rows)} points above 2")


if __name__ == "__main__":
    main()
