"""Run the quantum CHSH optimizer from random planar starts and report the spread."""

import argparse
import math

import numpy as np

from bell_lab.search import TSIRELSON, ScenarioSpec, optimize_quantum_chsh


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--starts", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=5000)
    args = p.parse_args()

    rng = np.random.default_rng(args.seed)
    values = []
    for _ in range(args.starts):
        start = ScenarioSpec.chsh_planar(*rng.uniform(0, 2 * math.pi, 4))
        r = optimize_quantum_chsh(start, args.budget)
        values.append(r.s_value)
        angles = ", ".join(f"{math.degrees(t) % 360:7.2f}" for t in r.settings.planar_angles())
        print(f"S = {r.s_value:.9f}  converged={r.converged!s:5}  evals={r.evaluations:5d}  angles=({angles})")
    values = np.array(values)
    hits = np.sum(np.abs(values - TSIRELSON) < 1e-6)
    print(f"\n{hits}/{len(values)} starts reach 2*sqrt(2) within 1e-6; best {values.max():.12f}")


if __name__ == "__main__":
    main()
