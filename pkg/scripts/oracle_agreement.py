"""Closed-form geodesics against the RK4 integrator on random 𝔥₁ and H-type data."""
import argparse
import time

import numpy as np

from magflow.algebra import heisenberg
from magflow.geodesics import heis1_coords, integrate_numeric
from magflow.httype import HT, HTInitialData, ht_geodesic_eval
from magflow.magnetic import make_system


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--draws", type=int, default=50)
    ap.add_argument("--T", type=float, default=10.0)
    ap.add_argument("--steps", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)

    t0 = time.perf_counter()
    errs = []
    for _ in range(args.draws):
        A, B = rng.uniform(0.4, 2.5), rng.uniform(-2, 2)
        u, v = rng.normal(size=2)
        z0 = rng.choice([0.0, 1e-7, rng.normal(), 3 * rng.normal()])
        tr = integrate_numeric(make_system(heisenberg([A]), B), [u, v, z0], args.T,
                               steps=args.steps, store_every=50)
        ref = heis1_coords(A, B, u, v, z0, tr.times)
        errs.append((abs(z0), float(np.max(np.abs(tr.points - ref)))))
    dt = time.perf_counter() - t0
    errs.sort()
    print(f"h1: {args.draws} draws in {dt:.1f}s, worst sup-norm {max(e for _, e in errs):.2e}")
    for z, e in errs[:: max(1, len(errs) // 8)]:
        print(f"  |z0| = {z:9.2e}  sup-norm {e:.2e}")

    worst = 0.0
    for _ in range(10):
        d = HTInitialData(rng.normal(size=4), *rng.normal(size=2), rng.uniform(-2, 2))
        tr = integrate_numeric(make_system(HT, d.B), d.momentum(), args.T, steps=args.steps,
                               store_every=100)
        worst = max(worst, float(np.max(np.abs(tr.points - ht_geodesic_eval(d, tr.times)))))
    print(f"H-type: 10 draws, worst sup-norm {worst:.2e}")


if __name__ == "__main__":
    main()
