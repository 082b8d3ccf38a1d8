"""Largest gap between admissible central z0 values as the (h, ℓ) cap grows.

Once both sign rows are populated the largest gap straddles z0 = 0, between
the h = bound, ℓ = 1 values ±sqrt((E² - B²)/(s - 1)) with s = bound z̄/(πA).
It therefore shrinks only like bound^(-1/2). The last column is that width.
"""
import argparse
import math

from magflow.density import admissible_z0, spot_check


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--E", type=float, default=2.0)
    ap.add_argument("--B", type=float, default=1.0)
    ap.add_argument("--A", type=float, default=1.0)
    ap.add_argument("--zbar", type=float, default=1.0)
    ap.add_argument("--bounds", default="10,30,100,300,1000,3000")
    args = ap.parse_args()

    p = dict(z_bar=args.zbar, E=args.E, B=args.B, A=args.A)
    print(f"{'bound':>6} {'count':>9} {'max_gap':>10} {'gap_lo':>10} {'gap_hi':>10} {'predicted':>10}")
    for b in (int(x) for x in args.bounds.split(",")):
        r = admissible_z0(bound=b, **p)
        # only meaningful for the default parameters
        s = b * args.zbar / (math.pi * args.A)
        pred = 2 * math.sqrt((args.E ** 2 - args.B ** 2) / (s - 1)) if s > 1 else float("nan")
        print(f"{b:6d} {r.count:9d} {r.max_gap:10.5f} {r.gap_at[0]:10.5f} {r.gap_at[1]:10.5f} "
              f"{pred:10.5f}")
    print(f"worst spot-check residual at bound 1000: {spot_check(bound=1000, **p):.1e}")


if __name__ == "__main__":
    main()
