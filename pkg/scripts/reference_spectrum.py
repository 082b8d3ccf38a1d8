"""Spiral families for A = 1, B = 1, E = 2 in the class exp(20π Z).

Prints one row per family with its periodicity residual, then the ℓ = 10
length next to (2/√3)·20π.
"""
import argparse
import math

from magflow.spectrum import central_spiral_families, family_residual


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--z", type=float, default=20 * math.pi)
    ap.add_argument("--E", type=float, default=2.0)
    ap.add_argument("--B", type=float, default=1.0)
    ap.add_argument("--A", type=float, default=1.0)
    args = ap.parse_args()

    fams = central_spiral_families(args.z, args.E, args.B, args.A)
    print(f"{'branch':>6} {'ell':>4} {'z0':>12} {'omega':>12} {'length':>12} {'residual':>9}")
    for f in sorted(fams, key=lambda f: (f.branch, f.ell)):
        res = family_residual(f, args.B, args.A, [0.0, 0.0, args.z])
        print(f"{f.branch:>6} {f.ell:>4} {f.z0:12.6f} {f.omega:12.6f} {f.length:12.6f} {res:9.1e}")
    ten = [f for f in fams if f.ell == 10]
    if ten:
        want = 2 / math.sqrt(3) * args.z
        print(f"\nell=10 length {ten[0].length:.12f}, (2/sqrt3) z = {want:.12f}")


if __name__ == "__main__":
    main()
