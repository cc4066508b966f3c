"""Print the extreme subinvariant vectors of the 2^n cycle and check them by brute force."""

import argparse

import numpy as np

from solenoid_kms import cycle_subinv as cyc


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--r", type=float, default=1.0)
    ap.add_argument("--trials", type=int, default=500)
    args = ap.parse_args()
    np.set_printoptions(precision=6, suppress=True)
    print(cyc.extreme_vectors(args.n, args.r))
    if (1 << args.n) <= 16:
        ok = cyc.verify_extremality_bruteforce(args.n, args.r, args.trials, np.random.default_rng(0))
        print("no nontrivial splitting found" if ok else "found a splitting: not extreme")


if __name__ == "__main__":
    main()
