"""Compare the optimal low-degree positivity value of valid and reversed-density towers.

For each level j the minimum of phi(i(f)(1 - s s^*) i(f)^*) over f of degree
<= d with integral |f|^2 dm_j = 1 is the smallest generalized eigenvalue of
the positivity form.  Valid states stay >= 0; the reversed tower goes negative.
"""

import argparse

from solenoid_kms import kms_tower as kt


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--N", type=int, default=2)
    ap.add_argument("--theta0", type=float, default=1 / 3)
    ap.add_argument("--beta", type=float, default=1.0)
    ap.add_argument("--depth", type=int, default=3)
    ap.add_argument("--degree", type=int, default=4)
    args = ap.parse_args()

    theta = kt.make_theta_seq(args.N, args.theta0, args.depth, args.beta)
    valid = kt.extreme_state_from_solenoid(kt.SolenoidPoint.zero(args.N, args.depth), theta)
    bad = kt.KmsState(kt.reversed_tower(theta), theta.beta)
    print(f"{'level':>5} {'valid':>14} {'reversed':>14}")
    for j in range(args.depth + 1):
        v, _ = kt.positivity_witness(valid, j, args.degree)
        w, _ = kt.positivity_witness(bad, j, args.degree)
        print(f"{j:5d} {v:14.6e} {w:14.6e}")


if __name__ == "__main__":
    main()
