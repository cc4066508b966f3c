"""Print ||m_r - m_{n,r}||_1 for n = 1..n_max and the ratio of successive terms."""

import argparse

from solenoid_kms.campaigns import l1_curve


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--r", type=float, default=1.0)
    ap.add_argument("--n-max", type=int, default=12)
    args = ap.parse_args()
    prev = None
    print(f"{'n':>3} {'l1':>14} {'ratio':>8}")
    for n, v in l1_curve(args.r, args.n_max):
        ratio = "" if prev is None else f"{v / prev:8.5f}"
        print(f"{n:3d} {v:14.6e} {ratio}")
        prev = v


if __name__ == "__main__":
    main()
