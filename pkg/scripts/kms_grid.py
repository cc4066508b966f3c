"""Run the KMS campaign over a grid of (N, theta0, beta) and print a summary table."""

import argparse
import itertools
import time

from solenoid_kms.campaigns import RunConfig, kms_campaign


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=1000)
    ap.add_argument("--states", type=int, default=20)
    ap.add_argument("--depth", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    names = ["kms-identity", "state-invariance", "embedding-consistency", "positivity-gap", "tower-compatibility", "tower-subinvariance"]
    print(f"{'N':>2} {'theta0':>8} {'beta':>5} " + " ".join(f"{n[:12]:>12}" for n in names) + "   time")
    for N, theta0, beta in itertools.product((2, 3), (1 / 3, 0.123), (0.0, 0.5, 1.0, 4.0)):
        cfg = RunConfig(N=N, theta0=theta0, beta=beta, depth=args.depth, samples=args.samples, states=args.states, seed=args.seed)
        t0 = time.perf_counter()
        reps = {r.name: r for r in kms_campaign(cfg)}
        cells = " ".join(f"{reps[n].max_residual:12.2e}" for n in names)
        flag = "" if all(r.passed for r in reps.values()) else "  FAIL"
        print(f"{N:2d} {theta0:8.5f} {beta:5.2f} {cells} {time.perf_counter() - t0:6.2f}s{flag}")


if __name__ == "__main__":
    main()
