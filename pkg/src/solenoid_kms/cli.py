"""Command-line front end.

    solenoid-kms measure mr --r 1.3862944 --arc 0,0.5
    solenoid-kms measure subinv --r 0 --measure lebesgue
    solenoid-kms measure l1-curve --r 1 --n-max 10
    solenoid-kms cycle vectors --n 1 --r 1.3862944
    solenoid-kms cycle decompose --n 1 --r 1.3862944 --x 0.9,0.1
    solenoid-kms kms eval --expr "S^1 [] S*^1" --level 0 --beta 1 --solenoid 0,0,0
    solenoid-kms kms verify --N 2 --theta0 0.3333333 --beta 1 --depth 4 --samples 1000 --seed 42
    solenoid-kms kms factor-test --beta 0
    solenoid-kms report --out report.json --density-csv densities.csv

Elements use the text format ``S^m [k:re,im; ...] S*^n`` joined by ``+``; an
empty bracket is the constant 1.  Measures given by file use the record
format of ``measures.to_record``: ``{"pieces": [[start, end, coefficient,
rate], ...]}`` where each piece has density coefficient * exp(-rate (t -
start)) on [start, end) and overlapping pieces add.

A JSON config file (``--config``) may set any RunConfig field; command-line
flags override it.  The default seed comes from $SOLENOID_KMS_SEED.  The exit
code is 0 iff every report passes.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

from . import campaigns as cp
from . import cycle_subinv as cyc
from . import kms_tower as kt
from . import measures as ms
from .circle import Arc
from .toeplitz import parse_element

CONFIG_FIELDS = ("N", "theta0", "beta", "depth", "n", "seed", "samples", "states")


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _arc(text: str) -> Arc:
    vals = _floats(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"an arc is 'start,end', got {text!r}")
    return Arc.between(*vals)


def load_config(args: argparse.Namespace) -> cp.RunConfig:
    base: dict = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            base = json.load(fh)
        unknown = set(base) - set(CONFIG_FIELDS) - {"tolerances"}
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
    for name in CONFIG_FIELDS:
        val = getattr(args, name, None)
        if val is not None:
            base[name] = val
    return cp.RunConfig(**base)


def _measure(args) -> ms.CircleMeasure:
    if args.measure_file:
        with open(args.measure_file) as fh:
            m = ms.from_record(json.load(fh))
    elif args.measure == "lebesgue":
        m = ms.lebesgue()
    elif args.measure == "mr":
        m = ms.make_mr(args.r)
    elif args.measure == "reversed":
        m = ms.exp_density(-args.r)
    else:
        raise ValueError(f"unknown measure {args.measure!r}")
    return ms.rotate_measure(m, args.shift) if args.shift else m


def _emit(reports: list[cp.Report], as_json: bool) -> int:
    if as_json:
        print(json.dumps([r.to_dict() for r in reports], indent=2, default=cp._jsonable))
    else:
        for r in reports:
            print(r.line())
            if not r.passed and r.witnesses:
                print(f"  witness: {json.dumps(r.witnesses[0], default=cp._jsonable)}")
    return 0 if reports and all(r.passed for r in reports) else 1


# measure --------------------------------------------------------------------


def cmd_measure(args) -> int:
    sub = args.sub
    if sub == "mr":
        m = ms.make_mr(args.r)
        if args.shift:
            m = ms.rotate_measure(m, args.shift)
        for a in args.arc or []:
            print(f"{ms.measure_arc(m, a):.7f}")
        if args.density_csv:
            write_density_csv(args.density_csv, {"m": m}, args.points)
        if not args.arc and not args.density_csv:
            t = (np.arange(args.points) + 0.5) / args.points
            for ti, di in zip(t, m.density(t)):
                print(f"{ti:.6f},{di:.10g}")
        return 0
    if sub == "subinv":
        with cp._Clock() as c:
            rep = ms.check_subinvariance(_measure(args), args.r)
        wit = [] if rep.witness is None else [{"t_or_arc_start": rep.witness[0], "s": rep.witness[1]}]
        report = cp.Report("subinvariance", {"r": args.r, "measure": args.measure}, rep.worst_violation, args.tol, 1, wit, c.ms)
        return _emit([report], args.json)
    if sub == "decompose":
        m = _measure(args)
        with cp._Clock() as c:
            lam = ms.decompose_into_extremes(m, args.r, args.n)
            rebuilt = ms.reconstruct(lam, args.r, args.n)
            x = cyc.measure_to_vector(m, args.n)
            err = float(np.max(np.abs(cyc.measure_to_vector(rebuilt, args.n) - x)))
        for j, w in enumerate(lam):
            print(f"lambda[{j}] = {w:.10g}")
        report = cp.Report("decompose", {"r": args.r, "n": args.n}, err, 1e-10, len(lam), [], c.ms)
        return _emit([report], args.json)
    if sub == "l1-curve":
        with cp._Clock() as c:
            curve = cp.l1_curve(args.r, args.n_max)
        print("n,l1")
        for n, v in curve:
            print(f"{n},{v:.10e}")
        vals = [v for _, v in curve]
        ratio = max((b / a for a, b in zip(vals, vals[1:])), default=0.0)
        report = cp.Report("l1-decreasing", {"r": args.r, "n_max": args.n_max}, ratio, 1.0 - 1e-12, len(vals), [], c.ms)
        return _emit([report], args.json)
    if sub == "probe":
        try:
            verdict = ms.extremality_probe(_measure(args), args.r, args.n)
        except ms.SubinvarianceViolation as exc:
            print(f"SubinvarianceViolation: {exc}")
            return 1
        print(verdict.value)
        return 0
    raise AssertionError(sub)


def write_density_csv(path: str, measures: dict[str, ms.CircleMeasure], points: int = 512) -> None:
    t = (np.arange(points) + 0.5) / points
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["measure", "t", "density"])
        for name, m in measures.items():
            for ti, di in zip(t, m.density(t)):
                w.writerow([name, f"{ti:.8f}", f"{di:.12g}"])


# cycle ----------------------------------------------------------------------


def cmd_cycle(args) -> int:
    if args.n is not None and args.n > 14:
        raise ValueError("n must be at most 14")
    if args.sub == "vectors":
        for row in cyc.extreme_vectors(args.n, args.r):
            print(",".join(f"{v:.7f}" for v in row))
        return 0
    x = np.asarray(args.x, dtype=float)
    n = args.n if args.n is not None else int(round(math.log2(len(x))))
    try:
        lam = cyc.decompose_subinvariant(x, n, args.r)
    except cyc.NotSubinvariant as exc:
        print(f"error: NotSubinvariant index {exc.index} (resolvent entry {exc.value:.6g})")
        return 1
    print(",".join(f"{v:.7f}" for v in lam))
    return 0


# kms ------------------------------------------------------------------------


def _state(cfg: cp.RunConfig, solenoid: list[float] | None) -> kt.KmsState:
    theta = cfg.theta()
    if theta.beta == 0:
        return kt.trace_state(theta)
    coords = solenoid if solenoid is not None else [0.0] * (theta.depth + 1)
    return kt.extreme_state_from_solenoid(kt.SolenoidPoint(tuple(coords), theta.N), theta)


def cmd_kms(args) -> int:
    if args.sub == "eval" and args.solenoid is not None and args.depth is None:
        args.depth = len(args.solenoid) - 1
    cfg = load_config(args)
    try:
        theta = cfg.theta()
    except kt.NoKmsStates as exc:
        report = cp.Report("no-kms-states", cfg.params(), math.inf, 0.0, 1, [str(exc)])
        return _emit([report], args.json)

    if args.sub == "eval":
        phi = _state(cfg, args.solenoid)
        x = parse_element(args.expr, theta.level(args.level))
        v = kt.evaluate(phi, x)
        print(f"{v.real:.7f}" if abs(v.imag) < 1e-15 else f"{v.real:.7f}{v.imag:+.7f}j")
        return 0
    if args.sub == "verify":
        reports = cp.kms_campaign(cfg)
        if cfg.beta > 0:
            reports += [cp.equivariance_campaign(cfg), cp.freeness_campaign(cfg)]
        return _emit(reports, args.json)
    if args.sub == "trace0":
        return _emit(cp.trace_campaign(cfg), args.json)
    if args.sub == "factor-test":
        rep = cp.factor_test(cfg)
        factors = rep.witnesses[-1]["factors_through_solenoid"]
        print("true" if factors else "false")
        return _emit([rep], args.json)
    raise AssertionError(args.sub)


# report ---------------------------------------------------------------------


def full_suite(cfg: cp.RunConfig) -> list[cp.Report]:
    reports = cp.cycle_campaign(seed=cfg.seed) + cp.l1_campaign(n_max=max(cfg.n, 2))
    reports.append(cp.pushforward_campaign(seed=cfg.seed))
    reports += cp.omega0_campaign(min(50, cfg.samples), seed=cfg.seed) + [cp.negative_beta_report()]
    if cfg.beta == 0:
        reports += cp.trace_campaign(cfg) + [cp.factor_test(cfg)]
    else:
        reports += cp.kms_campaign(cfg) + [cp.factor_test(cfg), cp.equivariance_campaign(cfg), cp.freeness_campaign(cfg)]
        reports.append(cp.reversed_tower_report(cfg))
        reports += cp.trace_campaign(cfg)
    return reports


def cmd_report(args) -> int:
    """Run every suite; the L1 curve goes up to n = cfg.n."""
    cfg = load_config(args)
    try:
        open(args.out, "a").close()
    except OSError as exc:
        print(f"error: cannot write {exc.filename}: {exc.strerror}", file=sys.stderr)
        return 2
    try:
        reports = full_suite(cfg)
    except kt.NoKmsStates as exc:
        reports = [cp.Report("no-kms-states", cfg.params(), math.inf, 0.0, 1, [str(exc)])]
    try:
        cp.write_report(args.out, reports)
        if args.density_csv and cfg.beta >= 0:
            theta = cfg.theta()
            towers = {f"m_r{j}": ms.make_mr(r) for j, r in enumerate(theta.rates)}
            write_density_csv(args.density_csv, towers, args.points)
    except OSError as exc:
        print(f"error: cannot write {exc.filename}: {exc.strerror}", file=sys.stderr)
        return 2
    for r in sorted(reports, key=lambda r: r.name):
        print(r.line())
    print(f"wrote {args.out}")
    return 0 if all(r.passed for r in reports) else 1


# parser ---------------------------------------------------------------------


def _config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with RunConfig fields")
    p.add_argument("--N", type=int)
    p.add_argument("--theta0", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--depth", type=int)
    p.add_argument("--n", type=int, help="dyadic level; the report L1 curve runs to n")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--states", type=int)
    p.add_argument("--json", action="store_true", help="print reports as JSON")


def _measure_flags(p: argparse.ArgumentParser, n_default: int = 4) -> None:
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--measure", choices=["lebesgue", "mr", "reversed"], default="mr")
    p.add_argument("--measure-file", help="measure record (JSON)")
    p.add_argument("--shift", type=float, default=0.0, help="rotate the measure: m o R_shift")
    p.add_argument("--n", type=int, default=n_default)
    p.add_argument("--tol", type=float, default=ms.DEFAULT_SUBINV_TOL)
    p.add_argument("--json", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="solenoid-kms", description=__doc__.split("\n\n")[0])
    top = parser.add_subparsers(dest="cmd", required=True)

    p_m = top.add_parser("measure", help="subinvariant measures on the circle")
    msub = p_m.add_subparsers(dest="sub", required=True)
    p = msub.add_parser("mr", help="arc masses or density samples of m_r")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--arc", type=_arc, action="append", help="start,end (repeatable)")
    p.add_argument("--shift", type=float, default=0.0)
    p.add_argument("--points", type=int, default=16)
    p.add_argument("--density-csv")
    for name in ("subinv", "decompose", "probe"):
        _measure_flags(msub.add_parser(name))
    p = msub.add_parser("l1-curve", help="||m_r - m_{n,r}||_1 for n = 1..n_max")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--n-max", type=int, default=10)
    p.add_argument("--json", action="store_true")

    p_c = top.add_parser("cycle", help="subinvariant vectors on the 2^n cycle")
    csub = p_c.add_subparsers(dest="sub", required=True)
    p = csub.add_parser("vectors")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=float, required=True)
    p = csub.add_parser("decompose")
    p.add_argument("--n", type=int)
    p.add_argument("--r", type=float, default=2 * math.log(2))
    p.add_argument("--x", type=_floats, required=True)

    p_k = top.add_parser("kms", help="KMS states of the Toeplitz solenoid")
    ksub = p_k.add_subparsers(dest="sub", required=True)
    p = ksub.add_parser("eval")
    _config_flags(p)
    p.add_argument("--expr", required=True)
    p.add_argument("--level", type=int, default=0)
    p.add_argument("--solenoid", type=_floats, help="coordinates s_0,...,s_J")
    for name in ("verify", "trace0", "factor-test"):
        _config_flags(ksub.add_parser(name))

    p = top.add_parser("report", help="run every suite and write a JSON report")
    _config_flags(p)
    p.add_argument("--out", default="report.json")
    p.add_argument("--density-csv")
    p.add_argument("--points", type=int, default=256)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {"measure": cmd_measure, "cycle": cmd_cycle, "kms": cmd_kms, "report": cmd_report}[args.cmd]
    try:
        return handler(args)
    except (ValueError, IndexError) as exc:
        parser.exit(2, f"error: {exc}\n")


if __name__ == "__main__":
    sys.exit(main())
