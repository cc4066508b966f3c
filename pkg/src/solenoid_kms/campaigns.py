"""Seeded verification campaigns producing machine-readable reports.

Every campaign returns Report records.  A report passes iff at least one case
ran and max_residual <= tolerance; boolean checks are phrased as residuals
(e.g. the number of misses against a tolerance of 0) so that rule holds
uniformly.
"""

from __future__ import annotations

import math
import os
import time
import zlib
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import cycle_subinv as cyc
from . import kms_tower as kt
from . import measures as ms
from .circle import SimpleFunction, circle_distance
from .toeplitz import (
    apply_dynamics,
    apply_dynamics_imaginary,
    elem_mul,
    embed,
    format_element,
    random_element,
)

SEED_ENV = "SOLENOID_KMS_SEED"

DEFAULT_TOLERANCES = {
    "kms": 1e-9,
    "invariance": 1e-10,
    "embedding": 1e-12,
    "positivity": 1e-9,
    "tower": 1e-10,
    "subinvariance": 1e-9,
    "factor": 1e-12,
    "trace": 1e-10,
    "equivariance": 1e-10,
    "freeness": 1e-6,
    "pushforward": 1e-12,
    "cycle": 1e-13,
    "decomposition": 1e-10,
    "l1": 1e-3,
}


def default_seed() -> int:
    return int(os.environ.get(SEED_ENV, "0"))


@dataclass
class RunConfig:
    N: int = 2
    theta0: float = 1 / 3
    beta: float = 1.0
    depth: int = 4
    n: int = 10
    tolerances: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    seed: int = field(default_factory=default_seed)
    samples: int = 1000
    states: int = 20

    def __post_init__(self) -> None:
        if self.n > 14 or self.n < 0:
            raise ValueError(f"dyadic level n must lie in 0..14, got {self.n}")
        if self.samples < 1:
            raise ValueError("samples must be at least 1")
        if self.states < 1:
            raise ValueError("states must be at least 1")
        self.tolerances = {**DEFAULT_TOLERANCES, **self.tolerances}

    def theta(self) -> kt.ThetaSeq:
        return kt.make_theta_seq(self.N, self.theta0, self.depth, self.beta)

    def params(self) -> dict:
        return {"N": self.N, "theta0": self.theta0, "beta": self.beta, "depth": self.depth, "seed": self.seed}

    def rng(self, tag: str) -> np.random.Generator:
        """Independent stream per campaign, reproducible from (seed, tag, config)."""
        key = f"{tag}|{self.N}|{self.theta0!r}|{self.beta!r}|{self.depth}"
        return np.random.default_rng([self.seed & 0xFFFFFFFFFFFFFFFF, zlib.crc32(key.encode())])


@dataclass
class Report:
    name: str
    parameters: dict
    max_residual: float
    tolerance: float
    cases: int
    witnesses: list = field(default_factory=list)
    wall_time_ms: float = 0.0
    passed: bool = field(init=False)

    def __post_init__(self) -> None:
        self.max_residual = float(self.max_residual)
        self.passed = bool(self.cases > 0 and self.max_residual <= self.tolerance)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag} {self.name}: max_residual={self.max_residual:.3e} tol={self.tolerance:.1e} cases={self.cases}"


class _Clock:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.ms = 1000 * (time.perf_counter() - self.t0)


def merge_reports(name: str, reports: list[Report]) -> Report:
    """One report covering several runs of the same campaign."""
    worst = max(reports, key=lambda r: r.max_residual)
    out = Report(
        name,
        {"runs": [r.parameters for r in reports]},
        worst.max_residual,
        worst.tolerance,
        sum(r.cases for r in reports),
        [w for r in reports for w in r.witnesses][:5],
        sum(r.wall_time_ms for r in reports),
    )
    if not all(r.passed for r in reports):
        out.passed = False
    return out


# states ---------------------------------------------------------------------


def build_states(theta: kt.ThetaSeq, rng: np.random.Generator, count: int = 20) -> list[kt.KmsState]:
    """Half extreme states at random solenoid points, half random convex mixtures.

    At beta = 0 the only KMS state is the trace, so a single state is returned.
    """
    if theta.beta == 0:
        return [kt.trace_state(theta)]
    n_ext = max(1, (count + 1) // 2)
    ext = [kt.extreme_state_from_solenoid(kt.SolenoidPoint.random(rng, theta.N, theta.depth), theta) for _ in range(n_ext)]
    mixed = []
    for _ in range(count - n_ext):
        k = int(rng.integers(2, min(4, n_ext) + 1)) if n_ext > 1 else 1
        idx = rng.choice(n_ext, size=k, replace=False)
        mixed.append(kt.convex_state(rng.dirichlet(np.ones(k)), [ext[i] for i in idx]))
    return ext + mixed


def _random_level(theta: kt.ThetaSeq, rng: np.random.Generator):
    return theta.level(int(rng.integers(0, theta.depth + 1)))


# KMS campaign ---------------------------------------------------------------


def kms_campaign(cfg: RunConfig, tower_checks: bool = True) -> list[Report]:
    """KMS identity, invariance, embedding consistency, positivity, tower checks."""
    theta = cfg.theta()
    rng = cfg.rng("kms")
    params = cfg.params()
    tol = cfg.tolerances
    states = build_states(theta, rng, cfg.states)
    batch = kt.StateBatch(states)
    reports = []

    with _Clock() as c:
        worst, wit = 0.0, None
        for _ in range(cfg.samples):
            level = _random_level(theta, rng)
            x, y = random_element(level, rng), random_element(level, rng)
            lhs = batch.evaluate(elem_mul(x, y))
            rhs = batch.evaluate(elem_mul(y, apply_dynamics_imaginary(x, theta.beta)))
            d = float(np.max(np.abs(lhs - rhs)))
            if d >= worst:
                worst, wit = d, {"x": format_element(x), "y": format_element(y), "level": level.j}
    reports.append(Report("kms-identity", params, worst, tol["kms"], cfg.samples * len(states), [wit], c.ms))

    with _Clock() as c:
        inv, emb, pos = 0.0, 0.0, -math.inf
        inv_w = emb_w = pos_w = None
        n_emb = 0
        for _ in range(cfg.samples):
            level = _random_level(theta, rng)
            x = random_element(level, rng)
            t = float(rng.uniform(0, 10))
            base = batch.evaluate(x)
            d = float(np.max(np.abs(batch.evaluate(apply_dynamics(x, t)) - base)))
            if d >= inv:
                inv, inv_w = d, {"x": format_element(x), "t": t}
            e = x
            for _k in range(min(3, theta.depth - level.j)):
                e = embed(e, theta.level(e.level.j + 1))
                d = float(np.max(np.abs(batch.evaluate(e) - base)))
                n_emb += 1
                if d >= emb:
                    emb, emb_w = d, {"x": format_element(x), "k": e.level.j - level.j}
            v = float(np.min(batch.evaluate(kt.gap_sandwich(x)).real))
            if -v >= pos:
                pos, pos_w = -v, {"x": format_element(x), "value": v}
    share = c.ms / 3
    reports.append(Report("state-invariance", params, inv, tol["invariance"], cfg.samples * len(states), [inv_w], share))
    reports.append(Report("embedding-consistency", params, emb, tol["embedding"], n_emb * len(states), [emb_w], share))
    # residual is the most negative positivity value, sign flipped
    reports.append(Report("positivity-gap", params, max(pos, 0.0) + 0.0, tol["positivity"], cfg.samples * len(states), [pos_w], share))

    if not tower_checks:
        return reports

    with _Clock() as c:
        worst, wit = 0.0, None
        for i, s in enumerate(states):
            d = s.tower.compatibility_error()
            if d >= worst:
                worst, wit = d, {"state": i}
    reports.append(Report("tower-compatibility", params, worst, tol["tower"], len(states), [wit], c.ms))

    with _Clock() as c:
        worst, wit = 0.0, None
        for i, s in enumerate(states[: min(4, len(states))]):
            for j, rep in enumerate(s.tower.subinvariance_reports(grid=(128, 32), arc_level=6)):
                if rep.worst_violation >= worst:
                    worst, wit = rep.worst_violation, {"state": i, "level": j}
            for j, rep in enumerate(kt.certify_tower(s, K=6)):
                if rep.worst_violation >= worst:
                    worst, wit = rep.worst_violation, {"state": i, "level": j, "certify_scale": rep.failing_scale}
    reports.append(Report("tower-subinvariance", params, worst, tol["subinvariance"], min(4, len(states)) * (theta.depth + 1), [wit], c.ms))
    return reports


def trace_campaign(cfg: RunConfig) -> list[Report]:
    """beta = 0: tracial identity, invariance, and the vanishing gap."""
    cfg = replace(cfg, beta=0.0)
    theta = cfg.theta()
    rng = cfg.rng("trace")
    params = cfg.params()
    phi = kt.trace_state(theta)
    with _Clock() as c:
        worst, wit = 0.0, None
        inv = 0.0
        for _ in range(cfg.samples):
            level = _random_level(theta, rng)
            x, y = random_element(level, rng), random_element(level, rng)
            d = abs(kt.evaluate(phi, elem_mul(x, y)) - kt.evaluate(phi, elem_mul(y, x)))
            if d >= worst:
                worst, wit = d, {"x": format_element(x), "y": format_element(y)}
            inv = max(inv, kt.verify_state_invariance(phi, x, float(rng.uniform(0, 10))))
    gaps = kt.factor_values(phi)
    return [
        Report("trace-identity", params, worst, cfg.tolerances["trace"], cfg.samples, [wit], c.ms),
        Report("trace-invariance", params, inv, cfg.tolerances["invariance"], cfg.samples, [], 0.0),
        Report("trace-factors", params, max(abs(g) for g in gaps), cfg.tolerances["tower"], len(gaps), [{"gap_values": gaps}], 0.0),
    ]


def factor_test(cfg: RunConfig) -> Report:
    """Gap values phi(1 - s s^*) per level against 1 - exp(-beta / N^j)."""
    with _Clock() as c:
        theta = cfg.theta()
        states = build_states(theta, cfg.rng("factor"), cfg.states)
        expected = [-math.expm1(-theta.beta_at(j)) for j in range(theta.depth + 1)]
        worst, wit = 0.0, None
        factors = []
        for i, phi in enumerate(states):
            vals = kt.factor_values(phi)
            factors.append(kt.factors_through_solenoid(phi))
            d = max(abs(v - e) for v, e in zip(vals, expected))
            if d >= worst:
                worst, wit = d, {"state": i, "values": vals, "expected": expected}
        # the gap must be strictly positive at every level when beta > 0
        if theta.beta > 0 and min(expected) <= 0:
            worst = math.inf
    rep = Report("factor-test", cfg.params(), worst, cfg.tolerances["factor"], len(states), [wit], c.ms)
    rep.witnesses.append({"factors_through_solenoid": all(factors)})
    return rep


def negative_beta_report(beta: float = -1.0) -> Report:
    """make_theta_seq must refuse beta < 0; residual 1 if it does not."""
    with _Clock() as c:
        try:
            kt.make_theta_seq(2, 1 / 3, 3, beta)
            miss, msg = 1.0, "accepted"
        except kt.NoKmsStates as exc:
            miss, msg = 0.0, str(exc)
    return Report("negative-beta-rejected", {"beta": beta}, miss, 0.0, 1, [msg], c.ms)


def equivariance_campaign(cfg: RunConfig, triples: int = 200) -> Report:
    theta = cfg.theta()
    rng = cfg.rng("equivariance")
    with _Clock() as c:
        worst, wit = 0.0, None
        for _ in range(triples):
            p = kt.SolenoidPoint.random(rng, theta.N, theta.depth)
            q = kt.SolenoidPoint.random(rng, theta.N, theta.depth)
            x = random_element(_random_level(theta, rng), rng)
            d = kt.verify_solenoid_equivariance(p, q, x, theta)
            if d >= worst:
                worst, wit = d, {"p": p.coords, "q": q.coords, "x": format_element(x)}
    return Report("solenoid-equivariance", cfg.params(), worst, cfg.tolerances["equivariance"], triples, [wit], c.ms)


def _far_from_zero(rng, theta: kt.ThetaSeq, margin: float = 1e-3) -> kt.SolenoidPoint:
    while True:
        q = kt.SolenoidPoint.random(rng, theta.N, theta.depth)
        if min(circle_distance(s, 0.0) for s in q.coords) >= margin:
            return q


def freeness_campaign(cfg: RunConfig, count: int = 20) -> Report:
    """Residual is the number of q for which no separating level was found."""
    theta = cfg.theta()
    rng = cfg.rng("freeness")
    with _Clock() as c:
        misses, wits = 0, []
        for _ in range(count):
            p = kt.SolenoidPoint.random(rng, theta.N, theta.depth)
            q = _far_from_zero(rng, theta)
            found = kt.freeness_witness(p, q, theta, cfg.tolerances["freeness"])
            if found is None:
                misses += 1
                wits.append({"q": q.coords})
            elif len(wits) < 3:
                wits.append({"q": q.coords, "level": found[0], "difference": found[1]})
    return Report("solenoid-freeness", cfg.params(), misses, 0.0, count, wits, c.ms)


def reversed_tower_report(cfg: RunConfig, max_degree: int = 4) -> Report:
    """The reversed-density tower must be caught by some f of degree <= max_degree.

    Residual is the most negative positivity value found; it passes when that
    value is below -tol.
    """
    theta = cfg.theta()
    with _Clock() as c:
        bad = kt.KmsState(kt.reversed_tower(theta), theta.beta)
        compat = bad.tower.compatibility_error()
        value, f = kt.positivity_witness(bad, 0, max_degree)
    wit = {"value": value, "f": {str(k): [v.real, v.imag] for k, v in f.to_dict().items()}, "tower_compatibility": compat}
    return Report("reversed-tower-detected", cfg.params(), value, -cfg.tolerances["positivity"], 1, [wit], c.ms)


# measure and cycle campaigns ------------------------------------------------


def cycle_campaign(
    ns=(1, 2, 3, 4), rates=(0.1, 1.0, 2 * math.log(2), 5.0), combos: int = 200, seed: int = 0
) -> list[Report]:
    rng = np.random.default_rng([seed, 1])
    with _Clock() as c:
        res, dec, cases = 0.0, 0.0, 0
        wit_r = wit_d = None
        for n in ns:
            k = 1 << n
            for r in rates:
                V = cyc.extreme_vectors(n, r)
                for j in range(k):
                    eps = np.zeros(k)
                    eps[j] = -math.expm1(-r / k)
                    d = float(np.max(np.abs(cyc.resolvent_apply(V[j], n, r) - eps)))
                    if d >= res:
                        res, wit_r = d, {"n": n, "r": r, "j": j}
                for _ in range(combos):
                    lam = rng.dirichlet(np.ones(k))
                    got = cyc.decompose_subinvariant(cyc.recompose(lam, n, r), n, r)
                    d = float(np.max(np.abs(got - lam)))
                    cases += 1
                    if d >= dec:
                        dec, wit_d = d, {"n": n, "r": r}
    params = {"n": list(ns), "r": list(rates)}
    return [
        Report("cycle-extreme-vectors", params, res, DEFAULT_TOLERANCES["cycle"], len(ns) * len(rates), [wit_r], c.ms / 2),
        Report("cycle-decomposition", params, dec, DEFAULT_TOLERANCES["decomposition"], cases, [wit_d], c.ms / 2),
    ]


def l1_curve(r: float = 1.0, n_max: int = 10) -> list[tuple[int, float]]:
    mr = ms.make_mr(r)
    return [(n, ms.l1_distance(mr, ms.make_mnr(n, r))) for n in range(1, n_max + 1)]


def l1_campaign(r: float = 1.0, n_max: int = 10) -> list[Report]:
    """Strict decrease (largest successive ratio below 1), and the 1e-3 bound at n = 10.

    The final-level bound is only emitted when the curve reaches n = 10.
    """
    with _Clock() as c:
        curve = l1_curve(r, n_max)
    vals = [v for _, v in curve]
    ratio = max(b / a for a, b in zip(vals, vals[1:])) if len(vals) > 1 else 0.0
    params = {"r": r, "n_max": n_max}
    reports = [Report("l1-decreasing", params, ratio, 1.0 - 1e-12, len(vals), [{"curve": curve}], c.ms)]
    if n_max >= 10:
        v10 = dict(curve)[10]
        reports.append(Report("l1-final", params, v10, DEFAULT_TOLERANCES["l1"], 1, [{"n": 10, "l1": v10}], 0.0))
    return reports


def pushforward_campaign(
    Ns=(2, 3), rates=(0.5, 2.0), shifts=(0.0, 0.3, 0.77), arcs: int = 64, seed: int = 0
) -> Report:
    """|(m_{N r} o R_s o p_N^{-1})(U) - (m_r o R_{N s})(U)| over random arcs."""
    rng = np.random.default_rng([seed, 3])
    with _Clock() as c:
        worst, wit, cases = 0.0, None, 0
        for N in Ns:
            for r in rates:
                starts = rng.uniform(0, 1, arcs)
                lengths = rng.uniform(0, 1, arcs)
                for s in shifts:
                    lhs = ms.pushforward_cover(ms.rotate_measure(ms.make_mr(N * r), s), N)
                    rhs = ms.rotate_measure(ms.make_mr(r), N * s)
                    d = np.abs(lhs.arc_masses(starts, lengths) - rhs.arc_masses(starts, lengths))
                    cases += arcs
                    i = int(np.argmax(d))
                    if d[i] >= worst:
                        worst, wit = float(d[i]), {"N": N, "r": r, "s": s, "arc": [starts[i], lengths[i]]}
    params = {"N": list(Ns), "r": list(rates), "s": list(shifts)}
    return Report("pushforward-identity", params, worst, DEFAULT_TOLERANCES["pushforward"], cases, [wit], c.ms)


def perturbed_lebesgue(rng: np.random.Generator) -> ms.CircleMeasure:
    """A non-uniform probability measure near Lebesgue measure.

    Alternates between random positive step densities on a dyadic grid and
    small mixtures of Lebesgue measure with a rotated m_r.
    """
    if rng.uniform() < 0.5:
        n = int(rng.integers(1, 6))
        k = 1 << n
        delta = 10.0 ** rng.uniform(-3, -0.5)
        vals = 1.0 + delta * rng.uniform(-1, 1, k)
        vals /= vals.mean()
        return ms.measure_from_density_steps(SimpleFunction(np.arange(k) / k, vals))
    w = 10.0 ** rng.uniform(-3, -0.5)
    mr = ms.rotate_measure(ms.make_mr(float(rng.uniform(0.1, 5))), float(rng.uniform()))
    return ms.convex_combination([1 - w, w], [ms.lebesgue(), mr])


def omega0_campaign(count: int = 50, seed: int = 0) -> list[Report]:
    """Lebesgue measure is 0-subinvariant; perturbations of it are not."""
    rng = np.random.default_rng([seed, 9])
    with _Clock() as c:
        leb = ms.check_subinvariance(ms.lebesgue(), 0.0)
        misses, wits = 0, []
        for i in range(count):
            rep = ms.check_subinvariance(perturbed_lebesgue(rng), 0.0)
            if rep.satisfied:
                misses += 1
                wits.append({"case": i})
    return [
        Report("omega0-lebesgue", {"r": 0.0}, leb.worst_violation, 0.0, 1, [], c.ms / 2),
        Report("omega0-perturbations-fail", {"r": 0.0, "count": count}, misses, 0.0, count, wits, c.ms / 2),
    ]


def write_report(path: str, reports: list[Report]) -> None:
    import json

    records = sorted((r.to_dict() for r in reports), key=lambda d: d["name"])
    with open(path, "w") as fh:
        json.dump(records, fh, indent=2, default=_jsonable)
        fh.write("\n")


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return str(obj)
