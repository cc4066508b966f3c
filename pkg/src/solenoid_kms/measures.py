"""Probability measures on the circle with piecewise-exponential densities.

A :class:`CircleMeasure` is a finite list of :class:`ExpPiece` records.  Each
piece contributes the density ``coefficient * exp(-rate * (t - start))`` on
its non-wrapping arc ``[start, end)``; pieces may overlap and the density of
the measure is their sum.  This covers m_r, its rotates, the step densities
m_{n,r}, Lebesgue measure, cover pushforwards, and convex combinations of all
of these.  Anchoring the coefficient at the left end of each piece keeps the
numbers bounded even for rates in the thousands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from . import cycle_subinv
from .circle import Arc, SimpleFunction, TrigPoly, baseN_digits, dyadic_partition, wrap, wrap_array

# Comparisons that differ by less than this many ulps are treated as ties.
ROUNDOFF = 64 * np.finfo(float).eps
DEFAULT_SUBINV_TOL = 1e-9


@dataclass(frozen=True)
class ExpPiece:
    """Density coefficient * exp(-rate * (t - start)) on [start, end).

    ``log_coefficient`` is the authoritative value; ``coefficient`` may
    underflow to 0 for pieces far down the tail of a steep exponential.
    """

    start: float
    end: float
    log_coefficient: float
    rate: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.start < self.end <= 1.0):
            raise ValueError(f"piece must satisfy 0 <= start < end <= 1, got [{self.start}, {self.end})")
        if math.isnan(self.log_coefficient) or self.log_coefficient == math.inf:
            raise ValueError("density coefficient must be a finite nonnegative number")

    @classmethod
    def with_coefficient(cls, start: float, end: float, coefficient: float, rate: float) -> ExpPiece:
        if coefficient < 0:
            raise ValueError("density coefficient must be nonnegative")
        return cls(start, end, math.log(coefficient) if coefficient > 0 else -math.inf, rate)

    @property
    def coefficient(self) -> float:
        return math.exp(self.log_coefficient)

    @property
    def arc(self) -> Arc:
        return Arc.between(self.start, self.end)


def _interval_factor(rate: np.ndarray, length: np.ndarray) -> np.ndarray:
    """integral_0^length exp(-rate u) du, stable for rate -> 0."""
    rate = np.asarray(rate, dtype=float)
    length = np.asarray(length, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        out = -np.expm1(-rate * length) / rate
    return np.where(rate == 0.0, length, out)


def _log_interval_factor(rate: np.ndarray, length: np.ndarray) -> np.ndarray:
    """log of _interval_factor without overflow for large |rate|."""
    rate = np.asarray(rate, dtype=float)
    length = np.asarray(length, dtype=float)
    a = np.abs(rate)
    with np.errstate(divide="ignore", invalid="ignore"):
        # rate > 0: (1 - e^{-a L}) / a ; rate < 0: e^{a L} (1 - e^{-a L}) / a
        core = np.log(-np.expm1(-a * length)) - np.log(a)
        out = np.where(rate < 0, a * length + core, core)
        return np.where(rate == 0.0, np.log(length), out)


def _phi1(z: np.ndarray, length: np.ndarray) -> np.ndarray:
    """(exp(z L) - 1) / z for complex z, without cancellation."""
    w = z * length
    x, y = w.real, w.imag
    with np.errstate(over="ignore", invalid="ignore"):
        em1 = np.expm1(x) * np.exp(1j * y) + 2j * np.sin(y / 2) * np.exp(0.5j * y)
    small = np.abs(w) < 1e-3
    with np.errstate(divide="ignore", invalid="ignore"):
        big = em1 / z
    series = length * (1 + w / 2 + w**2 / 6 + w**3 / 24 + w**4 / 120)
    return np.where(small, series, big)


def _logsumexp(a: np.ndarray, axis: int = -1) -> np.ndarray:
    m = np.max(a, axis=axis, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(divide="ignore", under="ignore"):
        out = np.log(np.sum(np.exp(a - m), axis=axis)) + np.squeeze(m, axis=axis)
    return out


class CircleMeasure:
    """Finite sum of exponential-density pieces; see the module docstring."""

    __slots__ = ("starts", "ends", "logc", "rates")

    def __init__(self, pieces) -> None:
        pieces = list(pieces)
        self.starts = np.array([p.start for p in pieces], dtype=float)
        self.ends = np.array([p.end for p in pieces], dtype=float)
        self.logc = np.array([p.log_coefficient for p in pieces], dtype=float)
        self.rates = np.array([p.rate for p in pieces], dtype=float)
        for a in (self.starts, self.ends, self.logc, self.rates):
            a.setflags(write=False)

    @classmethod
    def _from_arrays(cls, starts, ends, logc, rates) -> CircleMeasure:
        keep = (ends > starts) & np.isfinite(logc)
        return cls(
            ExpPiece(float(a), float(b), float(c), float(r))
            for a, b, c, r in zip(starts[keep], ends[keep], logc[keep], rates[keep])
        )

    @property
    def coeffs(self) -> np.ndarray:
        with np.errstate(under="ignore"):
            return np.exp(self.logc)

    @property
    def pieces(self) -> list[ExpPiece]:
        return [
            ExpPiece(float(a), float(b), float(c), float(r))
            for a, b, c, r in zip(self.starts, self.ends, self.logc, self.rates)
        ]

    def __len__(self) -> int:
        return len(self.starts)

    def __repr__(self) -> str:
        return f"CircleMeasure({len(self)} pieces, mass={self.total_mass():.15g})"

    def breakpoints(self) -> np.ndarray:
        return np.unique(np.concatenate([[0.0, 1.0], self.starts, self.ends]))

    def _piece_log_density(self, t: np.ndarray) -> np.ndarray:
        tt = wrap_array(np.asarray(t, dtype=float))[..., None]
        inside = (tt >= self.starts) & (tt < self.ends)
        return np.where(inside, self.logc - self.rates * (tt - self.starts), -np.inf)

    def log_density(self, t):
        out = _logsumexp(self._piece_log_density(t))
        return float(out) if np.ndim(out) == 0 else out

    def density(self, t):
        with np.errstate(under="ignore"):
            out = np.exp(self._piece_log_density(t)).sum(axis=-1)
        return float(out) if np.ndim(out) == 0 else out

    def _piece_interval_logs(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        """Shape (len(lo), pieces): log mass each piece puts on [lo, hi)."""
        lo = np.asarray(lo, dtype=float)[:, None]
        hi = np.asarray(hi, dtype=float)[:, None]
        u = np.maximum(lo, self.starts)
        v = np.minimum(hi, self.ends)
        ok = v > u
        with np.errstate(invalid="ignore"):
            val = self.logc - self.rates * (u - self.starts) + _log_interval_factor(self.rates, np.where(ok, v - u, 1.0))
        return np.where(ok, val, -np.inf)

    def _interval_masses(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        """Masses of non-wrapping intervals [lo, hi) inside [0, 1]."""
        lo = np.asarray(lo, dtype=float)
        out = np.zeros(len(lo))
        # chunk over query intervals to bound memory for large piece counts
        step = max(1, 2_000_000 // max(len(self), 1))
        for i in range(0, len(lo), step):
            with np.errstate(under="ignore"):
                out[i : i + step] = np.exp(self._piece_interval_logs(lo[i : i + step], hi[i : i + step])).sum(axis=1)
        return out

    def _interval_log_masses(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        return _logsumexp(self._piece_interval_logs(lo, hi))

    def _split_arcs(self, starts, lengths):
        s = wrap_array(np.asarray(starts, dtype=float))
        e = s + np.asarray(lengths, dtype=float)
        wraps = e > 1.0
        return s, np.minimum(e, 1.0), np.where(wraps, e - 1.0, 0.0)

    def arc_masses(self, starts, lengths) -> np.ndarray:
        """Masses of the arcs [starts[i], starts[i] + lengths[i]) mod 1."""
        s, e1, e2 = self._split_arcs(starts, lengths)
        return self._interval_masses(s, e1) + self._interval_masses(np.zeros_like(s), e2)

    def log_arc_masses(self, starts, lengths) -> np.ndarray:
        s, e1, e2 = self._split_arcs(starts, lengths)
        return np.logaddexp(self._interval_log_masses(s, e1), self._interval_log_masses(np.zeros_like(s), e2))

    def total_mass(self) -> float:
        return float(self._interval_masses(np.array([0.0]), np.array([1.0]))[0])

    def moments(self, K: int) -> np.ndarray:
        """integral exp(2 pi i k t) dm(t) for k = -K..K."""
        k = np.arange(-K, K + 1)
        L = (self.ends - self.starts)[:, None]
        # growing pieces are anchored at their right end so nothing overflows
        grow = self.rates < 0
        anchor = np.where(grow, self.ends, self.starts)
        logc = np.where(grow, self.logc - self.rates * (self.ends - self.starts), self.logc)
        z = 2j * np.pi * k[None, :] - self.rates[:, None]
        sign = np.where(grow, -1.0, 1.0)[:, None]
        phase = np.exp(2j * np.pi * np.mod(np.outer(anchor, k), 1.0))
        with np.errstate(under="ignore"):
            c = np.exp(logc)[:, None]
        return (c * phase * _phi1(sign * z, L)).sum(axis=0)

    def scaled(self, w: float) -> CircleMeasure:
        return CircleMeasure._from_arrays(self.starts, self.ends, self.logc + math.log(w), self.rates)


def _merge(starts, ends, logc, rates, snap: float = 1e-13) -> CircleMeasure:
    """Combine pieces sharing an arc and a rate (their coefficients add)."""
    starts, ends, logc, rates = (np.asarray(x, dtype=float) for x in (starts, ends, logc, rates))
    groups: dict[tuple, list[int]] = {}
    for i, (a, b, r) in enumerate(zip(starts, ends, rates)):
        groups.setdefault((round(a / snap), round(b / snap), float(r)), []).append(i)
    idx = np.array([g[0] for g in groups.values()], dtype=int)
    lc = np.array([_logsumexp(logc[g]) for g in groups.values()])
    if len(idx) == 0:
        return CircleMeasure([])
    order = np.lexsort((rates[idx], starts[idx]))
    idx = idx[order]
    return CircleMeasure._from_arrays(starts[idx], ends[idx], lc[order], rates[idx])


def convex_combination(weights, measures) -> CircleMeasure:
    w = np.asarray(weights, dtype=float)
    if len(w) != len(measures):
        raise ValueError("need one weight per measure")
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
        raise ValueError("weights must be a probability vector")
    parts = [m.scaled(x) for m, x in zip(measures, w) if x > 0]
    return _merge(*(np.concatenate([getattr(p, f) for p in parts]) for f in ("starts", "ends", "logc", "rates")))


def lebesgue() -> CircleMeasure:
    return CircleMeasure([ExpPiece(0.0, 1.0, 0.0, 0.0)])


def exp_density(rate: float) -> CircleMeasure:
    """Probability measure with density proportional to exp(-rate t) on [0, 1)."""
    if rate == 0:
        return lebesgue()
    logc = -float(_log_interval_factor(np.array(rate), np.array(1.0)))
    return CircleMeasure([ExpPiece(0.0, 1.0, logc, float(rate))])


def make_mr(r: float) -> CircleMeasure:
    """m_r with density W_r(t) = r / (1 - exp(-r)) exp(-r t)."""
    if r < 0:
        raise ValueError("no subinvariant probability measures exist for negative rate")
    return exp_density(r)


def make_mnr(n: int, r: float) -> CircleMeasure:
    """Step density 2^n (v^n_0)_j on U^n_j."""
    if r <= 0:
        raise ValueError("rate must be positive")
    v0 = cycle_subinv.extreme_vectors(n, r)[0]
    k = 1 << n
    return CircleMeasure(
        ExpPiece.with_coefficient(j / k, (j + 1) / k, k * float(v0[j]), 0.0) for j in range(k)
    )


def measure_from_density_steps(f: SimpleFunction) -> CircleMeasure:
    """Normalized measure whose density is proportional to a nonnegative step function."""
    ends = f.breakpoints[1:] + (1.0,)
    total = sum(v * (b - a) for a, b, v in zip(f.breakpoints, ends, f.values))
    return CircleMeasure(
        ExpPiece.with_coefficient(a, b, v / total, 0.0)
        for a, b, v in zip(f.breakpoints, ends, f.values)
        if v > 0
    )


def rotate_measure(m: CircleMeasure, s: float) -> CircleMeasure:
    """m o R_s, whose density is t -> density(t - s)."""
    s = wrap(s)
    if s == 0.0 or len(m) == 0:
        return m
    a = m.starts + s
    b = m.ends + s
    past = a >= 1.0
    split = (~past) & (b > 1.0)
    starts = np.concatenate([np.where(past, a - 1.0, a), np.zeros(int(split.sum()))])
    ends = np.concatenate([np.where(past, b - 1.0, np.minimum(b, 1.0)), (b - 1.0)[split]])
    # the part that wraps keeps its density, now anchored at 0 instead of at a
    tail = (m.logc - m.rates * (1.0 - a))[split]
    logc = np.concatenate([m.logc, tail])
    rates = np.concatenate([m.rates, m.rates[split]])
    starts = np.clip(starts, 0.0, 1.0)
    starts = np.where(starts >= 1.0, 0.0, starts)
    return _merge(starts, np.clip(ends, 0.0, 1.0), logc, rates)


def pushforward_cover(m: CircleMeasure, N: int) -> CircleMeasure:
    """m o p_N^{-1}: density u -> (1/N) sum_i density((u + i) / N)."""
    if N < 2:
        raise ValueError(f"covering degree must be >= 2, got {N}")
    starts, ends, logc, rates = [], [], [], []
    for i in range(N):
        u = np.maximum(m.starts, i / N)
        v = np.minimum(m.ends, (i + 1) / N)
        ok = v > u
        starts.append(np.clip(N * u - i, 0.0, 1.0)[ok])
        ends.append(np.clip(N * v - i, 0.0, 1.0)[ok])
        logc.append((m.logc - m.rates * (u - m.starts) - math.log(N))[ok])
        rates.append((m.rates / N)[ok])
    return _merge(*(np.concatenate(x) for x in (starts, ends, logc, rates)))


def measure_arc(m: CircleMeasure, a: Arc) -> float:
    return float(m.arc_masses([a.start], [a.length])[0])


def integrate(m: CircleMeasure, f) -> complex:
    """Closed-form integral of a TrigPoly or SimpleFunction against m."""
    if isinstance(f, TrigPoly):
        return complex(f.coeffs @ m.moments(f.degree))
    if isinstance(f, SimpleFunction):
        arcs = f.arcs()
        masses = m.arc_masses([a.start for a in arcs], [a.length for a in arcs])
        return complex(np.dot(masses, f.values))
    raise TypeError(f"cannot integrate {type(f).__name__}")


@dataclass(frozen=True)
class SubinvReport:
    satisfied: bool
    worst_violation: float
    witness: tuple[float, float, Arc | None] | None = None


def _relative_excess(log_lhs: np.ndarray, log_rhs: np.ndarray) -> np.ndarray:
    """max(0, 1 - rhs/lhs) computed from logs; ties within ROUNDOFF count as 0."""
    with np.errstate(invalid="ignore"):
        diff = log_lhs - log_rhs
    diff = np.where(np.isneginf(log_lhs), -np.inf, diff)
    diff = np.where(np.isnan(diff), -np.inf, diff)
    v = -np.expm1(-np.maximum(diff, 0.0))
    return np.where(v <= ROUNDOFF, 0.0, v)


def check_subinvariance(
    m: CircleMeasure,
    r: float,
    grid: tuple[int, int] = (256, 64),
    tol: float = DEFAULT_SUBINV_TOL,
    arc_level: int = 8,
) -> SubinvReport:
    """Check m(R_s(U)) <= exp(r s) m(U) on a grid and on dyadic arcs.

    The pointwise form compares density(t - s) with exp(r s) density(t).
    Violations are measured relatively, as 1 - rhs/lhs, so rates in the
    thousands do not overflow.  Shifts s >= 1 need no check since exp(r s)
    only grows.
    """
    n_t, n_s = grid
    if n_t < 2 or n_s < 2:
        raise ValueError("grid sizes must be at least 2")
    t = (np.arange(n_t) + 0.5) / n_t
    s = np.arange(1, n_s) / n_s
    log_lhs = m.log_density(wrap_array(t[None, :] - s[:, None]))
    log_rhs = r * s[:, None] + m.log_density(t)[None, :]
    v = _relative_excess(log_lhs, log_rhs)
    worst = float(v.max())
    witness = None
    if worst > 0:
        i, k = np.unravel_index(int(np.argmax(v)), v.shape)
        witness = (float(t[k]), float(s[i]), None)

    arcs = [a for n in range(arc_level + 1) for a in dyadic_partition(n)]
    starts = np.array([a.start for a in arcs])
    lengths = np.array([a.length for a in arcs])
    base = m.log_arc_masses(starts, lengths)
    for sv in s:
        moved = m.log_arc_masses(starts - sv, lengths)
        va = _relative_excess(moved, r * sv + base)
        j = int(np.argmax(va))
        if va[j] > worst:
            worst = float(va[j])
            witness = (float(starts[j]), float(sv), arcs[j])
    return SubinvReport(worst <= tol, worst, witness if worst > tol else None)


@dataclass(frozen=True)
class CertifyReport:
    ok: bool
    failing_scale: int | None
    worst_violation: float

    def __bool__(self) -> bool:
        return self.ok


def certify_from_scales(
    m: CircleMeasure,
    gamma: float,
    s: float,
    K: int,
    probe_arcs: list[Arc] | None = None,
    tol: float = DEFAULT_SUBINV_TOL,
    N: int = 2,
    samples: int = 16,
    rng: np.random.Generator | None = None,
) -> CertifyReport:
    """Certify m(R_{t gamma}(U)) <= exp(s t) m(U) from the scales gamma / N^k.

    Stage one checks m(R_{gamma/N^k}(U)) <= exp(s/N^k) m(U) for k = 0..K on
    the probe arcs.  Stage two takes sample points t in [0, 1], truncates
    them to K base-N digits t_K = J/N^K and walks the chain of J steps of
    size gamma/N^K, checking each step and the end-to-end bound.
    A failing stage-one scale is reported as ``failing_scale``; a failing
    chain is reported as K + 1.
    """
    if not (0.0 < gamma < 1.0):
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    if K < 1:
        raise ValueError("K must be positive")
    if probe_arcs is None:
        probe_arcs = [a for n in range(7) for a in dyadic_partition(n)]
    starts = np.array([a.start for a in probe_arcs])
    lengths = np.array([a.length for a in probe_arcs])
    log_base = m.log_arc_masses(starts, lengths)

    worst = 0.0
    for k in range(K + 1):
        step = gamma / N**k
        moved = m.log_arc_masses(starts - step, lengths)
        v = float(_relative_excess(moved, s / N**k + log_base).max())
        worst = max(worst, v)
        if v > tol:
            return CertifyReport(False, k, worst)

    rng = rng if rng is not None else np.random.default_rng(0)
    ts = np.concatenate([[1.0 - 1e-12], rng.uniform(0, 1, samples)])
    Js = [int(sum(d * N ** (K - 1 - i) for i, d in enumerate(baseN_digits(t, N, K)))) for t in ts]
    step = gamma / N**K
    # every chain is a prefix of the longest one, so check its steps once
    steps = np.arange(max(Js) + 1)
    chain = m.log_arc_masses((starts[None, :] - steps[:, None] * step).ravel(), np.tile(lengths, len(steps)))
    chain = chain.reshape(len(steps), len(starts))
    if len(steps) > 1:
        per_step = _relative_excess(chain[1:], s / N**K + chain[:-1]).max(axis=1)
        first_bad = np.flatnonzero(per_step > tol)
        worst = max(worst, float(per_step.max()))
    else:
        first_bad = np.array([], dtype=int)
    for J in Js:
        if first_bad.size and first_bad[0] < J:
            return CertifyReport(False, K + 1, worst)
        v = float(_relative_excess(chain[J], s * (J / N**K) + log_base).max())
        worst = max(worst, v)
        if v > tol:
            return CertifyReport(False, K + 1, worst)
    return CertifyReport(True, None, worst)


def l1_distance(m1: CircleMeasure, m2: CircleMeasure, panels: int = 4096) -> float:
    """integral_0^1 |density_1 - density_2| dt.

    The difference is smooth between the union of both breakpoint sets.  On
    each such interval it is sampled on a fine grid, sign changes are refined
    by Brent's method, and every constant-sign segment is integrated exactly
    as a difference of arc masses.
    """
    if panels < 256:
        raise ValueError("panels must be at least 256")
    bps = np.union1d(m1.breakpoints(), m2.breakpoints())
    bps = bps[(bps >= 0) & (bps <= 1)]
    grid = np.union1d(bps, np.linspace(0.0, 1.0, panels + 1))

    def diff(t: float) -> float:
        return m1.density(t) - m2.density(t)

    cuts = [0.0]
    for a, b in zip(grid[:-1], grid[1:]):
        if b <= a:
            continue
        # probe strictly inside so that half-open jumps at a do not leak in
        probe = a + (b - a) * np.linspace(1e-9, 1 - 1e-9, 9)
        vals = m1.density(probe) - m2.density(probe)
        for x0, x1, y0, y1 in zip(probe[:-1], probe[1:], vals[:-1], vals[1:]):
            if y0 * y1 < 0:
                cuts.append(brentq(diff, x0, x1, xtol=1e-15))
        cuts.append(float(b))
    cuts = np.unique(np.clip(cuts, 0.0, 1.0))
    lo, hi = cuts[:-1], cuts[1:]
    keep = hi > lo
    lo, hi = lo[keep], hi[keep]
    d = m1._interval_masses(lo, hi) - m2._interval_masses(lo, hi)
    return float(np.abs(d).sum())


def decompose_into_extremes(m: CircleMeasure, r: float, n: int) -> np.ndarray:
    """Weights lambda^n_j of sum_j lambda_j m_r o R_{j/2^n} matching m on U^n_j."""
    x = cycle_subinv.measure_to_vector(m, n)
    return cycle_subinv.decompose_subinvariant(x, n, r)


def reconstruct(lam: np.ndarray, r: float, n: int) -> CircleMeasure:
    """M_n = sum_j lambda_j (m_r o R_{j/2^n})."""
    k = 1 << n
    mr = make_mr(r)
    idx = [j for j in range(k) if lam[j] > 0]
    w = np.asarray(lam)[idx]
    return convex_combination(w / w.sum(), [rotate_measure(mr, j / k) for j in idx])


def reconstruct_moments(lam: np.ndarray, r: float, n: int, K: int) -> np.ndarray:
    """Fourier moments of M_n without materializing 2^n rotated measures."""
    k = 1 << n
    freqs = np.arange(-K, K + 1)
    # integral f d(m o R_s) = integral f(t + s) dm(t): the k-th moment picks up exp(2 pi i k s)
    phases = np.exp(2j * np.pi * np.mod(np.outer(np.arange(k) / k, freqs), 1.0))
    return (np.asarray(lam) @ phases) * make_mr(r).moments(K)


class ProbeVerdict(Enum):
    FORCED_EQUAL = "ForcedEqual"
    EXCEEDS = "Exceeds"


class SubinvarianceViolation(AssertionError):
    pass


def extremality_probe(m: CircleMeasure, r: float, n: int, tol: float = 1e-10) -> ProbeVerdict:
    """Compare m with m_r on the last of n equal intervals.

    If m carries no more mass there than m_r, subinvariance pins m to m_r on
    every [i/n, (i+1)/n); a mismatch raises SubinvarianceViolation.
    """
    if n < 1:
        raise ValueError("n must be positive")
    mr = make_mr(r)
    starts = np.arange(n) / n
    lengths = np.full(n, 1.0 / n)
    mass = m.arc_masses(starts, lengths)
    ref = mr.arc_masses(starts, lengths)
    if mass[-1] > ref[-1] + tol:
        return ProbeVerdict.EXCEEDS
    gap = np.abs(mass - ref)
    if np.max(gap) > tol:
        i = int(np.argmax(gap))
        raise SubinvarianceViolation(
            f"mass on [{i}/{n}, {i + 1}/{n}) is {mass[i]:.12g}, forced value {ref[i]:.12g}"
        )
    return ProbeVerdict.FORCED_EQUAL


def to_record(m: CircleMeasure) -> dict:
    """Plain-data form: one [start, end, coefficient, rate] row per piece.

    ``log_coefficients`` carries the exact coefficients for pieces whose
    coefficient underflows; readers prefer it when present.
    """
    return {
        "pieces": [[p.start, p.end, p.coefficient, p.rate] for p in m.pieces],
        "log_coefficients": [p.log_coefficient for p in m.pieces],
    }


def from_record(rec: dict) -> CircleMeasure:
    rows = rec["pieces"]
    logs = rec.get("log_coefficients")
    if logs is None:
        return CircleMeasure(ExpPiece.with_coefficient(*map(float, row)) for row in rows)
    return CircleMeasure(ExpPiece(float(a), float(b), float(lc), float(r)) for (a, b, _, r), lc in zip(rows, logs))
