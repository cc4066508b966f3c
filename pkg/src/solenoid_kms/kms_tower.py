"""KMS states of the Toeplitz noncommutative solenoid at finite depth.

A state at inverse temperature beta is a tower of circle measures m_0..m_J,
one per level, linked by m_j = m_{j+1} o p_N^{-1}.  On spanning terms it acts
by

    phi(s^a i(f) s^{*b}) = delta_{a,b} exp(-a beta / N^j) integral f dm_j

at level j.  Extreme states come from solenoid points (s_j) via
m_j = m_{r_j} o R_{s_j} with r_j = beta / (N^j theta_j).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh

from . import measures as ms
from .circle import TrigPoly, dyadic_partition, wrap
from .toeplitz import (
    AlgebraLevel,
    ToeplitzElement,
    apply_dynamics,
    apply_dynamics_imaginary,
    elem_adjoint,
    elem_mul,
    gap_element,
    solenoid_act,
)

EVAL_TOL = 1e-10
IDENTITY_TOL = 1e-9
TOWER_TOL = 1e-10


class NoKmsStates(ValueError):
    """Raised for beta < 0: there are no KMS_beta states for beta < 0."""


class Degenerate(ValueError):
    """theta_0 = 0 is the degenerate case, which is outside this library."""


@dataclass(frozen=True)
class ThetaSeq:
    """theta_j = theta_0 / N^{2j} for j = 0..J, with rates r_j = beta / (N^j theta_j).

    theta_{j+1} is computed as theta_j / N^2 and r_{j+1} as N r_j, so the
    recursion r_{j+1} = N r_j holds exactly in floating point.
    """

    N: int
    theta0: float
    depth: int
    beta: float
    degree_cap: int = 64
    thetas: tuple[float, ...] = field(init=False)
    rates: tuple[float, ...] = field(init=False)

    def __post_init__(self) -> None:
        if self.N < 2:
            raise ValueError(f"N must be at least 2, got {self.N}")
        if self.beta < 0:
            raise NoKmsStates(f"beta = {self.beta}: there are no KMS_beta states for beta < 0")
        if self.theta0 == 0:
            raise Degenerate("theta_0 = 0 is the degenerate case and is not supported")
        if not (0.0 < self.theta0 < 1.0):
            raise ValueError(f"theta_0 must lie in (0, 1), got {self.theta0}")
        if self.depth < 1:
            raise ValueError("depth must be positive")
        thetas = [float(self.theta0)]
        rates = [self.beta / self.theta0]
        for _ in range(self.depth):
            thetas.append(thetas[-1] / self.N**2)
            rates.append(self.N * rates[-1])
        object.__setattr__(self, "thetas", tuple(thetas))
        object.__setattr__(self, "rates", tuple(rates))

    def level(self, j: int) -> AlgebraLevel:
        if not (0 <= j <= self.depth):
            raise IndexError(f"level {j} outside 0..{self.depth}")
        return AlgebraLevel(j, self.thetas[j], self.N, self.degree_cap)

    def beta_at(self, j: int) -> float:
        """beta / N^j, the inverse temperature seen by level j."""
        return self.beta / self.N**j


def make_theta_seq(N: int, theta0: float, J: int, beta: float, degree_cap: int = 64) -> ThetaSeq:
    return ThetaSeq(N, theta0, J, beta, degree_cap)


@dataclass(frozen=True)
class SolenoidPoint:
    """Compatible coordinates s_0..s_J with s_j = N s_{j+1} mod 1."""

    coords: tuple[float, ...]
    N: int

    def __post_init__(self) -> None:
        c = tuple(wrap(float(x)) for x in self.coords)
        object.__setattr__(self, "coords", c)
        for j in range(len(c) - 1):
            d = wrap(c[j] - self.N * c[j + 1])
            if min(d, 1 - d) > 1e-9:
                raise ValueError(f"coordinates {j} and {j + 1} are not compatible under p_{self.N}")

    @classmethod
    def from_finest(cls, s_J: float, N: int, depth: int) -> SolenoidPoint:
        coords = [wrap(s_J)]
        for _ in range(depth):
            coords.append(wrap(N * coords[-1]))
        return cls(tuple(reversed(coords)), N)

    @classmethod
    def zero(cls, N: int, depth: int) -> SolenoidPoint:
        return cls((0.0,) * (depth + 1), N)

    @classmethod
    def random(cls, rng: np.random.Generator, N: int, depth: int) -> SolenoidPoint:
        return cls.from_finest(float(rng.uniform()), N, depth)

    def __sub__(self, other: SolenoidPoint) -> SolenoidPoint:
        return SolenoidPoint(tuple(wrap(a - b) for a, b in zip(self.coords, other.coords)), self.N)

    def __add__(self, other: SolenoidPoint) -> SolenoidPoint:
        return SolenoidPoint(tuple(wrap(a + b) for a, b in zip(self.coords, other.coords)), self.N)


@dataclass(frozen=True)
class MeasureTower:
    measures: tuple[ms.CircleMeasure, ...]
    theta: ThetaSeq

    def __post_init__(self) -> None:
        if len(self.measures) != self.theta.depth + 1:
            raise ValueError(f"need {self.theta.depth + 1} measures, got {len(self.measures)}")

    def compatibility_error(self, arc_level: int = 8) -> float:
        """max over j and dyadic arcs of |(m_{j+1} o p_N^{-1})(U) - m_j(U)|."""
        arcs = [a for n in range(arc_level + 1) for a in dyadic_partition(n)]
        starts = np.array([a.start for a in arcs])
        lengths = np.array([a.length for a in arcs])
        worst = 0.0
        for lower, upper in zip(self.measures, self.measures[1:]):
            pushed = ms.pushforward_cover(upper, self.theta.N)
            diff = pushed.arc_masses(starts, lengths) - lower.arc_masses(starts, lengths)
            worst = max(worst, float(np.max(np.abs(diff))))
        return worst

    def subinvariance_reports(self, **kwargs) -> list[ms.SubinvReport]:
        return [ms.check_subinvariance(m, r, **kwargs) for m, r in zip(self.measures, self.theta.rates)]


@dataclass(frozen=True, eq=False)
class KmsState:
    tower: MeasureTower
    beta: float
    _moments: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.beta < 0:
            raise NoKmsStates("there are no KMS_beta states for beta < 0")
        if self.beta != self.tower.theta.beta:
            raise ValueError("state beta does not match its ThetaSeq")

    @property
    def theta(self) -> ThetaSeq:
        return self.tower.theta

    def moments(self, j: int, K: int) -> np.ndarray:
        """Fourier moments of m_j for frequencies -K..K (cached)."""
        have = self._moments.get(j)
        if have is None or (len(have) - 1) // 2 < K:
            K2 = max(K, 8)
            have = self.tower.measures[j].moments(K2)
            self._moments[j] = have
        K0 = (len(have) - 1) // 2
        return have[K0 - K : K0 + K + 1]


def _check_level(theta: ThetaSeq, x: ToeplitzElement) -> int:
    j = x.level.j
    if j > theta.depth:
        raise IndexError(f"element at level {j} is beyond the tower depth {theta.depth}")
    if x.level.N != theta.N or x.level.theta != theta.thetas[j]:
        raise ValueError(f"element level {x.level} does not belong to this ThetaSeq")
    return j


def evaluate(phi: KmsState, x: ToeplitzElement) -> complex:
    """Sum over diagonal terms of exp(-a beta / N^j) integral f dm_j."""
    j = _check_level(phi.theta, x)
    b = phi.theta.beta_at(j)
    total = 0j
    for (a, c), f in x.terms.items():
        if a != c:
            continue
        total += math.exp(-a * b) * complex(f.coeffs @ phi.moments(j, f.degree))
    return total


class StateBatch:
    """Several states sharing one ThetaSeq, evaluated together.

    Moments of every state are stacked per level once, so evaluating an
    element costs one small matrix-vector product per diagonal term.
    """

    def __init__(self, states: list[KmsState]) -> None:
        if not states:
            raise ValueError("a batch needs at least one state")
        self.states = list(states)
        self.theta = states[0].theta
        if any(s.theta != self.theta for s in states):
            raise ValueError("all states in a batch must share one ThetaSeq")
        self._stacks: dict[int, np.ndarray] = {}

    def __len__(self) -> int:
        return len(self.states)

    def _moments(self, j: int, K: int) -> np.ndarray:
        have = self._stacks.get(j)
        if have is None or (have.shape[1] - 1) // 2 < K:
            K2 = max(K, self.theta.degree_cap)
            have = np.stack([s.moments(j, K2) for s in self.states])
            self._stacks[j] = have
        K0 = (have.shape[1] - 1) // 2
        return have[:, K0 - K : K0 + K + 1]

    def evaluate(self, x: ToeplitzElement) -> np.ndarray:
        j = _check_level(self.theta, x)
        b = self.theta.beta_at(j)
        out = np.zeros(len(self.states), dtype=complex)
        for (a, c), f in x.terms.items():
            if a == c:
                out += math.exp(-a * b) * (self._moments(j, f.degree) @ f.coeffs)
        return out


def evaluate_many(states: list[KmsState], x: ToeplitzElement) -> np.ndarray:
    """evaluate() for several states sharing one ThetaSeq."""
    if not states:
        return np.zeros(0, dtype=complex)
    return StateBatch(states).evaluate(x)


def state_from_tower(tower: MeasureTower) -> KmsState:
    return KmsState(tower, tower.theta.beta)


def extreme_state_from_solenoid(p: SolenoidPoint, theta: ThetaSeq) -> KmsState:
    """The extreme state with m_j = m_{r_j} o R_{s_j}."""
    if theta.beta == 0:
        raise ValueError("at beta = 0 the only KMS state is trace_state()")
    if len(p.coords) != theta.depth + 1 or p.N != theta.N:
        raise ValueError("solenoid point does not match the ThetaSeq depth and N")
    tower = tuple(ms.rotate_measure(ms.make_mr(r), s) for r, s in zip(theta.rates, p.coords))
    return KmsState(MeasureTower(tower, theta), theta.beta)


def trace_state(theta: ThetaSeq) -> KmsState:
    """The unique KMS_0 state: Lebesgue measure at every level."""
    if theta.beta != 0:
        raise ValueError("trace_state requires beta = 0")
    leb = ms.lebesgue()
    return KmsState(MeasureTower((leb,) * (theta.depth + 1), theta), 0.0)


def convex_state(weights, states: list[KmsState]) -> KmsState:
    w = np.asarray(weights, dtype=float)
    if len(w) != len(states) or not states:
        raise ValueError("need one weight per state")
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
        raise ValueError("weights must be a probability vector")
    theta = states[0].theta
    if any(s.theta != theta for s in states):
        raise ValueError("all states must share one ThetaSeq")
    levels = tuple(
        ms.convex_combination(w, [s.tower.measures[j] for s in states]) for j in range(theta.depth + 1)
    )
    return KmsState(MeasureTower(levels, theta), theta.beta)


def verify_kms_identity(phi: KmsState, x: ToeplitzElement, y: ToeplitzElement) -> float:
    """|phi(x y) - phi(y alpha_{i beta}(x))|."""
    lhs = evaluate(phi, elem_mul(x, y))
    rhs = evaluate(phi, elem_mul(y, apply_dynamics_imaginary(x, phi.beta)))
    return abs(lhs - rhs)


def gap_sandwich(x: ToeplitzElement) -> ToeplitzElement:
    """x (1 - s s^*) x^*, a positive element."""
    return elem_mul(elem_mul(x, gap_element(x.level)), elem_adjoint(x))


def verify_positivity_gap(phi: KmsState, x: ToeplitzElement) -> float:
    """phi(x (1 - s s^*) x^*); nonnegative for every genuine KMS state."""
    return float(evaluate(phi, gap_sandwich(x)).real)


def factor_values(phi: KmsState) -> list[float]:
    """phi(1 - s s^*) at each level j; equals 1 - exp(-beta / N^j)."""
    return [float(evaluate(phi, gap_element(phi.theta.level(j))).real) for j in range(phi.theta.depth + 1)]


def factors_through_solenoid(phi: KmsState, tol: float = EVAL_TOL) -> bool:
    return all(v <= tol for v in factor_values(phi))


def verify_state_invariance(phi: KmsState, x: ToeplitzElement, t: float) -> float:
    return abs(evaluate(phi, apply_dynamics(x, t)) - evaluate(phi, x))


def verify_solenoid_equivariance(p: SolenoidPoint, q: SolenoidPoint, x: ToeplitzElement, theta: ThetaSeq) -> float:
    """|pi(p)(lambda_q x) - pi(p - q)(x)|."""
    j = x.level.j
    lhs = evaluate(extreme_state_from_solenoid(p, theta), solenoid_act(x, q.coords[j]))
    rhs = evaluate(extreme_state_from_solenoid(p - q, theta), x)
    return abs(lhs - rhs)


def freeness_witness(
    p: SolenoidPoint, q: SolenoidPoint, theta: ThetaSeq, threshold: float = 1e-6
) -> tuple[int, float] | None:
    """A level j where x = i(e^{2 pi i t}) separates pi(p) o lambda_q from pi(p).

    Returns (j, |difference|) for the first level whose difference reaches
    the threshold, or None.
    """
    phi = extreme_state_from_solenoid(p, theta)
    for j in range(theta.depth + 1):
        x = ToeplitzElement.function(theta.level(j), TrigPoly.monomial(1))
        d = abs(evaluate(phi, solenoid_act(x, q.coords[j])) - evaluate(phi, x))
        if d >= threshold:
            return j, d
    return None


def certify_tower(phi: KmsState, K: int = 6, tol: float = ms.DEFAULT_SUBINV_TOL) -> list[ms.CertifyReport]:
    """certify_from_scales(m_j, theta_j, beta / N^j, K) for every level."""
    th = phi.theta
    return [
        ms.certify_from_scales(m, th.thetas[j], th.beta_at(j), K, tol=tol, N=th.N)
        for j, m in enumerate(phi.tower.measures)
    ]


def reversed_tower(theta: ThetaSeq) -> MeasureTower:
    """Densities proportional to exp(+r_j t): compatible under p_N but not subinvariant."""
    return MeasureTower(tuple(ms.exp_density(-r) for r in theta.rates), theta)


def positivity_form(phi: KmsState, j: int, degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Hermitian matrices H, G on frequencies -degree..degree with

        phi(i(f) (1 - s s^*) i(f)^*) = u^H H u,   integral |f|^2 dm_j = u^H G u,

    where u = conj(c) for f = sum_k c_k e^{2 pi i k t}.
    """
    level = phi.theta.level(j)
    ks = range(-degree, degree + 1)
    gap = gap_element(level)
    H = np.empty((len(ks), len(ks)), dtype=complex)
    G = np.empty_like(H)
    for a, k in enumerate(ks):
        ek = ToeplitzElement.function(level, TrigPoly.monomial(k))
        left = elem_mul(ek, gap)
        for b, l in enumerate(ks):
            el_star = elem_adjoint(ToeplitzElement.function(level, TrigPoly.monomial(l)))
            H[a, b] = evaluate(phi, elem_mul(left, el_star))
            G[a, b] = evaluate(phi, elem_mul(ek, el_star))
    return 0.5 * (H + H.conj().T), 0.5 * (G + G.conj().T)


def positivity_witness(phi: KmsState, j: int = 0, max_degree: int = 4) -> tuple[float, TrigPoly]:
    """The f of degree <= max_degree minimizing phi(i(f) (1 - s s^*) i(f)^*).

    The value is a Hermitian form in the coefficients, so the minimum over f
    normalized by integral |f|^2 dm_j = 1 is the smallest generalized
    eigenvalue of (H, G).  Returns (value, f) with value recomputed directly.
    """
    H, G = positivity_form(phi, j, max_degree)
    _, vecs = eigh(H, G, subset_by_index=[0, 0])
    u = vecs[:, 0]
    f = TrigPoly(np.conj(u))
    return verify_positivity_gap(phi, ToeplitzElement.function(phi.theta.level(j), f)), f


def to_record(phi: KmsState) -> dict:
    th = phi.theta
    return {
        "theta": {"N": th.N, "theta0": th.theta0, "depth": th.depth, "beta": th.beta},
        "levels": [ms.to_record(m) for m in phi.tower.measures],
    }


def from_record(rec: dict) -> KmsState:
    t = rec["theta"]
    theta = ThetaSeq(int(t["N"]), float(t["theta0"]), int(t["depth"]), float(t["beta"]))
    tower = MeasureTower(tuple(ms.from_record(m) for m in rec["levels"]), theta)
    return KmsState(tower, theta.beta)
