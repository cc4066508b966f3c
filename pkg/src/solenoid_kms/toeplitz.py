"""Normal forms s^m i(f) s^{*n} in the Toeplitz algebra of a circle rotation.

An element at level j is a finite sum of terms keyed by (m, n) with a
trigonometric polynomial f per key.  The isometry s and the function algebra
satisfy s i(f) = i(f o R_theta) s, which gives the product rule

    (s^m i(f) s^{*n}) (s^p i(g) s^{*q})
        = s^m i(f . g o R_theta^{-(n-p)}) s^{*(n-p+q)}      if n >= p
        = s^{m+p-n} i(f o R_theta^{-(p-n)} . g) s^{*q}      if n < p

with f o R_theta^{-k}(t) = f(t + k theta).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .circle import (
    DEFAULT_DEGREE_CAP,
    DegreeOverflow,
    TrigPoly,
    trig_compose_cover,
    trig_compose_rotation,
    trig_conj,
    trig_mul,
)


class LevelMismatch(ValueError):
    pass


@dataclass(frozen=True)
class AlgebraLevel:
    """Level j of the inductive system: rotation angle theta_j and cover degree N."""

    j: int
    theta: float
    N: int
    degree_cap: int = DEFAULT_DEGREE_CAP

    def __post_init__(self) -> None:
        if self.j < 0:
            raise ValueError("level index must be nonnegative")
        if self.N < 2:
            raise ValueError(f"N must be at least 2, got {self.N}")
        if self.theta == 0:
            raise ValueError("theta_j = 0 is the degenerate case and is not supported")

    def next(self, theta: float | None = None) -> AlgebraLevel:
        """Level j+1; by default theta_{j+1} = theta_j / N^2."""
        t = self.theta / self.N**2 if theta is None else theta
        return AlgebraLevel(self.j + 1, t, self.N, self.degree_cap)


Key = tuple[int, int]


class ToeplitzElement:
    __slots__ = ("level", "terms")

    def __init__(self, level: AlgebraLevel, terms: dict[Key, TrigPoly] | None = None) -> None:
        self.level = level
        clean = {}
        for (m, n), f in (terms or {}).items():
            if m < 0 or n < 0:
                raise ValueError(f"exponents must be nonnegative, got ({m}, {n})")
            if f.is_zero():
                continue
            if f.degree > level.degree_cap:
                raise DegreeOverflow(f"term ({m}, {n}) has degree {f.degree} > cap {level.degree_cap}")
            clean[(int(m), int(n))] = f
        self.terms = dict(sorted(clean.items()))

    # constructors -----------------------------------------------------

    @classmethod
    def identity(cls, level: AlgebraLevel) -> ToeplitzElement:
        return cls(level, {(0, 0): TrigPoly.constant(1.0)})

    @classmethod
    def isometry(cls, level: AlgebraLevel, power: int = 1) -> ToeplitzElement:
        return cls(level, {(power, 0): TrigPoly.constant(1.0)})

    @classmethod
    def isometry_adjoint(cls, level: AlgebraLevel, power: int = 1) -> ToeplitzElement:
        return cls(level, {(0, power): TrigPoly.constant(1.0)})

    @classmethod
    def function(cls, level: AlgebraLevel, f: TrigPoly) -> ToeplitzElement:
        return cls(level, {(0, 0): f})

    @classmethod
    def term(cls, level: AlgebraLevel, m: int, f: TrigPoly, n: int) -> ToeplitzElement:
        return cls(level, {(m, n): f})

    @classmethod
    def zero(cls, level: AlgebraLevel) -> ToeplitzElement:
        return cls(level, {})

    # linear structure -------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def max_degree(self) -> int:
        return max((f.degree for f in self.terms.values()), default=0)

    def __add__(self, other: ToeplitzElement) -> ToeplitzElement:
        _same_level(self, other)
        out = dict(self.terms)
        for k, f in other.terms.items():
            out[k] = out[k] + f if k in out else f
        return ToeplitzElement(self.level, out)

    def __neg__(self) -> ToeplitzElement:
        return self.scale(-1.0)

    def __sub__(self, other: ToeplitzElement) -> ToeplitzElement:
        return self + (-other)

    def scale(self, c: complex) -> ToeplitzElement:
        return ToeplitzElement(self.level, {k: f.scale(c) for k, f in self.terms.items()})

    def __mul__(self, other: ToeplitzElement) -> ToeplitzElement:
        return elem_mul(self, other)

    def allclose(self, other: ToeplitzElement, tol: float = 1e-12) -> bool:
        if self.level.j != other.level.j or self.level.N != other.level.N:
            return False
        keys = set(self.terms) | set(other.terms)
        zero = TrigPoly.zero()
        return all(self.terms.get(k, zero).allclose(other.terms.get(k, zero), tol) for k in keys)

    def max_abs_diff(self, other: ToeplitzElement) -> float:
        keys = set(self.terms) | set(other.terms)
        zero = TrigPoly.zero()
        worst = 0.0
        for k in keys:
            f, g = self.terms.get(k, zero), other.terms.get(k, zero)
            K = max(f.degree, g.degree)
            worst = max(worst, float(np.max(np.abs(f.padded(K) - g.padded(K)))))
        return worst

    def __repr__(self) -> str:
        return f"ToeplitzElement(level={self.level.j}, {format_element(self)})"


def _same_level(x: ToeplitzElement, y: ToeplitzElement) -> None:
    a, b = x.level, y.level
    if a.j != b.j or a.N != b.N or a.theta != b.theta:
        raise LevelMismatch(f"elements live at different levels ({a} vs {b}); embed them first")


def elem_mul(x: ToeplitzElement, y: ToeplitzElement) -> ToeplitzElement:
    _same_level(x, y)
    theta = x.level.theta
    cap = x.level.degree_cap
    out: dict[Key, TrigPoly] = {}
    for (m, n), f in x.terms.items():
        for (p, q), g in y.terms.items():
            if n >= p:
                k = n - p
                h = trig_mul(f, trig_compose_rotation(g, -k * theta), cap)
                key = (m, k + q)
            else:
                k = p - n
                h = trig_mul(trig_compose_rotation(f, -k * theta), g, cap)
                key = (m + k, q)
            out[key] = out[key] + h if key in out else h
    return ToeplitzElement(x.level, out)


def elem_adjoint(x: ToeplitzElement) -> ToeplitzElement:
    """(s^m i(f) s^{*n})^* = s^n i(conj f) s^{*m}."""
    return ToeplitzElement(x.level, {(n, m): trig_conj(f) for (m, n), f in x.terms.items()})


def apply_dynamics(x: ToeplitzElement, t: float) -> ToeplitzElement:
    """alpha_t: the (m, n) term picks up exp(i t (m - n) / N^j)."""
    scale = x.level.N ** x.level.j
    return ToeplitzElement(
        x.level, {(m, n): f.scale(np.exp(1j * t * (m - n) / scale)) for (m, n), f in x.terms.items()}
    )


def apply_dynamics_imaginary(x: ToeplitzElement, beta: float) -> ToeplitzElement:
    """alpha_{i beta}: the (m, n) term picks up exp(-beta (m - n) / N^j)."""
    scale = x.level.N ** x.level.j
    return ToeplitzElement(
        x.level, {(m, n): f.scale(math.exp(-beta * (m - n) / scale)) for (m, n), f in x.terms.items()}
    )


def embed(x: ToeplitzElement, target: AlgebraLevel | None = None) -> ToeplitzElement:
    """psi_j: s -> s^N and i(f) -> i(f o p_N), landing at level j+1."""
    level = x.level.next() if target is None else target
    if level.j != x.level.j + 1 or level.N != x.level.N:
        raise LevelMismatch(f"cannot embed level {x.level.j} into {level}")
    N = x.level.N
    return ToeplitzElement(
        level,
        {(N * m, N * n): trig_compose_cover(f, N, level.degree_cap) for (m, n), f in x.terms.items()},
    )


def solenoid_act(x: ToeplitzElement, s_j: float) -> ToeplitzElement:
    """lambda at level j: every f becomes f o R_{s_j}; s is fixed."""
    return ToeplitzElement(x.level, {k: trig_compose_rotation(f, s_j) for k, f in x.terms.items()})


def gap_element(level: AlgebraLevel) -> ToeplitzElement:
    """The projection 1 - s s^*."""
    one = TrigPoly.constant(1.0)
    return ToeplitzElement(level, {(0, 0): one, (1, 1): -one})


# text format ----------------------------------------------------------
#
#   S^m [k1:re,im; k2:re,im] S*^n + S^m' [...] S*^n' + ...
#
# Floats are printed with repr, so print -> parse is bit-exact.  An empty
# bracket "[]" is shorthand for the constant function 1.

_TERM = re.compile(r"^S\^(\d+)\s*\[(.*?)\]\s*S\*\^(\d+)$")


def format_element(x: ToeplitzElement) -> str:
    if x.is_zero():
        return "0"
    parts = []
    for (m, n), f in x.terms.items():
        coeffs = "; ".join(f"{k}:{c.real!r},{c.imag!r}" for k, c in f.to_dict().items())
        parts.append(f"S^{m} [{coeffs}] S*^{n}")
    return " + ".join(parts)


def parse_element(text: str, level: AlgebraLevel) -> ToeplitzElement:
    text = text.strip()
    if text == "0":
        return ToeplitzElement.zero(level)
    out = ToeplitzElement.zero(level)
    for raw in _split_terms(text):
        match = _TERM.match(raw.strip())
        if not match:
            raise ValueError(f"cannot parse term {raw.strip()!r}; expected 'S^m [k:re,im; ...] S*^n'")
        m, body, n = int(match.group(1)), match.group(2).strip(), int(match.group(3))
        if not body:
            f = TrigPoly.constant(1.0)
        else:
            coeffs: dict[int, complex] = {}
            for item in body.split(";"):
                k, _, val = item.strip().partition(":")
                re_s, _, im_s = val.partition(",")
                coeffs[int(k)] = coeffs.get(int(k), 0) + complex(float(re_s), float(im_s or 0.0))
            f = TrigPoly.from_dict(coeffs)
        out = out + ToeplitzElement.term(level, m, f, n)
    return out


def _split_terms(text: str) -> list[str]:
    """Split on '+' outside brackets (coefficients may carry exponents like 1e+05)."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "+" and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def random_element(
    level: AlgebraLevel,
    rng: np.random.Generator,
    max_terms: int = 3,
    max_power: int = 3,
    max_degree: int = 2,
) -> ToeplitzElement:
    """Random finite sum of spanning terms with Gaussian coefficients."""
    terms: dict[Key, TrigPoly] = {}
    for _ in range(int(rng.integers(1, max_terms + 1))):
        m, n = (int(v) for v in rng.integers(0, max_power + 1, size=2))
        K = int(rng.integers(0, max_degree + 1))
        c = rng.normal(size=2 * K + 1) + 1j * rng.normal(size=2 * K + 1)
        f = TrigPoly(c / np.sqrt(2 * K + 1))
        terms[(m, n)] = terms[(m, n)] + f if (m, n) in terms else f
    return ToeplitzElement(level, terms)
