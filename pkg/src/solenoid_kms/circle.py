"""Points, arcs and functions on the circle R/Z.

The circle is identified with [0, 1).  Rotation R_g sends t to t - g (mod 1)
and the N-fold cover sends t to N t (mod 1).  Functions are either finite
Fourier series (:class:`TrigPoly`) or step functions (:class:`SimpleFunction`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_DEGREE_CAP = 64

# Relative slack when peeling base-N digits, so that e.g. 1/3 in base 3 is (1, 0, ...).
_DIGIT_SNAP = 1e-12


class DegreeOverflow(ValueError):
    """A trigonometric polynomial grew past its configured degree cap."""


def wrap(t: float) -> float:
    """Reduce a real number to [0, 1)."""
    v = math.fmod(t, 1.0)
    if v < 0.0:
        v += 1.0
    if v >= 1.0:  # fmod(-tiny, 1) + 1 rounds to 1.0
        v = 0.0
    return v


def wrap_array(t: np.ndarray) -> np.ndarray:
    v = np.mod(t, 1.0)
    return np.where(v >= 1.0, 0.0, v)


def circle_distance(a: float, b: float) -> float:
    d = wrap(a - b)
    return min(d, 1.0 - d)


@dataclass(frozen=True)
class CirclePoint:
    value: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", wrap(float(self.value)))

    def __float__(self) -> float:
        return self.value


def rotate(t: float, gamma: float) -> float:
    """R_gamma(t) = t - gamma (mod 1)."""
    return wrap(float(t) - gamma)


def cover(t: float, N: int) -> float:
    """p_N(t) = N t (mod 1)."""
    if N < 2:
        raise ValueError(f"covering degree must be >= 2, got {N}")
    return wrap(N * float(t))


@dataclass(frozen=True)
class Arc:
    """Half-open arc [start, start + length) taken mod 1."""

    start: float
    length: float

    def __post_init__(self) -> None:
        if not (0.0 < self.length <= 1.0):
            raise ValueError(f"arc length must lie in (0, 1], got {self.length}")
        object.__setattr__(self, "start", wrap(float(self.start)))

    @classmethod
    def between(cls, a: float, b: float) -> Arc:
        """The arc [a, b) for 0 <= a < b <= 1 (or wrapping if b > 1)."""
        return cls(a, b - a)

    @property
    def end(self) -> float:
        return self.start + self.length

    def fragments(self) -> list[tuple[float, float]]:
        """Split into at most two non-wrapping intervals inside [0, 1]."""
        end = self.start + self.length
        if end <= 1.0:
            return [(self.start, end)]
        return [(self.start, 1.0), (0.0, end - 1.0)]

    def contains(self, t: float) -> bool:
        return wrap(t - self.start) < self.length


def rotate_arc(a: Arc, gamma: float) -> Arc:
    """R_gamma(a) = a - gamma."""
    return Arc(a.start - gamma, a.length)


def cover_preimage_arcs(a: Arc, N: int) -> list[Arc]:
    """The N disjoint arcs whose union is p_N^{-1}(a)."""
    if N < 2:
        raise ValueError(f"covering degree must be >= 2, got {N}")
    return [Arc((a.start + i) / N, a.length / N) for i in range(N)]


def dyadic_partition(n: int) -> list[Arc]:
    if n < 0:
        raise ValueError("level must be nonnegative")
    k = 1 << n
    return [Arc(j / k, 1.0 / k) for j in range(k)]


def baseN_digits(t: float, N: int, K: int) -> tuple[int, ...]:
    """First K digits of the base-N expansion of t in [0, 1).

    Terminating expansions are preferred, so truncations never overshoot t
    by more than rounding.
    """
    if N < 2 or K < 1:
        raise ValueError("need N >= 2 and K >= 1")
    x = wrap(float(t))
    digits = []
    for _ in range(K):
        y = x * N
        d = min(int(math.floor(y + _DIGIT_SNAP * N)), N - 1)
        digits.append(d)
        x = max(y - d, 0.0)
    return tuple(digits)


def digits_value(digits: tuple[int, ...], N: int) -> float:
    return sum(d * float(N) ** -(i + 1) for i, d in enumerate(digits))


class TrigPoly:
    """Finite Fourier series f(t) = sum_k c_k exp(2 pi i k t), |k| <= degree.

    Coefficients live in a complex array indexed by k + degree.  Instances
    are treated as immutable.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs) -> None:
        c = np.asarray(coeffs, dtype=np.complex128)
        if c.ndim != 1 or len(c) % 2 == 0:
            raise ValueError("coefficient array must have odd length 2K+1")
        c = _trim(c)
        c.setflags(write=False)
        self.coeffs = c

    @classmethod
    def from_dict(cls, coeffs: dict[int, complex]) -> TrigPoly:
        if not coeffs:
            return cls.zero()
        K = max(abs(k) for k in coeffs)
        arr = np.zeros(2 * K + 1, dtype=np.complex128)
        for k, v in coeffs.items():
            arr[k + K] += v
        return cls(arr)

    @classmethod
    def constant(cls, c: complex = 1.0) -> TrigPoly:
        return cls([c])

    @classmethod
    def zero(cls) -> TrigPoly:
        return cls([0.0])

    @classmethod
    def monomial(cls, k: int, c: complex = 1.0) -> TrigPoly:
        return cls.from_dict({k: c})

    @property
    def degree(self) -> int:
        return (len(self.coeffs) - 1) // 2

    def frequencies(self) -> np.ndarray:
        K = self.degree
        return np.arange(-K, K + 1)

    def coefficient(self, k: int) -> complex:
        K = self.degree
        return complex(self.coeffs[k + K]) if abs(k) <= K else 0j

    def to_dict(self) -> dict[int, complex]:
        return {int(k): complex(c) for k, c in zip(self.frequencies(), self.coeffs) if c != 0}

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def is_real(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.coeffs - np.conj(self.coeffs[::-1])) <= tol))

    def padded(self, K: int) -> np.ndarray:
        if K < self.degree:
            raise ValueError("cannot pad to a smaller degree")
        out = np.zeros(2 * K + 1, dtype=np.complex128)
        d = self.degree
        out[K - d : K + d + 1] = self.coeffs
        return out

    def __call__(self, t):
        return trig_eval(self, t)

    def __add__(self, other: TrigPoly) -> TrigPoly:
        K = max(self.degree, other.degree)
        return TrigPoly(self.padded(K) + other.padded(K))

    def __sub__(self, other: TrigPoly) -> TrigPoly:
        return self + (-other)

    def __neg__(self) -> TrigPoly:
        return TrigPoly(-self.coeffs)

    def scale(self, c: complex) -> TrigPoly:
        return TrigPoly(self.coeffs * c)

    def __mul__(self, other: TrigPoly) -> TrigPoly:
        return trig_mul(self, other, cap=None)

    def allclose(self, other: TrigPoly, tol: float = 1e-12) -> bool:
        K = max(self.degree, other.degree)
        return bool(np.max(np.abs(self.padded(K) - other.padded(K))) <= tol)

    def __repr__(self) -> str:
        return f"TrigPoly({self.to_dict()})"


def _trim(c: np.ndarray) -> np.ndarray:
    K = (len(c) - 1) // 2
    nz = np.nonzero(c)[0]
    if len(nz) == 0:
        return np.zeros(1, dtype=np.complex128)
    d = int(max(abs(nz[0] - K), abs(nz[-1] - K)))
    return np.array(c[K - d : K + d + 1])


def trig_eval(f: TrigPoly, t):
    """Evaluate f at a point or an array of points."""
    t = np.asarray(t, dtype=float)
    phase = np.exp(2j * np.pi * np.multiply.outer(t, f.frequencies()))
    out = phase @ f.coeffs
    return complex(out) if out.ndim == 0 else out


def trig_mul(f: TrigPoly, g: TrigPoly, cap: int | None = DEFAULT_DEGREE_CAP) -> TrigPoly:
    """Exact product; the degree is the sum of the degrees."""
    out = TrigPoly(np.convolve(f.coeffs, g.coeffs))
    if cap is not None and out.degree > cap:
        raise DegreeOverflow(f"product degree {out.degree} exceeds cap {cap}")
    return out


def trig_conj(f: TrigPoly) -> TrigPoly:
    """Pointwise complex conjugate: c_k -> conj(c_{-k})."""
    return TrigPoly(np.conj(f.coeffs[::-1]))


def trig_compose_rotation(f: TrigPoly, gamma: float) -> TrigPoly:
    """f o R_gamma, i.e. t -> f(t - gamma)."""
    k = f.frequencies()
    # reduce k*gamma mod 1 before the exponential to keep the phase accurate
    return TrigPoly(f.coeffs * np.exp(-2j * np.pi * np.mod(k * gamma, 1.0)))


def trig_compose_cover(f: TrigPoly, N: int, cap: int | None = DEFAULT_DEGREE_CAP) -> TrigPoly:
    """f o p_N: the coefficient at k moves to N k."""
    if N < 2:
        raise ValueError(f"covering degree must be >= 2, got {N}")
    K = f.degree
    if cap is not None and N * K > cap:
        raise DegreeOverflow(f"composition with p_{N} gives degree {N * K} > cap {cap}")
    out = np.zeros(2 * N * K + 1, dtype=np.complex128)
    out[::N] = f.coeffs
    return TrigPoly(out)


@dataclass(frozen=True)
class SimpleFunction:
    """Step function taking values[i] on [breakpoints[i], breakpoints[i+1]).

    breakpoints[0] must be 0; the last piece runs up to 1.
    """

    breakpoints: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        bp = tuple(float(b) for b in self.breakpoints)
        if len(bp) != len(self.values) or not bp or bp[0] != 0.0:
            raise ValueError("need one value per piece and a first breakpoint at 0")
        if any(b1 <= b0 for b0, b1 in zip(bp, bp[1:])) or bp[-1] >= 1.0:
            raise ValueError("breakpoints must increase strictly inside [0, 1)")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    @classmethod
    def sample_dyadic(cls, f, n: int) -> SimpleFunction:
        """sum_j f(j/2^n) 1_{U^n_j}."""
        k = 1 << n
        pts = tuple(j / k for j in range(k))
        vals = np.real(np.asarray(f(np.array(pts))))
        return cls(pts, tuple(vals))

    def arcs(self) -> list[Arc]:
        ends = self.breakpoints[1:] + (1.0,)
        return [Arc.between(a, b) for a, b in zip(self.breakpoints, ends)]

    def __call__(self, t):
        t = wrap_array(np.asarray(t, dtype=float))
        idx = np.searchsorted(self.breakpoints, t, side="right") - 1
        out = np.asarray(self.values)[idx]
        return float(out) if out.ndim == 0 else out
