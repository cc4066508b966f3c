"""Subinvariant vectors on the cycle graph with 2^n vertices.

The adjacency A acts by (A x)_{i} = x_{i-1} (indices mod 2^n), so a vector x
is subinvariant at rate r when x_{i-1} <= exp(r / 2^n) x_i for every i.  The
extreme subinvariant probability vectors are v_j = (I - qA)^{-1} eps_j with
q = exp(-r / 2^n), and (I - qA) is always applied as a two-point stencil.
"""

from __future__ import annotations

import math

import numpy as np

NEGATIVE_WEIGHT_CLAMP = 1e-10
NOT_SUBINVARIANT_TOL = 1e-8


class NotSubinvariant(ValueError):
    def __init__(self, index: int, value: float) -> None:
        super().__init__(f"vector is not subinvariant: resolvent entry {index} is {value:.3e}")
        self.index = index
        self.value = value


def _ratio(n: int, r: float) -> float:
    return math.exp(-r / (1 << n))


def shift(x: np.ndarray) -> np.ndarray:
    """Apply the cycle adjacency: (A x)_i = x_{i-1}."""
    return np.roll(x, 1)


def extreme_vectors(n: int, r: float) -> np.ndarray:
    """Rows are v^n_0, ..., v^n_{2^n - 1}; (v_j)_i = c q^{(i - j) mod 2^n}."""
    if r <= 0:
        raise ValueError(f"rate must be positive, got {r}")
    k = 1 << n
    q = _ratio(n, r)
    c = math.expm1(-r / k) / math.expm1(-r)
    i = np.arange(k)
    powers = np.mod(i[None, :] - i[:, None], k)
    return c * q ** powers


def resolvent_apply(x: np.ndarray, n: int, r: float) -> np.ndarray:
    """(I - q A) x, computed entrywise as x_i - q x_{i-1}."""
    x = np.asarray(x, dtype=float)
    if len(x) != 1 << n:
        raise ValueError(f"expected a vector of length {1 << n}, got {len(x)}")
    return x - _ratio(n, r) * shift(x)


def is_subinvariant(x: np.ndarray, n: int, r: float, tol: float = 1e-12) -> bool:
    x = np.asarray(x, dtype=float)
    return bool(np.all(shift(x) <= math.exp(r / (1 << n)) * x + tol) and np.all(x >= -tol))


def decompose_subinvariant(x: np.ndarray, n: int, r: float) -> np.ndarray:
    """Weights lambda with x = sum_j lambda_j v^n_j.

    lambda_j = eps_j / (1 - q) where eps = (I - qA) x.  Raises NotSubinvariant
    if some eps_j < -1e-8; microscopically negative weights are clamped.
    """
    x = np.asarray(x, dtype=float)
    eps = resolvent_apply(x, n, r)
    bad = int(np.argmin(eps))
    if eps[bad] < -NOT_SUBINVARIANT_TOL:
        raise NotSubinvariant(bad, float(eps[bad]))
    lam = eps / -math.expm1(-r / (1 << n))
    lam = np.where(lam < 0.0, 0.0, lam)
    total = lam.sum()
    return lam / total if total > 0 else lam


def recompose(lam: np.ndarray, n: int, r: float) -> np.ndarray:
    return np.asarray(lam) @ extreme_vectors(n, r)


def measure_to_vector(m, n: int) -> np.ndarray:
    """(m(U^n_0), ..., m(U^n_{2^n-1})) for a CircleMeasure m."""
    k = 1 << n
    starts = np.arange(k) / k
    return m.arc_masses(starts, np.full(k, 1.0 / k))


def _random_zero_sum(rng: np.random.Generator, k: int) -> np.ndarray:
    d = rng.normal(size=k)
    d -= d.mean()
    return d / np.max(np.abs(d))


def verify_extremality_bruteforce(
    n: int, r: float, trials: int, rng: np.random.Generator | None = None, tol: float = 1e-9
) -> bool:
    """Search for a nontrivial split t x + (1 - t) y = v^n_j among subinvariant vectors.

    Candidates are v_j moved along random zero-sum directions; a split is a
    counterexample only if both ends are subinvariant probability vectors
    that differ from v_j by more than tol.
    """
    if (1 << n) > 16:
        raise ValueError("brute-force extremality check is limited to 2^n <= 16")
    rng = rng if rng is not None else np.random.default_rng(0)
    V = extreme_vectors(n, r)
    k = 1 << n
    for j in range(k):
        v = V[j]
        for _ in range(trials):
            d = _random_zero_sum(rng, k)
            t = rng.uniform(0.05, 0.95)
            delta = 10.0 ** rng.uniform(-8, -1)
            x = v + (1 - t) * delta * d
            y = v - t * delta * d
            if np.max(np.abs(x - v)) <= tol:
                continue
            if is_subinvariant(x, n, r, tol=0.0) and is_subinvariant(y, n, r, tol=0.0):
                return False
    return True
