import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from solenoid_kms import cycle_subinv as cyc
from solenoid_kms import measures as ms

LN4 = 2 * math.log(2)


def adjacency(n):
    """Dense cycle adjacency with (A x)_i = x_{i-1}, built entry by entry."""
    k = 1 << n
    A = np.zeros((k, k))
    for i in range(k):
        A[i, (i - 1) % k] = 1.0
    return A


def test_two_vertex_vectors():
    V = cyc.extreme_vectors(1, LN4)
    assert np.allclose(V, [[2 / 3, 1 / 3], [1 / 3, 2 / 3]], atol=1e-15)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("r", [0.1, 1.0, LN4, 5.0])
def test_vectors_solve_dense_system(n, r):
    # oracle: dense solve of (I - qA) v = (1 - q) e_j
    k = 1 << n
    q = math.exp(-r / k)
    M = np.eye(k) - q * adjacency(n)
    V = cyc.extreme_vectors(n, r)
    ref = np.linalg.solve(M, (1 - q) * np.eye(k)).T
    assert np.allclose(V, ref, atol=1e-13)
    assert np.allclose(V.sum(axis=1), 1.0, atol=1e-14)
    assert all(cyc.is_subinvariant(v, n, r) for v in V)


def test_shift_matches_adjacency():
    x = np.arange(8.0)
    assert np.array_equal(cyc.shift(x), adjacency(3) @ x)


def test_not_subinvariant_index():
    with pytest.raises(cyc.NotSubinvariant) as exc:
        cyc.decompose_subinvariant(np.array([0.9, 0.1]), 1, LN4)
    assert exc.value.index == 1


def test_symmetric_vector():
    assert np.allclose(cyc.decompose_subinvariant(np.array([0.5, 0.5]), 1, LN4), [0.5, 0.5])


def test_wrong_length_and_rate():
    with pytest.raises(ValueError):
        cyc.resolvent_apply(np.ones(3), 1, 1.0)
    with pytest.raises(ValueError):
        cyc.extreme_vectors(2, 0.0)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.floats(0.05, 20), st.data())
def test_decomposition_round_trip(n, r, data):
    k = 1 << n
    raw = data.draw(st.lists(st.floats(0, 1), min_size=k, max_size=k).filter(lambda v: sum(v) > 1e-3))
    lam = np.array(raw) / sum(raw)
    x = cyc.recompose(lam, n, r)
    assert cyc.is_subinvariant(x, n, r)
    assert np.allclose(cyc.decompose_subinvariant(x, n, r), lam, atol=1e-10)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_measure_to_vector_of_rotations(n):
    # rotating m_r by j/2^n shifts the index of the extreme vector by j
    r = 1.3
    V = cyc.extreme_vectors(n, r)
    for j in range(1 << n):
        m = ms.rotate_measure(ms.make_mr(r), j / (1 << n))
        assert np.allclose(cyc.measure_to_vector(m, n), V[j], atol=1e-14)


def test_bruteforce_extremality():
    rng = np.random.default_rng(3)
    assert cyc.verify_extremality_bruteforce(2, 1.0, 200, rng)
    with pytest.raises(ValueError):
        cyc.verify_extremality_bruteforce(5, 1.0, 1)
