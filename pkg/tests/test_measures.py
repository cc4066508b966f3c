import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from solenoid_kms import measures as ms
from solenoid_kms.circle import Arc, SimpleFunction, TrigPoly, dyadic_partition


def W(r, t):
    """Reference density of m_r, written out directly."""
    return r / (1 - math.exp(-r)) * math.exp(-r * t)


def quad_arc(density, a, b):
    """Quadrature oracle for the mass of [a, b) mod 1."""
    if b <= 1:
        return quad(density, a, b, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
    return quad_arc(density, a, 1.0) + quad_arc(density, 0.0, b - 1.0)


def test_mr_closed_form_values():
    m = ms.make_mr(2 * math.log(2))
    assert ms.measure_arc(m, Arc.between(0, 0.5)) == pytest.approx(2 / 3, abs=1e-14)
    assert ms.measure_arc(m, Arc.between(0.5, 1)) == pytest.approx(1 / 3, abs=1e-14)
    assert m.total_mass() == pytest.approx(1.0, abs=1e-14)
    assert m.density(0.0) == pytest.approx(W(2 * math.log(2), 0.0))


@settings(max_examples=40, deadline=None)
@given(st.floats(0.01, 40), st.floats(0, 1, exclude_max=True), st.floats(0.01, 1))
def test_mr_arcs_match_quadrature(r, a, length):
    m = ms.make_mr(r)
    got = m.arc_masses([a], [length])[0]
    assert got == pytest.approx(quad_arc(lambda t: W(r, t), a, a + length), rel=1e-9, abs=1e-13)


def test_large_rate_stays_finite():
    m = ms.make_mr(2634.0)
    assert m.total_mass() == pytest.approx(1.0, abs=1e-12)
    assert m.arc_masses([0.5], [0.25])[0] >= 0.0
    assert np.isfinite(m.log_arc_masses([0.5], [0.25])[0])
    with pytest.raises(ValueError):
        ms.make_mr(-1.0)


@pytest.mark.parametrize("rate", [3.0, 0.5, -0.5, -3.0, -800.0, 800.0])
def test_moments_match_quadrature(rate):
    m = ms.exp_density(rate)
    ms_ = m.moments(3)
    for k in range(-3, 4):
        dens = lambda t: m.density(t)
        re = quad(lambda t: dens(t) * math.cos(2 * math.pi * k * t), 0, 1, limit=400, epsabs=1e-13)[0]
        im = quad(lambda t: dens(t) * math.sin(2 * math.pi * k * t), 0, 1, limit=400, epsabs=1e-13)[0]
        assert ms_[k + 3] == pytest.approx(re + 1j * im, abs=1e-9)


def test_integrate_trig_and_simple():
    m = ms.make_mr(1.0)
    f = TrigPoly.from_dict({0: 2.0, 1: 1.0, -1: 1.0})  # 2 + 2 cos(2 pi t)
    ref = quad(lambda t: (2 + 2 * math.cos(2 * math.pi * t)) * W(1.0, t), 0, 1)[0]
    assert ms.integrate(m, f) == pytest.approx(ref, abs=1e-12)
    g = SimpleFunction((0.0, 0.5), (1.0, -1.0))
    ref = quad(lambda t: W(1.0, t), 0, 0.5)[0] - quad(lambda t: W(1.0, t), 0.5, 1)[0]
    assert ms.integrate(m, g) == pytest.approx(ref, abs=1e-12)
    with pytest.raises(TypeError):
        ms.integrate(m, 3.0)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 30), st.floats(0, 1, exclude_max=True), st.floats(0, 1, exclude_max=True))
def test_rotation_shifts_density(r, s, t):
    # (m o R_s)(U) = m(U - s), whose density at t is W(t - s)
    m = ms.rotate_measure(ms.make_mr(r), s)
    u = (t - s) % 1.0
    if min(u, 1 - u) > 1e-9:
        assert m.density(t) == pytest.approx(W(r, u), rel=1e-10)
    assert m.total_mass() == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 20), st.floats(0, 1, exclude_max=True), st.integers(2, 4), st.floats(0, 1, exclude_max=True), st.floats(0.01, 1))
def test_pushforward_against_preimage_masses(r, s, N, a, length):
    # brute force: (m o p_N^{-1})(U) = sum of m over the N preimage arcs
    m = ms.rotate_measure(ms.make_mr(r), s)
    pushed = ms.pushforward_cover(m, N)
    pre = [((a + i) / N, length / N) for i in range(N)]
    brute = sum(m.arc_masses([p], [q])[0] for p, q in pre)
    assert pushed.arc_masses([a], [length])[0] == pytest.approx(brute, abs=1e-13)


def test_pushforward_of_mr_is_mr():
    for N in (2, 3):
        pushed = ms.pushforward_cover(ms.make_mr(N * 1.7), N)
        assert len(pushed) == 1
        assert np.allclose(pushed.moments(4), ms.make_mr(1.7).moments(4), atol=1e-13)


def test_subinvariance_positive_cases():
    for m, r in [(ms.make_mr(2.0), 2.0), (ms.rotate_measure(ms.make_mr(5.0), 0.37), 5.0), (ms.lebesgue(), 0.0)]:
        rep = ms.check_subinvariance(m, r)
        assert rep.satisfied and rep.witness is None
    assert ms.check_subinvariance(ms.lebesgue(), 0.0).worst_violation == 0.0
    # Lebesgue measure is subinvariant for every rate
    assert ms.check_subinvariance(ms.lebesgue(), 1.0).satisfied


def test_subinvariance_negative_cases():
    rep = ms.check_subinvariance(ms.exp_density(-3.0), 3.0)
    assert not rep.satisfied and rep.worst_violation > 0.5 and rep.witness is not None
    # m_r is not subinvariant at a smaller rate
    assert not ms.check_subinvariance(ms.make_mr(3.0), 2.0).satisfied
    steps = ms.measure_from_density_steps(SimpleFunction((0.0, 0.5), (1.0, 1.01)))
    assert not ms.check_subinvariance(steps, 0.0).satisfied


def test_subinvariance_at_huge_rate():
    rep = ms.check_subinvariance(ms.rotate_measure(ms.make_mr(2634.0), 0.41), 2634.0)
    assert rep.satisfied


def test_certify_from_scales():
    m = ms.make_mr(3.0)
    assert ms.certify_from_scales(m, 1 / 3, 1.0, 6)
    bad = ms.certify_from_scales(ms.exp_density(-3.0), 1 / 3, 1.0, 6)
    assert not bad and bad.failing_scale == 0
    with pytest.raises(ValueError):
        ms.certify_from_scales(m, 0.0, 1.0, 6)


def l1_oracle(m1, m2, panels=20000):
    """Midpoint-rule L1 distance on a fine uniform grid."""
    t = (np.arange(panels) + 0.5) / panels
    return float(np.abs(m1.density(t) - m2.density(t)).mean())


@pytest.mark.parametrize("n", [1, 3, 5])
def test_l1_distance_against_grid(n):
    m1, m2 = ms.make_mr(1.0), ms.make_mnr(n, 1.0)
    assert ms.l1_distance(m1, m2) == pytest.approx(l1_oracle(m1, m2), abs=2e-8)


def test_l1_is_a_metric_on_examples():
    a, b = ms.make_mr(1.0), ms.rotate_measure(ms.make_mr(1.0), 0.3)
    assert ms.l1_distance(a, a) == 0.0
    assert ms.l1_distance(a, b) == pytest.approx(ms.l1_distance(b, a), abs=1e-12)
    with pytest.raises(ValueError):
        ms.l1_distance(a, b, panels=10)


def test_mnr_is_cycle_vector():
    m = ms.make_mnr(3, 1.0)
    masses = m.arc_masses(np.arange(8) / 8, np.full(8, 1 / 8))
    from solenoid_kms.cycle_subinv import extreme_vectors

    assert np.allclose(masses, extreme_vectors(3, 1.0)[0], atol=1e-15)


def test_decompose_rotated_mr():
    m = ms.rotate_measure(ms.make_mr(2.0), 3 / 8)
    lam = ms.decompose_into_extremes(m, 2.0, 3)
    assert np.allclose(lam, np.eye(8)[3], atol=1e-12)


def test_decompose_convex_combination_and_reconstruct():
    r = 1.5
    parts = [ms.rotate_measure(ms.make_mr(r), j / 4) for j in range(4)]
    w = np.array([0.1, 0.2, 0.3, 0.4])
    m = ms.convex_combination(w, parts)
    lam = ms.decompose_into_extremes(m, r, 2)
    assert np.allclose(lam, w, atol=1e-12)
    assert ms.l1_distance(ms.reconstruct(lam, r, 2), m) < 1e-12
    assert np.allclose(ms.reconstruct_moments(lam, r, 2, 3), m.moments(3), atol=1e-13)


def test_extremality_probe():
    r = 2.0
    assert ms.extremality_probe(ms.make_mr(r), r, 4) is ms.ProbeVerdict.FORCED_EQUAL
    assert ms.extremality_probe(ms.rotate_measure(ms.make_mr(r), 0.5), r, 4) is ms.ProbeVerdict.EXCEEDS
    with pytest.raises(ms.SubinvarianceViolation):
        ms.extremality_probe(ms.exp_density(r + 1.0), r, 4)


def test_record_round_trip():
    m = ms.convex_combination([0.25, 0.75], [ms.make_mr(2634.0), ms.rotate_measure(ms.make_mr(2.0), 0.3)])
    back = ms.from_record(json.loads(json.dumps(ms.to_record(m))))
    assert np.array_equal(back.logc, m.logc) and np.array_equal(back.starts, m.starts)
    plain = {"pieces": [[0.0, 1.0, 1.0, 0.0]]}
    assert ms.from_record(plain).total_mass() == 1.0


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 20), st.floats(0, 1, exclude_max=True))
def test_rotated_mr_is_subinvariant_and_dyadic_masses_sum(r, s):
    m = ms.rotate_measure(ms.make_mr(r), s)
    assert ms.check_subinvariance(m, r, grid=(64, 16), arc_level=4).satisfied
    arcs = dyadic_partition(4)
    assert m.arc_masses([a.start for a in arcs], [a.length for a in arcs]).sum() == pytest.approx(1.0, abs=1e-12)
