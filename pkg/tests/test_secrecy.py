import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seccache import (
    CoverageProfile,
    PopularityProfile,
    ScenarioSpec,
    build_grid,
    check_s1_general,
    check_s1_worstcase,
    check_s2,
    estimate_gamma,
    max_cache_size_s2,
    min_cache_size_s1,
    scenario_bounds,
    solve_placement,
    zipf_popularity,
)
from seccache.secrecy import expected_s1_interception, s1_cache_bound_unclamped, s1_implicit_threshold

ONE = CoverageProfile([1.0])
P82 = PopularityProfile([0.8, 0.2])


def test_general_full_cache_is_secure():
    p, g = zipf_popularity(5, 1), CoverageProfile([0.3, 0.7])
    rep = check_s1_general(np.ones(5), 1000, p, g, 50)
    assert rep.secure
    np.testing.assert_array_equal(expected_s1_interception(np.ones(5), 1000, p, g, 50), 0)


def test_general_empty_cache():
    p = PopularityProfile([0.5, 0.3, 0.2])
    P = expected_s1_interception(np.zeros(3), 1000, p, ONE, 3)
    np.testing.assert_allclose(P, 3 * p.p * 1000)
    assert check_s1_general(np.zeros(3), 1000, p, ONE, 3).binding_files == [0]
    assert check_s1_general(np.zeros(3), 1000, p, ONE, 1).secure


def test_general_boundary_example():
    P = expected_s1_interception([1.0, 0.5], 1000, P82, ONE, 10)
    np.testing.assert_allclose(P, [0, 1000])
    rep = check_s1_general([1.0, 0.5], 1000, P82, ONE, 10)
    assert not rep.secure and rep.binding_files == [1]
    assert rep.per_file_margin[1] == 0


def test_worstcase_examples():
    rep = check_s1_worstcase([1.0, 0.5], P82, 10)
    np.testing.assert_allclose(rep.per_file_margin, [0.125, 0], atol=1e-15)
    assert not rep.secure
    assert check_s1_worstcase([1.0, 0.51], P82, 10).secure


def test_worstcase_vacuous_constraints():
    p = zipf_popularity(10, 0)
    rep = check_s1_worstcase(np.zeros(10), p, 9)
    assert rep.secure and np.all(np.isinf(rep.per_file_margin))
    # Q*p_j == 1: an empty cache hands the wiretapper exactly n packets
    assert not check_s1_worstcase(np.zeros(10), p, 10).secure
    assert not check_s1_general(np.zeros(10), 1000, p, ONE, 10).secure


def test_s2_examples():
    assert check_s2(np.zeros(4), 3).secure
    assert not check_s2([0.1, 0.5], 2).secure
    rep = check_s2(np.full(3, 0.2), 4)
    assert rep.secure
    np.testing.assert_allclose(rep.per_file_margin, 0.05)


def test_report_csv_rows():
    rows = list(check_s2([0.1, 0.5], 2).csv_rows())
    assert rows[1][0] == 2 and rows[1][2] == 1


def test_min_cache_uniform():
    p = zipf_popularity(10, 0)
    assert min_cache_size_s1(p, 20) == pytest.approx(5, abs=1e-12)
    assert s1_cache_bound_unclamped(p, 20) == pytest.approx(5, abs=1e-12)
    assert min_cache_size_s1(p, 10) == 0


def test_min_cache_zipf_summation():
    H = math.fsum(i**-0.7 for i in range(1, 201))
    expected = math.fsum(max(0.0, 1 - H * j**0.7 / 100) for j in range(1, 201))
    assert min_cache_size_s1(zipf_popularity(200, 0.7), 100) == pytest.approx(expected, rel=1e-12)


@given(st.integers(1, 300), st.floats(0, 2), st.integers(1, 2000))
def test_min_cache_dominates_unclamped(N, alpha, Q):
    p = zipf_popularity(N, alpha)
    assert min_cache_size_s1(p, Q) >= s1_cache_bound_unclamped(p, Q) - 1e-9


@given(st.integers(1, 300), st.floats(0, 2), st.integers(1, 1000), st.integers(0, 1000))
def test_min_cache_monotone_in_Q(N, alpha, Q, dQ):
    p = zipf_popularity(N, alpha)
    assert min_cache_size_s1(p, Q + dQ) >= min_cache_size_s1(p, Q)


@pytest.mark.parametrize("N", [100, 200])
def test_flatter_popularity_raises_threshold_when_unclamped(N):
    alphas = [0.4, 0.7, 1.0]
    # Q large enough that every file has an active constraint
    Q = int(2 / min(zipf_popularity(N, a).p[-1] for a in alphas))
    m = [min_cache_size_s1(zipf_popularity(N, a), Q) for a in alphas]
    assert m[0] >= m[1] >= m[2]


def test_max_cache_s2():
    assert max_cache_size_s2(200, 4) == 50
    assert max_cache_size_s2(200, 1) == 200
    S = estimate_gamma(build_grid(spacing=60, r=60), samples=10**5, seed=0).S
    assert max_cache_size_s2(200, S) == 50


@settings(max_examples=200)
@given(st.lists(st.floats(0.05, 1), min_size=1, max_size=8), st.data())
def test_general_and_worstcase_agree_for_single_coverage(w, data):
    w = np.array(w)
    p = PopularityProfile(w / w.sum())
    Q = data.draw(st.integers(1, 40))
    n = 1000
    m = np.array(data.draw(st.lists(st.integers(0, n), min_size=p.N, max_size=p.N)))
    q = m / n
    general = check_s1_general(q, n, p, ONE, Q)
    worst = check_s1_worstcase(q, p, Q)
    assert general.secure == worst.secure


@settings(max_examples=200)
@given(st.integers(1, 1000), st.floats(0.01, 1), st.integers(1, 200), st.lists(st.floats(0, 1), min_size=1, max_size=4))
def test_implicit_bound_equivalent_to_packet_count(m_j, p_j, Q, g):
    g = np.array(g) + 0.01
    gamma = CoverageProfile(g / g.sum())
    n = 1000
    p = PopularityProfile([p_j, 1 - p_j]) if p_j < 1 else PopularityProfile([1.0])
    P = expected_s1_interception(np.full(p.N, m_j / n), n, p, gamma, Q)[0]
    thr = s1_implicit_threshold(m_j, n, p_j, gamma, Q)
    if abs(P - n) > 1e-6 and abs(m_j - thr) > 1e-6:
        assert (P < n) == (m_j > thr)


def test_threshold_exactness_s1():
    p = zipf_popularity(50, 0.8)
    g = CoverageProfile([0.2, 0.5, 0.3])
    sc = ScenarioSpec.s1(100)
    b = scenario_bounds(sc, p, g.S)
    m_min = min_cache_size_s1(p, 100)
    tol = sc.epsilon_sec * p.N
    for M in np.linspace(0, 50, 201):
        feasible = solve_placement(p, g, M, b).feasible
        if M > m_min + tol:
            assert feasible
        if M <= m_min:
            assert not feasible


def test_threshold_exactness_s2():
    p = zipf_popularity(40, 0.8)
    g = CoverageProfile([0.2, 0.5, 0.3])
    b = scenario_bounds(ScenarioSpec.s2(), p, g.S)
    bound = max_cache_size_s2(40, 3)
    for M in np.linspace(0, 40, 161):
        res = solve_placement(p, g, M, b)
        fills = abs(res.active_budget - M) <= 1e-9
        if M < bound - 40 * 1e-9:
            assert fills
        if M >= bound:
            assert not fills


@settings(max_examples=100)
@given(st.integers(2, 60), st.floats(0, 1.5), st.integers(1, 500), st.floats(0, 1))
def test_optimizer_output_passes_checks(N, alpha, Q, frac):
    p = zipf_popularity(N, alpha)
    g = CoverageProfile([0.3, 0.3, 0.4])
    M = frac * N
    eps = 1e-9
    s1 = solve_placement(p, g, M, scenario_bounds(ScenarioSpec.s1(Q), p, 3))
    if s1.feasible:
        rep = check_s1_worstcase(s1.q, p, Q)
        assert rep.min_margin >= eps / 2
        assert check_s1_general(s1.q, 1000, p, g, Q).secure
    s2 = solve_placement(p, g, M, scenario_bounds(ScenarioSpec.s2(), p, 3))
    assert s2.feasible
    assert check_s2(s2.q, 3).min_margin >= eps / 2
