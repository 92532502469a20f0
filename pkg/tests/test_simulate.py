import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seccache import (
    CoverageProfile,
    Placement,
    PopularityProfile,
    ScenarioSpec,
    SimConfig,
    backhaul_rate,
    breach_probability_s1,
    check_s1_general,
    check_s2,
    quantize,
    scenario_bounds,
    simulate_delivery,
    solve_placement,
    zipf_popularity,
)
from seccache.secrecy import expected_s1_interception
from seccache.simulate import RequestMode, expected_link_interception

N_PKT = 1000
ONE = CoverageProfile([1.0])
G3 = CoverageProfile([0.2, 0.5, 0.3])


def packets(m, M=None):
    m = np.asarray(m)
    return Placement(m / N_PKT, M=M if M is not None else m.sum() / N_PKT, n=N_PKT, m=m)


def test_empty_cache():
    p = zipf_popularity(20, 0.7)
    rep = simulate_delivery(packets(np.zeros(20, int)), p, G3, SimConfig(5000, seed=1))
    assert rep.empirical_rate == 1.0 and rep.stderr == 0.0
    assert np.all(rep.s2_intercepted == 0) and not rep.s2_breach


def test_full_cache():
    p = zipf_popularity(20, 0.7)
    rep = simulate_delivery(packets(np.full(20, N_PKT)), p, G3, SimConfig(5000, seed=1))
    assert rep.empirical_rate == 0.0
    assert np.all(rep.s1_intercepted == 0) and not rep.s1_breach


def test_rejects_unquantized():
    with pytest.raises(ValueError):
        simulate_delivery(Placement([0.5], M=0.5), PopularityProfile([1.0]), ONE, SimConfig())


def test_rejects_mismatched_n():
    with pytest.raises(ValueError):
        simulate_delivery(packets([5]), PopularityProfile([1.0]), ONE, SimConfig(n=10))


def test_reproducible():
    p = zipf_popularity(30, 0.7)
    pl = packets(np.linspace(0, 600, 30).astype(int))
    cfg = SimConfig(20_000, seed=9, request_mode=RequestMode.STOCHASTIC)
    a, b = simulate_delivery(pl, p, G3, cfg), simulate_delivery(pl, p, G3, cfg)
    assert a.empirical_rate == b.empirical_rate
    assert a.s1_intercepted.tolist() == b.s1_intercepted.tolist()


def test_agrees_with_analytic_rate():
    p = zipf_popularity(200, 0.7)
    g = CoverageProfile([0.05, 0.2, 0.45, 0.3])
    res = solve_placement(p, g, 20, scenario_bounds(ScenarioSpec.no_secrecy(), p, 4))
    pl = quantize(res.placement, N_PKT, ScenarioSpec.no_secrecy())
    rep = simulate_delivery(pl, p, g, SimConfig(10**5, seed=4))
    assert abs(rep.empirical_rate - backhaul_rate(pl.q_packets, p, g)) <= 3 * rep.stderr


def test_expected_interception_close_to_rounded_per_coverage_counts():
    p = zipf_popularity(50, 0.9)
    m = np.arange(50) * 7
    Q = 100
    got = expected_link_interception(m, N_PKT, p, G3, Q)
    per_req = np.maximum(0, N_PKT - np.outer(m, G3.d))
    rounded = (np.round(Q * np.outer(p.p, G3.gamma)) * per_req).sum(axis=1)
    assert np.all(np.abs(got - rounded) <= N_PKT * G3.S)
    np.testing.assert_allclose(got, np.floor(expected_s1_interception(m / N_PKT, N_PKT, p, G3, Q)), atol=1)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 30), st.integers(1, 5), st.data())
def test_s2_check_implies_no_breach(N, S, data):
    m = np.array(data.draw(st.lists(st.integers(0, N_PKT), min_size=N, max_size=N)))
    g = CoverageProfile(np.full(S, 1 / S))
    p = zipf_popularity(N, 0.5)
    rep = simulate_delivery(packets(m), p, g, SimConfig(100, seed=data.draw(st.integers(0, 99))))
    if check_s2(m / N_PKT, S).secure:
        assert not rep.s2_breach
    assert rep.s2_breach == bool(np.any(m * S >= N_PKT))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 30), st.integers(1, 300), st.data())
def test_s1_check_implies_no_expected_breach(N, Q, data):
    m = np.array(data.draw(st.lists(st.integers(0, N_PKT), min_size=N, max_size=N)))
    p = zipf_popularity(N, 0.8)
    rep = simulate_delivery(packets(m), p, G3, SimConfig(100, seed=0, Q=Q))
    assert check_s1_general(m / N_PKT, N_PKT, p, G3, Q).secure == (not rep.s1_breach)


def test_breach_probability_large_margin():
    # every request leaks 9 packets; 50 expected requests per file -> 450 < n/2
    p = PopularityProfile([0.5, 0.5])
    pl = packets([991, 991])
    assert np.all(expected_s1_interception(pl.q_packets, N_PKT, p, ONE, 100) <= 0.5 * N_PKT)
    cfg = SimConfig(10, seed=3, request_mode="Stochastic", Q=100)
    assert breach_probability_s1(pl, p, ONE, cfg, trials=1000) <= 0.01


def test_breach_probability_empty_cache():
    p = PopularityProfile([0.5, 0.5])
    cfg = SimConfig(10, seed=3, request_mode="Stochastic", Q=10)
    assert breach_probability_s1(packets([0, 0]), p, ONE, cfg, trials=1000) >= 0.99


def test_breach_probability_full_cache():
    p = zipf_popularity(5, 1)
    cfg = SimConfig(10, seed=3, request_mode="Stochastic", Q=500)
    assert breach_probability_s1(packets(np.full(5, N_PKT)), p, G3, cfg, trials=200) == 0.0


def test_breach_probability_needs_stochastic_mode():
    with pytest.raises(ValueError):
        breach_probability_s1(packets([0]), PopularityProfile([1.0]), ONE, SimConfig(), trials=5)
