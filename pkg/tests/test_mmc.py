import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import classical_sis_fixed_point
from sleepsis.exceptions import DegenerateSchedulingError, ValidationError
from sleepsis.graph import build_from_edges, complete_graph, largest_real_eigenvalue, star_graph
from sleepsis.mmc import (AI, AS, NO_EPIDEMIC, UI, US, epidemic_threshold, escape_probability, initial_state,
                          mmc_step, run_mmc, solve_equilibrium, state_fractions, stationary_active_fraction)
from sleepsis.params import ModelParams

probs = st.floats(0.0, 1.0)


def random_state(n, rng):
    s = rng.random((n, 4))
    return s / s.sum(axis=1, keepdims=True)


@pytest.mark.parametrize("u, v, expected", [(0.3, 0.7, 0.7), (0.4, 0.4, 0.5), (0.0, 1.0, 1.0)])
def test_stationary_active_fraction(u, v, expected):
    assert stationary_active_fraction(ModelParams(0.1, 0.1, u, v)) == pytest.approx(expected)


def test_degenerate_schedule_rejected():
    with pytest.raises(DegenerateSchedulingError):
        ModelParams(0.1, 0.1, 0.0, 0.0)
    with pytest.raises(ValidationError, match="beta"):
        ModelParams(1.5, 0.1, 0.3, 0.7)


def test_escape_probability_examples():
    g = build_from_edges(4, [(0, 1), (0, 2)])
    q = escape_probability(g, np.array([0.0, 1.0, 1.0, 0.0]), 0.5)
    assert q[3] == 1.0  # isolated
    assert q[1] == pytest.approx(1.0)  # neighbour 0 has P_AI = 0
    assert q[0] == pytest.approx(0.25)
    g1 = build_from_edges(2, [(0, 1)])
    assert escape_probability(g1, np.array([0.0, 1.0]), 0.5)[0] == pytest.approx(0.5)


def test_mmc_step_isolated_nodes():
    g = build_from_edges(2, [])
    params = ModelParams(0.9, 0.3, 0.3, 0.7)
    state = np.array([[0, 1, 0, 0], [0, 0, 0, 1]], dtype=float)
    out = mmc_step(g, state, params)
    np.testing.assert_allclose(out[0], [0.3, 0.7, 0, 0], atol=1e-15)
    # gamma*u, gamma*(1-u), (1-gamma)*u, (1-gamma)*(1-u)
    np.testing.assert_allclose(out[1], [0.09, 0.21, 0.21, 0.49], atol=1e-15)


def test_mmc_step_disease_free_invariance(price200):
    rng = np.random.default_rng(0)
    s = rng.random((200, 2))
    state = np.zeros((200, 4))
    state[:, [US, AS]] = s / s.sum(axis=1, keepdims=True)
    out = mmc_step(price200, state, ModelParams(0.8, 0.2, 0.3, 0.7))
    assert np.all(out[:, [UI, AI]] == 0)


@settings(max_examples=60, deadline=None)
@given(probs, probs, probs, probs.filter(lambda x: x > 0), st.integers(0, 2**32 - 1))
def test_conservation_and_active_mass(beta, gamma, u, v, seed):
    g = star_graph(5)
    params = ModelParams(beta, gamma, u, v)
    state = random_state(g.n, np.random.default_rng(seed))
    out = mmc_step(g, state, params)
    np.testing.assert_allclose(out.sum(axis=1), 1.0, atol=1e-12)
    assert np.all(out >= -1e-15) and np.all(out <= 1 + 1e-15)
    asleep = state[:, US] + state[:, UI]
    active = state[:, AS] + state[:, AI]
    np.testing.assert_allclose(out[:, AS] + out[:, AI], asleep * v + active * (1 - u), atol=1e-12)


def test_state_fractions_examples():
    assert state_fractions(np.tile([1.0, 0, 0, 0], (5, 1))) == pytest.approx((1, 0, 0, 0))
    half = np.array([[0, 1, 0, 0], [0, 0, 0, 1]], dtype=float)
    assert state_fractions(half) == pytest.approx((0, 0.5, 0, 0.5))
    mixed = np.array([[0.25] * 4, [0.5, 0.5, 0, 0]])
    assert state_fractions(mixed) == pytest.approx((0.375, 0.375, 0.125, 0.125))


def test_run_mmc_without_infection_pressure(price200):
    params = ModelParams(0.0, 1.0, 0.3, 0.7)
    init = random_state(200, np.random.default_rng(1))
    series = run_mmc(price200, params, init, settle_tol=1e-12)
    assert series.settled
    assert series.final == pytest.approx((0.3, 0.7, 0, 0), abs=1e-10)


def test_run_mmc_fixed_length_when_tol_zero(price200):
    params = ModelParams(0.5, 0.3, 0.3, 0.7)
    series = run_mmc(price200, params, initial_state(200, params), max_steps=5, settle_tol=0.0)
    assert series.t.tolist() == [0, 1, 2, 3, 4, 5]
    assert not series.settled


def test_run_mmc_rise_and_plateau(price1000):
    params = ModelParams(0.5, 0.3, 0.3, 0.7)
    series = run_mmc(price1000, params, initial_state(1000, params, 0.01), max_steps=300, settle_tol=0.0)
    v = series.values
    assert v[50, AI] > 10 * v[0, AI] and v[50, UI] > 10 * v[0, UI]
    assert v[50, AS] < v[0, AS]
    assert np.max(np.abs(v[-1] - v[-50])) < 1e-6
    # the sleep marginal is untouched by spreading when it starts stationary
    np.testing.assert_allclose(v[:, AS] + v[:, AI], 0.7, atol=1e-12)


def test_beta_zero_infected_mass_decays(small_graphs):
    params = ModelParams(0.0, 0.4, 0.3, 0.7)
    for g in small_graphs.values():
        state = random_state(g.n, np.random.default_rng(g.n))
        prev = (state[:, UI] + state[:, AI]).sum()
        for _ in range(50):
            state = mmc_step(g, state, params)
            mass = (state[:, UI] + state[:, AI]).sum()
            assert mass <= prev + 1e-12
            prev = mass


def test_equilibrium_below_threshold(price1000):
    state = solve_equilibrium(price1000, ModelParams(0.01, 0.5, 0.3, 0.7))
    assert np.max(state[:, AI]) < 1e-8
    np.testing.assert_allclose(state[:, US], 0.3, atol=1e-8)
    np.testing.assert_allclose(state[:, AS], 0.7, atol=1e-8)


def test_equilibrium_matches_classical_sis_on_k3():
    g = complete_graph(3)
    state = solve_equilibrium(g, ModelParams(0.5, 0.5, 0.0, 1.0), tol=1e-14)
    oracle = classical_sis_fixed_point([[1, 2], [0, 2], [0, 1]], 0.5, 0.5)
    # closed form: p^2 - 5p + 2 = 0
    expected = (5 - math.sqrt(17)) / 2
    assert oracle == pytest.approx([expected] * 3, abs=1e-12)
    np.testing.assert_allclose(state[:, AI], expected, atol=1e-12)
    np.testing.assert_allclose(state[:, [US, UI]], 0.0, atol=1e-15)


def test_equilibrium_identities_and_fixed_point(small_graphs):
    tol = 1e-11
    for g in small_graphs.values():
        lam = largest_real_eigenvalue(g).lambda_max
        params = ModelParams(min(1.0, 3 * epidemic_threshold(lam, 0.3, 0.3, 0.7)), 0.3, 0.3, 0.7)
        state = solve_equilibrium(g, params, tol=tol)
        assert state[:, AI].min() > 0
        np.testing.assert_allclose(state[:, US] + state[:, UI], 0.3, atol=1e-12)
        np.testing.assert_allclose(state[:, AS] + state[:, AI], 0.7, atol=1e-12)
        assert np.max(np.abs(mmc_step(g, state, params) - state)) < 10 * tol


def test_equilibrium_rejects_v_zero():
    with pytest.raises(DegenerateSchedulingError):
        solve_equilibrium(complete_graph(3), ModelParams(0.5, 0.5, 1.0, 0.0))


def test_threshold_examples():
    assert epidemic_threshold(2.0, 0.5, 0.0, 1.0) == pytest.approx(0.25)
    assert epidemic_threshold(2.0, 0.5, 0.4, 0.4) == pytest.approx(0.5)
    assert epidemic_threshold(0.0, 0.5, 0.3, 0.7) == NO_EPIDEMIC
    with pytest.raises(DegenerateSchedulingError):
        epidemic_threshold(2.0, 0.5, 0.3, 0.0)


def test_threshold_monotonicity():
    gammas = np.linspace(0.05, 1, 20)
    ratios = np.linspace(0.1, 3, 20)
    lams = np.linspace(0.5, 20, 20)
    assert np.all(np.diff([epidemic_threshold(4.0, g, 0.3, 0.7) for g in gammas]) > 0)
    assert np.all(np.diff([epidemic_threshold(4.0, 0.5, r, 1.0) for r in ratios]) > 0)
    assert np.all(np.diff([epidemic_threshold(l, 0.5, 0.3, 0.7) for l in lams]) < 0)


def test_threshold_separates_regimes(price200):
    lam = largest_real_eigenvalue(price200).lambda_max
    bc = epidemic_threshold(lam, 0.4, 0.3, 0.7)
    below = solve_equilibrium(price200, ModelParams(0.9 * bc, 0.4, 0.3, 0.7), tol=1e-12)
    above = solve_equilibrium(price200, ModelParams(1.2 * bc, 0.4, 0.3, 0.7))
    assert below[:, AI].max() < 1e-6
    assert above[:, AI].mean() > 1e-3


@pytest.mark.parametrize("name", ["star1+5", "ring10", "price200"])
def test_equilibrium_aligns_with_perron_vector(small_graphs, name):
    g = small_graphs[name]
    res = largest_real_eigenvalue(g)
    bc = epidemic_threshold(res.lambda_max, 0.5, 0.3, 0.7)
    state = solve_equilibrium(g, ModelParams(1.05 * bc, 0.5, 0.3, 0.7), tol=1e-13, max_iter=1_000_000)
    p = state[:, AI]
    cosine = p @ res.eigenvector / np.linalg.norm(p)
    assert cosine > 0.9
