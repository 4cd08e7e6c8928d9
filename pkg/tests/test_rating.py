"""Tests for ratings: Elo updates, Bradley-Terry fits, correlations."""

import math
import random

import numpy as np
import pytest
import scipy.stats

from agentarena import (
    ConvergenceError,
    DegenerateDataError,
    DisconnectedGraphError,
    GameRecord,
    bt_fit,
    elo_expected,
    elo_update,
    pearson,
    spearman,
)
from agentarena.rating import average_ranks


# --- Elo ---------------------------------------------------------------------

def test_elo_expected_even_match():
    assert elo_expected(1000.0, 1000.0) == 0.5


def test_elo_expected_known_gap():
    # a 400 point lead means 10:1 odds
    assert elo_expected(1400.0, 1000.0) == pytest.approx(10.0 / 11.0)


def test_elo_update_equal_ratings_win():
    r_a, r_b = elo_update(1000.0, 1000.0, 1.0)
    assert r_a == 1016.0
    assert r_b == 984.0


def test_elo_update_draw_moves_nothing_for_equals():
    assert elo_update(1000.0, 1000.0, 0.5) == (1000.0, 1000.0)


def test_elo_update_is_zero_sum():
    r_a, r_b = elo_update(1180.0, 950.0, 0.0)
    assert r_a + r_b == pytest.approx(1180.0 + 950.0)


def test_elo_update_upset_moves_more():
    _, _ = elo_update(1200.0, 1000.0, 1.0)
    favored_gain = elo_update(1200.0, 1000.0, 1.0)[0] - 1200.0
    upset_gain = elo_update(1000.0, 1200.0, 1.0)[0] - 1000.0
    assert upset_gain > favored_gain


# --- Bradley-Terry ------------------------------------------------------------

def test_bt_fit_three_to_one_gap():
    games = [GameRecord("a", "b", 1.0)] * 3 + [GameRecord("a", "b", 0.0)]
    ratings = bt_fit(games)
    gap = ratings["a"] - ratings["b"]
    assert gap == pytest.approx(400.0 * math.log10(3.0), abs=0.1)


def test_bt_fit_anchors_to_mean():
    games = [GameRecord("a", "b", 1.0)] * 3 + [GameRecord("a", "b", 0.0)]
    ratings = bt_fit(games, anchor=1000.0)
    assert np.mean(list(ratings.values())) == pytest.approx(1000.0)


def test_bt_fit_draws_count_as_half():
    decisive = [GameRecord("a", "b", 1.0), GameRecord("a", "b", 0.0)]
    drawn = [GameRecord("a", "b", 0.5), GameRecord("a", "b", 0.5)]
    r1, r2 = bt_fit(decisive), bt_fit(drawn)
    assert r1["a"] - r1["b"] == pytest.approx(0.0, abs=1e-6)
    assert r2["a"] - r2["b"] == pytest.approx(0.0, abs=1e-6)


def test_bt_fit_orders_round_robin():
    rng = random.Random(4)
    truth = {"s": 0.9, "m": 0.5, "w": 0.2}
    names = list(truth)
    games = []
    for _ in range(300):
        a, b = rng.sample(names, 2)
        p = truth[a] / (truth[a] + truth[b])
        games.append(GameRecord(a, b, 1.0 if rng.random() < p else 0.0))
    ratings = bt_fit(games)
    assert ratings["s"] > ratings["m"] > ratings["w"]


def test_bt_fit_recovers_synthetic_gap():
    # many games against a known strength ratio pin the fitted gap tightly
    rng = random.Random(9)
    ratio = 3.0
    games = [GameRecord("a", "b", 1.0 if rng.random() < ratio / (1 + ratio)
                        else 0.0)
             for _ in range(10_000)]
    ratings = bt_fit(games)
    expected = 400.0 * math.log10(ratio)
    assert abs(ratings["a"] - ratings["b"] - expected) < 15.0


def test_bt_fit_rejects_empty():
    with pytest.raises(DegenerateDataError):
        bt_fit([])


def test_bt_fit_rejects_single_player():
    with pytest.raises(DegenerateDataError):
        bt_fit([GameRecord("a", "a", 1.0)])


def test_bt_fit_rejects_unknown_player():
    with pytest.raises(DegenerateDataError):
        bt_fit([GameRecord("a", "b", 1.0)], players=["a", "c"])


def test_bt_fit_rejects_disconnected_graph():
    games = [GameRecord("a", "b", 1.0), GameRecord("c", "d", 1.0)]
    with pytest.raises(DisconnectedGraphError):
        bt_fit(games)


def test_bt_fit_isolated_listed_player_is_disconnected():
    games = [GameRecord("a", "b", 1.0)]
    with pytest.raises(DisconnectedGraphError):
        bt_fit(games, players=["a", "b", "ghost"])


def test_bt_fit_convergence_budget():
    # tol zero can never be met, so the iteration cap must trip
    games = [GameRecord("a", "b", 1.0)] * 3 + [GameRecord("a", "b", 0.0)]
    with pytest.raises(ConvergenceError):
        bt_fit(games, max_iterations=5, tol=0.0)


def test_bt_fit_rejects_unbounded_sweep():
    with pytest.raises(DegenerateDataError):
        bt_fit([GameRecord("a", "b", 1.0), GameRecord("b", "c", 1.0)])


def test_bt_fit_draw_makes_sweep_identifiable():
    games = [GameRecord("a", "b", 1.0), GameRecord("a", "b", 0.5)]
    ratings = bt_fit(games)
    assert ratings["a"] > ratings["b"]


def test_bt_fit_virtual_draws_bound_sweeps():
    games = [GameRecord("a", "b", 1.0)] * 4
    ratings = bt_fit(games, virtual_draws=1.0)
    assert ratings["a"] > ratings["b"]
    assert abs(ratings["a"] - ratings["b"]) < 1000.0


def test_bt_fit_virtual_draws_wash_out():
    rng = random.Random(9)
    games = [GameRecord("a", "b", 1.0 if rng.random() < 0.75 else 0.0)
             for _ in range(10_000)]
    pure = bt_fit(games)
    soft = bt_fit(games, virtual_draws=1.0)
    gap_pure = pure["a"] - pure["b"]
    gap_soft = soft["a"] - soft["b"]
    assert abs(gap_pure - gap_soft) < 1.0


def test_bt_fit_rejects_negative_virtual_draws():
    games = [GameRecord("a", "b", 0.5)]
    with pytest.raises(DegenerateDataError):
        bt_fit(games, virtual_draws=-1.0)


# --- ranks and correlations ------------------------------------------------------

def test_average_ranks_simple():
    assert average_ranks([10.0, 30.0, 20.0]).tolist() == [1.0, 3.0, 2.0]


def test_average_ranks_ties_share_average():
    assert average_ranks([5.0, 1.0, 5.0, 2.0]).tolist() == [3.5, 1.0, 3.5, 2.0]


def test_pearson_perfect_line():
    r, p = pearson([1.0, 2.0, 3.0, 4.0], [2.0, 4.0, 6.0, 8.0])
    assert r == 1.0
    assert p == 0.0


def test_pearson_matches_scipy():
    rng = np.random.default_rng(12)
    x = rng.normal(size=40)
    y = 0.6 * x + rng.normal(size=40)
    r, p = pearson(x.tolist(), y.tolist())
    ref = scipy.stats.pearsonr(x, y)
    assert r == pytest.approx(ref.statistic, abs=1e-12)
    assert p == pytest.approx(ref.pvalue, rel=1e-9)


def test_pearson_rejects_tiny_samples():
    with pytest.raises(DegenerateDataError):
        pearson([1.0, 2.0], [3.0, 4.0])


def test_pearson_rejects_constant_input():
    with pytest.raises(DegenerateDataError):
        pearson([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])


def test_pearson_rejects_length_mismatch():
    with pytest.raises(DegenerateDataError):
        pearson([1.0, 2.0, 3.0], [1.0, 2.0])


def test_spearman_monotone_is_one():
    assert spearman([1.0, 5.0, 9.0], [2.0, 70.0, 90.0]) == pytest.approx(1.0)


def test_spearman_reversed_is_minus_one():
    assert spearman([1.0, 2.0, 3.0], [9.0, 5.0, 1.0]) == pytest.approx(-1.0)


def test_spearman_matches_scipy():
    rng = np.random.default_rng(3)
    x = rng.normal(size=50)
    y = rng.normal(size=50)
    ours = spearman(x.tolist(), y.tolist())
    ref = scipy.stats.spearmanr(x, y).statistic
    assert ours == pytest.approx(ref, abs=1e-12)


def test_spearman_matches_scipy_with_ties():
    x = [1.0, 2.0, 2.0, 3.0, 4.0, 4.0, 4.0, 5.0]
    y = [2.0, 1.0, 3.0, 3.0, 5.0, 4.0, 6.0, 6.0]
    ref = scipy.stats.spearmanr(x, y).statistic
    assert spearman(x, y) == pytest.approx(ref, abs=1e-12)
