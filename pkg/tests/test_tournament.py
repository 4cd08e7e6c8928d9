"""Tests for Swiss pairing and the tournament driver."""

import random

import pytest

from agentarena import (
    MatchConfig,
    MatchResult,
    PairingError,
    Pairing,
    PlayerState,
    Termination,
    TournamentConfig,
    min_rounds,
    pairing_to_game,
    run_tournament,
    swiss_pair,
    synthetic_env_factory,
)


def player(name, rating=1000.0, opponents=(), byes=0):
    return PlayerState(name=name, rating=rating, opponents=list(opponents),
                       byes=byes)


def match_result(winner):
    return MatchResult(topic="t", agent_a="x", agent_b="y", rounds=[],
                       score_a=1.0, score_b=0.0, winner=winner,
                       termination=Termination.SCORE_GAP, seed=0,
                       config=MatchConfig())


# --- round counts ------------------------------------------------------------

def test_min_rounds_values():
    assert min_rounds(2) == 1
    assert min_rounds(6) == 3
    assert min_rounds(8) == 3
    assert min_rounds(9) == 4


def test_min_rounds_rejects_tiny_fields():
    with pytest.raises(PairingError):
        min_rounds(1)


# --- round zero --------------------------------------------------------------------

def test_round_zero_is_reproducible():
    standings = [player(f"p{i}") for i in range(6)]
    first, _ = swiss_pair(standings, 0, random.Random(9))
    second, _ = swiss_pair(standings, 0, random.Random(9))
    assert first == second


def test_round_zero_covers_everyone_once():
    standings = [player(f"p{i}") for i in range(6)]
    pairings, bye = swiss_pair(standings, 0, random.Random(4))
    assert bye is None
    assert len(pairings) == 3
    seen = [name for p in pairings for name in (p.a, p.b)]
    assert sorted(seen) == sorted(p.name for p in standings)


def test_round_zero_shuffles_by_seed():
    standings = [player(f"p{i}") for i in range(8)]
    plans = {tuple((p.a, p.b) for p in swiss_pair(standings, 0,
                                                  random.Random(s))[0])
             for s in range(10)}
    assert len(plans) > 1


def test_round_zero_odd_field_gets_bye():
    standings = [player(f"p{i}") for i in range(5)]
    pairings, bye = swiss_pair(standings, 0, random.Random(1))
    assert bye is not None
    assert len(pairings) == 2
    assert all(bye not in (p.a, p.b) for p in pairings)


# --- later rounds ------------------------------------------------------------------

def test_later_rounds_pair_adjacent_ratings():
    standings = [player("a", 1200.0), player("b", 1100.0),
                 player("c", 1000.0), player("d", 900.0)]
    pairings, bye = swiss_pair(standings, 1, random.Random(0))
    assert bye is None
    assert pairings == [Pairing("a", "b"), Pairing("c", "d")]


def test_later_rounds_break_rating_ties_by_name():
    standings = [player("d", 1000.0), player("c", 1000.0),
                 player("b", 1000.0), player("a", 1000.0)]
    pairings, _ = swiss_pair(standings, 1, random.Random(0))
    assert pairings == [Pairing("a", "b"), Pairing("c", "d")]


def test_later_rounds_avoid_rematches():
    standings = [player("a", 1200.0, opponents=["b"]),
                 player("b", 1100.0, opponents=["a"]),
                 player("c", 1000.0), player("d", 900.0)]
    pairings, _ = swiss_pair(standings, 1, random.Random(0))
    assert pairings == [Pairing("a", "c"), Pairing("b", "d")]
    assert not any(p.repeat for p in pairings)


def test_later_rounds_flag_forced_rematch():
    standings = [player("a", 1100.0, opponents=["b"]),
                 player("b", 1000.0, opponents=["a"])]
    pairings, _ = swiss_pair(standings, 1, random.Random(0))
    assert pairings == [Pairing("a", "b", repeat=True)]


def test_later_rounds_minimize_rematches():
    # a-b and c-d already met; the only repeat-free plan crosses the groups
    standings = [player("a", 1300.0, opponents=["b"]),
                 player("b", 1200.0, opponents=["a"]),
                 player("c", 1100.0, opponents=["d"]),
                 player("d", 1000.0, opponents=["c"])]
    pairings, _ = swiss_pair(standings, 1, random.Random(0))
    assert not any(p.repeat for p in pairings)
    assert {frozenset((p.a, p.b)) for p in pairings} == \
        {frozenset(("a", "c")), frozenset(("b", "d"))}


def test_bye_goes_to_lowest_rated_fresh_player():
    standings = [player("a", 1200.0), player("b", 1100.0),
                 player("c", 1000.0, byes=1), player("d", 900.0),
                 player("e", 800.0)]
    _, bye = swiss_pair(standings, 1, random.Random(0))
    # e has the lowest rating among players with zero byes
    assert bye == "e"


def test_bye_rotation_skips_prior_recipient():
    standings = [player("a", 900.0, byes=1), player("b", 1000.0),
                 player("c", 1100.0)]
    _, bye = swiss_pair(standings, 1, random.Random(0))
    assert bye == "b"


def test_swiss_pair_rejects_single_player():
    with pytest.raises(PairingError):
        swiss_pair([player("a")], 0, random.Random(0))


# --- games -------------------------------------------------------------------------

def test_pairing_to_game_scores():
    pairing = Pairing("left", "right")
    assert pairing_to_game(pairing, match_result("A")).score == 1.0
    assert pairing_to_game(pairing, match_result("B")).score == 0.0
    assert pairing_to_game(pairing, match_result("DRAW")).score == 0.5
    game = pairing_to_game(pairing, match_result("A"))
    assert (game.a, game.b) == ("left", "right")


# --- full tournaments -----------------------------------------------------------------

SMOKE_CONFIG = TournamentConfig(rounds=2, trees_per_pairing=2)


def test_run_tournament_shape(examiner, ladder_agents):
    agents = ladder_agents[:4]
    result = run_tournament(agents, examiner, synthetic_env_factory(),
                            config=SMOKE_CONFIG, seed=5)
    assert len(result.rounds) == 2
    assert all(len(plan.pairings) == 2 for plan in result.rounds)
    assert len(result.games) == 2 * 2 * 2
    assert len(result.matches) == len(result.games)
    assert sorted(result.bt_ratings) == sorted(a.name for a in agents)
    board = result.leaderboard
    assert [e.bt_rating for e in board] == \
        sorted((e.bt_rating for e in board), reverse=True)


def test_run_tournament_is_deterministic(examiner, ladder_agents):
    agents = ladder_agents[:4]
    first = run_tournament(agents, examiner, synthetic_env_factory(),
                           config=SMOKE_CONFIG, seed=5)
    second = run_tournament(agents, examiner, synthetic_env_factory(),
                            config=SMOKE_CONFIG, seed=5)
    assert first.games == second.games
    assert first.bt_ratings == second.bt_ratings
    assert [p.pairings for p in first.rounds] == \
        [p.pairings for p in second.rounds]


def test_run_tournament_jobs_do_not_change_results(examiner, ladder_agents):
    agents = ladder_agents[:4]
    serial = run_tournament(agents, examiner, synthetic_env_factory(),
                            config=SMOKE_CONFIG, seed=5)
    threaded = run_tournament(agents, examiner, synthetic_env_factory(),
                              config=SMOKE_CONFIG, seed=5, jobs=4)
    assert serial.games == threaded.games
    assert serial.bt_ratings == threaded.bt_ratings


def test_run_tournament_score_conservation(examiner, ladder_agents):
    agents = ladder_agents[:5]
    result = run_tournament(agents, examiner, synthetic_env_factory(),
                            config=SMOKE_CONFIG, seed=7)
    byes = sum(p.byes for p in result.players.values())
    total = sum(p.score for p in result.players.values())
    assert byes == 2
    assert total == pytest.approx(len(result.games) + 0.5 * byes)
    for p in result.players.values():
        assert p.wins + p.losses + p.draws == \
            sum(1 for g in result.games if p.name in (g.a, g.b))


def test_run_tournament_tracks_opponents(examiner, ladder_agents):
    agents = ladder_agents[:4]
    result = run_tournament(agents, examiner, synthetic_env_factory(),
                            config=SMOKE_CONFIG, seed=5)
    for plan in result.rounds:
        for pairing in plan.pairings:
            assert pairing.b in result.players[pairing.a].opponents
            assert pairing.a in result.players[pairing.b].opponents


def test_run_tournament_on_match_callback(examiner, ladder_agents):
    calls = []
    run_tournament(ladder_agents[:4], examiner, synthetic_env_factory(),
                   config=TournamentConfig(rounds=1, trees_per_pairing=2),
                   seed=5, on_match=lambda r, p, m: calls.append((r, p.a, p.b)))
    assert len(calls) == 4
    assert all(r == 0 for r, _, _ in calls)


def test_run_tournament_rejects_duplicate_names(examiner, ladder_agents):
    twins = [ladder_agents[0], ladder_agents[0]]
    with pytest.raises(PairingError):
        run_tournament(twins, examiner, synthetic_env_factory(),
                       config=SMOKE_CONFIG, seed=5)


def test_run_tournament_strongest_tops_leaderboard(examiner, ladder_agents):
    # wide skill gaps and a few trees are enough to sort the extremes
    agents = [ladder_agents[0], ladder_agents[2], ladder_agents[5]]
    result = run_tournament(agents, examiner, synthetic_env_factory(),
                            config=TournamentConfig(rounds=2,
                                                    trees_per_pairing=4),
                            seed=3)
    assert result.leaderboard[0].name == ladder_agents[0].name
    assert result.leaderboard[-1].name == ladder_agents[5].name
