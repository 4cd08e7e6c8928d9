"""Swiss tournament driver.

Players meet rating-adjacent opponents for a configured number of rounds;
each pairing plays a batch of tree matches, every tree match counts as one
Elo game, and Elo is applied in order-independent batches at round barriers.
The final leaderboard comes from a Bradley-Terry fit over all games.
"""

from __future__ import annotations

import hashlib
import logging
import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import PairingError
from .evolve import MatchConfig, MatchResult, run_match
from .gateway import (
    Agent,
    ChatClient,
    FetchClient,
    FixtureWeb,
    Labeler,
    choose_topic,
    fixture_labeler,
    make_synthetic_corpus,
)
from .infotree import InfoTree, build_tree
from .rating import GameRecord, bt_fit, elo_expected

logger = logging.getLogger(__name__)


@dataclass
class TournamentConfig:
    rounds: int = 4
    trees_per_pairing: int = 30
    match: MatchConfig = field(default_factory=MatchConfig)
    elo_initial: float = 1000.0
    elo_k: float = 32.0
    elo_scale: float = 400.0
    # weak prior so a perfect sweep in a short event still yields finite ratings
    bt_virtual_draws: float = 1.0


@dataclass
class PlayerState:
    name: str
    rating: float = 1000.0
    score: float = 0.0
    wins: int = 0
    losses: int = 0
    draws: int = 0
    byes: int = 0
    opponents: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class Pairing:
    a: str
    b: str
    repeat: bool = False


@dataclass
class RoundPlan:
    index: int
    pairings: list[Pairing]
    bye: str | None


@dataclass
class LeaderboardEntry:
    name: str
    elo: float
    bt_rating: float
    wins: int
    losses: int
    draws: int
    byes: int
    score: float


@dataclass
class TournamentResult:
    players: dict[str, PlayerState]
    games: list[GameRecord]
    matches: list[MatchResult]
    rounds: list[RoundPlan]
    bt_ratings: dict[str, float]
    leaderboard: list[LeaderboardEntry]
    seed: int
    config: TournamentConfig


@dataclass
class MatchEnv:
    """Everything a single tree match needs beyond the agents and examiner."""

    tree: InfoTree
    fetcher: FetchClient | None = None
    labeler: Labeler | None = None


EnvFactory = Callable[[int], MatchEnv]


def synthetic_env_factory(budget: int = 12, categories: int = 6, variants: int = 8,
                          details: int = 6) -> EnvFactory:
    """Envs backed by generated corpora; topic and pages derive from the seed."""

    def factory(match_seed: int) -> MatchEnv:
        rng = random.Random(f"{match_seed}:env")
        topic = choose_topic(rng)
        web = FixtureWeb(make_synthetic_corpus(topic, seed=match_seed,
                                               categories=categories,
                                               variants=variants, details=details))
        labeler = fixture_labeler(web)
        tree = build_tree(topic, web, web, budget=budget, labeler=labeler)
        return MatchEnv(tree=tree, fetcher=web, labeler=labeler)

    return factory


def fixture_env_factory(web: FixtureWeb, topic: str, budget: int = 12) -> EnvFactory:
    """Envs over one fixture corpus; each match builds its own tree so
    concurrent expansion cannot race."""

    labeler = fixture_labeler(web)

    def factory(match_seed: int) -> MatchEnv:
        tree = build_tree(topic, web, web, budget=budget, labeler=labeler)
        return MatchEnv(tree=tree, fetcher=web, labeler=labeler)

    return factory


def min_rounds(player_count: int) -> int:
    """Rounds needed for a Swiss event to separate ``player_count`` players."""
    if player_count < 2:
        raise PairingError("need at least two players")
    return max(1, math.ceil(math.log2(player_count)))


def _pair_with_budget(order: list[str], played: set[frozenset[str]],
                      budget: int) -> list[Pairing] | None:
    if not order:
        return []
    head, rest = order[0], order[1:]
    fresh = [c for c in rest if frozenset((head, c)) not in played]
    repeats = [c for c in rest if frozenset((head, c)) in played]
    for candidate in fresh + repeats:
        is_repeat = candidate in repeats
        if is_repeat and budget == 0:
            continue
        remaining = [c for c in rest if c != candidate]
        tail = _pair_with_budget(remaining, played, budget - (1 if is_repeat else 0))
        if tail is not None:
            return [Pairing(head, candidate, is_repeat)] + tail
    return None


def swiss_pair(standings: Sequence[PlayerState], round_index: int,
               rng: random.Random) -> tuple[list[Pairing], str | None]:
    """Pair one round; returns the pairings and the bye recipient, if any.

    Round 0 matches uniformly at random. Later rounds sort by rating and
    greedily pair adjacent players, backtracking to avoid rematches; if a
    rematch is unavoidable the minimal number is used and those pairings are
    flagged. An odd field gives a bye to the lowest-rated player among those
    with the fewest byes (chosen at random in round 0).
    """
    if len(standings) < 2:
        raise PairingError("need at least two players")
    players = list(standings)
    bye: str | None = None
    if len(players) % 2 == 1:
        fewest = min(p.byes for p in players)
        candidates = sorted((p for p in players if p.byes == fewest),
                            key=lambda p: p.name)
        if round_index == 0:
            bye = rng.choice([p.name for p in candidates])
        else:
            bye = min(candidates, key=lambda p: (p.rating, p.name)).name
        players = [p for p in players if p.name != bye]

    if round_index == 0:
        names = sorted(p.name for p in players)
        rng.shuffle(names)
        pairings = [Pairing(names[i], names[i + 1]) for i in range(0, len(names), 2)]
        return pairings, bye

    played = {frozenset((p.name, opponent))
              for p in players for opponent in p.opponents}
    order = [p.name for p in sorted(players, key=lambda p: (-p.rating, p.name))]
    for budget in range(len(order) // 2 + 1):
        pairings = _pair_with_budget(order, played, budget)
        if pairings is not None:
            if budget:
                logger.warning("round %d required %d rematch(es)", round_index, budget)
            return pairings, bye
    raise PairingError(f"no legal pairing for round {round_index}")


def pairing_to_game(pairing: Pairing, result: MatchResult) -> GameRecord:
    """One tree match becomes one game; the score is pairing.a's share."""
    score = {"A": 1.0, "B": 0.0, "DRAW": 0.5}[result.winner]
    return GameRecord(pairing.a, pairing.b, score)


def _match_seed(seed: int, round_index: int, pairing: Pairing, tree_index: int) -> int:
    key = f"{seed}:{round_index}:{pairing.a}|{pairing.b}:{tree_index}"
    return int.from_bytes(hashlib.sha256(key.encode("utf-8")).digest()[:8], "big")


def run_tournament(agents: Sequence[Agent], examiner: ChatClient,
                   env_factory: EnvFactory, config: TournamentConfig | None = None,
                   seed: int = 0, jobs: int = 1,
                   on_match: Callable[[int, Pairing, MatchResult], None] | None = None,
                   ) -> TournamentResult:
    """Run a full Swiss tournament.

    ``env_factory`` receives the derived match seed and must return the tree
    (plus optional fetcher and relation labeler) for that match; with ``jobs``
    above one it and the examiner are called from worker threads. Every match
    is seeded from (tournament seed, round, pairing, tree index) alone, so
    results are reproducible regardless of scheduling.
    """
    cfg = config or TournamentConfig()
    names = [agent.name for agent in agents]
    if len(set(names)) != len(names):
        raise PairingError("agent names must be unique")
    agent_map = {agent.name: agent for agent in agents}
    players = {name: PlayerState(name=name, rating=cfg.elo_initial) for name in names}
    pairing_rng = random.Random(f"{seed}:pairing")
    games: list[GameRecord] = []
    matches: list[MatchResult] = []
    rounds: list[RoundPlan] = []

    def play(pairing: Pairing, match_seed: int) -> MatchResult:
        env = env_factory(match_seed)
        return run_match(env.tree, agent_map[pairing.a], agent_map[pairing.b],
                         examiner, config=cfg.match, seed=match_seed,
                         fetcher=env.fetcher, labeler=env.labeler)

    for round_index in range(cfg.rounds):
        standings = sorted(players.values(), key=lambda p: (-p.rating, p.name))
        pairings, bye = swiss_pair(standings, round_index, pairing_rng)
        rounds.append(RoundPlan(index=round_index, pairings=pairings, bye=bye))
        if bye is not None:
            players[bye].byes += 1
            players[bye].score += 0.5
        for pairing in pairings:
            players[pairing.a].opponents.append(pairing.b)
            players[pairing.b].opponents.append(pairing.a)

        jobs_list = [(pairing, _match_seed(seed, round_index, pairing, t))
                     for pairing in pairings
                     for t in range(cfg.trees_per_pairing)]
        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(lambda job: play(*job), jobs_list))
        else:
            results = [play(*job) for job in jobs_list]

        # Elo within a round is evaluated against round-start ratings so the
        # ordering of matches cannot change the outcome.
        snapshot = {name: p.rating for name, p in players.items()}
        deltas = {name: 0.0 for name in players}
        for (pairing, _), result in zip(jobs_list, results):
            matches.append(result)
            game = pairing_to_game(pairing, result)
            games.append(game)
            if game.score == 1.0:
                players[pairing.a].wins += 1
                players[pairing.b].losses += 1
            elif game.score == 0.0:
                players[pairing.b].wins += 1
                players[pairing.a].losses += 1
            else:
                players[pairing.a].draws += 1
                players[pairing.b].draws += 1
            players[pairing.a].score += game.score
            players[pairing.b].score += 1.0 - game.score
            expected = elo_expected(snapshot[pairing.a], snapshot[pairing.b],
                                    cfg.elo_scale)
            deltas[pairing.a] += cfg.elo_k * (game.score - expected)
            deltas[pairing.b] -= cfg.elo_k * (game.score - expected)
            if on_match is not None:
                on_match(round_index, pairing, result)
        for name, delta in deltas.items():
            players[name].rating += delta
        logger.info("round %d complete: %d matches", round_index, len(results))

    bt_ratings = bt_fit(games, players=names,
                        scale=cfg.elo_scale, anchor=cfg.elo_initial,
                        virtual_draws=cfg.bt_virtual_draws)
    leaderboard = sorted(
        (LeaderboardEntry(name=p.name, elo=p.rating, bt_rating=bt_ratings[p.name],
                          wins=p.wins, losses=p.losses, draws=p.draws,
                          byes=p.byes, score=p.score)
         for p in players.values()),
        key=lambda e: (-e.bt_rating, e.name))
    return TournamentResult(players=players, games=games, matches=matches,
                            rounds=rounds, bt_ratings=bt_ratings,
                            leaderboard=leaderboard, seed=seed, config=cfg)
