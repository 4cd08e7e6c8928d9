"""Skill estimation and agreement statistics.

Elo gives cheap online updates during a tournament; a Bradley-Terry fit over
the full game log gives the final leaderboard. Spearman and Pearson measure
agreement between two rankings or score vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import special

from .errors import ConvergenceError, DegenerateDataError, DisconnectedGraphError

ELO_INITIAL = 1000.0
ELO_K = 32.0
ELO_SCALE = 400.0

BT_TOLERANCE = 1e-8
BT_MAX_ITERATIONS = 10000
# smallest strength admitted before taking logs; a player with zero wins
# would otherwise send the rating to -inf
BT_STRENGTH_FLOOR = 1e-12


@dataclass(frozen=True)
class GameRecord:
    """One pairwise game; ``score`` is the first player's share (1, 0.5, 0)."""

    a: str
    b: str
    score: float


def elo_expected(rating_a: float, rating_b: float, scale: float = ELO_SCALE) -> float:
    return 1.0 / (1.0 + 10.0 ** ((rating_b - rating_a) / scale))


def elo_update(rating_a: float, rating_b: float, score_a: float,
               k: float = ELO_K, scale: float = ELO_SCALE) -> tuple[float, float]:
    """Post-game ratings for both players; ``score_a`` is 1, 0.5, or 0."""
    expected = elo_expected(rating_a, rating_b, scale)
    delta = k * (score_a - expected)
    return rating_a + delta, rating_b - delta


def _reachable(players: Sequence[str], edges: dict[str, set[str]]) -> set[str]:
    seen = {players[0]}
    frontier = [players[0]]
    while frontier:
        current = frontier.pop()
        for neighbor in edges[current]:
            if neighbor not in seen:
                seen.add(neighbor)
                frontier.append(neighbor)
    return seen


def _check_connected(players: Sequence[str], games: Sequence[GameRecord]) -> None:
    adjacency: dict[str, set[str]] = {p: set() for p in players}
    for game in games:
        adjacency[game.a].add(game.b)
        adjacency[game.b].add(game.a)
    missing = [p for p in players if p not in _reachable(players, adjacency)]
    if missing:
        raise DisconnectedGraphError(
            f"comparison graph is disconnected; unreachable players: {sorted(missing)}")


def _check_identifiable(players: Sequence[str], games: Sequence[GameRecord]) -> None:
    """The MLE is finite only if the win digraph is strongly connected.

    A player (or group) that never wins has maximum-likelihood strength zero,
    so the iteration would drift forever instead of converging.
    """
    forward: dict[str, set[str]] = {p: set() for p in players}
    backward: dict[str, set[str]] = {p: set() for p in players}
    for game in games:
        if game.score > 0.0:
            forward[game.a].add(game.b)
            backward[game.b].add(game.a)
        if game.score < 1.0:
            forward[game.b].add(game.a)
            backward[game.a].add(game.b)
    stuck = set(players) - (_reachable(players, forward)
                            & _reachable(players, backward))
    if stuck:
        raise DegenerateDataError(
            f"ratings are unbounded: {sorted(stuck)} sit on one side of an "
            "all-wins split; add games or fit with virtual_draws > 0")


def bt_fit(games: Iterable[GameRecord], players: Sequence[str] | None = None,
           scale: float = ELO_SCALE, anchor: float = ELO_INITIAL,
           tol: float = BT_TOLERANCE, max_iterations: int = BT_MAX_ITERATIONS,
           virtual_draws: float = 0.0) -> dict[str, float]:
    """Bradley-Terry ratings on the Elo scale, anchored to mean ``anchor``.

    Draws count as half a win for each side. Strengths come from
    minorization-maximization iteration; the comparison graph must be
    connected or the model is unidentifiable. ``virtual_draws`` adds that many
    drawn games between every pair, a weak prior that keeps ratings finite
    when a player won or lost everything (unboundedly large samples swamp it).
    """
    game_list = list(games)
    if not game_list:
        raise DegenerateDataError("no games to fit")
    names = list(players) if players is not None else sorted(
        {g.a for g in game_list} | {g.b for g in game_list})
    if len(names) < 2:
        raise DegenerateDataError("need at least two players")
    index = {name: i for i, name in enumerate(names)}
    for game in game_list:
        if game.a not in index or game.b not in index:
            raise DegenerateDataError(f"game references unknown player: {game}")
    if virtual_draws < 0.0:
        raise DegenerateDataError("virtual_draws cannot be negative")
    if virtual_draws == 0.0:
        # the pseudo-games connect every pair, so only the pure fit needs
        # a connected comparison graph and a strongly connected win graph
        _check_connected(names, game_list)
        _check_identifiable(names, game_list)

    n = len(names)
    wins = np.zeros(n)
    counts = np.zeros((n, n))
    for game in game_list:
        i, j = index[game.a], index[game.b]
        wins[i] += game.score
        wins[j] += 1.0 - game.score
        counts[i, j] += 1.0
        counts[j, i] += 1.0
    if virtual_draws:
        wins += virtual_draws * (n - 1) / 2.0
        counts += virtual_draws * (1.0 - np.eye(n))

    strengths = np.ones(n)
    for _ in range(max_iterations):
        pair_sums = strengths[:, None] + strengths[None, :]
        denom = (counts / pair_sums).sum(axis=1)
        updated = np.where(denom > 0, wins / np.maximum(denom, 1e-300), strengths)
        updated = np.maximum(updated, BT_STRENGTH_FLOOR)
        updated /= np.exp(np.mean(np.log(updated)))
        if np.max(np.abs(updated - strengths)) < tol:
            strengths = updated
            break
        strengths = updated
    else:
        raise ConvergenceError(
            f"Bradley-Terry fit did not converge in {max_iterations} iterations")

    ratings = scale * np.log10(np.maximum(strengths, BT_STRENGTH_FLOOR))
    ratings += anchor - ratings.mean()
    return {name: float(ratings[index[name]]) for name in names}


def average_ranks(values: Sequence[float]) -> np.ndarray:
    """1-based ranks with ties assigned the average of their positions."""
    array = np.asarray(values, dtype=float)
    order = np.argsort(array, kind="stable")
    ranks = np.empty(len(array))
    i = 0
    while i < len(array):
        j = i
        while j + 1 < len(array) and array[order[j + 1]] == array[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _pearson_r(x: np.ndarray, y: np.ndarray) -> float:
    dx = x - x.mean()
    dy = y - y.mean()
    denom = math.sqrt(float((dx * dx).sum()) * float((dy * dy).sum()))
    if denom == 0.0:
        raise DegenerateDataError("zero variance input")
    return float((dx * dy).sum() / denom)


def pearson(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """Pearson r with a two-sided p-value from the t distribution."""
    ax = np.asarray(x, dtype=float)
    ay = np.asarray(y, dtype=float)
    if ax.shape != ay.shape:
        raise DegenerateDataError("length mismatch")
    n = len(ax)
    if n < 3:
        raise DegenerateDataError("need at least three pairs")
    r = _pearson_r(ax, ay)
    if abs(r) >= 1.0:
        return r, 0.0
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    p = 2.0 * float(special.stdtr(n - 2, -abs(t)))
    return r, p


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Rank correlation: Pearson r over average ranks."""
    ax = np.asarray(x, dtype=float)
    ay = np.asarray(y, dtype=float)
    if ax.shape != ay.shape:
        raise DegenerateDataError("length mismatch")
    if len(ax) < 2:
        raise DegenerateDataError("need at least two pairs")
    return _pearson_r(average_ranks(ax), average_ranks(ay))
