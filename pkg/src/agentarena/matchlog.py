"""Match log persistence, replay auditing, and diagnostics.

Logs are written in a canonical JSON form (sorted keys, fixed-precision
floats) so identical matches produce byte-identical files. The replay
auditor recomputes everything derivable from the recorded verdicts (score
folds, evolution actions, width and depth progressions, stop decisions) and
reports each divergence instead of trusting the recorded values.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .adjudicate import AgentResponse, FailureType, Outcome, TieQuality, Verdict, count_citations
from .errors import LogError, SchemaVersionError
from .evolve import (
    WIDTH_FLOOR,
    EvolutionAction,
    MatchConfig,
    MatchResult,
    RoundRecord,
    Termination,
)
from .taskgen import Task, TaskGenConfig, word_limit
from .tournament import TournamentResult

SCHEMA_VERSION = "1"

_PATH_EVENTS = ("descended", "backtracked", "reseeded", "none")
_SCORE_DELTAS = {
    "A_MUCH_BETTER": (2.0, 0.0),
    "A_BETTER": (1.0, 0.0),
    "TIE": (0.0, 0.0),
    "B_BETTER": (0.0, 1.0),
    "B_MUCH_BETTER": (0.0, 2.0),
}
_INT = re.compile(r"\d+")


# --- canonical JSON --------------------------------------------------------------

def _emit(value, out: list[str]) -> None:
    if value is None:
        out.append("null")
    elif value is True:
        out.append("true")
    elif value is False:
        out.append("false")
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        if not math.isfinite(value):
            raise LogError(f"non-finite float in log payload: {value!r}")
        out.append(f"{value:.4f}")
    elif isinstance(value, str):
        out.append(json.dumps(value))
    elif isinstance(value, (list, tuple)):
        out.append("[")
        for i, item in enumerate(value):
            if i:
                out.append(",")
            _emit(item, out)
        out.append("]")
    elif isinstance(value, dict):
        out.append("{")
        for i, key in enumerate(sorted(value)):
            if not isinstance(key, str):
                raise LogError(f"non-string key in log payload: {key!r}")
            if i:
                out.append(",")
            out.append(json.dumps(key))
            out.append(":")
            _emit(value[key], out)
        out.append("}")
    else:
        raise LogError(f"unserializable value in log payload: {type(value).__name__}")


def canonical_dumps(payload) -> str:
    """Deterministic JSON: sorted keys, floats at four decimals, no spaces."""
    out: list[str] = []
    _emit(payload, out)
    return "".join(out)


# --- config serialization --------------------------------------------------------

def config_to_dict(config: MatchConfig) -> dict:
    return {
        "threshold": config.threshold,
        "max_rounds": config.max_rounds,
        "width_init": config.width_init,
        "width_cap": config.width_cap,
        "fan_out": config.fan_out,
        "swap_presentation": config.swap_presentation,
        "taskgen": {
            "word_base": config.taskgen.word_base,
            "word_per_width": config.taskgen.word_per_width,
            "word_per_depth": config.taskgen.word_per_depth,
            "retries": config.taskgen.retries,
            "max_node_chars": config.taskgen.max_node_chars,
            "temperature": config.taskgen.temperature,
        },
    }


def config_from_dict(data: dict) -> MatchConfig:
    taskgen = data.get("taskgen", {})
    defaults = TaskGenConfig()
    return MatchConfig(
        threshold=float(data.get("threshold", 2.0)),
        max_rounds=int(data.get("max_rounds", 5)),
        width_init=int(data.get("width_init", 2)),
        width_cap=int(data.get("width_cap", 8)),
        fan_out=int(data.get("fan_out", 3)),
        swap_presentation=bool(data.get("swap_presentation", False)),
        taskgen=TaskGenConfig(
            word_base=int(taskgen.get("word_base", defaults.word_base)),
            word_per_width=int(taskgen.get("word_per_width", defaults.word_per_width)),
            word_per_depth=int(taskgen.get("word_per_depth", defaults.word_per_depth)),
            retries=int(taskgen.get("retries", defaults.retries)),
            max_node_chars=int(taskgen.get("max_node_chars", defaults.max_node_chars)),
            temperature=float(taskgen.get("temperature", defaults.temperature)),
        ),
    )


# --- match serialization ---------------------------------------------------------

def _round_to_dict(record: RoundRecord) -> dict:
    return {
        "index": record.index,
        "depth": record.depth,
        "width": record.width,
        "task": record.task.to_dict(),
        "response_a": record.response_a.to_dict(),
        "response_b": record.response_b.to_dict(),
        "verdict": {
            "outcome": record.verdict.outcome.value,
            "tie_quality": record.verdict.tie_quality.value,
            "loser_failure_type": record.verdict.loser_failure_type.value,
            "reasoning": record.verdict.reasoning,
        },
        "action": record.action.value if record.action is not None else None,
        "path_event": record.path_event,
        "score_a": record.score_a,
        "score_b": record.score_b,
    }


def _round_from_dict(data: dict) -> RoundRecord:
    verdict = data["verdict"]
    action = data.get("action")
    return RoundRecord(
        index=int(data["index"]),
        depth=int(data["depth"]),
        width=int(data["width"]),
        task=Task.from_dict(data["task"], depth=int(data["depth"]),
                            width=int(data["width"])),
        response_a=AgentResponse.from_dict(data["response_a"]),
        response_b=AgentResponse.from_dict(data["response_b"]),
        verdict=Verdict(outcome=Outcome(verdict["outcome"]),
                        tie_quality=TieQuality(verdict["tie_quality"]),
                        loser_failure_type=FailureType(verdict["loser_failure_type"]),
                        reasoning=verdict.get("reasoning", "")),
        action=EvolutionAction(action) if action is not None else None,
        path_event=data.get("path_event", "none"),
        score_a=float(data["score_a"]),
        score_b=float(data["score_b"]),
    )


def match_to_dict(result: MatchResult) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "match",
        "topic": result.topic,
        "agent_a": result.agent_a,
        "agent_b": result.agent_b,
        "seed": result.seed,
        "config": config_to_dict(result.config),
        "rounds": [_round_to_dict(r) for r in result.rounds],
        "result": {
            "score_a": result.score_a,
            "score_b": result.score_b,
            "winner": result.winner,
            "termination": result.termination.value,
        },
    }


def match_from_dict(data: dict) -> MatchResult:
    if data.get("schema_version") != SCHEMA_VERSION:
        raise SchemaVersionError(
            f"unsupported schema version {data.get('schema_version')!r}")
    if data.get("kind") != "match":
        raise LogError(f"not a match log: kind={data.get('kind')!r}")
    final = data["result"]
    return MatchResult(
        topic=data["topic"],
        agent_a=data["agent_a"],
        agent_b=data["agent_b"],
        rounds=[_round_from_dict(r) for r in data["rounds"]],
        score_a=float(final["score_a"]),
        score_b=float(final["score_b"]),
        winner=final["winner"],
        termination=Termination(final["termination"]),
        seed=int(data["seed"]),
        config=config_from_dict(data.get("config", {})),
    )


def dumps_match(result: MatchResult) -> str:
    return canonical_dumps(match_to_dict(result)) + "\n"


def loads_match(text: str) -> MatchResult:
    return match_from_dict(json.loads(text))


def write_match(path: str | Path, result: MatchResult) -> None:
    Path(path).write_text(dumps_match(result), encoding="utf-8")


def read_match(path: str | Path) -> MatchResult:
    return loads_match(Path(path).read_text(encoding="utf-8"))


# --- replay audit ----------------------------------------------------------------

def _expected_action(outcome: str, tie_quality: str, failure: str) -> str:
    if outcome == "TIE":
        return "PRESSURE_TEST" if tie_quality == "HIGH" else "BACKTRACK"
    if failure == "DEEP":
        return "PROBE_DEPTH"
    if failure == "WIDE":
        return "PROBE_WIDTH"
    return "PRESSURE_TEST"


def replay(data: dict) -> list[str]:
    """Audit a raw match log dict; returns one message per divergence.

    Works on the raw JSON payload rather than decoded dataclasses so that a
    corrupted log yields divergence reports instead of decode errors. After
    reporting a mismatch the auditor resynchronizes to the recorded value so
    one corruption does not cascade into dozens of messages.
    """
    divergences: list[str] = []
    if data.get("schema_version") != SCHEMA_VERSION:
        return [f"schema: unsupported version {data.get('schema_version')!r}"]
    cfg = config_from_dict(data.get("config", {}))
    rounds = data.get("rounds", [])
    final = data.get("result", {})

    score_a = 0.0
    score_b = 0.0
    expected_width: int | None = cfg.width_init
    expected_depth: int | None = None
    stopped: str | None = None

    for i, rec in enumerate(rounds):
        label = f"round {i + 1}"
        try:
            index = int(rec["index"])
            depth = int(rec["depth"])
            width = int(rec["width"])
            verdict = rec["verdict"]
            outcome = str(verdict["outcome"])
            tie_quality = str(verdict["tie_quality"])
            failure = str(verdict["loser_failure_type"])
            action = rec["action"]
            event = str(rec["path_event"])
            rec_score_a = float(rec["score_a"])
            rec_score_b = float(rec["score_b"])
        except (KeyError, TypeError, ValueError) as exc:
            divergences.append(f"{label}: malformed record ({exc})")
            continue
        if stopped is not None:
            divergences.append(f"{label}: match continued past {stopped}")
            stopped = None
        if index != i + 1:
            divergences.append(f"{label}: recorded index {index}")

        if expected_width is not None and width != expected_width:
            divergences.append(
                f"{label}: width {width}, replay expected {expected_width}")
        if width < WIDTH_FLOOR or width > cfg.width_cap:
            divergences.append(f"{label}: width {width} out of bounds")
        if expected_depth is not None and depth != expected_depth:
            divergences.append(
                f"{label}: depth {depth}, replay expected {expected_depth}")
        if depth < 1:
            divergences.append(f"{label}: depth {depth} below the focal minimum")

        # verdict field invariants
        if outcome not in _SCORE_DELTAS:
            divergences.append(f"{label}: unknown outcome {outcome!r}")
            outcome = "TIE"
        is_tie = outcome == "TIE"
        if is_tie != (tie_quality != "N/A"):
            divergences.append(
                f"{label}: tie_quality {tie_quality!r} inconsistent with {outcome}")
        if is_tie and failure != "NONE":
            divergences.append(f"{label}: tie carries failure type {failure!r}")

        # task word limit is a pure function of state and config
        try:
            instruction = str(rec["task"]["word_limit_instruction"])
            stated = _INT.search(instruction)
            expected_limit = word_limit(depth, width, cfg.taskgen)
            if stated is None or int(stated.group()) != expected_limit:
                divergences.append(
                    f"{label}: word limit {instruction!r}, replay expected "
                    f"{expected_limit}")
        except (KeyError, TypeError):
            divergences.append(f"{label}: task missing word limit instruction")

        # citation counts are recomputable from the response text
        for side in ("a", "b"):
            try:
                response = rec[f"response_{side}"]
                recorded = int(response["citation_count"])
                actual = count_citations(str(response["text"]))
                if recorded != actual:
                    divergences.append(
                        f"{label}: response_{side} citation count {recorded}, "
                        f"replay counted {actual}")
            except (KeyError, TypeError, ValueError):
                divergences.append(f"{label}: response_{side} malformed")

        delta_a, delta_b = _SCORE_DELTAS.get(outcome, (0.0, 0.0))
        score_a += delta_a
        score_b += delta_b
        if abs(rec_score_a - score_a) > 1e-6 or abs(rec_score_b - score_b) > 1e-6:
            divergences.append(
                f"{label}: scores ({rec_score_a}, {rec_score_b}), replay computed "
                f"({score_a}, {score_b})")
            score_a, score_b = rec_score_a, rec_score_b

        gap = abs(score_a - score_b) >= cfg.threshold
        stop = "SCORE_GAP" if gap else ("MAX_ROUNDS" if i + 1 >= cfg.max_rounds else None)
        last = i == len(rounds) - 1

        if stop is not None:
            if action is not None:
                divergences.append(
                    f"{label}: action {action!r} recorded on a terminal round")
            if last and final.get("termination") != stop:
                divergences.append(
                    f"result: termination {final.get('termination')!r}, replay "
                    f"expected {stop}")
            stopped = stop
            expected_width = None
            expected_depth = None
            continue

        if action is None:
            divergences.append(f"{label}: missing action on a non-terminal round")
            expected_width = None
            expected_depth = None
            continue
        expected = _expected_action(outcome, tie_quality, failure)
        if action != expected:
            divergences.append(
                f"{label}: action {action!r}, replay expected {expected}")
            action = expected
        if event not in _PATH_EVENTS:
            divergences.append(f"{label}: unknown path event {event!r}")
            event = "none"

        if action == "PRESSURE_TEST":
            expected_width = min(cfg.width_cap, width + 1)
            if event == "descended":
                expected_depth = depth + 1
            elif event == "none":
                expected_depth = depth
            else:
                divergences.append(f"{label}: path event {event!r} under {action}")
                expected_depth = None
        elif action == "BACKTRACK":
            expected_width = max(WIDTH_FLOOR, width - 1)
            if event == "backtracked":
                if depth <= 1:
                    divergences.append(
                        f"{label}: backtrack from depth {depth} must reseed")
                    expected_depth = None
                else:
                    expected_depth = depth - 1
            elif event == "reseeded":
                expected_depth = None
            else:
                divergences.append(f"{label}: path event {event!r} under {action}")
                expected_depth = None
        elif action == "PROBE_DEPTH":
            if event == "descended":
                expected_width = width
                expected_depth = depth + 1
            elif event == "none":
                expected_width = min(cfg.width_cap, width + 1)
                expected_depth = depth
            else:
                divergences.append(f"{label}: path event {event!r} under {action}")
                expected_width = min(cfg.width_cap, width + 1)
                expected_depth = None
        else:
            expected_width = min(cfg.width_cap, width + 1)
            expected_depth = depth
            if event != "none":
                divergences.append(f"{label}: path event {event!r} under {action}")
                expected_depth = None

    if len(rounds) > cfg.max_rounds:
        divergences.append(
            f"result: {len(rounds)} rounds exceed the cap of {cfg.max_rounds}")
    termination = final.get("termination")
    if termination not in ("SCORE_GAP", "MAX_ROUNDS", "TREE_EXHAUSTED"):
        divergences.append(f"result: unknown termination {termination!r}")
    elif stopped is None and termination != "TREE_EXHAUSTED":
        divergences.append(
            f"result: termination {termination!r}, but replay found no stop")
    try:
        final_a = float(final["score_a"])
        final_b = float(final["score_b"])
        if abs(final_a - score_a) > 1e-6 or abs(final_b - score_b) > 1e-6:
            divergences.append(
                f"result: final scores ({final_a}, {final_b}), replay computed "
                f"({score_a}, {score_b})")
        expected_winner = "A" if final_a > final_b else ("B" if final_b > final_a
                                                         else "DRAW")
        if final.get("winner") != expected_winner:
            divergences.append(
                f"result: winner {final.get('winner')!r}, replay expected "
                f"{expected_winner}")
    except (KeyError, TypeError, ValueError):
        divergences.append("result: malformed final scores")
    return divergences


def replay_file(path: str | Path) -> list[str]:
    return replay(json.loads(Path(path).read_text(encoding="utf-8")))


# --- diagnostics -----------------------------------------------------------------

@dataclass
class DiagnosticsSummary:
    matches: int = 0
    rounds: int = 0
    mean_rounds: float = 0.0
    verdict_counts: dict[str, int] = field(default_factory=dict)
    tie_quality_counts: dict[str, int] = field(default_factory=dict)
    failure_counts: dict[str, int] = field(default_factory=dict)
    action_counts: dict[str, int] = field(default_factory=dict)
    termination_counts: dict[str, int] = field(default_factory=dict)
    winner_counts: dict[str, int] = field(default_factory=dict)
    depth_histogram: dict[int, int] = field(default_factory=dict)
    width_histogram: dict[int, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "matches": self.matches,
            "rounds": self.rounds,
            "mean_rounds": self.mean_rounds,
            "verdict_counts": dict(sorted(self.verdict_counts.items())),
            "tie_quality_counts": dict(sorted(self.tie_quality_counts.items())),
            "failure_counts": dict(sorted(self.failure_counts.items())),
            "action_counts": dict(sorted(self.action_counts.items())),
            "termination_counts": dict(sorted(self.termination_counts.items())),
            "winner_counts": dict(sorted(self.winner_counts.items())),
            "depth_histogram": {str(k): v for k, v in
                                sorted(self.depth_histogram.items())},
            "width_histogram": {str(k): v for k, v in
                                sorted(self.width_histogram.items())},
        }


def _bump(counter: dict, key) -> None:
    counter[key] = counter.get(key, 0) + 1


def summarize(results: Iterable[MatchResult]) -> DiagnosticsSummary:
    """Aggregate verdict, action, and shape distributions over match results."""
    summary = DiagnosticsSummary()
    for result in results:
        summary.matches += 1
        _bump(summary.termination_counts, result.termination.value)
        _bump(summary.winner_counts, result.winner)
        for record in result.rounds:
            summary.rounds += 1
            _bump(summary.verdict_counts, record.verdict.outcome.value)
            if record.verdict.outcome is Outcome.TIE:
                _bump(summary.tie_quality_counts, record.verdict.tie_quality.value)
            else:
                _bump(summary.failure_counts,
                      record.verdict.loser_failure_type.value)
            if record.action is not None:
                _bump(summary.action_counts, record.action.value)
            _bump(summary.depth_histogram, record.depth)
            _bump(summary.width_histogram, record.width)
    if summary.matches:
        summary.mean_rounds = summary.rounds / summary.matches
    return summary


# --- leaderboard -----------------------------------------------------------------

def leaderboard_to_dict(result: TournamentResult) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "leaderboard",
        "seed": result.seed,
        "rounds": len(result.rounds),
        "games": len(result.games),
        "entries": [
            {
                "name": entry.name,
                "elo": entry.elo,
                "bt_rating": entry.bt_rating,
                "wins": entry.wins,
                "losses": entry.losses,
                "draws": entry.draws,
                "byes": entry.byes,
                "score": entry.score,
            }
            for entry in result.leaderboard
        ],
    }


def write_leaderboard(path: str | Path, result: TournamentResult) -> None:
    Path(path).write_text(canonical_dumps(leaderboard_to_dict(result)) + "\n",
                          encoding="utf-8")


def read_leaderboard(path: str | Path) -> dict:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if data.get("schema_version") != SCHEMA_VERSION:
        raise SchemaVersionError(
            f"unsupported schema version {data.get('schema_version')!r}")
    if data.get("kind") != "leaderboard":
        raise LogError(f"not a leaderboard: kind={data.get('kind')!r}")
    return data
