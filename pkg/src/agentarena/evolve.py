"""Adaptive match loop: escalate task depth/width from round verdicts.

Each round the examiner generates a task at the current (depth, width) state,
both agents answer, the judge rules, and the verdict drives one of four
evolution actions. The match ends on a decisive score gap (mercy rule), a
round cap, or when the tree cannot support the demanded task size.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable

from .adjudicate import (
    AgentResponse,
    FailureType,
    Outcome,
    TieQuality,
    Verdict,
    judge,
    score_delta,
)
from .errors import GatewayError, TaskError, TreeError, VerdictParseError
from .gateway import Agent, ChatClient, FetchClient, Labeler
from .infotree import InfoTree, TreePath, expand_depth, random_start
from .taskgen import Task, TaskGenConfig, generate_task

logger = logging.getLogger(__name__)

WIDTH_FLOOR = 2


class EvolutionAction(Enum):
    PRESSURE_TEST = "PRESSURE_TEST"
    BACKTRACK = "BACKTRACK"
    PROBE_DEPTH = "PROBE_DEPTH"
    PROBE_WIDTH = "PROBE_WIDTH"


class Termination(Enum):
    SCORE_GAP = "SCORE_GAP"
    MAX_ROUNDS = "MAX_ROUNDS"
    TREE_EXHAUSTED = "TREE_EXHAUSTED"


@dataclass
class MatchConfig:
    threshold: float = 2.0
    max_rounds: int = 5
    width_init: int = 2
    width_cap: int = 8
    fan_out: int = 3
    swap_presentation: bool = False
    taskgen: TaskGenConfig = field(default_factory=TaskGenConfig)


@dataclass
class MatchState:
    path: TreePath
    width: int
    score_a: float = 0.0
    score_b: float = 0.0
    rounds_played: int = 0


def transition(verdict: Verdict) -> EvolutionAction:
    """Verdict to evolution action.

    Ties escalate on HIGH quality and retreat on LOW; decisive rounds probe
    the loser's diagnosed weakness, or pressure-test both axes when the loss
    was total (BOTH) or purely stylistic (NONE).
    """
    if verdict.outcome is Outcome.TIE:
        if verdict.tie_quality is TieQuality.HIGH:
            return EvolutionAction.PRESSURE_TEST
        return EvolutionAction.BACKTRACK
    failure = verdict.loser_failure_type
    if failure is FailureType.DEEP:
        return EvolutionAction.PROBE_DEPTH
    if failure is FailureType.WIDE:
        return EvolutionAction.PROBE_WIDTH
    return EvolutionAction.PRESSURE_TEST


def attempt_descend(tree: InfoTree, path: TreePath, fetcher: FetchClient | None = None,
                    rng: random.Random | None = None, fan_out: int = 3,
                    labeler: Labeler | None = None) -> tuple[TreePath, bool]:
    """Move the path one level deeper, expanding the leaf first if needed.

    Returns the (possibly unchanged) path and whether a descent happened.
    """
    focal = path.focal
    kids = tree.children(focal)
    if not kids and fetcher is not None:
        expand_depth(tree, focal, fetcher, fan_out=fan_out, labeler=labeler)
        kids = tree.children(focal)
    if not kids:
        return path, False
    child = rng.choice(kids) if rng is not None else kids[0]
    return path.extended(child), True


def apply_action(tree: InfoTree, state: MatchState, action: EvolutionAction,
                 fetcher: FetchClient | None = None,
                 rng: random.Random | None = None,
                 config: MatchConfig | None = None,
                 labeler: Labeler | None = None) -> tuple[MatchState, str]:
    """Apply an evolution action; returns the new state and a path event.

    Path events: "descended", "backtracked", "reseeded" (backtrack at the
    root), or "none". Width never drops below the floor or exceeds the cap.
    A depth probe that cannot descend even after expansion degrades to a
    width probe so escalation pressure is preserved.
    """
    cfg = config or MatchConfig()
    path, width = state.path, state.width
    event = "none"
    if action is EvolutionAction.PRESSURE_TEST:
        width = min(cfg.width_cap, width + 1)
        path, descended = attempt_descend(tree, path, fetcher, rng,
                                          fan_out=cfg.fan_out, labeler=labeler)
        event = "descended" if descended else "none"
    elif action is EvolutionAction.BACKTRACK:
        # the root cannot be a task focal (it has no sibling cohort), so a
        # backtrack that would land there re-seeds the path instead
        if path.depth <= 1:
            path = random_start(tree, rng if rng is not None else random.Random())
            event = "reseeded"
        else:
            path = path.parent_path()
            event = "backtracked"
        width = max(WIDTH_FLOOR, width - 1)
    elif action is EvolutionAction.PROBE_DEPTH:
        path, descended = attempt_descend(tree, path, fetcher, rng,
                                          fan_out=cfg.fan_out, labeler=labeler)
        if descended:
            event = "descended"
        else:
            width = min(cfg.width_cap, width + 1)
    elif action is EvolutionAction.PROBE_WIDTH:
        width = min(cfg.width_cap, width + 1)
    return replace(state, path=path, width=width), event


def should_stop(state: MatchState, config: MatchConfig | None = None) -> Termination | None:
    """Mercy rule first (score gap at threshold), then the round cap."""
    cfg = config or MatchConfig()
    if abs(state.score_a - state.score_b) >= cfg.threshold:
        return Termination.SCORE_GAP
    if state.rounds_played >= cfg.max_rounds:
        return Termination.MAX_ROUNDS
    return None


# --- match records --------------------------------------------------------------

@dataclass
class RoundRecord:
    index: int
    depth: int
    width: int
    task: Task
    response_a: AgentResponse
    response_b: AgentResponse
    verdict: Verdict
    action: EvolutionAction | None
    path_event: str
    score_a: float
    score_b: float


@dataclass
class MatchResult:
    topic: str
    agent_a: str
    agent_b: str
    rounds: list[RoundRecord]
    score_a: float
    score_b: float
    winner: str
    termination: Termination
    seed: int
    config: MatchConfig


def _winner(score_a: float, score_b: float) -> str:
    if score_a > score_b:
        return "A"
    if score_b > score_a:
        return "B"
    return "DRAW"


def run_match(tree: InfoTree, agent_a: Agent, agent_b: Agent, examiner: ChatClient,
              config: MatchConfig | None = None, seed: int = 0,
              fetcher: FetchClient | None = None, labeler: Labeler | None = None,
              trace: Callable[[str], None] | None = None) -> MatchResult:
    """Run one full match on a tree.

    All randomness flows from ``seed``: the shared match stream drives path
    choices, and each agent call gets a stream derived from (seed, round,
    role) so the two calls could run concurrently without changing results.
    A round that fails task generation or judging aborts the match with
    TREE_EXHAUSTED status; scores up to that point stand.
    """
    cfg = config or MatchConfig()
    rng = random.Random(seed)
    state = MatchState(path=random_start(tree, rng), width=cfg.width_init)
    rounds: list[RoundRecord] = []
    termination: Termination | None = None

    def emit(line: str) -> None:
        if trace is not None:
            trace(line)

    while termination is None:
        index = state.rounds_played + 1
        depth, width = state.path.depth, state.width
        emit(f"=== ROUND {index} ===")
        emit(f"State: Depth {depth} | Width {width}")
        try:
            task = generate_task(examiner, tree, state.path, width,
                                 fetcher=fetcher, config=cfg.taskgen, labeler=labeler)
            rng_a = random.Random(f"{seed}:{index}:A")
            rng_b = random.Random(f"{seed}:{index}:B")
            response_a = agent_a.respond(task, rng_a)
            response_b = agent_b.respond(task, rng_b)
            verdict = judge(examiner, task, response_a, response_b,
                            swap=cfg.swap_presentation)
        except (TaskError, TreeError, GatewayError, VerdictParseError) as exc:
            logger.warning("round %d aborted: %s", index, exc)
            emit(f"Round aborted: {exc}")
            termination = Termination.TREE_EXHAUSTED
            break
        delta_a, delta_b = score_delta(verdict)
        state.score_a += delta_a
        state.score_b += delta_b
        state.rounds_played = index
        emit(f"Question: {task.question}")
        emit(f"Verdict: {verdict.outcome.value} "
             f"(tie quality: {verdict.tie_quality.value}, "
             f"loser failure: {verdict.loser_failure_type.value})")
        emit(f"Score: A {state.score_a:.1f} - B {state.score_b:.1f}")
        stop = should_stop(state, cfg)
        if stop is None:
            action = transition(verdict)
            state, event = apply_action(tree, state, action, fetcher=fetcher,
                                        rng=rng, config=cfg, labeler=labeler)
            emit(f"Action: {action.value} (path: {event})")
        else:
            action, event = None, "none"
            termination = stop
            emit(f"Match over: {stop.value}")
        rounds.append(RoundRecord(index=index, depth=depth, width=width, task=task,
                                  response_a=response_a, response_b=response_b,
                                  verdict=verdict, action=action, path_event=event,
                                  score_a=state.score_a, score_b=state.score_b))

    winner = _winner(state.score_a, state.score_b)
    emit(f"[RESULT] winner={winner} score A {state.score_a:.1f} - "
         f"B {state.score_b:.1f} ({termination.value})")
    return MatchResult(topic=tree.topic, agent_a=agent_a.name, agent_b=agent_b.name,
                       rounds=rounds, score_a=state.score_a, score_b=state.score_b,
                       winner=winner, termination=termination, seed=seed, config=cfg)
