"""Command line interface.

Subcommands cover the full pipeline: build a tree, run a match or a
tournament, simulate a synthetic tournament, audit and summarize match logs,
and correlate two rankings. Exit codes: 0 success, 1 operational failure,
2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys

from .errors import ArenaError
from .evolve import MatchConfig, run_match
from .gateway import (
    EndpointConfig,
    FixtureWeb,
    HttpWeb,
    ScriptedAgent,
    SimulatedExaminerChat,
    agent_from_config,
    chat_from_config,
    fixture_labeler,
    ladder_profiles,
)
from .infotree import build_tree, load_tree, save_tree
from .matchlog import (
    config_from_dict,
    read_match,
    replay_file,
    summarize,
    write_leaderboard,
    write_match,
)
from .rating import pearson, spearman
from .tournament import (
    TournamentConfig,
    fixture_env_factory,
    run_tournament,
    synthetic_env_factory,
)


def _load_json(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _endpoint(path: str) -> EndpointConfig:
    return EndpointConfig.from_dict(_load_json(path))


def _resolve_seed(value: int | None) -> int:
    if value is not None:
        return value
    seed = random.SystemRandom().randrange(2 ** 31)
    print(f"seed: {seed}")
    return seed


def _print_leaderboard(result) -> None:
    print(f"{'rank':<5}{'name':<20}{'bt':>9}{'elo':>9}{'w':>6}{'l':>6}{'d':>6}")
    for rank, entry in enumerate(result.leaderboard, start=1):
        print(f"{rank:<5}{entry.name:<20}{entry.bt_rating:>9.1f}{entry.elo:>9.1f}"
              f"{entry.wins:>6}{entry.losses:>6}{entry.draws:>6}")


# --- subcommands -----------------------------------------------------------------

def cmd_build_tree(args: argparse.Namespace) -> int:
    if args.fixture:
        web = FixtureWeb.from_file(args.fixture)
        searcher, fetcher = web, web
        labeler = fixture_labeler(web)
    else:
        web = HttpWeb(EndpointConfig(kind="http-web", base_url=args.search_url))
        searcher, fetcher = web, web
        labeler = None
    tree = build_tree(args.topic, searcher, fetcher, budget=args.budget,
                      labeler=labeler, max_depth=args.max_depth)
    save_tree(tree, args.out)
    print(f"tree saved to {args.out}: {len(tree.nodes)} nodes, "
          f"max depth {tree.max_depth()}")
    return 0


def cmd_match(args: argparse.Namespace) -> int:
    tree = load_tree(args.tree)
    agent_a = agent_from_config(_endpoint(args.agent_a))
    agent_b = agent_from_config(_endpoint(args.agent_b))
    examiner = chat_from_config(_endpoint(args.examiner))
    fetcher = labeler = None
    if args.fixture:
        web = FixtureWeb.from_file(args.fixture)
        fetcher, labeler = web, fixture_labeler(web)
    config = MatchConfig(threshold=args.threshold, max_rounds=args.max_rounds)
    seed = _resolve_seed(args.seed)
    trace = None if args.quiet else print
    result = run_match(tree, agent_a, agent_b, examiner, config=config,
                       seed=seed, fetcher=fetcher, labeler=labeler, trace=trace)
    if args.out:
        write_match(args.out, result)
        print(f"log written to {args.out}")
    print(f"{result.agent_a} vs {result.agent_b}: winner={result.winner} "
          f"score {result.score_a:.1f}-{result.score_b:.1f} "
          f"({result.termination.value})")
    return 0


def cmd_tournament(args: argparse.Namespace) -> int:
    spec = _load_json(args.config)
    agents = [agent_from_config(EndpointConfig.from_dict(a))
              for a in spec["agents"]]
    examiner = chat_from_config(EndpointConfig.from_dict(spec["examiner"]))
    env_spec = spec.get("env", {"kind": "synthetic"})
    if env_spec.get("kind") == "fixture":
        web = FixtureWeb.from_file(env_spec["path"])
        env_factory = fixture_env_factory(web, env_spec["topic"],
                                          budget=int(env_spec.get("budget", 12)))
    else:
        env_factory = synthetic_env_factory(
            budget=int(env_spec.get("budget", 12)),
            categories=int(env_spec.get("categories", 6)),
            variants=int(env_spec.get("variants", 8)),
            details=int(env_spec.get("details", 6)))
    config = TournamentConfig(
        rounds=int(spec.get("rounds", 4)),
        trees_per_pairing=int(spec.get("trees_per_pairing", 30)),
        match=config_from_dict(spec.get("match", {})))
    seed = _resolve_seed(args.seed if args.seed is not None else spec.get("seed"))
    result = run_tournament(agents, examiner, env_factory, config=config,
                            seed=seed, jobs=args.jobs)
    _print_leaderboard(result)
    if args.out:
        write_leaderboard(args.out, result)
        print(f"leaderboard written to {args.out}")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    if args.profiles:
        from .gateway import AgentProfile

        profiles = [AgentProfile.from_dict(p) for p in _load_json(args.profiles)]
    else:
        profiles = ladder_profiles(args.agents)
    agents = [ScriptedAgent(p) for p in profiles]
    config = TournamentConfig(rounds=args.rounds, trees_per_pairing=args.trees)
    seed = _resolve_seed(args.seed)
    result = run_tournament(agents, SimulatedExaminerChat(),
                            synthetic_env_factory(), config=config,
                            seed=seed, jobs=args.jobs)
    _print_leaderboard(result)
    if args.out:
        write_leaderboard(args.out, result)
        print(f"leaderboard written to {args.out}")
    return 0


def cmd_replay(args: argparse.Namespace) -> int:
    failures = 0
    for path in args.log:
        divergences = replay_file(path)
        if divergences:
            failures += 1
            print(f"{path}: {len(divergences)} divergence(s)")
            for message in divergences:
                print(f"  {message}")
        else:
            print(f"{path}: ok")
    return 1 if failures else 0


def cmd_summarize(args: argparse.Namespace) -> int:
    results = [read_match(path) for path in args.logs]
    summary = summarize(results)
    print(json.dumps(summary.to_dict(), indent=2))
    return 0


def _scores_from_file(path: str) -> dict[str, float]:
    data = _load_json(path)
    if isinstance(data, dict) and "entries" in data:
        return {e["name"]: float(e["bt_rating"]) for e in data["entries"]}
    if isinstance(data, dict) and "scores" in data:
        data = data["scores"]
    if not isinstance(data, dict) or not data:
        raise ArenaError(f"{path}: expected a name-to-score mapping")
    return {str(k): float(v) for k, v in data.items()}


def cmd_correlate(args: argparse.Namespace) -> int:
    ours = _scores_from_file(args.ours)
    reference = _scores_from_file(args.reference)
    names = sorted(set(ours) & set(reference))
    if len(names) < 3:
        raise ArenaError("need at least three shared names to correlate")
    x = [ours[n] for n in names]
    y = [reference[n] for n in names]
    rho = spearman(x, y)
    r, p = pearson(x, y)
    print(f"n={len(names)} spearman={rho:.4f} pearson={r:.4f} (p={p:.4f})")
    print(json.dumps({"n": len(names), "names": names, "spearman": rho,
                      "pearson_r": r, "pearson_p": p}, indent=2))
    return 0


# --- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="agentarena",
        description="Adaptive pairwise evaluation of research agents")
    parser.add_argument("-v", "--verbose", action="store_true",
                        help="enable debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-tree", help="build a tree and save the snapshot")
    p.add_argument("--topic", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--budget", type=int, default=12)
    p.add_argument("--max-depth", type=int, default=2)
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--fixture", help="fixture corpus JSON file")
    source.add_argument("--search-url", help="search endpoint base URL")
    p.set_defaults(func=cmd_build_tree)

    p = sub.add_parser("match", help="run one match on a saved tree")
    p.add_argument("--tree", required=True)
    p.add_argument("--agent-a", required=True, help="agent endpoint config JSON")
    p.add_argument("--agent-b", required=True, help="agent endpoint config JSON")
    p.add_argument("--examiner", required=True, help="examiner endpoint config JSON")
    p.add_argument("--fixture", help="fixture corpus for tree expansion")
    p.add_argument("--threshold", type=float, default=2.0)
    p.add_argument("--max-rounds", type=int, default=5)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="write the canonical match log here")
    p.add_argument("--quiet", action="store_true", help="suppress round trace")
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("tournament", help="run a Swiss tournament from a config")
    p.add_argument("--config", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="write the leaderboard JSON here")
    p.set_defaults(func=cmd_tournament)

    p = sub.add_parser("simulate", help="synthetic tournament with scripted agents")
    p.add_argument("--agents", type=int, default=6)
    p.add_argument("--profiles", help="JSON list of agent profiles")
    p.add_argument("--rounds", type=int, default=4)
    p.add_argument("--trees", type=int, default=30)
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", help="write the leaderboard JSON here")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("replay", help="audit match logs against recomputation")
    p.add_argument("--log", action="append", required=True,
                   help="match log to audit (repeatable)")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("summarize", help="aggregate diagnostics over match logs")
    p.add_argument("--logs", nargs="+", required=True)
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("correlate", help="rank agreement between two score files")
    p.add_argument("--ours", required=True)
    p.add_argument("--reference", required=True)
    p.set_defaults(func=cmd_correlate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ArenaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
