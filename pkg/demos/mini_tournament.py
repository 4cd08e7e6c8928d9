"""Run a small Swiss tournament over graded scripted agents.

Four agents with strictly ordered skill play three rounds; the leaderboard
should land in skill order, and bigger skill gaps should settle faster.
"""

from collections import defaultdict

from agentarena.gateway import ScriptedAgent, SimulatedExaminerChat, ladder_profiles
from agentarena.rating import spearman
from agentarena.tournament import (TournamentConfig, run_tournament,
                                   synthetic_env_factory)


def main() -> None:
    profiles = ladder_profiles(4)
    agents = [ScriptedAgent(p) for p in profiles]
    config = TournamentConfig(rounds=3, trees_per_pairing=10)
    result = run_tournament(agents, SimulatedExaminerChat(),
                            synthetic_env_factory(), config=config, seed=2)

    print("rank  name       bt      elo     w-l-d")
    for rank, entry in enumerate(result.leaderboard, start=1):
        print(f"{rank:>4}  {entry.name:<9} {entry.bt_rating:7.1f} "
              f"{entry.elo:7.1f}  {entry.wins}-{entry.losses}-{entry.draws}")

    skill_order = [p.name for p in profiles]
    finish_order = [entry.name for entry in result.leaderboard]
    ranks = {name: i for i, name in enumerate(finish_order)}
    rho = spearman(list(range(len(skill_order))),
                   [ranks[name] for name in skill_order])
    print(f"\nspearman(skill order, finish order) = {rho:.3f}")

    rounds_by_gap = defaultdict(list)
    skill = {p.name: p.p_deep for p in profiles}
    for match in result.matches:
        gap = round(abs(skill[match.agent_a] - skill[match.agent_b]), 2)
        rounds_by_gap[gap].append(len(match.rounds))
    print("skill gap vs mean rounds to settle:")
    for gap in sorted(rounds_by_gap):
        counts = rounds_by_gap[gap]
        print(f"  gap {gap:.2f}: {sum(counts) / len(counts):.2f} rounds "
              f"over {len(counts)} matches")


if __name__ == "__main__":
    main()
