"""Play one adaptive match between two scripted agents and audit its log.

The examiner is simulated, so the full loop (task generation, responses,
verdicts, escalation) runs offline and deterministically.
"""

from pathlib import Path

from agentarena.evolve import run_match
from agentarena.gateway import (AgentProfile, FixtureWeb, ScriptedAgent,
                                SimulatedExaminerChat, fixture_labeler,
                                make_synthetic_corpus)
from agentarena.infotree import build_tree
from agentarena.matchlog import replay_file, write_match


def main() -> None:
    topic = "tide gauges"
    web = FixtureWeb(make_synthetic_corpus(topic, seed=21))
    labeler = fixture_labeler(web)
    tree = build_tree(topic, web, web, budget=40, labeler=labeler)

    thorough = ScriptedAgent(AgentProfile("thorough", p_deep=0.85, p_wide=0.8,
                                          style_score=0.6, citation_rate=4.0))
    hasty = ScriptedAgent(AgentProfile("hasty", p_deep=0.75, p_wide=0.7,
                                       style_score=0.45, citation_rate=3.0))

    result = run_match(tree, thorough, hasty, SimulatedExaminerChat(),
                       seed=7, fetcher=web, labeler=labeler, trace=print)

    print(f"\nwinner: {result.winner}  "
          f"score {result.score_a:.1f}-{result.score_b:.1f}  "
          f"({result.termination.value} after {len(result.rounds)} rounds)")

    log_path = Path("demo_match.json")
    write_match(log_path, result)
    divergences = replay_file(log_path)
    print(f"log written to {log_path}, audit found {len(divergences)} divergences")


if __name__ == "__main__":
    main()
