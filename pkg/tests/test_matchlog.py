"""Tests for canonical logs, the replay auditor, and diagnostics."""

import copy
import json

import pytest

from agentarena import (
    AgentProfile,
    FixtureWeb,
    LogError,
    SchemaVersionError,
    ScriptedAgent,
    ScriptedChat,
    TournamentConfig,
    build_tree,
    canonical_dumps,
    dumps_match,
    fixture_labeler,
    loads_match,
    make_synthetic_corpus,
    match_from_dict,
    match_to_dict,
    read_leaderboard,
    read_match,
    replay,
    replay_file,
    run_match,
    run_tournament,
    summarize,
    synthetic_env_factory,
    write_leaderboard,
    write_match,
)

# (outcome, tie_quality, failure) per round: exercises every action kind
SCRIPT = [("A_BETTER", "N/A", "WIDE"),
          ("Tie", "LOW", "NONE"),
          ("B_BETTER", "N/A", "DEEP"),
          ("Tie", "HIGH", "NONE"),
          ("A_BETTER", "N/A", "NONE")]


def scripted_examiner(verdicts):
    queue = iter(verdicts)

    def handler(prompt):
        if prompt.startswith("# TASK:"):
            limit = prompt.split("Maximum ")[1].split(" words")[0]
            return json.dumps({
                "question": "Which entries from the catalog share a trait?",
                "word_limit_instruction": f"Maximum {limit} words",
                "checklist_width": ["detail one", "detail two"],
                "checklist_depth": ["entry one", "entry two"],
                "rationale": "category filter",
            })
        outcome, quality, failure = next(queue)
        return json.dumps({"verdict": f"[[{outcome}]]", "tie_quality": quality,
                           "loser_failure_type": failure, "reasoning": "r"})

    return ScriptedChat(handler=handler)


@pytest.fixture(scope="module")
def logged_match():
    corpus = make_synthetic_corpus("fixture topic", seed=5)
    web = FixtureWeb(corpus)
    tree = build_tree("fixture topic", web, web, budget=60,
                      labeler=fixture_labeler(web))
    agent_a = ScriptedAgent(AgentProfile(name="alpha", p_deep=1.0, p_wide=1.0))
    agent_b = ScriptedAgent(AgentProfile(name="beta", p_deep=1.0, p_wide=1.0))
    return run_match(tree, agent_a, agent_b, scripted_examiner(SCRIPT), seed=6)


@pytest.fixture
def clean_log(logged_match):
    return match_to_dict(logged_match)


# --- canonical JSON ---------------------------------------------------------------

def test_canonical_dumps_sorts_keys():
    assert canonical_dumps({"b": 1, "a": 2}) == '{"a":2,"b":1}'


def test_canonical_dumps_fixes_float_precision():
    assert canonical_dumps({"x": 1.0, "y": 2.25}) == '{"x":1.0000,"y":2.2500}'


def test_canonical_dumps_keeps_ints_and_bools_apart():
    assert canonical_dumps([True, False, 1, 0, None]) == \
        "[true,false,1,0,null]"


def test_canonical_dumps_escapes_strings():
    assert canonical_dumps({"k": 'a"b'}) == '{"k":"a\\"b"}'


def test_canonical_dumps_rejects_non_finite():
    with pytest.raises(LogError):
        canonical_dumps({"x": float("nan")})
    with pytest.raises(LogError):
        canonical_dumps([float("inf")])


def test_canonical_dumps_rejects_non_string_keys():
    with pytest.raises(LogError):
        canonical_dumps({1: "x"})


def test_canonical_dumps_rejects_unknown_types():
    with pytest.raises(LogError):
        canonical_dumps({"x": {1, 2}})


# --- match round trips ---------------------------------------------------------------

def test_match_log_round_trip(logged_match):
    text = dumps_match(logged_match)
    assert text.endswith("\n")
    restored = loads_match(text)
    assert restored.agent_a == logged_match.agent_a
    assert restored.winner == logged_match.winner
    assert restored.termination == logged_match.termination
    assert len(restored.rounds) == len(logged_match.rounds)
    assert [r.verdict for r in restored.rounds] == \
        [r.verdict for r in logged_match.rounds]
    # a round trip re-serializes byte for byte
    assert dumps_match(restored) == text


def test_match_file_round_trip(tmp_path, logged_match):
    path = tmp_path / "match.json"
    write_match(path, logged_match)
    restored = read_match(path)
    assert dumps_match(restored) == dumps_match(logged_match)


def test_match_from_dict_rejects_wrong_version(clean_log):
    clean_log["schema_version"] = "0"
    with pytest.raises(SchemaVersionError):
        match_from_dict(clean_log)


def test_match_from_dict_rejects_wrong_kind(clean_log):
    clean_log["kind"] = "leaderboard"
    with pytest.raises(LogError):
        match_from_dict(clean_log)


# --- replay audit ----------------------------------------------------------------------

def test_replay_clean_log(clean_log):
    assert replay(clean_log) == []


def test_replay_file(tmp_path, logged_match):
    path = tmp_path / "match.json"
    write_match(path, logged_match)
    assert replay_file(path) == []


def test_replay_rejects_unknown_schema(clean_log):
    clean_log["schema_version"] = "99"
    divergences = replay(clean_log)
    assert len(divergences) == 1
    assert divergences[0].startswith("schema:")


def mutated(clean, apply):
    log = copy.deepcopy(clean)
    apply(log)
    return replay(log)


def test_replay_catches_score_tampering(clean_log):
    divs = mutated(clean_log, lambda d: d["rounds"][1].update(score_b=1.0))
    assert any("scores" in m for m in divs)


def test_replay_catches_outcome_swap(clean_log):
    divs = mutated(clean_log,
                   lambda d: d["rounds"][0]["verdict"].update(
                       outcome="B_BETTER"))
    assert any("scores" in m for m in divs)


def test_replay_catches_wrong_action(clean_log):
    divs = mutated(clean_log,
                   lambda d: d["rounds"][2].update(action="PRESSURE_TEST"))
    assert any("replay expected PROBE_DEPTH" in m for m in divs)


def test_replay_catches_tie_quality_flip(clean_log):
    divs = mutated(clean_log,
                   lambda d: d["rounds"][3]["verdict"].update(
                       tie_quality="LOW"))
    assert any("replay expected BACKTRACK" in m for m in divs)


def test_replay_catches_failure_flip(clean_log):
    divs = mutated(clean_log,
                   lambda d: d["rounds"][0]["verdict"].update(
                       loser_failure_type="DEEP"))
    assert any("replay expected PROBE_DEPTH" in m for m in divs)


def test_replay_catches_missing_action(clean_log):
    divs = mutated(clean_log, lambda d: d["rounds"][0].update(action=None))
    assert any("missing action" in m for m in divs)


def test_replay_catches_action_on_terminal_round(clean_log):
    divs = mutated(clean_log,
                   lambda d: d["rounds"][-1].update(action="PROBE_WIDTH"))
    assert any("terminal round" in m for m in divs)


def test_replay_catches_width_tampering(clean_log):
    divs = mutated(clean_log, lambda d: d["rounds"][0].update(width=3))
    assert any("width 3, replay expected 2" in m for m in divs)
    assert any("word limit" in m for m in divs)


def test_replay_catches_depth_tampering(clean_log):
    divs = mutated(clean_log,
                   lambda d: d["rounds"][3].update(
                       depth=d["rounds"][3]["depth"] + 1))
    assert any("depth" in m for m in divs)


def test_replay_catches_citation_count_tampering(clean_log):
    def bump(d):
        d["rounds"][0]["response_a"]["citation_count"] += 1

    divs = mutated(clean_log, bump)
    assert any("citation count" in m for m in divs)


def test_replay_catches_response_text_tampering(clean_log):
    def graft(d):
        d["rounds"][0]["response_b"]["text"] += " [99]"

    divs = mutated(clean_log, graft)
    assert any("citation count" in m for m in divs)


def test_replay_catches_word_limit_tampering(clean_log):
    divs = mutated(clean_log,
                   lambda d: d["rounds"][0]["task"].update(
                       word_limit_instruction="Maximum 9999 words"))
    assert any("word limit" in m for m in divs)


def test_replay_catches_index_tampering(clean_log):
    divs = mutated(clean_log, lambda d: d["rounds"][1].update(index=7))
    assert any("recorded index 7" in m for m in divs)


def test_replay_catches_wrong_path_event(clean_log):
    divs = mutated(clean_log,
                   lambda d: d["rounds"][0].update(path_event="descended"))
    assert any("path event" in m for m in divs)


def test_replay_catches_unknown_path_event(clean_log):
    divs = mutated(clean_log,
                   lambda d: d["rounds"][1].update(path_event="teleported"))
    assert any("unknown path event" in m for m in divs)


def test_replay_catches_backtrack_from_the_floor(clean_log):
    def lower(d):
        d["rounds"][1]["depth"] = 1

    divs = mutated(clean_log, lower)
    assert any("must reseed" in m for m in divs)


def test_replay_catches_winner_tampering(clean_log):
    divs = mutated(clean_log, lambda d: d["result"].update(winner="B"))
    assert any("winner" in m for m in divs)


def test_replay_catches_termination_tampering(clean_log):
    divs = mutated(clean_log,
                   lambda d: d["result"].update(termination="SCORE_GAP"))
    assert any("termination" in m for m in divs)


def test_replay_catches_final_score_tampering(clean_log):
    divs = mutated(clean_log, lambda d: d["result"].update(score_a=9.0))
    assert any("final scores" in m for m in divs)


def test_replay_catches_extra_round(clean_log):
    def extend(d):
        extra = copy.deepcopy(d["rounds"][-1])
        extra["index"] = 6
        d["rounds"].append(extra)

    divs = mutated(clean_log, extend)
    assert any("continued past" in m for m in divs)
    assert any("exceed the cap" in m for m in divs)


def test_replay_reports_malformed_round(clean_log):
    divs = mutated(clean_log, lambda d: d["rounds"][2].pop("verdict"))
    assert any("malformed record" in m for m in divs)


# --- diagnostics ---------------------------------------------------------------------

def test_summarize_counts(logged_match):
    summary = summarize([logged_match])
    assert summary.matches == 1
    assert summary.rounds == 5
    assert summary.mean_rounds == 5.0
    assert summary.verdict_counts == {"A_BETTER": 2, "B_BETTER": 1, "TIE": 2}
    assert summary.tie_quality_counts == {"HIGH": 1, "LOW": 1}
    assert summary.failure_counts == {"WIDE": 1, "DEEP": 1, "NONE": 1}
    assert summary.action_counts == {"PROBE_WIDTH": 1, "BACKTRACK": 1,
                                     "PROBE_DEPTH": 1, "PRESSURE_TEST": 1}
    assert summary.termination_counts == {"MAX_ROUNDS": 1}
    assert summary.winner_counts == {"A": 1}
    assert sum(summary.depth_histogram.values()) == 5
    assert sum(summary.width_histogram.values()) == 5


def test_summarize_to_dict_is_canonical(logged_match):
    payload = summarize([logged_match, logged_match]).to_dict()
    assert payload["matches"] == 2
    # histogram keys become strings so the payload is JSON-clean
    assert all(isinstance(k, str) for k in payload["depth_histogram"])
    canonical_dumps(payload)


def test_summarize_empty():
    summary = summarize([])
    assert summary.matches == 0
    assert summary.mean_rounds == 0.0


# --- leaderboards ----------------------------------------------------------------------

def test_leaderboard_round_trip(tmp_path, examiner, ladder_agents):
    result = run_tournament(ladder_agents[:4], examiner,
                            synthetic_env_factory(),
                            config=TournamentConfig(rounds=2,
                                                    trees_per_pairing=2),
                            seed=5)
    path = tmp_path / "board.json"
    write_leaderboard(path, result)
    data = read_leaderboard(path)
    assert data["kind"] == "leaderboard"
    assert data["games"] == len(result.games)
    assert [e["name"] for e in data["entries"]] == \
        [e.name for e in result.leaderboard]


def test_read_leaderboard_rejects_match_logs(tmp_path, logged_match):
    path = tmp_path / "match.json"
    write_match(path, logged_match)
    with pytest.raises(LogError):
        read_leaderboard(path)
