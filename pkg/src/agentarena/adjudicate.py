"""Pairwise adjudication: judge prompt assembly, verdict parsing, scoring.

Verdicts use a five-way outcome tier. Ties carry a quality flag (HIGH when
both answers were strong, LOW when both failed), decisive rounds carry a
diagnosis of why the loser lost (DEEP logic failure, WIDE aggregation
failure, BOTH, or NONE when only soft filters separated the answers).
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from enum import Enum

from .errors import VerdictParseError
from .gateway import ChatClient, ChatRequest
from .taskgen import Task, extract_json_block, render_template

logger = logging.getLogger(__name__)

JUDGE_PROMPT_TEMPLATE = '''### Role: Super-User Evaluator (Simulating Human Preference)
Compare Response A and Response B to identify which search agent provides a better USER EXPERIENCE.
While accuracy is paramount, you must also heavily weigh **comprehensiveness, formatting, and helpfulness** -- traits that human users value in search engines like Perplexity, Gemini, or SearchGPT.

--- 1. QUERY & CONSTRAINT ---
Query: {Question}
Constraint: **Maximum {Word Limit} words**. (Note: Do not penalize slightly going over if the quality is high. Only penalize extreme verbosity).

--- 2. GROUND TRUTH CHECKLIST ---
[WIDTH-Completeness]: {Checklist Width JSON}
[DEPTH-Logic]: {Checklist Depth JSON}

--- 3. RESPONSES ---
=== Agent A ===
(Citation Count: {Count A})
{Final Answer A}
=== Agent B ===
(Citation Count: {Count B})
{Final Answer B}

--- 4. EVALUATION CRITERIA (Aligned with Human Preference) ---
**Dimension 1: Accuracy (The Foundation)**
- **Core Entity Check**: Determine if each agent passes the DEEP Logic (Found the right entity?). (If BOTH fail this, it's a LOW TIE).
- **Sub-Point Accuracy**: Did the agent answer *all* parts of the prompt correctly? Determine if each agent passes the WIDE Aggregation (Found the specific details?).
- If BOTH agents have significant hallucinations (even on different parts), consider a **Low Quality Tie**.

**Dimension 2: User Utility & Completeness (The Experience)**
- **Helpfulness**: Is the answer easy to read? Does it actually solve the user's underlying intent?
- **Information Density**: Unlike simple chatbots, Search Agents should provide **rich context**.
- **Helpful Recovery**: If the exact answer isn't in the context, did the agent try to synthesize *related* useful info?
- **Citation Density**: A higher citation count is generally preferred as it indicates better groundedness.

**Dimension 3: Presentation & Structure**
- **Markdown Mastery**: REWARD the use of **Bold** headers, Bullet points, and Tables.
- **Scannability** & **Directness**: Can a user find the specific answer in 2 seconds? (BLUF - Bottom Line Up Front)?

--- 4. SCORING RUBRIC ---
- **[[A/B_MUCH_BETTER]] (+2)**:
    - The winner found the correct Entity AND answered sub-points correctly (No Hallucinations).
    - The loser failed the Deep Logic (Wrong Entity) or missed major Checklists.
    - *Note: Do not give MUCH_BETTER if the winner has a factual error in a sub-point.*
- **[[A/B_BETTER]] (+1)**:
    If winner has errors, cap at BETTER.
    - **The "Flawed Winner"**: The winner got the Main Entity right, but missed a detail or hallucinated on a minor sub-point. The loser failed the Main Entity.
    - **The "Style Winner"**: Both are factually accurate, but one has significantly better formatting/comprehensiveness.
    - **The "Nuance Winner"**: Both failed slightly, but the winner's failure was less catastrophic than the loser's.
- **[[Tie]]**:
    - *High Quality*: Both gave perfect, well-formatted, accurate answers.
    - *Low Quality*: Both failed to find the core entity or both hallucinated significantly.

**Error Diagnosis**
- If there is a loser, identify WHY they lost.
- **DEEP**: Failed logic/identity (Wrong Entity).
- **WIDE**: Failed detail aggregation (Missing Facts).
- **BOTH**: Failed both deep logic and wide details.
- **NONE**: No hard checklist failures, when the winner won solely on Soft Filters like citations/formatting.

--- 5. OUTPUT FORMAT (JSON) ---
{
    "verdict": "[[A_MUCH_BETTER]]" OR "[[A_BETTER]]" OR "[[Tie]]" ... ,
    "tie_quality": "HIGH" OR "LOW" OR "N/A",
    "loser_failure_type": "DEEP" OR "WIDE" OR "BOTH" OR "NONE",
    "reasoning": "First, verify Deep Logic for both. Then, compare Width/Completeness..."
}'''

JUDGE_PLACEHOLDERS = (
    "Question",
    "Word Limit",
    "Checklist Width JSON",
    "Checklist Depth JSON",
    "Count A",
    "Final Answer A",
    "Count B",
    "Final Answer B",
)


class Outcome(Enum):
    A_MUCH_BETTER = "A_MUCH_BETTER"
    A_BETTER = "A_BETTER"
    TIE = "TIE"
    B_BETTER = "B_BETTER"
    B_MUCH_BETTER = "B_MUCH_BETTER"


class TieQuality(Enum):
    HIGH = "HIGH"
    LOW = "LOW"
    NA = "N/A"


class FailureType(Enum):
    DEEP = "DEEP"
    WIDE = "WIDE"
    BOTH = "BOTH"
    NONE = "NONE"


@dataclass
class AgentResponse:
    text: str
    citation_count: int

    def to_dict(self) -> dict:
        return {"text": self.text, "citation_count": self.citation_count}

    @classmethod
    def from_dict(cls, data: dict) -> "AgentResponse":
        return cls(text=data["text"], citation_count=data["citation_count"])


@dataclass
class Verdict:
    outcome: Outcome
    tie_quality: TieQuality
    loser_failure_type: FailureType
    reasoning: str = ""

    def __post_init__(self) -> None:
        is_tie = self.outcome is Outcome.TIE
        if is_tie != (self.tie_quality is not TieQuality.NA):
            raise VerdictParseError(
                f"tie_quality {self.tie_quality.value} inconsistent with "
                f"outcome {self.outcome.value}", reason="inconsistent-fields")
        if is_tie and self.loser_failure_type is not FailureType.NONE:
            raise VerdictParseError(
                "a tie cannot carry a loser failure type",
                reason="inconsistent-fields")


# --- citation counting ----------------------------------------------------------

_BRACKET_CITE = re.compile(r"\[(\d+)\]")
_URL_CITE = re.compile(r"https?://[^\s)\]>\"']+")


def count_citations(text: str) -> int:
    """Distinct bracketed numeric markers plus distinct inline URLs."""
    markers = set(_BRACKET_CITE.findall(text))
    urls = {u.rstrip(".,;:") for u in _URL_CITE.findall(text)}
    return len(markers) + len(urls)


# --- verdict parsing -------------------------------------------------------------

_OUTCOME_TOKENS = {
    "A_MUCH_BETTER": Outcome.A_MUCH_BETTER,
    "A_BETTER": Outcome.A_BETTER,
    "TIE": Outcome.TIE,
    "B_BETTER": Outcome.B_BETTER,
    "B_MUCH_BETTER": Outcome.B_MUCH_BETTER,
}


def parse_verdict(text: str) -> Verdict:
    """Decode a judge reply, enforcing the verdict field invariants."""
    try:
        data = extract_json_block(text)
    except ValueError as exc:
        raise VerdictParseError(f"verdict reply is not JSON: {exc}",
                                reason="malformed-json") from exc
    if not isinstance(data, dict):
        raise VerdictParseError("verdict reply is not a JSON object",
                                reason="malformed-json")
    for key in ("verdict", "tie_quality", "loser_failure_type"):
        if key not in data:
            raise VerdictParseError(f"verdict reply missing {key!r}",
                                    reason="missing-field")

    raw = str(data["verdict"]).strip()
    token = raw.strip("[]").strip().upper()
    if token not in _OUTCOME_TOKENS:
        raise VerdictParseError(f"unknown verdict token {raw!r}", reason="unknown-enum")
    outcome = _OUTCOME_TOKENS[token]

    tq_raw = str(data["tie_quality"]).strip().upper()
    try:
        tie_quality = TieQuality(tq_raw)
    except ValueError:
        raise VerdictParseError(f"unknown tie_quality {data['tie_quality']!r}",
                                reason="unknown-enum") from None

    ft_raw = str(data["loser_failure_type"]).strip().upper()
    if outcome is Outcome.TIE and ft_raw == "N/A":
        ft_raw = "NONE"  # common judge shorthand for "no loser"
    try:
        failure = FailureType(ft_raw)
    except ValueError:
        raise VerdictParseError(
            f"unknown loser_failure_type {data['loser_failure_type']!r}",
            reason="unknown-enum") from None

    return Verdict(outcome=outcome, tie_quality=tie_quality,
                   loser_failure_type=failure,
                   reasoning=str(data.get("reasoning", "")))


def serialize_verdict(verdict: Verdict) -> dict:
    """Verdict in the judge's own JSON field names and token forms."""
    token = "Tie" if verdict.outcome is Outcome.TIE else verdict.outcome.value
    return {
        "verdict": f"[[{token}]]",
        "tie_quality": verdict.tie_quality.value,
        "loser_failure_type": verdict.loser_failure_type.value,
        "reasoning": verdict.reasoning,
    }


# --- scoring -----------------------------------------------------------------------

def score_delta(verdict: Verdict) -> tuple[float, float]:
    """Per-round score increments: much-better 2, better 1, loser and ties 0."""
    return {
        Outcome.A_MUCH_BETTER: (2.0, 0.0),
        Outcome.A_BETTER: (1.0, 0.0),
        Outcome.TIE: (0.0, 0.0),
        Outcome.B_BETTER: (0.0, 1.0),
        Outcome.B_MUCH_BETTER: (0.0, 2.0),
    }[verdict.outcome]


# --- prompt assembly and judging --------------------------------------------------------

_INT = re.compile(r"\d+")


def assemble_judge_prompt(task: Task, response_a: AgentResponse,
                          response_b: AgentResponse) -> str:
    """Render the judge template for a pair of responses."""
    limit_m = _INT.search(task.word_limit_instruction)
    word_limit = limit_m.group(0) if limit_m else task.word_limit_instruction
    values = {
        "Question": task.question,
        "Word Limit": word_limit,
        "Checklist Width JSON": json.dumps(task.checklist_width),
        "Checklist Depth JSON": json.dumps(task.checklist_depth),
        "Count A": str(response_a.citation_count),
        "Final Answer A": response_a.text,
        "Count B": str(response_b.citation_count),
        "Final Answer B": response_b.text,
    }
    return render_template(JUDGE_PROMPT_TEMPLATE, values)


_SWAP = {
    Outcome.A_MUCH_BETTER: Outcome.B_MUCH_BETTER,
    Outcome.A_BETTER: Outcome.B_BETTER,
    Outcome.TIE: Outcome.TIE,
    Outcome.B_BETTER: Outcome.A_BETTER,
    Outcome.B_MUCH_BETTER: Outcome.A_MUCH_BETTER,
}


def judge(examiner: ChatClient, task: Task, response_a: AgentResponse,
          response_b: AgentResponse, swap: bool = False) -> Verdict:
    """One adjudication round, with a single re-prompt on a bad reply.

    With ``swap`` the responses are presented in reversed order and the
    outcome is mapped back afterwards; the failure diagnosis follows the
    loser, so it needs no mapping.
    """
    if swap:
        prompt = assemble_judge_prompt(task, response_b, response_a)
    else:
        prompt = assemble_judge_prompt(task, response_a, response_b)
    verdict: Verdict | None = None
    for attempt in range(2):
        reply = examiner.chat(ChatRequest(prompt=prompt))
        try:
            verdict = parse_verdict(reply.text)
            break
        except VerdictParseError as exc:
            if attempt:
                raise
            logger.info("verdict parse failed, re-prompting: %s", exc)
    assert verdict is not None
    if swap:
        verdict = Verdict(outcome=_SWAP[verdict.outcome],
                          tie_quality=verdict.tie_quality,
                          loser_failure_type=verdict.loser_failure_type,
                          reasoning=verdict.reasoning)
    return verdict
