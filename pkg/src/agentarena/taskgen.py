"""Task generation: turning a tree path plus sibling cohort into a graded question.

The examiner prompt is a fixed template with four placeholders. Deep context
(the ancestor chain) supplies the reasoning that masks the target entities;
wide context (the sibling cohort) supplies the facts the answer must
aggregate. Generated questions are linted so they never leak the identity of
the source documents.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from urllib.parse import urlsplit

from .errors import (
    ExpansionExhaustedError,
    LintError,
    PromptAssemblyError,
    TaskParseError,
)
from .gateway import ChatClient, ChatRequest, FetchClient, FetchedPage, Labeler, Link
from .infotree import (
    InfoNode,
    InfoTree,
    TreePath,
    ancestors,
    expand_width,
    needs_width_expansion,
    siblings,
)

logger = logging.getLogger(__name__)

TASK_PROMPT_TEMPLATE = '''# TASK: Generate a "Deep & Wide" Search Evaluation Query

You are an expert at creating complex, multi-hop search queries designed to test the limits of Search Agents. Your goal is to synthesize a question that requires **Logical Reasoning (Deep)** to identify the subjects and **Broad Information Aggregation (Wide)** to answer fully.

--- 1. THE HIDDEN KNOWLEDGE (Source Material) ---
*Note: This content is hidden from the test taker. It is only for you to formulate the question and the grading criteria.*

**OVERALL DOMAIN/TOPIC**: "{Root Topic}"
**A. Reasoning Chain (Background/Context)**:
{Serialized Reasoning Nodes (Ancestors)}
**B. Target Answers (The Facts to Retrieve)**:
{Serialized Target Nodes (Siblings)}

--- 2. QUESTION GENERATION STEPS (READ CAREFULLY) ---
**Rule 1: ABSOLUTE GROUNDING - CRITICAL**
- **YOU MUST** generate the question based **ONLY** on the specific entities and facts found in the [Hidden Knowledge] above.
- **STRICT PROHIBITION:** Do NOT ignore the provided text.
- **Relevance**: The question MUST be relevant to the **Overall Domain/Topic** ("{Root Topic}"). Do not hallucinate unrelated topics.

**Rule 2: COMPLETE DE-CONTEXTUALIZATION (No Leaking)**
- **FORBIDDEN:** You MUST NOT mention the specific filename, website title, directory name, or document header found in the source.
- **REQUIRED:** Treat the provided text as just *one instance* of a universal fact. Ask about the *entities themselves*, not about the *document* describing them.
- **Litmus Test:** If the user needs the specific JSON file you read to understand the question, YOU FAILED. The question must be solvable using Google/Bing to find the *original primary sources*.

**STEP 1: Deep Reasoning (The Filter)**
- Analyze the [Reasoning Chain] to identify the specific logic, condition, or category that groups the target entities together.
- **RULE**: Do NOT mention the specific names of the [Target Entities] in the question.
- **RULE**: Use the [Reasoning Chain] logic to strictly define the group.

**STEP 2: Wide Aggregation (The Scope)**
- If the [Target Answers] contain multiple entities, the question MUST require reading and comparing information from **ALL** of them.
- The answer must not be resolvable by finding a single document; it must require aggregating details across all identified targets.

**STEP 3: Synthesis (The Deep & Wide Question)**
- Combine Step 1 and Step 2 into a single, cohesive natural language question.
- **CRITICAL**: Ensure the question targets **Publicly Verifiable Facts**. Do not ask about obscure details that exist *only* within the specific phrasing of the provided source text. The question must be answerable by searching external, general web sources.

--- 3. CHECKLIST DEFINITIONS (CRITICAL) ---
**STEP 1 Draft the Gold Standard Answer**: Formulate a complete answer based on the [Hidden Knowledge].
**STEP 2 Extract Checklists**: Deconstruct the answer into specific verification points.
    - **Checklist Width (Completeness & Details)**: **Content**: The Specific Attributes/Facts requested in the query. **Purpose**: Once the entity is found, did the agent gather *all* the requested scattered details?
    - **Checklist Depth (Identity & Logic)**: **Content**: The Correct Entity Names + The Logic Validation. **Purpose**: Did the agent use the reasoning chain to find the *correct* person/thing?

--- 4. OUTPUT FORMAT (JSON) ---
Return the result in the following JSON format:
{
    "question": "The final Deep & Wide search query",
    "word_limit_instruction": "{Dynamic Constraint String}",
    "checklist_width": [
        "Specific Detail A for Entity 1",
        "Specific Detail B for Entity 1",
        ...
    ],
    "checklist_depth": [
        "Target Entity 1 Name + Logic Proof",
        ...
    ],
    "rationale": "Briefly explain how the question uses logic to mask entities (Deep) and requests scattered info (Wide)."
}'''

TASK_PLACEHOLDERS = (
    "Root Topic",
    "Serialized Reasoning Nodes (Ancestors)",
    "Serialized Target Nodes (Siblings)",
    "Dynamic Constraint String",
)


@dataclass
class TaskGenConfig:
    word_base: int = 120
    word_per_width: int = 80
    word_per_depth: int = 40
    retries: int = 2
    max_node_chars: int = 600
    temperature: float = 0.2


@dataclass
class Task:
    question: str
    word_limit_instruction: str
    checklist_width: list[str]
    checklist_depth: list[str]
    rationale: str
    depth: int
    width: int
    source_path: tuple[int, ...] = ()
    target_ids: tuple[int, ...] = ()

    def to_dict(self) -> dict:
        return {
            "question": self.question,
            "word_limit_instruction": self.word_limit_instruction,
            "checklist_width": list(self.checklist_width),
            "checklist_depth": list(self.checklist_depth),
            "rationale": self.rationale,
        }

    @classmethod
    def from_dict(cls, data: dict, depth: int, width: int) -> "Task":
        return cls(question=data["question"],
                   word_limit_instruction=data["word_limit_instruction"],
                   checklist_width=list(data["checklist_width"]),
                   checklist_depth=list(data["checklist_depth"]),
                   rationale=data.get("rationale", ""),
                   depth=depth, width=width)


# --- word limits -------------------------------------------------------------

def word_limit(depth: int, width: int, config: TaskGenConfig | None = None) -> int:
    """Word budget scaling with task size: base + per-width + per-depth terms."""
    cfg = config or TaskGenConfig()
    return cfg.word_base + cfg.word_per_width * width + cfg.word_per_depth * depth


def constraint_string(limit: int) -> str:
    return f"Maximum {limit} words"


# --- template rendering --------------------------------------------------------

def render_template(template: str, values: dict[str, str]) -> str:
    """Substitute ``{Name}`` tokens in one pass; values are never re-scanned."""
    pattern = re.compile("|".join(re.escape("{" + name + "}") for name in values))
    return pattern.sub(lambda m: values[m.group(0)[1:-1]], template)


def serialize_nodes(nodes: list[InfoNode], max_chars: int = 600) -> str:
    """Stable one-block-per-node rendering used inside examiner prompts."""
    blocks = []
    for i, node in enumerate(nodes, 1):
        content = re.sub(r"\s+", " ", node.content).strip()[:max_chars]
        title = re.sub(r"\s+", " ", node.title).strip()
        blocks.append(f"[{i}] (relation: {node.relation or 'root'})\n"
                      f"Title: {title}\nURL: {node.url}\nContent: {content}")
    return "\n\n".join(blocks)


_NODE_BLOCK = re.compile(
    r"\[\d+\] \(relation: (?P<relation>.*)\)\n"
    r"Title: (?P<title>.*)\nURL: (?P<url>.*)\nContent: (?P<content>.*)")


def parse_serialized_nodes(text: str) -> list[dict]:
    """Inverse of serialize_nodes, for scripted backends and tests."""
    out = []
    for block in text.split("\n\n"):
        m = _NODE_BLOCK.match(block.strip())
        if m:
            out.append(m.groupdict())
    return out


def assemble_task_prompt(topic: str, deep_nodes: list[InfoNode],
                         wide_nodes: list[InfoNode], depth: int, width: int,
                         config: TaskGenConfig | None = None) -> str:
    """Render the generation template; no text beyond the template is injected."""
    cfg = config or TaskGenConfig()
    if not wide_nodes:
        raise PromptAssemblyError("wide context is empty")
    values = {
        "Root Topic": topic,
        "Serialized Reasoning Nodes (Ancestors)":
            serialize_nodes(deep_nodes, cfg.max_node_chars),
        "Serialized Target Nodes (Siblings)":
            serialize_nodes(wide_nodes, cfg.max_node_chars),
        "Dynamic Constraint String": constraint_string(word_limit(depth, width, cfg)),
    }
    prompt = render_template(TASK_PROMPT_TEMPLATE, values)
    for name in TASK_PLACEHOLDERS:
        if "{" + name + "}" in prompt:
            raise PromptAssemblyError(f"placeholder left unfilled: {name}")
    return prompt


# --- reply parsing ----------------------------------------------------------------

def extract_json_block(text: str):
    """Pull the first JSON object out of a model reply, fences included."""
    try:
        return json.loads(text)
    except ValueError:
        pass
    fence = re.search(r"```(?:json)?\s*(.*?)```", text, re.S)
    if fence:
        try:
            return json.loads(fence.group(1))
        except ValueError:
            pass
    start, end = text.find("{"), text.rfind("}")
    if start != -1 and end > start:
        return json.loads(text[start:end + 1])
    raise ValueError("no JSON object found")


def parse_task(text: str, depth: int, width: int) -> Task:
    """Validate an examiner reply into a Task. Checklists must be non-empty."""
    try:
        data = extract_json_block(text)
    except ValueError as exc:
        raise TaskParseError(f"task reply is not JSON: {exc}",
                             reason="malformed-json") from exc
    if not isinstance(data, dict):
        raise TaskParseError("task reply is not a JSON object", reason="malformed-json")
    for key in ("question", "word_limit_instruction", "checklist_width",
                "checklist_depth", "rationale"):
        if key not in data:
            raise TaskParseError(f"task reply missing {key!r}", reason="missing-field")
    if not isinstance(data["question"], str) or not data["question"].strip():
        raise TaskParseError("question is empty", reason="missing-field")
    for key in ("checklist_width", "checklist_depth"):
        items = data[key]
        if not isinstance(items, list) or not all(isinstance(i, str) for i in items):
            raise TaskParseError(f"{key} must be a list of strings",
                                 reason="missing-field")
        if not items:
            raise TaskParseError(f"{key} is empty", reason="empty-checklist")
    return Task.from_dict(data, depth=depth, width=width)


# --- decontextualization lint ---------------------------------------------------------

_WORD = re.compile(r"\w+")


def lint_decontextualization(question: str, context_nodes: list[InfoNode],
                             root_url: str) -> list[str]:
    """Flags source-identity leaks in a question.

    Checks case-insensitive containment of node titles (two or more content
    words), URL path segments of length >= 5, and the literal root domain.
    """
    q = question.lower()
    violations = []
    seen: set[str] = set()
    for node in context_nodes:
        title = re.sub(r"\s+", " ", node.title).strip()
        if len(_WORD.findall(title)) >= 2 and title.lower() in q:
            if title.lower() not in seen:
                violations.append(f"title leak: {title}")
                seen.add(title.lower())
        for segment in urlsplit(node.url).path.split("/"):
            if len(segment) >= 5 and segment.lower() in q:
                if segment.lower() not in seen:
                    violations.append(f"url segment leak: {segment}")
                    seen.add(segment.lower())
    domain = urlsplit(root_url).netloc.lower()
    if domain and domain in q:
        violations.append(f"root domain leak: {domain}")
    return violations


# --- relation labeling -----------------------------------------------------------------

_LABEL_PROMPT = (
    "Label the relation between a parent web page and each linked page.\n"
    "Parent title: {title}\n"
    "Parent URL: {url}\n\n"
    "Links:\n{links}\n\n"
    "Reply with a JSON array of lowercase labels, one or two words each, in "
    'the same order as the links. Example: ["varieties", "history"]'
)


def label_relations(examiner: ChatClient, parent_page: FetchedPage,
                    links: list[Link]) -> list[str]:
    """Ask the examiner for relation labels; falls back to 'related' on failure."""
    if not links:
        return []
    block = "\n".join(f"[{i}] {link.anchor or link.url} -> {link.url}"
                      for i, link in enumerate(links, 1))
    prompt = _LABEL_PROMPT.format(title=parent_page.title, url=parent_page.url,
                                  links=block)
    try:
        reply = examiner.chat(ChatRequest(prompt=prompt))
        labels = extract_json_block(reply.text)
        if not isinstance(labels, list):
            raise ValueError("labels reply is not a list")
    except Exception as exc:
        logger.warning("relation labeling failed, defaulting: %s", exc)
        return ["related"] * len(links)
    out = []
    for i in range(len(links)):
        label = labels[i] if i < len(labels) else "related"
        label = str(label).strip().lower()
        out.append(label or "related")
    return out


def examiner_labeler(examiner: ChatClient) -> Labeler:
    """Adapter turning label_relations into a per-link Labeler with caching."""
    cache: dict[tuple[str, str], str] = {}

    def label(parent_url: str, link: Link) -> str:
        key = (parent_url, link.url)
        if key not in cache:
            page = FetchedPage(url=parent_url)
            cache[key] = label_relations(examiner, page, [link])[0]
        return cache[key]

    return label


# --- generation ---------------------------------------------------------------------------

def generate_task(examiner: ChatClient, tree: InfoTree, path: TreePath, width: int,
                  fetcher: FetchClient | None = None,
                  config: TaskGenConfig | None = None,
                  labeler: Labeler | None = None) -> Task:
    """Full generation step: expand the cohort if needed, prompt, parse, lint.

    Raises ExpansionExhaustedError when the tree cannot supply ``width``
    cohort members, and the last parse/lint error once retries run out.
    """
    cfg = config or TaskGenConfig()
    focal = path.focal
    if needs_width_expansion(tree, focal, width) and fetcher is not None:
        expand_width(tree, focal, width, fetcher, labeler)
    cohort = siblings(tree, focal, limit=width)
    if len(cohort) < width:
        raise ExpansionExhaustedError(
            f"cohort has {len(cohort)} members, width {width} required")
    deep = ancestors(tree, focal)
    prompt = assemble_task_prompt(tree.topic, deep, cohort,
                                  depth=path.depth, width=width, config=cfg)
    root_url = tree.node(tree.root).url
    last_error: Exception | None = None
    for _ in range(1 + cfg.retries):
        reply = examiner.chat(ChatRequest(prompt=prompt, temperature=cfg.temperature))
        try:
            task = parse_task(reply.text, depth=path.depth, width=width)
        except TaskParseError as exc:
            last_error = exc
            logger.info("task parse failed, retrying: %s", exc)
            continue
        violations = lint_decontextualization(task.question, deep + cohort, root_url)
        if violations:
            last_error = LintError(f"question leaks source identity: {violations}",
                                   violations=violations)
            logger.info("task lint failed, retrying: %s", violations)
            continue
        task.source_path = path.node_ids
        task.target_ids = tuple(node.id for node in cohort)
        return task
    assert last_error is not None
    raise last_error
