"""Transport layer: web search/fetch, chat endpoints, and their deterministic doubles.

Every external dependency of the engine (search provider, page fetcher, chat
model) is expressed as a small protocol with two families of implementations:
live HTTP clients, and fixture/scripted clients that are pure functions of
their inputs so whole matches can be replayed bit for bit.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import threading
import time
from collections import deque
from dataclasses import dataclass, field
from html.parser import HTMLParser
from typing import Callable, NamedTuple, Protocol, TYPE_CHECKING
from urllib.parse import urljoin, urlsplit, urlunsplit
from urllib import robotparser

import requests

from .errors import (
    AuthError,
    FetchError,
    MalformedResponseError,
    ProviderError,
    RateLimitedError,
)

if TYPE_CHECKING:
    import random

    from .adjudicate import AgentResponse
    from .taskgen import Task

logger = logging.getLogger(__name__)


# --- URLs and link extraction -------------------------------------------------

class Link(NamedTuple):
    anchor: str
    url: str
    context: str


def normalize_url(url: str) -> str:
    """Canonical URL form: lowercase scheme/host, no fragment, no trailing slash."""
    parts = urlsplit(url.strip())
    path = parts.path
    if path.endswith("/"):
        path = path.rstrip("/")
    return urlunsplit((parts.scheme.lower(), parts.netloc.lower(), path, parts.query, ""))


class _PageParser(HTMLParser):
    """Collects title, visible text, and anchors with their text positions."""

    _SKIP = {"script", "style", "noscript"}

    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.title = ""
        self._chunks: list[str] = []
        self._length = 0
        self._skip_depth = 0
        self._in_title = False
        self._anchor: dict | None = None
        self.anchors: list[dict] = []

    def handle_starttag(self, tag, attrs):
        if tag in self._SKIP:
            self._skip_depth += 1
        elif tag == "title":
            self._in_title = True
        elif tag == "a":
            href = dict(attrs).get("href")
            if href:
                self._anchor = {"href": href, "pos": self._length, "text": []}

    def handle_endtag(self, tag):
        if tag in self._SKIP and self._skip_depth:
            self._skip_depth -= 1
        elif tag == "title":
            self._in_title = False
        elif tag == "a" and self._anchor is not None:
            self._anchor["text"] = "".join(self._anchor["text"]).strip()
            self.anchors.append(self._anchor)
            self._anchor = None

    def handle_data(self, data):
        if self._skip_depth:
            return
        if self._in_title:
            self.title += data
            return
        self._chunks.append(data)
        self._length += len(data)
        if self._anchor is not None:
            self._anchor["text"].append(data)

    def body(self) -> str:
        return re.sub(r"\s+", " ", "".join(self._chunks)).strip()


def parse_html_links(html: str, base_url: str, context_chars: int = 200) -> tuple[str, str, list[Link]]:
    """Best-effort parse of markup into (title, body text, links with context)."""
    parser = _PageParser()
    try:
        parser.feed(html)
        parser.close()
    except Exception:
        logger.debug("malformed markup at %s, keeping partial parse", base_url)
    raw_body = "".join(parser._chunks)
    links = []
    for a in parser.anchors:
        target = urljoin(base_url, a["href"])
        if urlsplit(target).scheme not in ("http", "https"):
            continue
        lo = max(0, a["pos"] - context_chars)
        hi = a["pos"] + len(a["text"]) + context_chars
        context = re.sub(r"\s+", " ", raw_body[lo:hi]).strip()
        links.append(Link(anchor=a["text"], url=target, context=context))
    return parser.title.strip(), parser.body(), links


# --- data shapes ---------------------------------------------------------------

@dataclass
class ChatRequest:
    prompt: str
    temperature: float = 0.2
    max_output_tokens: int = 2048


@dataclass
class ChatResponse:
    text: str
    model: str = ""
    usage_tokens: int = 0


@dataclass
class FetchedPage:
    """A fetched page. ``url`` is the final URL after redirects, normalized."""

    url: str
    title: str = ""
    body: str = ""
    links: list[Link] = field(default_factory=list)
    raw_html: str = ""


@dataclass
class EndpointConfig:
    """One endpoint entry from a config file.

    ``kind`` is one of "http-chat", "http-web", "scripted", "fixture-web".
    API keys are never stored here, only the name of the env var holding one.
    """

    kind: str
    base_url: str = ""
    model: str = ""
    api_key_env: str = ""
    rps: float = 0.0
    temperature: float = 0.2
    max_output_tokens: int = 2048
    max_prompt_chars: int = 120_000
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> "EndpointConfig":
        known = {f for f in cls.__dataclass_fields__ if f != "extra"}
        kwargs = {k: v for k, v in data.items() if k in known}
        extra = {k: v for k, v in data.items() if k not in known}
        if "kind" not in kwargs:
            raise ProviderError("endpoint config missing 'kind'")
        return cls(extra=extra, **kwargs)


# --- protocols -------------------------------------------------------------------

class SearchClient(Protocol):
    def search(self, query: str, k: int = 10) -> list[str]: ...


class FetchClient(Protocol):
    def fetch(self, url: str) -> FetchedPage: ...


class ChatClient(Protocol):
    def chat(self, request: ChatRequest) -> ChatResponse: ...


class Agent(Protocol):
    name: str

    def respond(self, task: "Task", rng: "random.Random") -> "AgentResponse": ...


# Relation labeler: (parent page URL, link) -> lowercase relation label.
Labeler = Callable[[str, Link], str]


# --- rate limiting and retries ------------------------------------------------------

class RateLimiter:
    """Sliding-window limiter: at most ``rps`` acquisitions per rolling second.

    Clock and sleeper are injectable so tests can drive it with a fake clock.
    """

    def __init__(self, rps: float, clock: Callable[[], float] = time.monotonic,
                 sleeper: Callable[[float], None] = time.sleep) -> None:
        self.rps = rps
        self._clock = clock
        self._sleep = sleeper
        self._stamps: deque[float] = deque()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        if self.rps <= 0:
            return
        while True:
            with self._lock:
                now = self._clock()
                while self._stamps and now - self._stamps[0] >= 1.0:
                    self._stamps.popleft()
                if len(self._stamps) < self.rps:
                    self._stamps.append(now)
                    return
                wait = 1.0 - (now - self._stamps[0])
            self._sleep(max(wait, 0.0))


RETRY_ATTEMPTS = 3
RETRY_BASE_DELAY = 0.5


# --- live HTTP clients -----------------------------------------------------------------

class HttpChat:
    """Chat-completions style client for an OpenAI-compatible endpoint."""

    def __init__(self, config: EndpointConfig, session: requests.Session | None = None,
                 limiter: RateLimiter | None = None,
                 sleeper: Callable[[float], None] = time.sleep) -> None:
        self.config = config
        self._session = session or requests.Session()
        self._limiter = limiter or RateLimiter(config.rps)
        self._sleep = sleeper

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        if self.config.api_key_env:
            key = os.environ.get(self.config.api_key_env)
            if not key:
                raise AuthError(f"env var {self.config.api_key_env} is not set")
            headers["Authorization"] = f"Bearer {key}"
        return headers

    def chat(self, request: ChatRequest) -> ChatResponse:
        if len(request.prompt) > self.config.max_prompt_chars:
            raise ProviderError(
                f"prompt of {len(request.prompt)} chars exceeds cap "
                f"{self.config.max_prompt_chars}")
        payload = {
            "model": self.config.model,
            "messages": [{"role": "user", "content": request.prompt}],
            "temperature": request.temperature,
            "max_tokens": request.max_output_tokens,
        }
        headers = self._headers()
        last_error: Exception | None = None
        for attempt in range(RETRY_ATTEMPTS):
            if attempt:
                self._sleep(RETRY_BASE_DELAY * (2 ** (attempt - 1)))
            self._limiter.acquire()
            try:
                resp = self._session.post(self.config.base_url, json=payload,
                                          headers=headers,
                                          timeout=self.config.extra.get("timeout", 120))
            except requests.RequestException as exc:
                last_error = ProviderError(f"transport failure: {exc}")
                continue
            if resp.status_code == 429:
                last_error = RateLimitedError(f"429 from {self.config.base_url}")
                continue
            if resp.status_code in (401, 403):
                raise AuthError(f"{resp.status_code} from {self.config.base_url}")
            if resp.status_code >= 500:
                last_error = ProviderError(f"{resp.status_code} from {self.config.base_url}")
                continue
            if resp.status_code >= 400:
                raise ProviderError(f"{resp.status_code} from {self.config.base_url}")
            try:
                data = resp.json()
                text = data["choices"][0]["message"]["content"]
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                raise MalformedResponseError(f"bad chat payload: {exc}") from exc
            usage = data.get("usage", {}).get("total_tokens", 0)
            return ChatResponse(text=text, model=data.get("model", self.config.model),
                                usage_tokens=usage)
        raise last_error if last_error else ProviderError("chat failed")


class HttpWeb:
    """Live search + fetch. Search hits a JSON provider, fetch GETs pages."""

    def __init__(self, config: EndpointConfig, session: requests.Session | None = None,
                 limiter: RateLimiter | None = None) -> None:
        self.config = config
        self._session = session or requests.Session()
        self._limiter = limiter or RateLimiter(config.rps)
        self._robots: dict[str, robotparser.RobotFileParser | None] = {}
        self._agent = config.extra.get("user_agent", "agentarena/0.1")

    def search(self, query: str, k: int = 10) -> list[str]:
        self._limiter.acquire()
        try:
            resp = self._session.get(self.config.base_url,
                                     params={"q": query, "k": k},
                                     timeout=self.config.extra.get("timeout", 30))
        except requests.RequestException as exc:
            raise ProviderError(f"search transport failure: {exc}") from exc
        if resp.status_code >= 400:
            raise ProviderError(f"search returned {resp.status_code}")
        try:
            results = resp.json()["results"]
        except (ValueError, KeyError, TypeError) as exc:
            raise MalformedResponseError(f"bad search payload: {exc}") from exc
        urls = [r["url"] if isinstance(r, dict) else r for r in results]
        return urls[:k]

    def _allowed(self, url: str) -> bool:
        if not self.config.extra.get("respect_robots", True):
            return True
        host = urlsplit(url).netloc
        if host not in self._robots:
            rp = robotparser.RobotFileParser()
            scheme = urlsplit(url).scheme or "https"
            try:
                rp.set_url(f"{scheme}://{host}/robots.txt")
                rp.read()
                self._robots[host] = rp
            except Exception:
                self._robots[host] = None  # unreadable robots: allow
        rp = self._robots[host]
        return rp is None or rp.can_fetch(self._agent, url)

    def fetch(self, url: str) -> FetchedPage:
        if not self._allowed(url):
            raise FetchError(f"robots.txt excludes {url}")
        self._limiter.acquire()
        try:
            resp = self._session.get(url, timeout=self.config.extra.get("timeout", 30),
                                     headers={"User-Agent": self._agent})
        except requests.Timeout as exc:
            raise FetchError(f"timeout fetching {url}") from exc
        except requests.RequestException as exc:
            raise FetchError(f"fetch failure for {url}: {exc}") from exc
        if resp.status_code >= 400:
            raise FetchError(f"{resp.status_code} fetching {url}")
        final = normalize_url(resp.url)
        ctype = resp.headers.get("Content-Type", "")
        if "html" not in ctype and not resp.text.lstrip().startswith("<"):
            return FetchedPage(url=final, title="", body=resp.text, links=[])
        title, body, links = parse_html_links(resp.text, resp.url)
        return FetchedPage(url=final, title=title, body=body, links=links)


# --- fixture web --------------------------------------------------------------------

class FixtureWeb:
    """Deterministic web double backed by an in-memory corpus.

    Corpus shape::

        {"search": {query: [url, ...]},
         "pages": {url: {"title": str, "body": str, "redirect": url?,
                         "links": [{"anchor", "url", "context"?, "relation"?}]}}}
    """

    def __init__(self, corpus: dict) -> None:
        self._search = {q.lower(): list(urls) for q, urls in corpus.get("search", {}).items()}
        self._pages: dict[str, dict] = {}
        self._relations: dict[tuple[str, str], str] = {}
        for url, rec in corpus.get("pages", {}).items():
            key = normalize_url(url)
            self._pages[key] = rec
            for link in rec.get("links", []):
                rel = link.get("relation")
                if rel:
                    self._relations[(key, normalize_url(link["url"]))] = rel.lower()

    @classmethod
    def from_file(cls, path: str) -> "FixtureWeb":
        with open(path, encoding="utf-8") as fh:
            return cls(json.load(fh))

    def search(self, query: str, k: int = 10) -> list[str]:
        return self._search.get(query.lower(), [])[:k]

    def fetch(self, url: str) -> FetchedPage:
        key = normalize_url(url)
        for _ in range(5):
            rec = self._pages.get(key)
            if rec is None:
                raise FetchError(f"no fixture page for {url}")
            if "redirect" in rec:
                key = normalize_url(rec["redirect"])
                continue
            links = [Link(anchor=l.get("anchor", ""), url=l["url"],
                          context=l.get("context", ""))
                     for l in rec.get("links", [])]
            return FetchedPage(url=key, title=rec.get("title", ""),
                               body=rec.get("body", ""), links=links,
                               raw_html=rec.get("html", ""))
        raise FetchError(f"redirect loop at {url}")

    def relation_for(self, parent_url: str, child_url: str) -> str | None:
        return self._relations.get((normalize_url(parent_url), normalize_url(child_url)))


def fixture_labeler(web: FixtureWeb) -> Labeler:
    """Relation labeler that reads the fixture corpus link annotations."""

    def label(parent_url: str, link: Link) -> str:
        return web.relation_for(parent_url, link.url) or "related"

    return label


# --- scripted chat ---------------------------------------------------------------------

def prompt_digest(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


class ScriptedChat:
    """Canned chat backend: exact prompt or sha256(prompt) lookup, else handler."""

    def __init__(self, replies: dict[str, str] | None = None,
                 handler: Callable[[str], str] | None = None) -> None:
        self._replies = replies or {}
        self._handler = handler

    def chat(self, request: ChatRequest) -> ChatResponse:
        if request.prompt in self._replies:
            return ChatResponse(text=self._replies[request.prompt], model="scripted")
        digest = prompt_digest(request.prompt)
        if digest in self._replies:
            return ChatResponse(text=self._replies[digest], model="scripted")
        if self._handler is not None:
            return ChatResponse(text=self._handler(request.prompt), model="scripted")
        raise ProviderError(f"no scripted reply for prompt digest {digest[:12]}")


# --- scripted agents ----------------------------------------------------------------------

@dataclass
class AgentProfile:
    """Synthetic agent skill profile.

    ``p_deep``/``p_wide`` are the per-item probabilities of satisfying a depth
    or width checklist item; ``style_score`` is a presentation quality in
    [0, 1]; ``citation_rate`` is the mean number of citations per answer.
    """

    name: str
    p_deep: float
    p_wide: float
    style_score: float = 0.5
    citation_rate: float = 3.0

    @classmethod
    def from_dict(cls, data: dict) -> "AgentProfile":
        return cls(**{k: data[k] for k in
                      ("name", "p_deep", "p_wide", "style_score", "citation_rate")
                      if k in data})

    def to_dict(self) -> dict:
        return {"name": self.name, "p_deep": self.p_deep, "p_wide": self.p_wide,
                "style_score": self.style_score, "citation_rate": self.citation_rate}


STYLE_MARKER = re.compile(r"\(presentation score: ([0-9.]+)\)")


def scripted_agent_respond(profile: AgentProfile, task: "Task",
                           rng: "random.Random") -> "AgentResponse":
    """Deterministic synthetic answer for a task.

    Each checklist item is satisfied with probability p_deep/p_wide; hits are
    embedded verbatim, misses are replaced by fabricated tokens. Citation
    markers and a parseable presentation footer are appended.
    """
    from .adjudicate import AgentResponse, count_citations

    def render(items: list[str], p: float) -> list[str]:
        out = []
        for item in items:
            if rng.random() < p:
                out.append(item)
            else:
                out.append(f"unverified-{rng.randrange(16 ** 6):06x}")
        return out

    deep_parts = render(task.checklist_depth, profile.p_deep)
    wide_parts = render(task.checklist_width, profile.p_wide)
    n_cites = int(profile.citation_rate)
    if rng.random() < profile.citation_rate - n_cites:
        n_cites += 1
    markers = " ".join(f"[{i + 1}]" for i in range(n_cites))
    text = (
        f"Identified: {'; '.join(deep_parts)}.\n"
        f"Details: {'; '.join(wide_parts)}.\n"
        f"Sources: {markers}\n"
        f"(presentation score: {profile.style_score:.2f})"
    )
    return AgentResponse(text=text, citation_count=count_citations(text))


class ScriptedAgent:
    """Agent double driven by an AgentProfile."""

    def __init__(self, profile: AgentProfile) -> None:
        self.profile = profile
        self.name = profile.name

    def respond(self, task: "Task", rng: "random.Random") -> "AgentResponse":
        return scripted_agent_respond(self.profile, task, rng)


def ladder_profiles(count: int, top: float = 0.95, step: float = 0.1) -> list[AgentProfile]:
    """Evenly spaced skill ladder; index 0 is the strongest player.

    Style and citation habits scale with skill so every judged signal points
    the same way.
    """
    profiles = []
    for i in range(count):
        accuracy = max(0.05, top - step * i)
        strength = (accuracy - 0.05) / max(top - 0.05, 1e-9)
        profiles.append(AgentProfile(
            name=f"agent-{i + 1:02d}",
            p_deep=round(accuracy, 4),
            p_wide=round(accuracy, 4),
            style_score=round(0.2 + 0.6 * strength, 4),
            citation_rate=round(2.0 + 4.0 * strength, 4),
        ))
    return profiles


class ChatAgent:
    """Agent backed by a chat endpoint; the task question is the whole prompt."""

    def __init__(self, name: str, client: ChatClient) -> None:
        self.name = name
        self._client = client

    def respond(self, task: "Task", rng: "random.Random") -> "AgentResponse":
        from .adjudicate import AgentResponse, count_citations

        prompt = f"{task.question}\n\n{task.word_limit_instruction}"
        reply = self._client.chat(ChatRequest(prompt=prompt))
        return AgentResponse(text=reply.text, citation_count=count_citations(reply.text))


# --- simulated examiner ---------------------------------------------------------------------

FACT_TOKEN = re.compile(r"fact-[a-z0-9]+-[a-z0-9]+")

_TOPIC_LINE = re.compile(r'\*\*OVERALL DOMAIN/TOPIC\*\*: "(.*)"')
_WORD_LIMIT_LINE = re.compile(r'"word_limit_instruction": "(.*)"')
_REASONING_SECTION = re.compile(
    r"\*\*A\. Reasoning Chain \(Background/Context\)\*\*:\n(.*?)\n"
    r"\*\*B\. Target Answers \(The Facts to Retrieve\)\*\*:", re.S)
_TARGET_SECTION = re.compile(
    r"\*\*B\. Target Answers \(The Facts to Retrieve\)\*\*:\n(.*?)\n\n"
    r"--- 2\. QUESTION GENERATION STEPS", re.S)
_JUDGE_QUERY = re.compile(r"^Query: (.*)$", re.M)
_JUDGE_WIDTH = re.compile(r"\[WIDTH-Completeness\]: (\[.*\])")
_JUDGE_DEPTH = re.compile(r"\[DEPTH-Logic\]: (\[.*\])")
_JUDGE_RESPONSES = re.compile(
    r"=== Agent A ===\n\(Citation Count: (\d+)\)\n(.*?)\n"
    r"=== Agent B ===\n\(Citation Count: (\d+)\)\n(.*?)\n\n"
    r"--- 4\. EVALUATION CRITERIA", re.S)


def _node_tokens(content: str) -> list[str]:
    tokens = FACT_TOKEN.findall(content)
    if tokens:
        return tokens
    words = re.findall(r"\w+", content.lower())
    return [" ".join(words[:4])] if words else ["unstated"]


# hard-score gap tiers for the simulated judge: below TIE_GAP coverage is
# treated as equal, at MUCH_GAP and beyond the loss is decisive
TIE_GAP = 0.25
MUCH_GAP = 0.9


class SimulatedExaminerChat:
    """Deterministic examiner double for both prompt shapes.

    Task-generation prompts get a task whose checklists quote fact tokens from
    the serialized context nodes; judge prompts get a verdict from a pure
    checklist-hit comparison (style marker, then citation count, break equal
    hard scores). Same prompt in, same reply out, always.
    """

    def chat(self, request: ChatRequest) -> ChatResponse:
        prompt = request.prompt
        if prompt.startswith('# TASK: Generate a "Deep & Wide"'):
            return ChatResponse(text=self._task_reply(prompt), model="simulated-examiner")
        if prompt.startswith("### Role: Super-User Evaluator"):
            return ChatResponse(text=self._judge_reply(prompt), model="simulated-examiner")
        raise ProviderError("unrecognized prompt shape for simulated examiner")

    def _task_reply(self, prompt: str) -> str:
        from .taskgen import parse_serialized_nodes

        topic_m = _TOPIC_LINE.search(prompt)
        limit_m = _WORD_LIMIT_LINE.search(prompt)
        reasoning_m = _REASONING_SECTION.search(prompt)
        targets_m = _TARGET_SECTION.search(prompt)
        if not (topic_m and limit_m and targets_m):
            raise ProviderError("task prompt missing expected sections")
        reasoning = parse_serialized_nodes(reasoning_m.group(1)) if reasoning_m else []
        targets = parse_serialized_nodes(targets_m.group(1))
        if not targets:
            raise ProviderError("task prompt has no target nodes")

        depth_items = [_node_tokens(n["content"])[0] for n in reasoning]
        focal_tokens = _node_tokens(targets[0]["content"])
        depth_items.append(f"{focal_tokens[0]} is the core entity")
        width_items = []
        for node in targets:
            tokens = _node_tokens(node["content"])
            width_items.append(tokens[1] if len(tokens) > 1 else tokens[0])

        digest = hashlib.sha1("|".join(n["url"] for n in targets).encode()).hexdigest()[:4]
        question = (
            f'Within the topic of "{topic_m.group(1)}", identify the group of '
            f"{len(targets)} entities selected by hidden criterion {digest} and "
            f"report the key recorded attribute of each one."
        )
        return json.dumps({
            "question": question,
            "word_limit_instruction": limit_m.group(1),
            "checklist_width": width_items,
            "checklist_depth": depth_items,
            "rationale": "Fixture task: identity items gate the cohort, "
                         "attribute items require reading every member.",
        })

    def _judge_reply(self, prompt: str) -> str:
        width_m = _JUDGE_WIDTH.search(prompt)
        depth_m = _JUDGE_DEPTH.search(prompt)
        resp_m = _JUDGE_RESPONSES.search(prompt)
        if not (width_m and depth_m and resp_m):
            raise ProviderError("judge prompt missing expected sections")
        width_items = json.loads(width_m.group(1))
        depth_items = json.loads(depth_m.group(1))
        cites_a, text_a = int(resp_m.group(1)), resp_m.group(2)
        cites_b, text_b = int(resp_m.group(3)), resp_m.group(4)

        def frac(items: list[str], text: str) -> float:
            if not items:
                return 1.0
            return sum(1 for item in items if item in text) / len(items)

        def style(text: str) -> float:
            m = STYLE_MARKER.search(text)
            return float(m.group(1)) if m else 0.5

        d_a, w_a = frac(depth_items, text_a), frac(width_items, text_a)
        d_b, w_b = frac(depth_items, text_b), frac(width_items, text_b)
        hard_a, hard_b = d_a + w_a, d_b + w_b
        gap = hard_a - hard_b

        # near-equal coverage: presentation, then citations, then a tie
        if abs(gap) < TIE_GAP:
            if min(hard_a, hard_b) > 1.999:
                return self._verdict("Tie", "HIGH", "NONE",
                                     "Both answers satisfy every checklist item.")
            s_a, s_b = style(text_a), style(text_b)
            if abs(s_a - s_b) > 0.25:
                winner = "A" if s_a > s_b else "B"
                return self._verdict(f"{winner}_BETTER", "N/A", "NONE",
                                     "Equal checklist coverage; presentation decides.")
            if abs(cites_a - cites_b) >= 2:
                winner = "A" if cites_a > cites_b else "B"
                return self._verdict(f"{winner}_BETTER", "N/A", "NONE",
                                     "Equal checklist coverage; citation density decides.")
            quality = "HIGH" if min(hard_a, hard_b) >= 1.6 else "LOW"
            return self._verdict("Tie", quality, "NONE",
                                 "Both answers carry equivalent checklist coverage.")

        winner = "A" if gap > 0 else "B"
        d_l, w_l = (d_b, w_b) if winner == "A" else (d_a, w_a)
        if d_l < 1.0 and w_l < 1.0:
            failure = "BOTH"
        elif d_l < 1.0:
            failure = "DEEP"
        elif w_l < 1.0:
            failure = "WIDE"
        else:
            failure = "NONE"
        verdict = f"{winner}_MUCH_BETTER" if abs(gap) >= MUCH_GAP else f"{winner}_BETTER"
        return self._verdict(verdict, "N/A", failure,
                             f"Loser misses checklist items (failure {failure}).")

    @staticmethod
    def _verdict(outcome: str, tie_quality: str, failure: str, reasoning: str) -> str:
        return json.dumps({
            "verdict": f"[[{outcome}]]",
            "tie_quality": tie_quality,
            "loser_failure_type": failure,
            "reasoning": reasoning,
        })


# --- synthetic corpora ------------------------------------------------------------------------

def make_synthetic_corpus(topic: str, seed: int, categories: int = 6,
                          variants: int = 8, details: int = 6) -> dict:
    """Deterministic fixture corpus: hub -> categories -> variants -> details.

    Every page body carries two ``fact-...`` tokens the simulated examiner can
    lift into checklists. URL path segments stay under 5 chars so the
    decontextualization linter cannot trip on corpus noise. Sibling counts at
    every tier cover the widths reachable within a default match (start 2,
    plus one per round).
    """
    host = f"t{seed & 0xFFFFFFFF:x}.example.org"
    base = f"https://{host}"
    pages: dict[str, dict] = {}

    def body_for(code: str) -> str:
        return (f"Entity {code.upper()}. attribute fact-{code}-a0. "
                f"attribute fact-{code}-a1.")

    root_links = []
    for c in range(1, categories + 1):
        cat_url = f"{base}/c{c}"
        root_links.append({"anchor": f"Category {c}", "url": cat_url,
                           "relation": "category",
                           "context": f"Guide section for category {c}."})
        cat_links = []
        for v in range(1, variants + 1):
            var_url = f"{cat_url}/v{v}"
            code = f"c{c}v{v}"
            cat_links.append({"anchor": f"Variant {c}.{v}", "url": var_url,
                              "relation": "variant",
                              "context": f"Catalog row for variant {c}.{v}."})
            var_links = []
            for d in range(1, details + 1):
                det_url = f"{var_url}/d{d}"
                det_code = f"{code}d{d}"
                var_links.append({"anchor": f"Spec sheet {d}", "url": det_url,
                                  "relation": "detail",
                                  "context": f"Spec sheet {d} for {code}."})
                pages[det_url] = {"title": f"Entity {det_code.upper()} sheet",
                                  "body": body_for(det_code), "links": []}
            pages[var_url] = {"title": f"Entity {code.upper()} overview",
                              "body": body_for(code), "links": var_links}
        pages[cat_url] = {"title": f"Entity C{c} overview",
                          "body": body_for(f"c{c}"), "links": cat_links}

    pages[base] = {"title": f"{topic} hub",
                   "body": f"Hub page for {topic}. attribute fact-root-a0. "
                           f"attribute fact-root-a1.",
                   "links": root_links}
    return {"search": {topic.lower(): [f"{base}/"]}, "pages": pages}


# --- topics -------------------------------------------------------------------------------------

TREND_TOPICS = [
    "Computers & Electronics > Software > Operating Systems",
    "Games > Computer & Video Games > Gaming Media & Reference",
    "Law & Government > Legal",
    "Arts & Entertainment > Movies > DVD & Video Shopping",
    "Arts & Entertainment > Online Media > Online Image Galleries",
    "Games > Computer & Video Games",
    "Health > Health Conditions > Respiratory Conditions",
    "Arts & Entertainment > Entertainment Industry > Film & TV Industry",
    "Law & Government > Public Safety > Public Health",
    "Sports > Individual Sports",
    "People & Society > Social Sciences",
    "Health > Mental Health > Learning & Developmental Disabilities",
    "Shopping > Apparel",
    "Shopping > Entertainment Media > DVD & Video Shopping",
    "Health > Vision Care",
    "Jobs & Education > Jobs",
    "Computers & Electronics > Consumer Electronics > Gadgets & Portable Electronics",
    "Arts & Entertainment > Music & Audio > Rock Music",
    "Books & Literature",
    "Online Communities",
    "Arts & Entertainment > Music & Audio > Music Equipment & Technology",
    "Online Communities > Dating & Personals",
    "Business & Industrial > Advertising & Marketing",
    "Beauty & Fitness",
    "Health > Public Health",
    "Law & Government > Government",
    "Sports > Team Sports",
]


def choose_topic(rng: "random.Random") -> str:
    return rng.choice(TREND_TOPICS)


# --- config factories ----------------------------------------------------------------------------

def chat_from_config(config: EndpointConfig) -> ChatClient:
    if config.kind == "http-chat":
        return HttpChat(config)
    if config.kind == "scripted":
        replies = config.extra.get("replies")
        if replies:
            return ScriptedChat(replies=replies)
        return SimulatedExaminerChat()
    raise ProviderError(f"no chat client for kind {config.kind!r}")


def web_from_config(config: EndpointConfig) -> tuple[SearchClient, FetchClient]:
    if config.kind == "fixture-web":
        web = FixtureWeb.from_file(config.base_url)
        return web, web
    if config.kind == "http-web":
        web = HttpWeb(config)
        return web, web
    raise ProviderError(f"no web client for kind {config.kind!r}")


def agent_from_config(config: EndpointConfig) -> Agent:
    if config.kind == "scripted":
        profile = config.extra.get("profile")
        if not profile:
            raise ProviderError("scripted agent config needs a 'profile'")
        return ScriptedAgent(AgentProfile.from_dict(profile))
    if config.kind == "http-chat":
        name = config.extra.get("name") or config.model or config.base_url
        return ChatAgent(name=name, client=HttpChat(config))
    raise ProviderError(f"no agent for kind {config.kind!r}")
