"""Web-grounded information trees.

A tree is built by crawling outward from a hub page found via search. Each
node keeps the page content it was grounded in plus a lowercase relation
label to its parent; sibling cohorts (same parent, same relation) are the
unit that width expansion grows and task generation aggregates over.
"""

from __future__ import annotations

import json
import logging
import random
import time
from collections import deque
from dataclasses import dataclass
from urllib.parse import urljoin, urlsplit

from .errors import (
    FetchError,
    NoFetchableRootError,
    RootOnlyTreeError,
    TreeError,
    UnknownNodeError,
)
from .gateway import (
    FetchClient,
    FetchedPage,
    Labeler,
    Link,
    SearchClient,
    normalize_url,
    parse_html_links,
)

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 12
DEFAULT_MAX_DEPTH = 2
ROOT_MIN_LINKS = 5
DEPTH_FAN_OUT = 3
START_DEPTH = 2
DEFAULT_RELATION = "related"
CONTEXT_CHARS = 200


@dataclass
class InfoNode:
    id: int
    url: str
    title: str
    content: str
    parent: int | None
    relation: str
    depth: int


@dataclass(frozen=True)
class TreePath:
    """Root-to-focal chain of node ids. Depth is edge count from the root."""

    node_ids: tuple[int, ...]

    @property
    def focal(self) -> int:
        return self.node_ids[-1]

    @property
    def depth(self) -> int:
        return len(self.node_ids) - 1

    def extended(self, child_id: int) -> "TreePath":
        return TreePath(self.node_ids + (child_id,))

    def parent_path(self) -> "TreePath":
        if len(self.node_ids) < 2:
            raise TreeError("path is already at the root")
        return TreePath(self.node_ids[:-1])


class InfoTree:
    """Rooted tree of InfoNodes with URL uniqueness under normalization."""

    def __init__(self, topic: str, created_at: float | None = None) -> None:
        self.topic = topic
        self.created_at = created_at if created_at is not None else time.time()
        self.nodes: dict[int, InfoNode] = {}
        self.root: int | None = None
        self._children: dict[int, list[int]] = {}
        self._url_ids: dict[str, int] = {}
        self._next_id = 0
        self._max_depth = 0

    def __len__(self) -> int:
        return len(self.nodes)

    def node(self, node_id: int) -> InfoNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownNodeError(f"no node {node_id} in tree") from None

    def children(self, node_id: int) -> list[int]:
        self.node(node_id)
        return list(self._children.get(node_id, ()))

    def has_url(self, url: str) -> bool:
        return normalize_url(url) in self._url_ids

    def max_depth(self) -> int:
        return self._max_depth

    def add_node(self, url: str, title: str, content: str,
                 parent: int | None, relation: str) -> int:
        key = normalize_url(url)
        if key in self._url_ids:
            raise TreeError(f"URL already in tree: {key}")
        if parent is None:
            if self.root is not None:
                raise TreeError("tree already has a root")
            depth = 0
        else:
            depth = self.node(parent).depth + 1
        node = InfoNode(id=self._next_id, url=key, title=title, content=content,
                        parent=parent, relation=relation.lower() if relation else "",
                        depth=depth)
        self.nodes[node.id] = node
        self._url_ids[key] = node.id
        self._children.setdefault(node.id, [])
        if parent is None:
            self.root = node.id
        else:
            self._children[parent].append(node.id)
        self._max_depth = max(self._max_depth, depth)
        self._next_id += 1
        return node.id

    def path_to(self, node_id: int) -> TreePath:
        chain = []
        cursor: int | None = node_id
        while cursor is not None:
            chain.append(cursor)
            cursor = self.node(cursor).parent
        return TreePath(tuple(reversed(chain)))


# --- traversal ------------------------------------------------------------------

def ancestors(tree: InfoTree, node_id: int) -> list[InfoNode]:
    """Chain of ancestors ordered root first, excluding the node itself."""
    node = tree.node(node_id)
    out = []
    cursor = node.parent
    while cursor is not None:
        parent = tree.node(cursor)
        out.append(parent)
        cursor = parent.parent
    return list(reversed(out))


def siblings(tree: InfoTree, node_id: int, limit: int | None = None) -> list[InfoNode]:
    """Sibling cohort: same parent and same relation, focal node first.

    Remaining members keep insertion order; ``limit`` caps total length.
    """
    node = tree.node(node_id)
    cohort = [node]
    if node.parent is not None:
        for cid in tree.children(node.parent):
            if cid == node_id:
                continue
            candidate = tree.node(cid)
            if candidate.relation == node.relation:
                cohort.append(candidate)
    if limit is not None:
        cohort = cohort[:limit]
    return cohort


def needs_width_expansion(tree: InfoTree, node_id: int, width: int) -> bool:
    return len(siblings(tree, node_id)) < width


# --- link extraction ----------------------------------------------------------------

def extract_links(page: FetchedPage, context_chars: int = CONTEXT_CHARS) -> list[Link]:
    """Outbound links: absolute, fragment-stripped, deduped by normalized URL."""
    links = page.links
    if not links and page.raw_html:
        _, _, links = parse_html_links(page.raw_html, page.url, context_chars)
    self_key = normalize_url(page.url)
    seen: set[str] = set()
    out: list[Link] = []
    for link in links:
        absolute = urljoin(page.url, link.url)
        if urlsplit(absolute).scheme not in ("http", "https"):
            continue
        key = normalize_url(absolute)
        if not key or key == self_key or key in seen:
            continue
        seen.add(key)
        out.append(Link(anchor=link.anchor, url=key, context=link.context))
    return out


# --- construction ----------------------------------------------------------------------

def build_tree(topic: str, searcher: SearchClient, fetcher: FetchClient,
               budget: int = DEFAULT_BUDGET, labeler: Labeler | None = None,
               search_k: int = 10, min_root_links: int = ROOT_MIN_LINKS,
               max_depth: int = DEFAULT_MAX_DEPTH) -> InfoTree:
    """Breadth-first tree build from the first viable search hit.

    The root is the first result that fetches successfully and exposes at
    least ``min_root_links`` outbound links. Growth stops at ``budget`` nodes
    or ``max_depth``; per-link fetch failures are skipped and logged.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    root_page: FetchedPage | None = None
    root_links: list[Link] = []
    for url in searcher.search(topic, k=search_k):
        try:
            page = fetcher.fetch(url)
        except FetchError as exc:
            logger.info("root candidate %s failed: %s", url, exc)
            continue
        links = extract_links(page)
        if len(links) >= min_root_links:
            root_page, root_links = page, links
            break
        logger.info("root candidate %s has %d outbound links, need %d",
                    url, len(links), min_root_links)
    if root_page is None:
        raise NoFetchableRootError(
            f"no search hit for {topic!r} fetched with >= {min_root_links} links")

    tree = InfoTree(topic=topic)
    root_id = tree.add_node(root_page.url, root_page.title, root_page.body,
                            parent=None, relation="")
    queue: deque[tuple[int, list[Link]]] = deque([(root_id, root_links)])
    while queue and len(tree) < budget:
        pid, links = queue.popleft()
        parent = tree.node(pid)
        if parent.depth >= max_depth:
            continue
        for link in links:
            if len(tree) >= budget:
                break
            if tree.has_url(link.url):
                continue
            try:
                page = fetcher.fetch(link.url)
            except FetchError as exc:
                logger.info("skipping %s: %s", link.url, exc)
                continue
            if tree.has_url(page.url):
                continue
            relation = labeler(parent.url, link) if labeler else DEFAULT_RELATION
            cid = tree.add_node(page.url, page.title, page.body,
                                parent=pid, relation=relation)
            if tree.node(cid).depth < max_depth:
                queue.append((cid, extract_links(page)))
    return tree


def expand_width(tree: InfoTree, node_id: int, target: int, fetcher: FetchClient,
                 labeler: Labeler | None = None) -> int:
    """Grow the node's sibling cohort toward ``target`` from the parent page.

    Returns the number of nodes added. Links already in the tree are skipped;
    with a labeler, only links labeled with the cohort relation join it.
    """
    node = tree.node(node_id)
    if node.parent is None:
        return 0
    have = len(siblings(tree, node_id))
    if have >= target:
        return 0
    parent = tree.node(node.parent)
    try:
        page = fetcher.fetch(parent.url)
    except FetchError as exc:
        logger.info("width expansion fetch of %s failed: %s", parent.url, exc)
        return 0
    added = 0
    for link in extract_links(page):
        if have + added >= target:
            break
        if tree.has_url(link.url):
            continue
        if labeler is not None and labeler(parent.url, link) != node.relation:
            continue
        try:
            child = fetcher.fetch(link.url)
        except FetchError as exc:
            logger.info("skipping %s: %s", link.url, exc)
            continue
        if tree.has_url(child.url):
            continue
        tree.add_node(child.url, child.title, child.body,
                      parent=parent.id, relation=node.relation)
        added += 1
    return added


def expand_depth(tree: InfoTree, node_id: int, fetcher: FetchClient,
                 fan_out: int = DEPTH_FAN_OUT, labeler: Labeler | None = None) -> int:
    """Attach up to ``fan_out`` children fetched from the node's own page."""
    node = tree.node(node_id)
    try:
        page = fetcher.fetch(node.url)
    except FetchError as exc:
        logger.info("depth expansion fetch of %s failed: %s", node.url, exc)
        return 0
    added = 0
    for link in extract_links(page):
        if added >= fan_out:
            break
        if tree.has_url(link.url):
            continue
        try:
            child = fetcher.fetch(link.url)
        except FetchError as exc:
            logger.info("skipping %s: %s", link.url, exc)
            continue
        if tree.has_url(child.url):
            continue
        relation = labeler(node.url, link) if labeler else DEFAULT_RELATION
        tree.add_node(child.url, child.title, child.body,
                      parent=node.id, relation=relation)
        added += 1
    return added


def random_start(tree: InfoTree, rng: random.Random) -> TreePath:
    """Uniform pick among nodes at depth min(2, max tree depth)."""
    if tree.max_depth() == 0:
        raise RootOnlyTreeError("tree has no non-root nodes to start from")
    depth = min(START_DEPTH, tree.max_depth())
    candidates = [n.id for n in tree.nodes.values() if n.depth == depth]
    return tree.path_to(rng.choice(candidates))


# --- snapshots -----------------------------------------------------------------------------

def to_snapshot(tree: InfoTree) -> dict:
    return {
        "topic": tree.topic,
        "root": tree.root,
        "nodes": [
            {"id": n.id, "url": n.url, "title": n.title, "content": n.content,
             "parent": n.parent, "relation": n.relation, "depth": n.depth}
            for n in tree.nodes.values()
        ],
    }


def from_snapshot(data: dict) -> InfoTree:
    """Rebuild a tree, validating parent refs, depths, and URL uniqueness."""
    try:
        topic = data["topic"]
        root = data["root"]
        records = data["nodes"]
    except (KeyError, TypeError) as exc:
        raise TreeError(f"snapshot missing field: {exc}") from exc
    tree = InfoTree(topic=topic)
    for rec in records:
        parent = rec["parent"]
        if parent is None and rec["id"] != root:
            raise TreeError(f"non-root node {rec['id']} has no parent")
        if parent is not None and parent not in tree.nodes:
            raise TreeError(f"node {rec['id']} references unknown parent {parent}")
        key = normalize_url(rec["url"])
        if key in tree._url_ids:
            raise TreeError(f"duplicate URL in snapshot: {key}")
        node = InfoNode(id=rec["id"], url=key, title=rec["title"],
                        content=rec["content"], parent=parent,
                        relation=rec["relation"],
                        depth=0 if parent is None else tree.node(parent).depth + 1)
        if node.depth != rec["depth"]:
            raise TreeError(f"node {rec['id']} depth {rec['depth']} "
                            f"inconsistent with parent chain ({node.depth})")
        tree.nodes[node.id] = node
        tree._url_ids[key] = node.id
        tree._children.setdefault(node.id, [])
        if parent is None:
            tree.root = node.id
        else:
            tree._children[parent].append(node.id)
        tree._max_depth = max(tree._max_depth, node.depth)
        tree._next_id = max(tree._next_id, node.id + 1)
    if tree.root is None:
        raise TreeError("snapshot has no root node")
    return tree


def save_tree(tree: InfoTree, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_snapshot(tree), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_tree(path: str) -> InfoTree:
    with open(path, encoding="utf-8") as fh:
        return from_snapshot(json.load(fh))
