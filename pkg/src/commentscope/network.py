"""Activity networks: the video plus every comment and reply as nodes, one
edge from each message to the message (or video) it addresses."""

from __future__ import annotations

import csv
import io
import json
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .errors import GraphError, MalformedInputError
from .ingest import RawComment, format_timestamp


class NodeType(str, Enum):
    VIDEO = "video"
    COMMENT = "comment"
    REPLY = "reply"


class EdgeType(str, Enum):
    COMMENT_ON_VIDEO = "comment-on-video"
    REPLY_TO_COMMENT = "reply-to-comment"


class NodeColor(str, Enum):
    ORANGE = "orange"
    RED = "red"
    PURPLE = "purple"
    BLUE = "blue"
    GREEN = "green"


class NodeIndexError(GraphError, IndexError):
    pass


@dataclass(frozen=True)
class ActivityNode:
    index: int
    node_id: str
    node_type: NodeType
    author_id: str | None = None
    author_display_name: str | None = None
    text: str | None = None
    published_at: datetime | None = None


@dataclass(frozen=True)
class ActivityEdge:
    source: int
    target: int
    edge_type: EdgeType


@dataclass(frozen=True)
class ActivityGraph:
    """Directed tree rooted at the video node.

    Nodes are numbered from 1 in collection order; the video node comes
    last. ``depths[i - 1]`` is the edge distance of node ``i`` to the video.
    """

    nodes: tuple[ActivityNode, ...]
    edges: tuple[ActivityEdge, ...]
    video_id: str
    depths: tuple[int, ...] = field(repr=False)
    _targets: tuple[int, ...] = field(repr=False, compare=False)

    @property
    def video_index(self) -> int:
        return len(self.nodes)

    @property
    def n_comments(self) -> int:
        return sum(1 for n in self.nodes if n.node_type is NodeType.COMMENT)

    @property
    def n_replies(self) -> int:
        return sum(1 for n in self.nodes if n.node_type is NodeType.REPLY)

    def node(self, index: int) -> ActivityNode:
        if not 1 <= index <= len(self.nodes):
            raise NodeIndexError(f"node index {index} outside 1..{len(self.nodes)}")
        return self.nodes[index - 1]

    def depth(self, index: int) -> int:
        self.node(index)
        return self.depths[index - 1]


def build_activity_graph(comments: Sequence[RawComment], video_id: str) -> ActivityGraph:
    n = len(comments)
    video_index = n + 1
    position: dict[str, int] = {}
    for i, c in enumerate(comments, start=1):
        if c.video_id != video_id:
            raise GraphError(f"comment {c.comment_id!r} belongs to video {c.video_id!r}, not {video_id!r}")
        if c.comment_id in position or c.comment_id == video_id:
            raise GraphError(f"duplicate node id {c.comment_id!r}")
        position[c.comment_id] = i

    nodes = []
    edges = []
    targets = []
    for i, c in enumerate(comments, start=1):
        if c.parent_id is None:
            nodes.append(ActivityNode(i, c.comment_id, NodeType.COMMENT, c.author_channel_id,
                                      c.author_display_name, c.text, c.published_at))
            edges.append(ActivityEdge(i, video_index, EdgeType.COMMENT_ON_VIDEO))
            targets.append(video_index)
        else:
            parent = position.get(c.parent_id)
            if parent is None:
                raise GraphError(f"reply {c.comment_id!r} has unresolvable parent {c.parent_id!r}")
            nodes.append(ActivityNode(i, c.comment_id, NodeType.REPLY, c.author_channel_id,
                                      c.author_display_name, c.text, c.published_at))
            edges.append(ActivityEdge(i, parent, EdgeType.REPLY_TO_COMMENT))
            targets.append(parent)
    nodes.append(ActivityNode(video_index, video_id, NodeType.VIDEO))
    targets.append(0)

    depths = [-1] * video_index
    depths[video_index - 1] = 0
    for start in range(1, video_index):
        path = []
        cur = start
        while depths[cur - 1] < 0:
            if cur in path:
                raise GraphError(f"reply chain through node {cur} forms a cycle")
            path.append(cur)
            cur = targets[cur - 1]
        d = depths[cur - 1]
        for node in reversed(path):
            d += 1
            depths[node - 1] = d

    return ActivityGraph(tuple(nodes), tuple(edges), video_id, tuple(depths), tuple(targets))


# ---------------------------------------------------------------------------
# lookups

def find_nodes_by_display_name(graph: ActivityGraph, name: str) -> list[int]:
    return [n.index for n in graph.nodes if n.author_display_name is not None and n.author_display_name == name]


def author_id_at(graph: ActivityGraph, index: int) -> str:
    node = graph.node(index)
    if node.node_type is NodeType.VIDEO:
        raise GraphError("the video node has no author")
    return node.author_id


def addressee_of(graph: ActivityGraph, index: int) -> int:
    """Index of the node this message is addressed to.

    This follows the stored edge, so it does not depend on row order (a
    preceding row is not necessarily the addressee).
    """
    node = graph.node(index)
    if node.node_type is NodeType.VIDEO:
        raise GraphError("the video node addresses nobody")
    return graph._targets[index - 1]


def replies_to(graph: ActivityGraph, index: int) -> list[int]:
    graph.node(index)
    return [i for i, t in enumerate(graph._targets, start=1) if t == index]


# ---------------------------------------------------------------------------
# buzzwords

@dataclass(frozen=True)
class BuzzwordQuery:
    """AND over groups, OR within a group, plain lowercase substrings."""

    groups: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        groups = tuple(tuple(p.lower() for p in g) for g in self.groups)
        if not groups or any(not g for g in groups):
            raise MalformedInputError("a buzzword query needs at least one non-empty group")
        if any(not p for g in groups for p in g):
            raise MalformedInputError("buzzword phrases must be non-empty")
        object.__setattr__(self, "groups", groups)

    @classmethod
    def any_of(cls, *phrases: str) -> "BuzzwordQuery":
        return cls((tuple(phrases),))

    @classmethod
    def all_of(cls, *phrases: str) -> "BuzzwordQuery":
        return cls(tuple((p,) for p in phrases))

    @classmethod
    def parse(cls, text: str) -> "BuzzwordQuery":
        """Parse ``"donald trump" | president & "white house"``.

        ``&`` separates groups, ``|`` separates alternatives; double quotes
        protect phrases containing either operator.
        """
        groups: list[list[str]] = [[]]
        buf: list[str] = []
        quoted = False
        was_quoted = False

        def flush():
            nonlocal was_quoted
            phrase = "".join(buf) if was_quoted else "".join(buf).strip()
            if not phrase:
                raise MalformedInputError(f"empty phrase in buzzword query {text!r}")
            groups[-1].append(phrase)
            buf.clear()
            was_quoted = False

        for ch in text:
            if ch == '"':
                if not quoted and "".join(buf).strip():
                    raise MalformedInputError(f"stray quote in buzzword query {text!r}")
                if not quoted:
                    buf.clear()
                quoted = not quoted
                was_quoted = True
            elif quoted:
                buf.append(ch)
            elif ch in "&|":
                flush()
                if ch == "&":
                    groups.append([])
            elif was_quoted:
                if not ch.isspace():
                    raise MalformedInputError(f"text after closing quote in {text!r}")
            else:
                buf.append(ch)
        if quoted:
            raise MalformedInputError(f"unbalanced quote in buzzword query {text!r}")
        flush()
        return cls(tuple(tuple(g) for g in groups))

    def __str__(self) -> str:
        return " & ".join(" | ".join(f'"{p}"' for p in g) for g in self.groups)


def match_buzzwords(text: str | None, query: BuzzwordQuery) -> bool:
    if text is None:
        return False
    low = text.lower()
    return all(any(p in low for p in group) for group in query.groups)


# ---------------------------------------------------------------------------
# colours

def colorize(graph: ActivityGraph, focus_author_id: str | None = None,
             query: BuzzwordQuery | None = None) -> dict[int, NodeColor]:
    """Assign one colour per node; later rules override earlier ones.

    orange everywhere, red video, purple top-level comments, blue for the
    focus author's messages, green for buzzword matches.
    """
    colors = {n.index: NodeColor.ORANGE for n in graph.nodes}
    for n in graph.nodes:
        if n.node_type is NodeType.VIDEO:
            colors[n.index] = NodeColor.RED
    for n in graph.nodes:
        if n.node_type is NodeType.COMMENT:
            colors[n.index] = NodeColor.PURPLE
    if focus_author_id is not None:
        for n in graph.nodes:
            if n.author_id == focus_author_id:
                colors[n.index] = NodeColor.BLUE
    if query is not None:
        for n in graph.nodes:
            if match_buzzwords(n.text, query):
                colors[n.index] = NodeColor.GREEN
    return colors


# ---------------------------------------------------------------------------
# metrics and comparison

@dataclass(frozen=True)
class NetworkMetrics:
    n_video: int
    n_comments: int
    n_replies: int
    max_depth: int
    depth_histogram: dict[int, int]
    buzzword_hits: int
    buzzword_depth_histogram: dict[int, int]
    buzzword_share: float

    def to_dict(self) -> dict:
        return {
            "n_video": self.n_video,
            "n_comments": self.n_comments,
            "n_replies": self.n_replies,
            "max_depth": self.max_depth,
            "depth_histogram": {str(k): v for k, v in self.depth_histogram.items()},
            "buzzword_hits": self.buzzword_hits,
            "buzzword_depth_histogram": {str(k): v for k, v in self.buzzword_depth_histogram.items()},
            "buzzword_share": self.buzzword_share,
        }


def metrics(graph: ActivityGraph, query: BuzzwordQuery | None = None) -> NetworkMetrics:
    hist = Counter(graph.depths)
    hits = Counter()
    if query is not None:
        for n, d in zip(graph.nodes, graph.depths):
            if n.node_type is not NodeType.VIDEO and match_buzzwords(n.text, query):
                hits[d] += 1
    messages = len(graph.nodes) - 1
    total_hits = sum(hits.values())
    return NetworkMetrics(
        n_video=1,
        n_comments=graph.n_comments,
        n_replies=graph.n_replies,
        max_depth=max(graph.depths),
        depth_histogram=dict(sorted(hist.items())),
        buzzword_hits=total_hits,
        buzzword_depth_histogram=dict(sorted(hits.items())),
        buzzword_share=total_hits / messages if messages else 0.0,
    )


@dataclass(frozen=True)
class ComparisonRow:
    label: str
    metrics: NetworkMetrics
    depth_rank: int
    buzzword_rank: int


def _competition_ranks(values: Sequence[float]) -> list[int]:
    return [1 + sum(1 for other in values if other > v) for v in values]


def compare(entries: Iterable[tuple[str, ActivityGraph, BuzzwordQuery | None]]) -> list[ComparisonRow]:
    """Metrics per labelled graph, ranked by depth and buzzword share
    (rank 1 is the largest value; ties share a rank)."""
    entries = list(entries)
    if not entries:
        raise MalformedInputError("nothing to compare")
    ms = [metrics(g, q) for _, g, q in entries]
    depth_ranks = _competition_ranks([m.max_depth for m in ms])
    share_ranks = _competition_ranks([m.buzzword_share for m in ms])
    return [
        ComparisonRow(label, m, dr, sr)
        for (label, _, _), m, dr, sr in zip(entries, ms, depth_ranks, share_ranks)
    ]


_TABLE_COLUMNS = ("label", "comments", "replies", "max_depth", "buzz_hits", "buzz_share", "depth_rank", "buzz_rank")


def format_comparison(rows: Sequence[ComparisonRow]) -> str:
    body = [
        (r.label, str(r.metrics.n_comments), str(r.metrics.n_replies), str(r.metrics.max_depth),
         str(r.metrics.buzzword_hits), f"{r.metrics.buzzword_share:.4f}", str(r.depth_rank), str(r.buzzword_rank))
        for r in rows
    ]
    widths = [max(len(h), *(len(b[i]) for b in body)) for i, h in enumerate(_TABLE_COLUMNS)]
    fmt = lambda cells: "  ".join(  # noqa: E731
        c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(cells, widths))
    ).rstrip()
    return "\n".join([fmt(_TABLE_COLUMNS)] + [fmt(b) for b in body]) + "\n"


def comparison_to_json(rows: Sequence[ComparisonRow]) -> str:
    payload = [
        {"label": r.label, "depth_rank": r.depth_rank, "buzzword_rank": r.buzzword_rank, **r.metrics.to_dict()}
        for r in rows
    ]
    return json.dumps(payload, indent=2) + "\n"


def format_metrics(m: NetworkMetrics) -> str:
    lines = [
        f"nodes: {1 + m.n_comments + m.n_replies} (video 1, comments {m.n_comments}, replies {m.n_replies})",
        f"max_depth: {m.max_depth}",
        "depth  nodes  buzzword_hits",
    ]
    for d, count in m.depth_histogram.items():
        lines.append(f"{d:>5}  {count:>5}  {m.buzzword_depth_histogram.get(d, 0):>13}")
    lines.append(f"buzzword_hits: {m.buzzword_hits}")
    lines.append(f"buzzword_share: {m.buzzword_share:.4f}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# CSV export

def nodes_csv(graph: ActivityGraph, colors: Mapping[int, NodeColor]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("index", "node_id", "node_type", "author_id", "author_display_name", "depth", "color"))
    for n, d in zip(graph.nodes, graph.depths):
        w.writerow((n.index, n.node_id, n.node_type.value, n.author_id or "",
                    n.author_display_name or "", d, NodeColor(colors[n.index]).value))
    return buf.getvalue()


def edges_csv(graph: ActivityGraph) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("from", "to", "edge_type"))
    for e in graph.edges:
        w.writerow((e.source, e.target, e.edge_type.value))
    return buf.getvalue()


def node_timestamp(node: ActivityNode) -> str:
    return format_timestamp(node.published_at) if node.published_at else ""
