"""Deterministic drawing and interchange exports for activity networks."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Sequence
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from .errors import GraphError, MalformedInputError
from .network import ActivityGraph, NodeColor

ARROW_BASE = 10.0
TITLE_BAND = 40.0
EDGE_STROKE = "#7f7f7f"

_XML_INVALID = re.compile("[\x00-\x08\x0b\x0c\x0e-\x1f\ufffe\uffff]")


@dataclass(frozen=True)
class LayoutConfig:
    seed: int = 0
    iterations: int = 500
    width: float = 1000.0
    height: float = 1000.0
    vertex_radius: float = 4.0
    arrow_scale: float = 0.6
    title: str | None = None

    def __post_init__(self):
        if self.iterations < 1:
            raise MalformedInputError("iterations must be >= 1")
        if self.vertex_radius <= 0:
            raise MalformedInputError("vertex_radius must be > 0")
        if self.width <= 0 or self.height <= 0:
            raise MalformedInputError("canvas dimensions must be positive")


def default_title(graph: ActivityGraph) -> str:
    return f"Activity Network (N={graph.n_comments})"


# ---------------------------------------------------------------------------
# layout

def fruchterman_reingold(n: int, edges: Sequence[tuple[int, int]], *, seed: int = 0,
                         iterations: int = 500, width: float = 1000.0,
                         height: float = 1000.0) -> np.ndarray:
    """Force-directed positions for ``n`` nodes joined by 0-based ``edges``.

    Nodes start uniformly at random (seeded), repel with ``k**2 / d`` and
    attract along edges with ``d**2 / k``. Displacements are capped by a
    temperature that cools linearly to zero. The result is scaled uniformly
    into the canvas with a 5% margin.
    """
    if n == 0:
        return np.empty((0, 2))
    center = np.array([width / 2, height / 2])
    if n == 1:
        return center[None, :].copy()

    rng = np.random.default_rng(seed)
    pos = rng.uniform(0.0, 1.0, size=(n, 2)) * [width, height]
    k = math.sqrt(width * height / n)
    temp = width / 10
    cooling = temp / (iterations + 1)
    src = np.array([e[0] for e in edges], dtype=int)
    dst = np.array([e[1] for e in edges], dtype=int)

    for _ in range(iterations):
        delta = pos[:, None, :] - pos[None, :, :]
        dist2 = np.einsum("ijk,ijk->ij", delta, delta)
        np.fill_diagonal(dist2, np.inf)
        dist2 = np.maximum(dist2, 1e-4)
        disp = np.einsum("ij,ijk->ik", k * k / dist2, delta)

        if len(src):
            d = pos[src] - pos[dst]
            length = np.sqrt(np.einsum("ij,ij->i", d, d))
            pull = d * (length / k)[:, None]
            np.add.at(disp, src, -pull)
            np.add.at(disp, dst, pull)

        norm = np.sqrt(np.einsum("ij,ij->i", disp, disp))
        step = np.minimum(norm, temp) / np.maximum(norm, 1e-12)
        pos += disp * step[:, None]
        temp -= cooling

    lo = pos.min(axis=0)
    span = pos.max(axis=0) - lo
    margin = 0.05
    avail = np.array([width, height]) * (1 - 2 * margin)
    scale = np.min(np.where(span > 0, avail / np.where(span > 0, span, 1), np.inf))
    if not np.isfinite(scale):
        return np.tile(center, (n, 1))
    return (pos - lo - span / 2) * scale + center


def layout(graph: ActivityGraph, config: LayoutConfig = LayoutConfig()) -> dict[int, tuple[float, float]]:
    xy = fruchterman_reingold(
        len(graph.nodes),
        [(e.source - 1, e.target - 1) for e in graph.edges],
        seed=config.seed,
        iterations=config.iterations,
        width=config.width,
        height=config.height,
    )
    return {i + 1: (float(x), float(y)) for i, (x, y) in enumerate(xy)}


# ---------------------------------------------------------------------------
# exports

def _check_colors(graph: ActivityGraph, colors: Mapping[int, NodeColor]) -> None:
    missing = [n.index for n in graph.nodes if n.index not in colors]
    if missing:
        raise GraphError(f"no colour for node(s) {missing[:5]}{'...' if len(missing) > 5 else ''}")


def _dot_str(value) -> str:
    s = str(value).replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\r", "")
    return f'"{s}"'


def export_dot(graph: ActivityGraph, colors: Mapping[int, NodeColor], title: str | None = None) -> str:
    _check_colors(graph, colors)
    title = default_title(graph) if title is None else title
    out = [
        f"digraph {_dot_str('activity_' + graph.video_id)} {{",
        f"  graph [label={_dot_str(title)}, video_id={_dot_str(graph.video_id)}, "
        f"node_count={len(graph.nodes)}, edge_count={len(graph.edges)}];",
        '  node [shape=circle, style=filled, label=""];',
    ]
    for n in graph.nodes:
        color = NodeColor(colors[n.index]).value
        attrs = [f"node_type={_dot_str(n.node_type.value)}", f"color={_dot_str(color)}",
                 f"fillcolor={_dot_str(color)}"]
        if n.author_id is not None:
            attrs.append(f"author_id={_dot_str(n.author_id)}")
        out.append(f"  {n.index} [{', '.join(attrs)}];")
    for e in graph.edges:
        out.append(f"  {e.source} -> {e.target} [edge_type={_dot_str(e.edge_type.value)}];")
    out.append("}")
    return "\n".join(out) + "\n"


def _xml_text(value) -> str:
    return escape(_XML_INVALID.sub("", str(value)))


_GRAPHML_KEYS = (
    # (id, for, name, type)
    ("g_title", "graph", "title", "string"),
    ("g_video", "graph", "video_id", "string"),
    ("g_nodes", "graph", "node_count", "int"),
    ("g_edges", "graph", "edge_count", "int"),
    ("n_node_id", "node", "node_id", "string"),
    ("n_type", "node", "node_type", "string"),
    ("n_color", "node", "color", "string"),
    ("n_author", "node", "author_id", "string"),
    ("n_name", "node", "author_display_name", "string"),
    ("n_depth", "node", "depth", "int"),
    ("e_type", "edge", "edge_type", "string"),
)


def export_graphml(graph: ActivityGraph, colors: Mapping[int, NodeColor], title: str | None = None) -> str:
    _check_colors(graph, colors)
    title = default_title(graph) if title is None else title
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<graphml xmlns="http://graphml.graphdrawing.org/xmlns" '
        'xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance" '
        'xsi:schemaLocation="http://graphml.graphdrawing.org/xmlns '
        'http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd">',
    ]
    for key_id, domain, name, typ in _GRAPHML_KEYS:
        out.append(f'  <key id="{key_id}" for="{domain}" attr.name="{name}" attr.type="{typ}"/>')
    out.append(f"  <graph id={quoteattr('activity_' + graph.video_id)} edgedefault=\"directed\">")
    out.append(f'    <data key="g_title">{_xml_text(title)}</data>')
    out.append(f'    <data key="g_video">{_xml_text(graph.video_id)}</data>')
    out.append(f'    <data key="g_nodes">{len(graph.nodes)}</data>')
    out.append(f'    <data key="g_edges">{len(graph.edges)}</data>')
    for n, depth in zip(graph.nodes, graph.depths):
        out.append(f'    <node id="n{n.index}">')
        out.append(f'      <data key="n_node_id">{_xml_text(n.node_id)}</data>')
        out.append(f'      <data key="n_type">{n.node_type.value}</data>')
        out.append(f'      <data key="n_color">{NodeColor(colors[n.index]).value}</data>')
        if n.author_id is not None:
            out.append(f'      <data key="n_author">{_xml_text(n.author_id)}</data>')
        if n.author_display_name is not None:
            out.append(f'      <data key="n_name">{_xml_text(n.author_display_name)}</data>')
        out.append(f'      <data key="n_depth">{depth}</data>')
        out.append("    </node>")
    for i, e in enumerate(graph.edges, start=1):
        out.append(f'    <edge id="e{i}" source="n{e.source}" target="n{e.target}">')
        out.append(f'      <data key="e_type">{e.edge_type.value}</data>')
        out.append("    </edge>")
    out.append("  </graph>")
    out.append("</graphml>")
    return "\n".join(out) + "\n"


def render_svg(graph: ActivityGraph, colors: Mapping[int, NodeColor],
               positions: Mapping[int, tuple[float, float]],
               config: LayoutConfig = LayoutConfig()) -> str:
    """Static picture: one circle per node, one arrowed line per edge,
    no labels, title on top."""
    _check_colors(graph, colors)
    missing = [n.index for n in graph.nodes if n.index not in positions]
    if missing:
        raise GraphError(f"no position for node(s) {missing[:5]}")
    title = default_title(graph) if config.title is None else config.title
    r = config.vertex_radius
    arrow = ARROW_BASE * config.arrow_scale
    w, h = config.width, config.height + TITLE_BAND

    def xy(i):
        x, y = positions[i]
        return x, y + TITLE_BAND

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w:g}" height="{h:g}" viewBox="0 0 {w:g} {h:g}">',
        "  <defs>",
        f'    <marker id="arrow" viewBox="0 0 10 10" refX="10" refY="5" markerUnits="userSpaceOnUse" '
        f'markerWidth="{arrow:.2f}" markerHeight="{arrow:.2f}" orient="auto">',
        f'      <path d="M0,0 L10,5 L0,10 z" fill="{EDGE_STROKE}"/>',
        "    </marker>",
        "  </defs>",
        f'  <rect x="0" y="0" width="{w:g}" height="{h:g}" fill="white"/>',
        f'  <text x="{w / 2:.2f}" y="{TITLE_BAND * 0.7:.2f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="20" font-weight="bold">{_xml_text(title)}</text>',
        f'  <g id="edges" stroke="{EDGE_STROKE}" stroke-width="0.8">',
    ]
    for e in graph.edges:
        x1, y1 = xy(e.source)
        x2, y2 = xy(e.target)
        dx, dy = x2 - x1, y2 - y1
        length = math.hypot(dx, dy)
        if length > r:
            # stop at the target's rim so the arrowhead stays visible
            x2 -= dx / length * r
            y2 -= dy / length * r
        out.append(f'    <line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" marker-end="url(#arrow)"/>')
    out.append("  </g>")
    out.append('  <g id="nodes" stroke="black" stroke-width="0.3">')
    for n in graph.nodes:
        x, y = xy(n.index)
        color = NodeColor(colors[n.index]).value
        out.append(f'    <circle cx="{x:.2f}" cy="{y:.2f}" r="{r:g}" fill="{color}"/>')
    out.append("  </g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
