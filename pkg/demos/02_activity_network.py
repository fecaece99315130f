"""Draw the reply tree of the news thread.

The video is red, top-level comments purple and replies orange. One
author is highlighted in blue, and anything mentioning the election
buzzwords turns green. Output files land in ./network_out/.
"""

from pathlib import Path

from commentscope import fixtures, network, render

out = Path("network_out")
out.mkdir(exist_ok=True)

graph = network.build_activity_graph(fixtures.load_news(), fixtures.NEWS_VIDEO_ID)
query = network.BuzzwordQuery.parse('"donald trump" | president | "white house"')
colors = network.colorize(graph, fixtures.FOCUS_CHANNEL_ID, query)

focus = [n.index for n in graph.nodes if n.author_id == fixtures.FOCUS_CHANNEL_ID]
print("focus author writes at nodes", focus)
for i in focus:
    print(f"  {i:>3} depth {graph.depth(i)} -> {network.addressee_of(graph, i)}  {colors[i].value}")

print()
print(network.format_metrics(network.metrics(graph, query)), end="")

config = render.LayoutConfig(seed=1)
(out / "news.svg").write_text(render.render_svg(graph, colors, render.layout(graph, config), config))
(out / "news.graphml").write_text(render.export_graphml(graph, colors))
(out / "news.dot").write_text(render.export_dot(graph, colors))
print(f"\nwrote {', '.join(sorted(p.name for p in out.iterdir()))} to {out}/")
