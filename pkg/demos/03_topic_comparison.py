"""Four topics, four conversation shapes.

Music and games threads stay flat: people comment on the video and few
reply. Sports and politics threads keep going, with replies to replies,
and lean harder on their topic vocabulary.
"""

from commentscope import fixtures, network

entries = []
for topic in fixtures.TOPICS:
    graph = network.build_activity_graph(fixtures.load_topic(topic), fixtures.TOPIC_VIDEO_IDS[topic])
    entries.append((topic, graph, fixtures.TOPIC_QUERIES[topic]))

rows = network.compare(entries)
print(network.format_comparison(rows))

for row in rows:
    hist = row.metrics.depth_histogram
    rings = " ".join(f"{d}:{n}" for d, n in hist.items() if d > 0)
    print(f"{row.label:<9} rings {rings}")
