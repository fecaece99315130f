"""Collecting comments without touching the real API.

A local stand-in server replays the bundled thread. The client pages
through it exactly as it would against the live service, including a
transient server error that the retry loop absorbs.
"""

import tempfile
from pathlib import Path

from commentscope import fixtures, ingest
from commentscope.mockapi import MockApiServer

with MockApiServer(fixtures.load_news(), api_key="demo-key") as server:
    server.fail_next(503)
    config = ingest.ApiConfig(api_key="demo-key", endpoint_base=server.endpoint,
                              page_size=50, backoff_base=0.1)
    request = ingest.CollectRequest((ingest.parse_access_point(
        "https://www.youtube.com/watch?v=KtNZV7qezMM"),), max_comments=20)
    comments = ingest.collect(config, request)
    print(f"{len(server.requests)} HTTP requests")

tops = sum(c.is_top_level for c in comments)
print(f"{tops} newest top-level comments plus {len(comments) - tops} replies")

anon = ingest.anonymize(comments, salt="demo")
path = Path(tempfile.mkdtemp()) / "snapshot.jsonl"
ingest.save_snapshot(anon, path)
print(f"snapshot: {path} ({path.stat().st_size} bytes)")
print("first author now appears as", ingest.load_snapshot(path)[0].author_display_name)
