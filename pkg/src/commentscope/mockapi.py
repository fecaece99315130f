"""Local stand-in for the two comment resources of the video data API.

Serves a fixed list of comments over HTTP so that collection can be
exercised offline, with hooks to inject failures.

    with MockApiServer(comments, api_key="k") as srv:
        config = ApiConfig(api_key="k", endpoint_base=srv.endpoint)
"""

from __future__ import annotations

import json
import threading
from collections import deque
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Sequence
from urllib.parse import parse_qs, urlparse

from .ingest import RawComment, format_timestamp


@dataclass
class Failure:
    status: int
    reason: str | None = None
    resource: str | None = None  # None matches any resource
    body: str | None = None  # raw body override, e.g. truncated JSON


def _resource(c: RawComment) -> dict:
    snippet = {
        "videoId": c.video_id,
        "textDisplay": c.text,
        "textOriginal": c.text,
        "authorDisplayName": c.author_display_name,
        "authorChannelId": {"value": c.author_channel_id},
        "likeCount": c.like_count,
        "publishedAt": format_timestamp(c.published_at),
        "updatedAt": format_timestamp(c.published_at),
    }
    if c.parent_id is not None:
        snippet["parentId"] = c.parent_id
    return {"kind": "youtube#comment", "id": c.comment_id, "snippet": snippet}


class MockApiServer:
    def __init__(self, comments: Sequence[RawComment], api_key: str = "test-key",
                 host: str = "127.0.0.1", port: int = 0):
        self.comments = list(comments)
        self.api_key = api_key
        self.failures: deque[Failure] = deque()
        self.requests: list[tuple[str, dict]] = []
        self._lock = threading.Lock()
        self._children: dict[str, list[RawComment]] = {}
        for c in self.comments:
            if c.parent_id is not None:
                self._children.setdefault(c.parent_id, []).append(c)
        self._httpd = ThreadingHTTPServer((host, port), self._handler_class())
        self._thread: threading.Thread | None = None

    @property
    def endpoint(self) -> str:
        host, port = self._httpd.server_address[:2]
        return f"http://{host}:{port}/youtube/v3"

    def fail_next(self, status: int, reason: str | None = None, *, times: int = 1,
                  resource: str | None = None, body: str | None = None) -> None:
        with self._lock:
            for _ in range(times):
                self.failures.append(Failure(status, reason, resource, body))

    def truncate_next(self, resource: str | None = None) -> None:
        self.fail_next(200, resource=resource, body='{"items": [{"id": "x"')

    def start(self) -> "MockApiServer":
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.stop()

    # -- request handling -------------------------------------------------

    def _take_failure(self, resource: str) -> Failure | None:
        with self._lock:
            for i, f in enumerate(self.failures):
                if f.resource is None or f.resource == resource:
                    del self.failures[i]
                    return f
        return None

    @staticmethod
    def _page(items: list, params: dict) -> dict:
        size = max(1, min(100, int(params.get("maxResults", 20))))
        start = int(params.get("pageToken", 0) or 0)
        page = {"items": items[start:start + size]}
        if start + size < len(items):
            page["nextPageToken"] = str(start + size)
        return page

    def respond(self, path: str, params: dict) -> tuple[int, str]:
        resource = path.rstrip("/").rsplit("/", 1)[-1]
        with self._lock:
            self.requests.append((resource, params))
        failure = self._take_failure(resource)
        if failure is not None:
            if failure.body is not None:
                return failure.status, failure.body
            return failure.status, _error(failure.status, failure.reason)
        if params.get("key") != self.api_key:
            return 400, _error(400, "keyInvalid")

        if resource == "commentThreads":
            video = params.get("videoId")
            tops = [c for c in self.comments if c.video_id == video and c.parent_id is None]
            if params.get("order", "time") == "time":
                tops.sort(key=lambda c: c.published_at, reverse=True)
            items = [{
                "kind": "youtube#commentThread",
                "id": c.comment_id,
                "snippet": {
                    "videoId": c.video_id,
                    "topLevelComment": _resource(c),
                    "totalReplyCount": len(self._children.get(c.comment_id, [])),
                },
            } for c in tops]
            return 200, json.dumps(self._page(items, params))
        if resource == "comments":
            kids = self._children.get(params.get("parentId", ""), [])
            return 200, json.dumps(self._page([_resource(c) for c in kids], params))
        return 404, _error(404, "notFound")

    def _handler_class(self):
        server = self

        class Handler(BaseHTTPRequestHandler):
            def do_GET(self):
                url = urlparse(self.path)
                params = {k: v[0] for k, v in parse_qs(url.query).items()}
                status, body = server.respond(url.path, params)
                data = body.encode("utf-8")
                self.send_response(status)
                self.send_header("Content-Type", "application/json; charset=utf-8")
                self.send_header("Content-Length", str(len(data)))
                self.end_headers()
                self.wfile.write(data)

            def log_message(self, *args):
                pass

        return Handler


def _error(status: int, reason: str | None) -> str:
    return json.dumps({"error": {"code": status, "message": reason or "error",
                                 "errors": [{"reason": reason or "error"}]}})
