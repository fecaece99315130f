"""Comment-thread acquisition: live API collection, JSON Lines snapshots and
author pseudonymization."""

from __future__ import annotations

import hashlib
import hmac
import json
import logging
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable, Sequence
from urllib.parse import parse_qs, urlparse

import requests

from .errors import (
    AnonymizationCollision,
    ApiError,
    AuthRejectedError,
    InvariantViolation,
    MalformedInputError,
    QuotaExhaustedError,
    SnapshotParseError,
    TransportError,
    TruncatedPageError,
)

logger = logging.getLogger(__name__)

DEFAULT_ENDPOINT = "https://www.googleapis.com/youtube/v3"
API_KEY_ENV = "COMMENTSCOPE_API_KEY"

_ID_RE = re.compile(r"[A-Za-z0-9_-]+")

# Order of keys in every snapshot line. Changing it changes snapshot bytes.
SNAPSHOT_FIELDS = (
    "comment_id",
    "parent_id",
    "video_id",
    "author_display_name",
    "author_channel_id",
    "text",
    "like_count",
    "reply_count",
    "published_at",
)


@dataclass(frozen=True)
class ApiConfig:
    api_key: str
    endpoint_base: str = DEFAULT_ENDPOINT
    page_size: int = 100
    max_retries: int = 3
    backoff_base: float = 1.0
    timeout: float = 30.0

    def __post_init__(self):
        if self.page_size < 1:
            raise MalformedInputError("page_size must be >= 1")
        if self.max_retries < 0:
            raise MalformedInputError("max_retries must be >= 0")


@dataclass(frozen=True)
class AccessPoint:
    video_id: str

    def __post_init__(self):
        if not self.video_id or not _ID_RE.fullmatch(self.video_id):
            raise MalformedInputError(f"invalid video id: {self.video_id!r}")


@dataclass(frozen=True)
class CollectRequest:
    access_points: tuple[AccessPoint, ...]
    max_comments: int = 200

    def __post_init__(self):
        object.__setattr__(self, "access_points", tuple(self.access_points))
        if not self.access_points:
            raise MalformedInputError("at least one access point is required")
        if self.max_comments < 1:
            raise MalformedInputError("max_comments must be >= 1")


@dataclass(frozen=True)
class RawComment:
    """One fetched comment or reply.

    ``parent_id`` is ``None`` for top-level comments. ``reply_count`` is the
    number of direct replies the platform reports for this comment.
    """

    comment_id: str
    parent_id: str | None
    video_id: str
    author_display_name: str
    author_channel_id: str
    text: str
    like_count: int
    reply_count: int
    published_at: datetime

    @property
    def is_top_level(self) -> bool:
        return self.parent_id is None

    def to_dict(self) -> dict:
        d = {name: getattr(self, name) for name in SNAPSHOT_FIELDS}
        d["published_at"] = format_timestamp(self.published_at)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RawComment":
        missing = [k for k in SNAPSHOT_FIELDS if k not in d]
        if missing:
            raise ValueError(f"missing keys: {', '.join(missing)}")
        for k in ("like_count", "reply_count"):
            v = d[k]
            if isinstance(v, bool) or not isinstance(v, int) or v < 0:
                raise ValueError(f"{k} must be a non-negative integer, got {v!r}")
        for k in ("comment_id", "video_id", "author_display_name", "author_channel_id", "text"):
            if not isinstance(d[k], str):
                raise ValueError(f"{k} must be a string")
        if d["parent_id"] is not None and not isinstance(d["parent_id"], str):
            raise ValueError("parent_id must be a string or null")
        return cls(
            comment_id=d["comment_id"],
            parent_id=d["parent_id"],
            video_id=d["video_id"],
            author_display_name=d["author_display_name"],
            author_channel_id=d["author_channel_id"],
            text=d["text"],
            like_count=d["like_count"],
            reply_count=d["reply_count"],
            published_at=parse_timestamp(d["published_at"]),
        )


def parse_timestamp(value: str) -> datetime:
    if not isinstance(value, str):
        raise ValueError(f"timestamp must be a string, got {value!r}")
    ts = datetime.fromisoformat(value.replace("Z", "+00:00"))
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


# ---------------------------------------------------------------------------
# access points

def parse_access_point(value: str) -> AccessPoint:
    """Extract a video ID from a bare ID or a watch/short/embed URL.

    >>> parse_access_point("https://www.youtube.com/watch?v=KtNZV7qezMM")
    AccessPoint(video_id='KtNZV7qezMM')
    """
    value = value.strip()
    if _ID_RE.fullmatch(value):
        return AccessPoint(value)

    parsed = urlparse(value)
    query = parse_qs(parsed.query, keep_blank_values=True)
    if "v" in query:
        candidate = query["v"][0]
    else:
        segments = [s for s in parsed.path.split("/") if s]
        candidate = segments[-1] if segments else ""
        # "watch" on its own is a page name, not an id
        if candidate == "watch" or (not parsed.netloc and not parsed.scheme and "/" not in value):
            candidate = ""
    if not candidate or not _ID_RE.fullmatch(candidate):
        raise MalformedInputError(f"no video id found in {value!r}")
    return AccessPoint(candidate)


# ---------------------------------------------------------------------------
# snapshots

def validate_comments(comments: Sequence[RawComment]) -> None:
    """Check id uniqueness and parent linkage; raise InvariantViolation."""
    by_id: dict[str, RawComment] = {}
    for c in comments:
        if c.comment_id in by_id:
            raise InvariantViolation("duplicate comment id", c.comment_id)
        by_id[c.comment_id] = c
    for c in comments:
        if c.parent_id is None:
            continue
        if c.parent_id == c.comment_id:
            raise InvariantViolation("comment is its own parent", c.comment_id)
        parent = by_id.get(c.parent_id)
        if parent is None:
            raise InvariantViolation(f"unknown parent_id {c.parent_id!r}", c.comment_id)
        if parent.video_id != c.video_id:
            raise InvariantViolation("parent belongs to a different video", c.comment_id)


def dumps_snapshot(comments: Iterable[RawComment]) -> str:
    lines = [
        json.dumps(c.to_dict(), ensure_ascii=False, separators=(",", ":"))
        for c in comments
    ]
    return "".join(line + "\n" for line in lines)


def save_snapshot(comments: Sequence[RawComment], path) -> None:
    Path(path).write_bytes(dumps_snapshot(comments).encode("utf-8"))


def load_snapshot(path) -> list[RawComment]:
    path = Path(path)
    comments = []
    with path.open("r", encoding="utf-8", newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                raise SnapshotParseError(path, lineno, "blank line")
            try:
                comments.append(RawComment.from_dict(json.loads(line)))
            except (ValueError, TypeError, AttributeError) as exc:
                raise SnapshotParseError(path, lineno, str(exc)) from None
    validate_comments(comments)
    return comments


def select_latest(comments: Sequence[RawComment], max_comments: int) -> list[RawComment]:
    """Apply the collection contract to already-fetched comments.

    Per video: the ``max_comments`` newest top-level comments, followed by
    every reply that descends from one of them, in stored order.
    """
    if max_comments < 1:
        raise MalformedInputError("max_comments must be >= 1")
    videos: dict[str, list[RawComment]] = {}
    for c in comments:
        videos.setdefault(c.video_id, []).append(c)

    out: list[RawComment] = []
    for vid_comments in videos.values():
        tops = [c for c in vid_comments if c.parent_id is None]
        tops = sorted(tops, key=lambda c: c.published_at, reverse=True)[:max_comments]
        keep = {c.comment_id for c in tops}
        # stored order may list a reply before its parent, so iterate to a fixpoint
        pending = [c for c in vid_comments if c.parent_id is not None]
        changed = True
        while changed:
            changed = False
            for c in pending:
                if c.comment_id not in keep and c.parent_id in keep:
                    keep.add(c.comment_id)
                    changed = True
        replies = [c for c in pending if c.comment_id in keep]
        out.extend(tops)
        out.extend(replies)
    return out


# ---------------------------------------------------------------------------
# anonymization

def pseudonym(salt: str, channel_id: str) -> str:
    digest = hmac.new(salt.encode("utf-8"), channel_id.encode("utf-8"), hashlib.sha256)
    return "user_" + digest.hexdigest()[:12]


def anonymize(comments: Sequence[RawComment], salt: str) -> list[RawComment]:
    """Replace display names with keyed pseudonyms of the channel id."""
    names: dict[str, str] = {}
    owners: dict[str, str] = {}
    for c in comments:
        if c.author_channel_id in names:
            continue
        alias = pseudonym(salt, c.author_channel_id)
        if alias in owners:
            raise AnonymizationCollision(
                f"pseudonym {alias} shared by {owners[alias]!r} and {c.author_channel_id!r}"
            )
        names[c.author_channel_id] = alias
        owners[alias] = c.author_channel_id
    return [
        RawComment(
            comment_id=c.comment_id,
            parent_id=c.parent_id,
            video_id=c.video_id,
            author_display_name=names[c.author_channel_id],
            author_channel_id=c.author_channel_id,
            text=c.text,
            like_count=c.like_count,
            reply_count=c.reply_count,
            published_at=c.published_at,
        )
        for c in comments
    ]


# ---------------------------------------------------------------------------
# live collection

_AUTH_REASONS = {"keyInvalid", "keyExpired", "accessNotConfigured", "forbidden", "ipRefererBlocked"}
_QUOTA_REASONS = {"quotaExceeded", "dailyLimitExceeded", "rateLimitExceeded", "userRateLimitExceeded"}


def _error_reason(resp) -> str | None:
    try:
        errors = resp.json()["error"]["errors"]
        return errors[0].get("reason")
    except (ValueError, KeyError, IndexError, TypeError):
        return None


class YouTubeClient:
    """Minimal client for the ``commentThreads`` and ``comments`` resources."""

    def __init__(self, config: ApiConfig, session=None, sleep: Callable[[float], None] = time.sleep):
        if not config.api_key:
            raise AuthRejectedError("an API key is required for live collection")
        self.config = config
        self.session = session if session is not None else requests.Session()
        self.sleep = sleep

    def _get(self, resource: str, params: dict) -> dict:
        cfg = self.config
        url = cfg.endpoint_base.rstrip("/") + "/" + resource
        params = {**params, "key": cfg.api_key}
        last_error: ApiError | None = None
        for attempt in range(cfg.max_retries + 1):
            try:
                resp = self.session.get(url, params=params, timeout=cfg.timeout)
            except requests.RequestException as exc:
                last_error = TransportError(f"{resource}: {exc}")
            else:
                status = resp.status_code
                if status == 200:
                    try:
                        payload = resp.json()
                    except ValueError:
                        raise TruncatedPageError(f"{resource}: response is not valid JSON", status) from None
                    if not isinstance(payload, dict) or not isinstance(payload.get("items"), list):
                        raise TruncatedPageError(f"{resource}: page has no item list", status)
                    return payload
                reason = _error_reason(resp)
                if status == 401 or (status in (400, 403) and reason in _AUTH_REASONS):
                    raise AuthRejectedError(f"{resource}: API key rejected ({reason})", status, reason)
                if status == 403 and reason in _QUOTA_REASONS:
                    raise QuotaExhaustedError(f"{resource}: quota exhausted ({reason})", status, reason)
                if status == 429:
                    last_error = QuotaExhaustedError(f"{resource}: rate limited", status, reason)
                elif status >= 500:
                    last_error = TransportError(f"{resource}: server error {status}", status, reason)
                else:
                    raise ApiError(f"{resource}: HTTP {status} ({reason})", status, reason)
            if attempt < cfg.max_retries:
                delay = cfg.backoff_base * 2 ** attempt
                logger.warning("%s; retrying in %.1fs", last_error, delay)
                self.sleep(delay)
        assert last_error is not None
        raise last_error

    def top_level(self, video_id: str, max_comments: int) -> list[tuple[RawComment, int]]:
        """Newest-first top-level comments with their reported reply totals."""
        out: list[tuple[RawComment, int]] = []
        token = None
        while len(out) < max_comments:
            params = {
                "part": "snippet",
                "videoId": video_id,
                "maxResults": self.config.page_size,
                "order": "time",
                "textFormat": "plainText",
            }
            if token:
                params["pageToken"] = token
            page = self._get("commentThreads", params)
            for item in page["items"]:
                try:
                    snippet = item["snippet"]
                    total = int(snippet.get("totalReplyCount", 0))
                    comment = _comment_from_resource(snippet["topLevelComment"], None, video_id, total)
                except (KeyError, TypeError, ValueError) as exc:
                    raise TruncatedPageError(f"commentThreads: malformed item ({exc})") from None
                out.append((comment, total))
            token = page.get("nextPageToken")
            if not token:
                break
        return out[:max_comments]

    def replies(self, parent: RawComment) -> list[RawComment]:
        out = []
        token = None
        while True:
            params = {
                "part": "snippet",
                "parentId": parent.comment_id,
                "maxResults": self.config.page_size,
                "textFormat": "plainText",
            }
            if token:
                params["pageToken"] = token
            page = self._get("comments", params)
            for item in page["items"]:
                try:
                    out.append(_comment_from_resource(item, parent.comment_id, parent.video_id, 0))
                except (KeyError, TypeError, ValueError) as exc:
                    raise TruncatedPageError(f"comments: malformed item ({exc})") from None
            token = page.get("nextPageToken")
            if not token:
                return out

    def collect_video(self, video_id: str, max_comments: int) -> list[RawComment]:
        tops = self.top_level(video_id, max_comments)
        replies: list[RawComment] = []
        for comment, total in tops:
            if total > 0:
                replies.extend(self.replies(comment))
        logger.info("video %s: %d top-level comments, %d replies", video_id, len(tops), len(replies))
        return [c for c, _ in tops] + replies


def _comment_from_resource(resource: dict, parent_id, video_id: str, reply_count: int) -> RawComment:
    s = resource["snippet"]
    channel = s.get("authorChannelId") or {}
    text = s.get("textOriginal")
    if text is None:
        text = s["textDisplay"]
    return RawComment(
        comment_id=resource["id"],
        parent_id=parent_id,
        video_id=s.get("videoId", video_id),
        author_display_name=s["authorDisplayName"],
        author_channel_id=channel.get("value", ""),
        text=text,
        like_count=int(s.get("likeCount", 0)),
        reply_count=reply_count,
        published_at=parse_timestamp(s["publishedAt"]),
    )


def collect(
    config: ApiConfig,
    request: CollectRequest,
    *,
    session_factory: Callable[[], object] | None = None,
    sleep: Callable[[float], None] = time.sleep,
    workers: int = 1,
) -> list[RawComment]:
    """Fetch the newest ``max_comments`` top-level comments of every access
    point plus all of their replies.

    Replies do not count against ``max_comments``. Results are grouped by
    access point in request order; within one access point top-level
    comments come first (newest first), followed by the replies grouped by
    parent.
    """
    factory = session_factory or requests.Session

    def one(ap: AccessPoint) -> list[RawComment]:
        client = YouTubeClient(config, session=factory(), sleep=sleep)
        return client.collect_video(ap.video_id, request.max_comments)

    if workers > 1 and len(request.access_points) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, request.access_points))
    else:
        parts = [one(ap) for ap in request.access_points]
    return [c for part in parts for c in part]
