import random
import string

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from commentscope import ingest
from commentscope.errors import (
    AnonymizationCollision,
    AuthRejectedError,
    InvariantViolation,
    MalformedInputError,
    QuotaExhaustedError,
    SnapshotParseError,
    TransportError,
    TruncatedPageError,
)
from commentscope.ingest import AccessPoint, ApiConfig, CollectRequest
from commentscope.mockapi import MockApiServer

from conftest import comment, random_forest


# -- access points -----------------------------------------------------------

@pytest.mark.parametrize("value", [
    "https://www.youtube.com/watch?v=KtNZV7qezMM",
    "https://youtube.com/watch?feature=share&v=KtNZV7qezMM",
    "https://youtu.be/KtNZV7qezMM",
    "https://www.youtube.com/embed/KtNZV7qezMM",
    "KtNZV7qezMM",
    "  KtNZV7qezMM\n",
])
def test_parse_access_point(value):
    assert ingest.parse_access_point(value) == AccessPoint("KtNZV7qezMM")


@pytest.mark.parametrize("value", ["watch?v=", "", "https://www.youtube.com/watch", "bad id!", "v=%%"])
def test_parse_access_point_rejects(value):
    with pytest.raises(MalformedInputError):
        ingest.parse_access_point(value)


@given(st.text(alphabet=string.ascii_letters + string.digits + "_-", min_size=1, max_size=20),
       st.sampled_from(["{}", "https://www.youtube.com/watch?v={}", "https://youtu.be/{}"]))
def test_parse_access_point_idempotent(vid, template):
    first = ingest.parse_access_point(template.format(vid))
    assert ingest.parse_access_point(first.video_id) == first


def test_request_validation():
    with pytest.raises(MalformedInputError):
        CollectRequest((), 10)
    with pytest.raises(MalformedInputError):
        CollectRequest((AccessPoint("a"),), 0)
    with pytest.raises(MalformedInputError):
        ApiConfig("k", page_size=0)


# -- snapshots ---------------------------------------------------------------

def test_snapshot_roundtrip_and_bytes(tmp_path, news_comments):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    ingest.save_snapshot(news_comments, a)
    ingest.save_snapshot(news_comments, b)
    assert a.read_bytes() == b.read_bytes()
    back = ingest.load_snapshot(a)
    assert back == news_comments
    # record count from the raw file, independent of the loader
    assert a.read_bytes().count(b"\n") == 252


def test_snapshot_empty(tmp_path):
    p = tmp_path / "e.jsonl"
    ingest.save_snapshot([], p)
    assert p.read_bytes() == b""
    assert ingest.load_snapshot(p) == []


def test_snapshot_unicode_is_verbatim(tmp_path):
    c = comment("x1", text="Grüße 👋  two  spaces")
    p = tmp_path / "u.jsonl"
    ingest.save_snapshot([c], p)
    assert "Grüße 👋".encode() in p.read_bytes()
    assert ingest.load_snapshot(p) == [c]


def test_snapshot_key_order(tmp_path):
    p = tmp_path / "k.jsonl"
    ingest.save_snapshot([comment("x1")], p)
    line = p.read_text()
    positions = [line.index(f'"{k}"') for k in ingest.SNAPSHOT_FIELDS]
    assert positions == sorted(positions)


@pytest.mark.parametrize("body, err", [
    ('{"comment_id": "a"}\n', SnapshotParseError),
    ("not json\n", SnapshotParseError),
    ("\n", SnapshotParseError),
])
def test_snapshot_parse_errors(tmp_path, body, err):
    p = tmp_path / "bad.jsonl"
    p.write_text(body)
    with pytest.raises(err) as info:
        ingest.load_snapshot(p)
    assert info.value.line == 1


def test_snapshot_negative_count_rejected(tmp_path):
    p = tmp_path / "neg.jsonl"
    p.write_text(ingest.dumps_snapshot([comment("a")]).replace('"like_count":0', '"like_count":-1'))
    with pytest.raises(SnapshotParseError):
        ingest.load_snapshot(p)


def test_snapshot_unknown_parent(tmp_path):
    p = tmp_path / "orphan.jsonl"
    ingest.save_snapshot([comment("a"), comment("b", "zzz")], p)
    with pytest.raises(InvariantViolation) as info:
        ingest.load_snapshot(p)
    assert info.value.comment_id == "b"


@pytest.mark.parametrize("rows", [
    [comment("a"), comment("a")],
    [comment("a", "a")],
    [comment("a"), comment("b", "a", video="other")],
])
def test_validate_comments(rows):
    with pytest.raises(InvariantViolation):
        ingest.validate_comments(rows)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 40))
def test_snapshot_roundtrip_property(tmp_path_factory, seed, n):
    rows = random_forest(random.Random(seed), n)
    p = tmp_path_factory.mktemp("snap") / "s.jsonl"
    ingest.save_snapshot(rows, p)
    assert ingest.load_snapshot(p) == rows


# -- select_latest -------------------------------------------------------------

def test_select_latest_keeps_all_replies():
    rows = [comment("t1", minutes=1), comment("t2", minutes=5), comment("t3", minutes=3),
            comment("r1", "t2"), comment("r2", "t2"), comment("r3", "t1"), comment("r4", "r1")]
    out = ingest.select_latest(rows, 1)
    assert [c.comment_id for c in out] == ["t2", "r1", "r2", "r4"]
    out = ingest.select_latest(rows, 2)
    assert [c.comment_id for c in out] == ["t2", "t3", "r1", "r2", "r4"]


@given(st.integers(0, 10_000), st.integers(1, 60), st.integers(1, 30))
def test_replies_not_counted(seed, n, cap):
    rows = random_forest(random.Random(seed), n)
    out = ingest.select_latest(rows, cap)
    tops = [c for c in out if c.parent_id is None]
    assert len(tops) == min(cap, sum(c.parent_id is None for c in rows))
    ingest.validate_comments(out)


# -- anonymization -------------------------------------------------------------

def test_anonymize_basics(news_comments):
    out = ingest.anonymize(news_comments, "s1")
    by_channel = {}
    for c in out:
        by_channel.setdefault(c.author_channel_id, set()).add(c.author_display_name)
    assert all(len(v) == 1 for v in by_channel.values())
    names = {c.author_display_name for c in out}
    assert len(names) == 202
    assert all(n.startswith("user_") and len(n) == 17 for n in names)
    other = {c.author_display_name for c in ingest.anonymize(news_comments, "s2")}
    assert names.isdisjoint(other)
    assert [c.text for c in out] == [c.text for c in news_comments]


def test_pseudonym_is_hmac():
    import hashlib
    import hmac
    want = "user_" + hmac.new(b"salt", b"UCabc", hashlib.sha256).hexdigest()[:12]
    assert ingest.pseudonym("salt", "UCabc") == want


def test_anonymize_collision(monkeypatch):
    monkeypatch.setattr(ingest, "pseudonym", lambda salt, cid: "user_same")
    with pytest.raises(AnonymizationCollision):
        ingest.anonymize([comment("a", channel="X"), comment("b", channel="Y")], "s")


# -- live collection against the local mock ----------------------------------

def _config(srv, **kw):
    kw.setdefault("page_size", 2)
    kw.setdefault("backoff_base", 0.0)
    return ApiConfig(api_key="k", endpoint_base=srv.endpoint, **kw)


def _req(n, vid="vid"):
    return CollectRequest((AccessPoint(vid),), n)


def test_collect_one_comment_with_three_replies():
    rows = [comment("old", minutes=0), comment("new", minutes=9, replies=3),
            comment("r1", "new"), comment("r2", "new"), comment("r3", "new"), comment("r0", "old")]
    with MockApiServer(rows, api_key="k") as srv:
        out = ingest.collect(_config(srv), _req(1))
    assert [c.comment_id for c in out] == ["new", "r1", "r2", "r3"]
    assert out[0].reply_count == 3


def test_collect_five_top_level_cap_three():
    # hand-enumerated: newest three are t5, t4, t3; t4 has two replies, t1 one
    rows = [comment(f"t{i}", minutes=i) for i in range(1, 6)]
    rows += [comment("a", "t4"), comment("b", "t4"), comment("c", "t1")]
    with MockApiServer(rows, api_key="k") as srv:
        out = ingest.collect(_config(srv), _req(3))
    assert [c.comment_id for c in out] == ["t5", "t4", "t3", "a", "b"]
    assert all(c.parent_id == "t4" for c in out[3:])


def test_collect_matches_offline_selection(news_comments):
    with MockApiServer(news_comments, api_key="k") as srv:
        live = ingest.collect(_config(srv, page_size=50), _req(200, "KtNZV7qezMM"))
    assert len(live) == 252
    assert sorted(c.comment_id for c in live) == sorted(c.comment_id for c in news_comments)
    by_id = {c.comment_id: c for c in news_comments}
    assert all(c == by_id[c.comment_id] for c in live)


def test_collect_several_videos_parallel():
    rows = [comment("a1", video="A", minutes=1), comment("a2", "a1", video="A"),
            comment("b1", video="B", minutes=2)]
    with MockApiServer(rows, api_key="k") as srv:
        req = CollectRequest((AccessPoint("B"), AccessPoint("A")), 5)
        serial = ingest.collect(_config(srv), req)
        parallel = ingest.collect(_config(srv), req, workers=2)
    assert [c.comment_id for c in serial] == ["b1", "a1", "a2"]
    assert parallel == serial


def test_collect_retries_then_succeeds():
    sleeps = []
    with MockApiServer([comment("t")], api_key="k") as srv:
        srv.fail_next(503, times=2)
        out = ingest.collect(_config(srv, max_retries=3, backoff_base=0.5), _req(5), sleep=sleeps.append)
    assert [c.comment_id for c in out] == ["t"]
    assert sleeps == [0.5, 1.0]


def test_collect_gives_up_after_retries():
    with MockApiServer([comment("t")], api_key="k") as srv:
        srv.fail_next(500, times=5)
        with pytest.raises(TransportError):
            ingest.collect(_config(srv, max_retries=2), _req(5), sleep=lambda s: None)
        assert len(srv.requests) == 3


def test_collect_rate_limit_exhausts():
    with MockApiServer([comment("t")], api_key="k") as srv:
        srv.fail_next(429, times=3)
        with pytest.raises(QuotaExhaustedError):
            ingest.collect(_config(srv, max_retries=1), _req(5), sleep=lambda s: None)


def test_collect_quota_is_terminal():
    with MockApiServer([comment("t")], api_key="k") as srv:
        srv.fail_next(403, "quotaExceeded")
        with pytest.raises(QuotaExhaustedError):
            ingest.collect(_config(srv), _req(5), sleep=lambda s: None)
        assert len(srv.requests) == 1


def test_collect_bad_key():
    with MockApiServer([comment("t")], api_key="right") as srv:
        cfg = ApiConfig(api_key="wrong", endpoint_base=srv.endpoint)
        with pytest.raises(AuthRejectedError):
            ingest.collect(cfg, _req(5), sleep=lambda s: None)
        assert len(srv.requests) == 1


def test_collect_missing_key():
    with pytest.raises(AuthRejectedError):
        ingest.YouTubeClient(ApiConfig(api_key=""))


def test_collect_truncated_page():
    with MockApiServer([comment("t"), comment("r", "t")], api_key="k") as srv:
        srv.truncate_next("comments")
        with pytest.raises(TruncatedPageError):
            ingest.collect(_config(srv), _req(5), sleep=lambda s: None)


def test_collect_unreachable():
    cfg = ApiConfig(api_key="k", endpoint_base="http://127.0.0.1:9/none", max_retries=1,
                    backoff_base=0.0, timeout=2.0)
    with pytest.raises(TransportError):
        ingest.collect(cfg, _req(1), sleep=lambda s: None)
