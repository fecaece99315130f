"""Synthetic comment snapshots bundled with the package.

``news`` imitates a 200-comment election news video: 252 rows (200
top-level comments, 52 replies) from 202 authors whose aggregated table
reproduces a fixed set of published summary statistics. The four topic
snapshots (music, sports, politics, games) differ in how deep the reply
chains run and how often topic buzzwords appear.

The snapshots are generated deterministically by the builders below and
stored as JSON Lines under ``commentscope/data``; run
``python -m commentscope.fixtures`` to regenerate them.
"""

from __future__ import annotations

import random
import string
from datetime import datetime, timedelta, timezone
from importlib import resources
from pathlib import Path

from .ingest import RawComment, dumps_snapshot, load_snapshot
from .network import BuzzwordQuery

NEWS_VIDEO_ID = "KtNZV7qezMM"
FOCUS_CHANNEL_ID = "UCtICekaZ9ptKjKHPBJxBSbA"
FOCUS_FIRST_SENTENCE = "Being a sore loser isn't grounds for a lawsuit."
FOCUS_POSITION = 16          # row of the focus author in the aggregated table
FOCUS_NODE_INDICES = (134, 230, 235, 236)
NEWS_QUERY = BuzzwordQuery.any_of("donald trump", "president", "white house")

TOPICS = ("music", "sports", "politics", "games")
TOPIC_VIDEO_IDS = {
    "music": "mU5icV1de0a",
    "sports": "sP0rtsM4tch",
    "politics": "p0LiT1csDeb",
    "games": "gAm3sPl4y_x",
}
TOPIC_QUERIES = {
    "music": BuzzwordQuery.any_of("album", "chorus", "concert"),
    "sports": BuzzwordQuery.any_of("referee", "penalty", "championship"),
    "politics": BuzzwordQuery.any_of("president", "election", "senate"),
    "games": BuzzwordQuery.any_of("boss fight", "patch", "speedrun"),
}

_ID_CHARS = string.ascii_letters + string.digits + "-_"
_T0 = datetime(2020, 11, 6, 12, 0, tzinfo=timezone.utc)

_FILLER_WORDS = (
    "the", "this", "that", "is", "was", "just", "really", "not", "so", "and",
    "people", "vote", "votes", "count", "counted", "speech", "statement", "news",
    "court", "fair", "result", "results", "state", "states", "country", "time",
    "media", "watch", "said", "every", "legal", "ballots", "week", "right",
    "wrong", "again", "never", "always", "clearly", "honestly", "think", "know",
    "we", "they", "he", "you", "all", "more", "than", "what", "why", "how",
    "wait", "see", "still", "over", "done", "real", "nobody", "everyone",
)


# ---------------------------------------------------------------------------
# helpers

def _rand_id(rng: random.Random, n: int) -> str:
    return "".join(rng.choice(_ID_CHARS) for _ in range(n))


def _sentence(rng: random.Random, n_words: int, phrase: str | None = None,
              vocab=_FILLER_WORDS) -> str:
    """A text of exactly ``n_words`` space-separated tokens."""
    words = [rng.choice(vocab) for _ in range(n_words)]
    if phrase is not None:
        ptoks = phrase.split(" ")
        if len(ptoks) <= n_words:
            at = rng.randrange(n_words - len(ptoks) + 1)
            words[at:at + len(ptoks)] = ptoks
    words[0] = words[0].capitalize()
    words[-1] += rng.choice((".", ".", "!", "?", ""))
    return " ".join(words)


def _split(rng: random.Random, total: int, parts: int) -> list[int]:
    """Random composition of ``total`` into ``parts`` positive integers."""
    if parts == 1:
        return [total]
    cuts = sorted(rng.sample(range(1, total), parts - 1))
    bounds = [0] + cuts + [total]
    return [b - a for a, b in zip(bounds, bounds[1:])]


def _display_names(rng: random.Random, n: int) -> list[str]:
    first = ("Amber", "Blue", "Cedar", "Dusty", "Echo", "Frost", "Gold", "Harbor",
             "Iron", "Jade", "Kite", "Lunar", "Maple", "Noble", "Opal", "Pine",
             "Quiet", "River", "Stone", "Tidal", "Umber", "Vale", "Willow", "Zephyr")
    second = ("Fox", "Heron", "Otter", "Lynx", "Crow", "Badger", "Falcon", "Moth",
              "Wren", "Pike", "Hare", "Stag", "Finch", "Toad", "Seal", "Newt")
    names: set[str] = set()
    while len(names) < n:
        names.add(f"{rng.choice(first)}{rng.choice(second)}{rng.randrange(100):02d}")
    return sorted(names)


# ---------------------------------------------------------------------------
# the news snapshot

# Rows of the aggregated table pinned by published outputs:
# position -> (replies, likes, words, comments)
_PINNED = {
    1: (0, 0, 13, 2), 2: (0, 7, 21, 4), 3: (1, 2, 58, 1), 4: (0, 0, 5, 1),
    5: (0, 2, 11, 1), 6: (0, 0, 13, 1),
    # rows 7-19 that must fail the default identification thresholds
    7: (0, 1, 9, 1), 8: (0, 0, 3, 1), 9: (0, 0, 27, 1), 11: (0, 1, 44, 1),
    12: (0, 0, 7, 2), 14: (0, 3, 2, 1), 15: (0, 0, 12, 1), 18: (1, 0, 16, 1),
    # rows shown by the identification and ranking outputs
    10: (1, 6, 36, 1), 13: (1, 15, 19, 1), 16: (10, 58, 58, 4), 17: (2, 6, 31, 2),
    19: (3, 14, 48, 1), 71: (1, 39, 6, 1), 122: (2, 17, 17, 2), 144: (1, 21, 9, 1),
    180: (0, 26, 8, 1),
    # the other two relevant authors, the most prolific and the wordiest
    30: (2, 9, 112, 3), 35: (1, 4, 64, 2), 57: (0, 1, 203, 7), 88: (0, 3, 561, 5),
    # near miss on likes alone; rows 3, 88 and 122 miss on comments, replies, words
    44: (1, 1, 40, 2),
}

_N_AUTHORS = 202
_N_TOP_LEVEL = 200
_REPLIES_BEFORE_FOCUS = 26   # replies listed before the focus thread


def _filler_columns() -> dict[str, list[int]]:
    n = _N_AUTHORS - len(_PINNED)
    replies = [1] * 9 + [2, 2, 3, 3, 3, 3]
    likes = [2] * 10 + [3] * 6 + [4] * 4 + [5, 6, 7, 8, 10] + [1] * 27
    comments = [2] * 18 + [3] * 4
    low_words = (
        [1] * 5 + [2] * 8 + [3] * 10 + [4] * 10 + [5] * 12   # 45 below six
        + [6] * 9
        + [7] * 8 + [8] * 8 + [9] * 7 + [10] * 7 + [11] * 7
        + [12] * 3
        + list(range(13, 25)) * 3 + [14, 16, 18, 20]
        + [25, 26, 26, 27]
    )
    high_words = list(range(28, 37)) + [38, 42, 44, 46, 48, 50] + [53, 56, 59, 62, 65, 68, 72, 76, 80,
                                                                 85, 90, 95, 100, 110, 120, 130, 140,
                                                                 155, 170, 190]
    words_total = 5478 - sum(v[2] for v in _PINNED.values())
    high_words.append(words_total - sum(low_words) - sum(high_words))
    cols = {
        "replies": replies + [0] * (n - len(replies)),
        "likes": likes + [0] * (n - len(likes)),
        "words": low_words + high_words,
        "comments": comments + [1] * (n - len(comments)),
    }
    assert all(len(c) == n for c in cols.values()), {k: len(v) for k, v in cols.items()}
    assert high_words[-1] >= 28
    return cols


def _author_table(rng: random.Random) -> list[tuple[int, int, int, int]]:
    free = [p for p in range(1, _N_AUTHORS + 1) if p not in _PINNED]
    cols = _filler_columns()
    for col in cols.values():
        rng.shuffle(col)
    rows = {p: [cols[k][i] for k in ("replies", "likes", "words", "comments")]
            for i, p in enumerate(free)}

    # comments need at least one word each; move multi-comment values onto wordier rows
    def swap_comments(p, pred):
        for q in free:
            if pred(rows[q]):
                rows[p][3], rows[q][3] = rows[q][3], rows[p][3]
                return
        raise AssertionError("no swap partner")

    for p in free:
        if rows[p][3] > rows[p][2]:
            swap_comments(p, lambda r, p=p: r[3] == 1 and r[2] >= rows[p][3])
    # only the pinned authors may meet all four means
    for p in free:
        r = rows[p]
        if r[0] >= 1 and r[1] >= 2 and r[2] >= 28 and r[3] >= 2:
            swap_comments(p, lambda s: s[3] == 1 and not (s[0] >= 1 and s[1] >= 2 and s[2] >= 28)
                          and s[2] >= r[3])
    table = []
    for p in range(1, _N_AUTHORS + 1):
        table.append(tuple(_PINNED[p]) if p in _PINNED else tuple(rows[p]))
    return table


def build_news_comments(seed: int = 20201106) -> list[RawComment]:
    rng = random.Random(seed)
    table = _author_table(rng)
    names = _display_names(rng, _N_AUTHORS)
    channels = {}
    for pos in range(1, _N_AUTHORS + 1):
        channels[pos] = FOCUS_CHANNEL_ID if pos == FOCUS_POSITION else "UC" + _rand_id(rng, 22)
    assert len(set(channels.values())) == _N_AUTHORS

    # per-author comment plan: one top-level comment, extra comments are replies
    reply_only = [p for p in range(1, _N_AUTHORS + 1)
                  if p not in _PINNED and table[p - 1][0] == 0 and table[p - 1][3] == 1]
    reply_only = sorted(rng.sample(reply_only, _N_AUTHORS - _N_TOP_LEVEL))
    top_authors = [p for p in range(1, _N_AUTHORS + 1) if p not in reply_only]
    reply_pool = list(reply_only)
    for p in top_authors:
        if p != FOCUS_POSITION:
            reply_pool += [p] * (table[p - 1][3] - 1)

    # word and like budgets per message
    words_of: dict[int, list[int]] = {}
    for p in range(1, _N_AUTHORS + 1):
        if p == FOCUS_POSITION:
            words_of[p] = [9, 17, 20, 12]
        else:
            _, _, w, c = table[p - 1]
            words_of[p] = _split(rng, w, c)

    # top-level order: the focus comment sits at 134 with 26 replies listed before its thread
    others = [p for p in top_authors if p != FOCUS_POSITION]
    rng.shuffle(others)
    bearing = [p for p in others if table[p - 1][0] > 0]
    plain = [p for p in others if table[p - 1][0] == 0]
    before, acc = [], 0
    for p in sorted(bearing, key=lambda q: -table[q - 1][0]):
        if acc + table[p - 1][0] <= _REPLIES_BEFORE_FOCUS:
            before.append(p)
            acc += table[p - 1][0]
    assert acc == _REPLIES_BEFORE_FOCUS
    after = [p for p in bearing if p not in before]
    n_before = FOCUS_NODE_INDICES[0] - 1
    head = before + plain[: n_before - len(before)]
    tail = after + plain[n_before - len(before):]
    rng.shuffle(head)
    rng.shuffle(tail)
    order = head + [FOCUS_POSITION] + tail
    assert len(order) == _N_TOP_LEVEL and order[n_before] == FOCUS_POSITION

    rng.shuffle(reply_pool)
    query_phrases = ("donald trump", "president", "white house")
    comments: list[RawComment] = []
    next_word = {p: 0 for p in range(1, _N_AUTHORS + 1)}

    def take_words(p):
        w = words_of[p][next_word[p]]
        next_word[p] += 1
        return w

    def make_text(p, n_words):
        if p == FOCUS_POSITION and next_word[p] == 1:
            return FOCUS_FIRST_SENTENCE
        phrase = rng.choice(query_phrases) if rng.random() < 0.18 else None
        return _sentence(rng, n_words, phrase)

    tops = []
    for i, p in enumerate(order, start=1):
        replies_n, likes, _, _ = table[p - 1]
        n_words = take_words(p)
        text = make_text(p, n_words)
        c = RawComment(
            comment_id="Ug" + _rand_id(rng, 20) + "4AaABAg",
            parent_id=None,
            video_id=NEWS_VIDEO_ID,
            author_display_name=names[p - 1],
            author_channel_id=channels[p],
            text=text,
            like_count=52 if p == FOCUS_POSITION else (0 if p in reply_only else likes),
            reply_count=replies_n,
            published_at=_T0 - timedelta(minutes=7 * i),
        )
        tops.append(c)
    comments.extend(tops)

    focus_reply_likes = iter([3, 2, 1])
    focus_texts = iter([
        None,
        "Funny how the White House keeps repeating the same claim while every court keeps "
        "throwing the cases out again today",
        None,
    ])
    for parent in tops:
        n = parent.reply_count
        if n == 0:
            continue
        if parent.author_channel_id == FOCUS_CHANNEL_ID:
            slots = [None] * n
            for k in (3, 8, 9):
                slots[k] = FOCUS_POSITION
            for k in range(n):
                if slots[k] is None:
                    slots[k] = reply_pool.pop()
        else:
            slots = [reply_pool.pop() for _ in range(n)]
        for j, p in enumerate(slots):
            n_words = take_words(p)
            if p == FOCUS_POSITION:
                likes = next(focus_reply_likes)
                text = next(focus_texts)
                if text is None:
                    text = _sentence(rng, n_words)
                assert len(text.split(" ")) == n_words
            else:
                likes = table[p - 1][1] if p in reply_only else 0
                text = make_text(p, n_words)
            comments.append(RawComment(
                comment_id=parent.comment_id + "." + _rand_id(rng, 22),
                parent_id=parent.comment_id,
                video_id=NEWS_VIDEO_ID,
                author_display_name=names[p - 1],
                author_channel_id=channels[p],
                text=text,
                like_count=likes,
                reply_count=0,
                published_at=parent.published_at + timedelta(minutes=3 * j + 2),
            ))
    assert not reply_pool
    return comments


# ---------------------------------------------------------------------------
# topic snapshots

_TOPIC_VOCAB = {
    "music": ("song", "voice", "beat", "lyrics", "guitar", "drums", "vibe", "track", "live", "band"),
    "sports": ("match", "team", "coach", "goal", "keeper", "season", "fans", "score", "league", "pass"),
    "politics": ("debate", "policy", "vote", "party", "campaign", "law", "speech", "tax", "poll", "court"),
    "games": ("level", "quest", "player", "map", "loot", "graphics", "mode", "lag", "build", "run"),
}

# (top-level comments, reply-chain depth, buzzword probability, replies per thread)
_TOPIC_SHAPE = {
    "music": (60, 1, 0.10, (0, 3)),
    "games": (60, 1, 0.12, (0, 3)),
    "sports": (60, 4, 0.36, (0, 3)),
    "politics": (60, 5, 0.42, (0, 3)),
}


def build_topic_comments(topic: str, seed: int = 7) -> list[RawComment]:
    """Snapshot for one topic. Deep topics grow reply chains (replies to
    replies) of up to ``depth`` levels below the top-level comment."""
    if topic not in _TOPIC_SHAPE:
        raise KeyError(f"unknown topic {topic!r}")
    n_top, depth, p_buzz, (lo, hi) = _TOPIC_SHAPE[topic]
    rng = random.Random(f"{topic}-{seed}")
    video_id = TOPIC_VIDEO_IDS[topic]
    vocab = _FILLER_WORDS + _TOPIC_VOCAB[topic]
    phrases = TOPIC_QUERIES[topic].groups[0]
    authors = [("UC" + _rand_id(rng, 22), f"{topic}_fan_{i:03d}") for i in range(n_top)]

    def text():
        phrase = rng.choice(phrases) if rng.random() < p_buzz else None
        return _sentence(rng, rng.randint(3, 30), phrase, vocab)

    # (comment dict, parent key, children) assembled first, ids assigned after
    tops = []
    replies = []
    for i in range(n_top):
        cid = "Ug" + _rand_id(rng, 20) + "4AaABAg"
        tops.append(dict(comment_id=cid, parent_id=None, author=rng.choice(authors), text=text(),
                         likes=rng.choice((0, 0, 0, 1, 2, 5)),
                         published_at=_T0 - timedelta(minutes=5 * (i + 1))))
        frontier = [(cid, 1)]
        n_direct = rng.randint(lo, hi)
        for k in range(n_direct):
            rid = cid + "." + _rand_id(rng, 22)
            replies.append(dict(comment_id=rid, parent_id=cid, author=rng.choice(authors), text=text(),
                                likes=rng.choice((0, 0, 1)),
                                published_at=tops[-1]["published_at"] + timedelta(minutes=k + 1)))
            frontier.append((rid, 2))
        # deep topics: some threads keep going, each reply answering the previous one
        if depth > 1 and n_direct and rng.random() < 0.5:
            parent, level = frontier[-1]
            while level < depth + 1 and rng.random() < 0.8:
                rid = cid + "." + _rand_id(rng, 22)
                replies.append(dict(comment_id=rid, parent_id=parent, author=rng.choice(authors),
                                    text=text(), likes=rng.choice((0, 1)),
                                    published_at=tops[-1]["published_at"] + timedelta(minutes=10 + level)))
                parent, level = rid, level + 1

    child_count: dict[str, int] = {}
    for r in replies:
        child_count[r["parent_id"]] = child_count.get(r["parent_id"], 0) + 1
    out = []
    for d in tops + replies:
        channel, name = d["author"]
        out.append(RawComment(
            comment_id=d["comment_id"], parent_id=d["parent_id"], video_id=video_id,
            author_display_name=name, author_channel_id=channel, text=d["text"],
            like_count=d["likes"], reply_count=child_count.get(d["comment_id"], 0),
            published_at=d["published_at"],
        ))
    return out


# ---------------------------------------------------------------------------
# bundled files

def _data_path(name: str) -> Path:
    return Path(str(resources.files("commentscope") / "data" / name))


def news_snapshot_path() -> Path:
    return _data_path("news_KtNZV7qezMM.jsonl")


def topic_snapshot_path(topic: str) -> Path:
    if topic not in TOPICS:
        raise KeyError(f"unknown topic {topic!r}")
    return _data_path(f"topic_{topic}.jsonl")


def load_news() -> list[RawComment]:
    return load_snapshot(news_snapshot_path())


def load_topic(topic: str) -> list[RawComment]:
    return load_snapshot(topic_snapshot_path(topic))


def write_bundled(directory: Path | None = None) -> list[Path]:
    directory = directory or Path(__file__).parent / "data"
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    targets = [("news_KtNZV7qezMM.jsonl", build_news_comments())]
    targets += [(f"topic_{t}.jsonl", build_topic_comments(t)) for t in TOPICS]
    for name, comments in targets:
        path = directory / name
        path.write_bytes(dumps_snapshot(comments).encode("utf-8"))
        written.append(path)
    return written


if __name__ == "__main__":
    for p in write_bundled():
        print(p)
