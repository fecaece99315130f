"""Per-author feature table, summaries, rankings and threshold subsets."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyInputError, InvariantViolation, MalformedInputError
from .ingest import RawComment

FEATURES = ("replies", "likes", "words", "comments")
CSV_HEADER = ("author",) + FEATURES


@dataclass(frozen=True)
class CommentRow:
    author: str
    sentence: str
    replies: int
    likes: int


@dataclass(frozen=True)
class AuthorRecord:
    author: str
    replies: int
    likes: int
    words: int
    comments: int

    def values(self) -> tuple[int, int, int, int]:
        return (self.replies, self.likes, self.words, self.comments)


@dataclass(frozen=True)
class SixNumber:
    min: float
    first_quartile: float
    median: float
    mean: float
    third_quartile: float
    max: float


@dataclass(frozen=True)
class SummaryStats:
    replies: SixNumber
    likes: SixNumber
    words: SixNumber
    comments: SixNumber

    def means(self) -> tuple[float, float, float, float]:
        return tuple(getattr(self, f).mean for f in FEATURES)


@dataclass(frozen=True)
class ActivityThresholds:
    min_replies: float = 1
    min_likes: float = 1
    min_words: float = 10
    min_comments: float = 1

    def __post_init__(self):
        for f in fields(self):
            if not np.isfinite(getattr(self, f.name)):
                raise MalformedInputError(f"{f.name} must be finite")

    @classmethod
    def parse(cls, text: str) -> "ActivityThresholds":
        """Parse the ``r,l,w,c`` flag syntax."""
        parts = text.split(",")
        if len(parts) != 4:
            raise MalformedInputError(f"expected four comma-separated thresholds, got {text!r}")
        try:
            return cls(*(float(p) for p in parts))
        except ValueError:
            raise MalformedInputError(f"non-numeric threshold in {text!r}") from None

    def values(self) -> tuple[float, float, float, float]:
        return (self.min_replies, self.min_likes, self.min_words, self.min_comments)


def to_rows(comments: Iterable[RawComment]) -> list[CommentRow]:
    return [
        CommentRow(c.author_display_name, c.text, c.reply_count, c.like_count)
        for c in comments
    ]


def word_count(sentence: str, normalize_whitespace: bool = False) -> int:
    """Number of pieces obtained by splitting on single spaces.

    Runs of spaces produce empty pieces, and those count: ``"a  b"`` is three
    words. With ``normalize_whitespace`` the string is split on any
    whitespace run instead.
    """
    if normalize_whitespace:
        return len(sentence.split())
    if sentence == "":
        return 0
    return len(sentence.split(" "))


def aggregate_by_author(rows: Sequence[CommentRow], normalize_whitespace: bool = False) -> list[AuthorRecord]:
    """Sum replies, likes and words per author and count their rows.

    The result is sorted by author name in byte order.
    """
    totals: dict[str, list[int]] = {}
    for row in rows:
        acc = totals.setdefault(row.author, [0, 0, 0, 0])
        acc[0] += row.replies
        acc[1] += row.likes
        acc[2] += word_count(row.sentence, normalize_whitespace)
        acc[3] += 1
    # UTF-8 preserves code point order, so sorting str sorts bytes
    return [AuthorRecord(a, *totals[a]) for a in sorted(totals)]


def describe(values: Sequence[float]) -> SixNumber:
    """Six-number summary with linearly interpolated quartiles."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise EmptyInputError("cannot summarise an empty sample")
    q = np.quantile(arr, [0.0, 0.25, 0.5, 0.75, 1.0], method="linear")
    return SixNumber(
        min=float(q[0]),
        first_quartile=float(q[1]),
        median=float(q[2]),
        mean=float(arr.mean()),
        third_quartile=float(q[3]),
        max=float(q[4]),
    )


def summary_stats(records: Sequence[AuthorRecord]) -> SummaryStats:
    if not records:
        raise EmptyInputError("summary of an empty author table")
    return SummaryStats(**{f: describe([getattr(r, f) for r in records]) for f in FEATURES})


def filter_active(records: Sequence[AuthorRecord], thresholds: ActivityThresholds) -> list[AuthorRecord]:
    lo = thresholds.values()
    return [r for r in records if all(v >= t for v, t in zip(r.values(), lo))]


def rank_by(records: Sequence[AuthorRecord], key: str) -> list[AuthorRecord]:
    """Stable descending sort on one feature."""
    if key not in FEATURES:
        raise MalformedInputError(f"unknown ranking key {key!r}; choose from {', '.join(FEATURES)}")
    return sorted(records, key=lambda r: getattr(r, key), reverse=True)


def sentences_of(comments: Iterable[RawComment], author_display_name: str) -> list[str]:
    return [c.text for c in comments if c.author_display_name == author_display_name]


# ---------------------------------------------------------------------------
# CSV interchange

def dumps_authors_csv(records: Iterable[AuthorRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        if "\x00" in r.author:
            raise InvariantViolation(f"author name {r.author!r} contains NUL")
        if "\r" in r.author:
            # with a "\n" terminator the writer leaves a lone CR unquoted
            quoted = '"' + r.author.replace('"', '""') + '"'
            buf.write(",".join((quoted,) + tuple(map(str, r.values()))) + "\n")
        else:
            writer.writerow((r.author,) + r.values())
    return buf.getvalue()


def write_authors_csv(records: Iterable[AuthorRecord], path) -> None:
    Path(path).write_bytes(dumps_authors_csv(records).encode("utf-8"))


def read_authors_csv(path) -> list[AuthorRecord]:
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return []
        if tuple(header) != CSV_HEADER:
            raise InvariantViolation(f"{path}: unexpected header {header!r}")
        out = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(CSV_HEADER):
                raise InvariantViolation(f"{path}:{lineno}: expected {len(CSV_HEADER)} fields")
            try:
                counts = [int(v) for v in row[1:]]
            except ValueError:
                raise InvariantViolation(f"{path}:{lineno}: non-integer count") from None
            if min(counts) < 0:
                raise InvariantViolation(f"{path}:{lineno}: negative count")
            if counts[3] < 1:
                raise InvariantViolation(f"{path}:{lineno}: an author needs at least one comment")
            out.append(AuthorRecord(row[0], *counts))
    return out
