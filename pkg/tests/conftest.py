import random
from datetime import datetime, timedelta, timezone

import pytest

from commentscope import dataset, fixtures, network, relevance
from commentscope.ingest import RawComment

T0 = datetime(2021, 3, 1, tzinfo=timezone.utc)


def comment(cid, parent=None, *, video="vid", author="A", channel=None, text="hello",
            likes=0, replies=0, minutes=0):
    return RawComment(
        comment_id=cid,
        parent_id=parent,
        video_id=video,
        author_display_name=author,
        author_channel_id=channel or f"UC_{author}",
        text=text,
        like_count=likes,
        reply_count=replies,
        published_at=T0 + timedelta(minutes=minutes),
    )


def random_forest(rng: random.Random, n: int, video="vid", vocab=("alpha", "beta", "gamma", "delta")):
    """Random comment forest in collection order (parents listed before
    children), with reply_count equal to the number of direct children."""
    parents = []
    for i in range(n):
        if i == 0 or rng.random() < 0.35:
            parents.append(None)
        else:
            parents.append(rng.randrange(i))
    kids = [0] * n
    for p in parents:
        if p is not None:
            kids[p] += 1
    out = []
    for i, p in enumerate(parents):
        words = " ".join(rng.choice(vocab) for _ in range(rng.randint(1, 6)))
        out.append(comment(f"c{i}", None if p is None else f"c{p}", video=video,
                           author=f"u{rng.randrange(max(1, n // 3))}", text=words,
                           likes=rng.randrange(5), replies=kids[i], minutes=i))
    return out


@pytest.fixture(scope="session")
def news_comments():
    return fixtures.load_news()


@pytest.fixture(scope="session")
def news_records(news_comments):
    return dataset.aggregate_by_author(dataset.to_rows(news_comments))


@pytest.fixture(scope="session")
def news_stats(news_records):
    return dataset.summary_stats(news_records)


@pytest.fixture(scope="session")
def news_design(news_records, news_stats):
    return relevance.design_matrix(relevance.binarize(news_records, news_stats))


@pytest.fixture(scope="session")
def news_fit(news_design):
    return relevance.fit_logistic(news_design)


@pytest.fixture(scope="session")
def news_graph(news_comments):
    return network.build_activity_graph(news_comments, fixtures.NEWS_VIDEO_ID)


# -- acceptance report ---------------------------------------------------------------

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
