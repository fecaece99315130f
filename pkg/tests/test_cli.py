import json
import subprocess
import sys

import pytest

from commentscope import cli, dataset, fixtures, ingest, relevance
from commentscope.mockapi import MockApiServer

from conftest import comment

NEWS = str(fixtures.news_snapshot_path())
QUERY = '"donald trump" | president | "white house"'


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def authors_csv(tmp_path, capsys):
    path = tmp_path / "authors.csv"
    assert run(capsys, "preprocess", "--in", NEWS, "--out", str(path))[0] == 0
    return path


def test_pipe_fidelity(tmp_path, capsys):
    snap, table, model = tmp_path / "s.jsonl", tmp_path / "a.csv", tmp_path / "m.json"
    assert run(capsys, "collect", "--snapshot", NEWS, "--out", str(snap))[0] == 0
    assert run(capsys, "preprocess", "--in", str(snap), "--out", str(table))[0] == 0
    code, out, _ = run(capsys, "fit", "--in", str(table), "--out", str(model))
    assert code == 0 and "df_total: 201" in out
    code, out, _ = run(capsys, "classify", "--in", str(table), "--model", str(model))
    assert code == 0
    assert "positives: 16 17 30 35" in out.splitlines()
    assert "accuracy: 1.0000" in out.splitlines()

    # same stages in-process
    comments = ingest.select_latest(ingest.load_snapshot(NEWS), 200)
    records = dataset.aggregate_by_author(dataset.to_rows(comments))
    design = relevance.design_matrix(relevance.binarize(records, dataset.summary_stats(records)))
    assert model.read_bytes() == relevance.fit_logistic(design).to_json().encode()
    assert table.read_bytes() == dataset.dumps_authors_csv(records).encode()


def test_deterministic_outputs(tmp_path, capsys):
    outs = []
    for name in ("a", "b"):
        d = tmp_path / name
        d.mkdir()
        run(capsys, "anonymize", "--in", NEWS, "--out", str(d / "anon.jsonl"), "--seed", "5")
        run(capsys, "graph", "--in", NEWS, "--focus-author-id", fixtures.FOCUS_CHANNEL_ID,
            "--buzzwords", QUERY, "--out", str(d / "g"))
        run(capsys, "render", "--in", NEWS, "--out", str(d / "n.svg"), "--iterations", "40", "--seed", "2")
        outs.append([p.read_bytes() for p in sorted(d.rglob("*")) if p.is_file()])
    assert outs[0] == outs[1]
    assert len(outs[0]) == 5


def test_summary(authors_csv, capsys):
    code, out, _ = run(capsys, "summary", "--in", str(authors_csv))
    assert code == 0
    mean = next(line for line in out.splitlines() if line.startswith("Mean"))
    assert mean.split()[1:] == ["0.2574", "1.7475", "27.1188", "1.2475"]


def test_summary_empty_is_data_error(tmp_path, capsys):
    p = tmp_path / "empty.csv"
    p.write_text(",".join(dataset.CSV_HEADER) + "\n")
    assert run(capsys, "summary", "--in", str(p))[0] == 3


def test_rank_and_identify(authors_csv, capsys, tmp_path):
    code, out, _ = run(capsys, "rank", "--in", str(authors_csv), "--key", "likes")
    assert code == 0
    assert out.splitlines()[1].split()[0] == "16"
    code, out, _ = run(capsys, "identify", "--in", str(authors_csv), "--thresholds", "1,1,10,1",
                       "--out", str(tmp_path / "active.csv"))
    assert code == 0
    assert [line.split()[0] for line in out.splitlines()[1:7]] == ["3", "10", "13", "16", "17", "19"]
    assert dataset.read_authors_csv(tmp_path / "active.csv")[0].values() == (1, 2, 58, 1)


def test_graph_outputs(tmp_path, capsys):
    code, out, _ = run(capsys, "graph", "--in", NEWS, "--focus-author-id", fixtures.FOCUS_CHANNEL_ID,
                       "--buzzwords", QUERY, "--out", str(tmp_path))
    assert code == 0
    assert "focus nodes: 134 230 235 236" in out
    m = json.loads((tmp_path / "metrics.json").read_text())
    assert m["max_depth"] == 2 and m["n_comments"] == 200
    assert (tmp_path / "nodes.csv").read_text().count("\n") == 254


@pytest.mark.parametrize("suffix", ["svg", "dot", "graphml"])
def test_render_formats(tmp_path, capsys, suffix):
    out_path = tmp_path / f"net.{suffix}"
    code, out, _ = run(capsys, "render", "--in", NEWS, "--out", str(out_path), "--iterations", "20")
    assert code == 0 and out.startswith("# seed: 0")
    assert "Activity Network (N=200)" in out_path.read_text()


def test_compare(tmp_path, capsys):
    args = []
    for t in fixtures.TOPICS:
        args += ["--in", f"{t}={fixtures.topic_snapshot_path(t)}",
                 "--buzzwords", f"{t}={' | '.join(fixtures.TOPIC_QUERIES[t].groups[0])}"]
    code, out, _ = run(capsys, "compare", *args, "--out", str(tmp_path / "c.json"))
    assert code == 0
    rows = {r["label"]: r for r in json.loads((tmp_path / "c.json").read_text())}
    assert rows["politics"]["depth_rank"] < rows["music"]["depth_rank"]
    assert out.splitlines()[0].startswith("label")


def test_live_collect_uses_env_key(tmp_path, capsys, monkeypatch):
    rows = [comment("t1", minutes=1), comment("t2", minutes=2), comment("r", "t1")]
    with MockApiServer(rows, api_key="envkey") as srv:
        monkeypatch.setenv(ingest.API_KEY_ENV, "envkey")
        out = tmp_path / "live.jsonl"
        code, text, _ = run(capsys, "collect", "--video-id", "https://youtu.be/vid", "--max-comments", "1",
                            "--endpoint", srv.endpoint, "--out", str(out))
        assert code == 0
        assert [c.comment_id for c in ingest.load_snapshot(out)] == ["t2"]
        monkeypatch.setenv(ingest.API_KEY_ENV, "wrong")
        code, _, err = run(capsys, "collect", "--video-id", "vid", "--endpoint", srv.endpoint,
                           "--out", str(out))
        assert code == 2 and "rejected" in err


@pytest.mark.parametrize("argv, code", [
    (["bogus"], 1),
    (["collect", "--out", "x.jsonl"], 1),
    (["collect", "--snapshot", NEWS, "--video-id", "abc", "--out", "x.jsonl"], 1),
    (["rank", "--in", "a.csv", "--key", "views"], 1),
    (["identify", "--in", NEWS, "--thresholds", "1,2"], 3),
    (["graph", "--in", NEWS, "--buzzwords", '"open'], 1),
    (["summary", "--in", "/nonexistent/a.csv"], 2),
])
def test_exit_codes(argv, code, capsys, monkeypatch, tmp_path):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv(ingest.API_KEY_ENV, raising=False)
    try:
        got = cli.main(argv)
    except SystemExit as exc:
        got = exc.code
    assert got == code


def test_identify_bad_thresholds_is_usage(authors_csv, capsys):
    assert run(capsys, "identify", "--in", str(authors_csv), "--thresholds", "1,2")[0] == 1


def test_corrupt_snapshot_is_data_error(tmp_path, capsys):
    p = tmp_path / "bad.jsonl"
    p.write_text('{"comment_id": 1}\n')
    assert run(capsys, "preprocess", "--in", str(p), "--out", str(tmp_path / "a.csv"))[0] == 3


def test_fit_error_codes(tmp_path, capsys):
    # nobody replied, so the binarized replies column is all ones like the intercept
    p = tmp_path / "flat.csv"
    p.write_text("author,replies,likes,words,comments\n"
                 "a,0,0,5,1\nb,0,0,5,2\nc,0,0,9,1\nd,0,1,9,2\ne,0,1,9,1\nf,0,1,5,2\n")
    assert run(capsys, "fit", "--in", str(p))[0] == 4
    p.write_text("author,replies,likes,words,comments\na,0,0,5,1\nb,1,1,5,2\n")
    assert run(capsys, "fit", "--in", str(p))[0] == 3


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "commentscope", "fit", "--in", NEWS], capture_output=True)
    # a snapshot is not an author table
    assert res.returncode == 3
    res = subprocess.run([sys.executable, "-m", "commentscope", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "classify" in res.stdout
