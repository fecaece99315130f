"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 I/O or network error, 3 data
invariant violation, 4 solver error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import dataset, ingest, network, relevance, render
from .errors import (
    ApiError,
    DataError,
    InvariantViolation,
    MalformedInputError,
    SolverError,
)

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_DATA, EXIT_SOLVER = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _write(path, text: str) -> None:
    Path(path).write_bytes(text.encode("utf-8"))


def _video_of(comments, video_id):
    if video_id:
        return ingest.parse_access_point(video_id).video_id
    videos = sorted({c.video_id for c in comments})
    if len(videos) != 1:
        raise UsageError(f"snapshot holds {len(videos)} videos; pick one with --video-id")
    return videos[0]


def _query(text):
    return network.BuzzwordQuery.parse(text) if text else None


# ---------------------------------------------------------------------------
# subcommands

def cmd_collect(args) -> int:
    if bool(args.video_id) == bool(args.snapshot):
        raise UsageError("give either --video-id (live) or --snapshot (offline), not both or neither")
    if args.snapshot:
        comments = ingest.select_latest(ingest.load_snapshot(args.snapshot), args.max_comments)
    else:
        key = args.api_key or os.environ.get(ingest.API_KEY_ENV)
        if not key:
            raise UsageError(f"live collection needs --api-key or ${ingest.API_KEY_ENV}")
        config = ingest.ApiConfig(api_key=key, endpoint_base=args.endpoint, page_size=args.page_size,
                                  max_retries=args.max_retries)
        request = ingest.CollectRequest(tuple(ingest.parse_access_point(v) for v in args.video_id),
                                        args.max_comments)
        comments = ingest.collect(config, request, workers=args.workers)
    ingest.save_snapshot(comments, args.out)
    tops = sum(1 for c in comments if c.parent_id is None)
    print(f"collected {len(comments)} rows ({tops} top-level, {len(comments) - tops} replies) -> {args.out}")
    return EXIT_OK


def cmd_anonymize(args) -> int:
    comments = ingest.load_snapshot(args.input)
    if args.salt is None:
        salt = f"seed:{args.seed}"
        print(f"# seed: {args.seed}")
    else:
        salt = args.salt
    out = ingest.anonymize(comments, salt)
    ingest.save_snapshot(out, args.out)
    print(f"anonymized {len({c.author_channel_id for c in out})} authors in {len(out)} rows -> {args.out}")
    return EXIT_OK


def cmd_preprocess(args) -> int:
    comments = ingest.load_snapshot(args.input)
    rows = dataset.to_rows(comments)
    records = dataset.aggregate_by_author(rows, normalize_whitespace=args.normalize_whitespace)
    dataset.write_authors_csv(records, args.out)
    print(f"aggregated {len(rows)} rows into {len(records)} authors -> {args.out}")
    return EXIT_OK


def format_summary(stats: dataset.SummaryStats) -> str:
    labels = (("Min.", "min"), ("1st Qu.", "first_quartile"), ("Median", "median"),
              ("Mean", "mean"), ("3rd Qu.", "third_quartile"), ("Max.", "max"))
    lines = ["".ljust(8) + "".join(f.rjust(12) for f in dataset.FEATURES)]
    for label, attr in labels:
        cells = "".join(f"{getattr(getattr(stats, f), attr):12.4f}" for f in dataset.FEATURES)
        lines.append(label.ljust(8) + cells)
    return "\n".join(lines) + "\n"


def cmd_summary(args) -> int:
    stats = dataset.summary_stats(dataset.read_authors_csv(args.input))
    sys.stdout.write(format_summary(stats))
    if args.out:
        payload = {f: vars(getattr(stats, f)) for f in dataset.FEATURES}
        _write(args.out, json.dumps(payload, indent=2) + "\n")
    return EXIT_OK


def _print_records(records, positions, limit=None):
    width = max([len(r.author) for r in records] + [6])
    print(f"{'row':>5}  {'author':<{width}}  replies  likes  words  comments")
    for pos, r in list(zip(positions, records))[:limit]:
        print(f"{pos:>5}  {r.author:<{width}}  {r.replies:>7}  {r.likes:>5}  {r.words:>5}  {r.comments:>8}")


def cmd_rank(args) -> int:
    records = dataset.read_authors_csv(args.input)
    position = {id(r): i for i, r in enumerate(records, start=1)}
    ranked = dataset.rank_by(records, args.key)
    _print_records(ranked, [position[id(r)] for r in ranked], args.top)
    if args.out:
        dataset.write_authors_csv(ranked, args.out)
    return EXIT_OK


def cmd_identify(args) -> int:
    records = dataset.read_authors_csv(args.input)
    position = {id(r): i for i, r in enumerate(records, start=1)}
    kept = dataset.filter_active(records, dataset.ActivityThresholds.parse(args.thresholds))
    _print_records(kept, [position[id(r)] for r in kept], args.top)
    print(f"{len(kept)} of {len(records)} authors meet thresholds {args.thresholds}")
    if args.out:
        dataset.write_authors_csv(kept, args.out)
    return EXIT_OK


def _design_from_table(path):
    records = dataset.read_authors_csv(path)
    stats = dataset.summary_stats(records)
    return relevance.design_matrix(relevance.binarize(records, stats))


def cmd_fit(args) -> int:
    design = _design_from_table(args.input)
    fit = relevance.fit_logistic(design, max_iterations=args.max_iterations, tolerance=args.tolerance)
    print(fit.report())
    if args.out:
        _write(args.out, fit.to_json())
    return EXIT_OK


def cmd_classify(args) -> int:
    design = _design_from_table(args.input)
    try:
        fit = relevance.LogisticFit.from_dict(json.loads(Path(args.model).read_text(encoding="utf-8")))
    except (KeyError, TypeError, ValueError) as exc:
        raise InvariantViolation(f"{args.model}: not a model file ({exc})") from None
    classes = relevance.classify(relevance.predict_probabilities(fit, design), args.cutoff)
    positives = relevance.positive_cases(classes)
    print("positives: " + " ".join(str(i) for i in positives))
    for i in positives:
        print(f"  {i}: {design.row_authors[i - 1]}")
    print(f"accuracy: {relevance.accuracy(classes, design.y):.4f}")
    return EXIT_OK


def cmd_graph(args) -> int:
    comments = ingest.load_snapshot(args.input)
    video = _video_of(comments, args.video_id)
    graph = network.build_activity_graph([c for c in comments if c.video_id == video], video)
    query = _query(args.buzzwords)
    colors = network.colorize(graph, args.focus_author_id, query)
    m = network.metrics(graph, query)
    sys.stdout.write(network.format_metrics(m))
    if args.focus_author_id:
        hits = [n.index for n in graph.nodes if n.author_id == args.focus_author_id]
        print("focus nodes: " + " ".join(map(str, hits)))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _write(out / "nodes.csv", network.nodes_csv(graph, colors))
        _write(out / "edges.csv", network.edges_csv(graph))
        _write(out / "metrics.json", json.dumps(m.to_dict(), indent=2) + "\n")
    return EXIT_OK


def cmd_render(args) -> int:
    comments = ingest.load_snapshot(args.input)
    video = _video_of(comments, args.video_id)
    graph = network.build_activity_graph([c for c in comments if c.video_id == video], video)
    colors = network.colorize(graph, args.focus_author_id, _query(args.buzzwords))
    config = render.LayoutConfig(seed=args.seed, iterations=args.iterations, title=args.title)
    out = Path(args.out)
    fmt = args.format or out.suffix.lstrip(".").lower()
    print(f"# seed: {args.seed}")
    if fmt == "svg":
        text = render.render_svg(graph, colors, render.layout(graph, config), config)
    elif fmt == "dot":
        text = render.export_dot(graph, colors, args.title)
    elif fmt == "graphml":
        text = render.export_graphml(graph, colors, args.title)
    else:
        raise UsageError(f"unknown output format {fmt!r}; use svg, dot or graphml")
    _write(out, text)
    print(f"wrote {fmt} with {len(graph.nodes)} nodes and {len(graph.edges)} edges -> {out}")
    return EXIT_OK


def _label_value(text, flag):
    label, sep, value = text.partition("=")
    if not sep or not label or not value:
        raise UsageError(f"{flag} expects LABEL=VALUE, got {text!r}")
    return label, value


def cmd_compare(args) -> int:
    shared = None
    per_label = {}
    for q in args.buzzwords or []:
        label, sep, value = q.partition("=")
        # '=' never appears in a plain query, so its presence marks LABEL=QUERY
        if sep and label and '"' not in label:
            per_label[label] = _query(value)
        else:
            shared = _query(q)
    entries = []
    for item in args.input:
        label, path = _label_value(item, "--in")
        comments = ingest.load_snapshot(path)
        video = _video_of(comments, None)
        graph = network.build_activity_graph(comments, video)
        entries.append((label, graph, per_label.get(label, shared)))
    rows = network.compare(entries)
    sys.stdout.write(network.format_comparison(rows))
    if args.out:
        _write(args.out, network.comparison_to_json(rows))
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="commentscope", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        sp.add_argument("--seed", type=int, default=0)
        return sp

    sp = add("collect", cmd_collect, "fetch comments live or re-cut an existing snapshot")
    sp.add_argument("--video-id", action="append", help="video id or URL; repeat for several")
    sp.add_argument("--snapshot", help="offline source snapshot")
    sp.add_argument("--max-comments", type=int, default=200)
    sp.add_argument("--api-key")
    sp.add_argument("--endpoint", default=ingest.DEFAULT_ENDPOINT)
    sp.add_argument("--page-size", type=int, default=100)
    sp.add_argument("--max-retries", type=int, default=3)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--out", required=True)

    sp = add("anonymize", cmd_anonymize, "replace display names with pseudonyms")
    sp.add_argument("--in", "--snapshot", dest="input", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--salt")

    sp = add("preprocess", cmd_preprocess, "aggregate a snapshot into the per-author table")
    sp.add_argument("--in", "--snapshot", dest="input", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--normalize-whitespace", action="store_true")

    sp = add("summary", cmd_summary, "six-number summary of an author table")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out")

    sp = add("rank", cmd_rank, "order authors by one feature, largest first")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--key", required=True, choices=dataset.FEATURES)
    sp.add_argument("--top", type=int, default=6)
    sp.add_argument("--out")

    sp = add("identify", cmd_identify, "authors meeting minimum activity thresholds")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--thresholds", default="1,1,10,1", help="replies,likes,words,comments")
    sp.add_argument("--top", type=int)
    sp.add_argument("--out")

    sp = add("fit", cmd_fit, "fit the relevance model")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out")
    sp.add_argument("--max-iterations", type=int, default=25)
    sp.add_argument("--tolerance", type=float, default=1e-8)

    sp = add("classify", cmd_classify, "list predicted relevant authors and accuracy")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--model", required=True)
    sp.add_argument("--cutoff", type=float, default=0.5)

    for name, func, help_ in (("graph", cmd_graph, "build, colour and measure the activity network"),
                              ("render", cmd_render, "draw or export the activity network")):
        sp = add(name, func, help_)
        sp.add_argument("--in", "--snapshot", dest="input", required=True)
        sp.add_argument("--video-id")
        sp.add_argument("--focus-author-id")
        sp.add_argument("--buzzwords")
        sp.add_argument("--out", required=(name == "render"))
        if name == "render":
            sp.add_argument("--format", choices=("svg", "dot", "graphml"))
            sp.add_argument("--iterations", type=int, default=500)
            sp.add_argument("--title")

    sp = add("compare", cmd_compare, "compare activity networks across topics")
    sp.add_argument("--in", dest="input", action="append", required=True, metavar="LABEL=PATH")
    sp.add_argument("--buzzwords", action="append", metavar="[LABEL=]QUERY")
    sp.add_argument("--out")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, MalformedInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ApiError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except SolverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
