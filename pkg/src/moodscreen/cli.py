"""Command-line frontend.

Subcommands mirror the pipeline stages: ``lexicon expand`` materializes
a term lexicon, ``score`` produces per-video comment reports, ``train``
fits the transcript classifier, ``classify`` applies it, ``evaluate``
runs the comment-score proxy protocol, ``patterns`` analyzes watch
histories, and ``stats`` summarizes corpora or report collections.

Every output artifact embeds the effective configuration and the sha256
of every input file, and is written atomically. Wall-clock metadata
goes to a ``<output>.meta.json`` sidecar so primary outputs stay
byte-identical across reruns. Exit codes: 0 success, 1 usage error,
2 data error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

from moodscreen import __version__, cesd, corpus, evaluate, features, lexicon, nb
from moodscreen import patterns as patterns_mod
from moodscreen import util
from moodscreen.labels import DEPRESSIVE
from moodscreen.text import tokenize

MODEL_FILE_VERSION = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage errors, not argparse's 2
        raise UsageError(f"{message}\n{self.format_usage()}")


def _artifact(command: str, config: dict, inputs: dict[str, str], payload: dict) -> dict:
    return {
        "version": 1,
        "tool": f"moodscreen {__version__}",
        "command": command,
        "config": config,
        "inputs": inputs,
        **payload,
    }


def _write_artifact(path: str, doc: dict) -> None:
    util.write_atomic(path, util.canonical_json(doc) + "\n")
    _write_meta(path)


def _write_jsonl(path: str, header: dict, rows: list[dict]) -> None:
    lines = [util.canonical_json({"type": "run_header", **header})]
    lines.extend(util.canonical_json(row) for row in rows)
    util.write_atomic(path, "\n".join(lines) + "\n")
    _write_meta(path)


def _write_meta(path: str) -> None:
    meta = {"created_at": datetime.now(timezone.utc).isoformat()}
    util.write_atomic(f"{path}.meta.json", util.canonical_json(meta) + "\n")


def _load_seed_config(path: str | None) -> dict:
    if path is None:
        return lexicon.DEFAULT_SEEDS
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _load_bundle(path: str | None) -> lexicon.LexiconBundle:
    if path is None:
        # Unexpanded default seeds; pass --lexicon for an expanded one.
        return lexicon.build_bundle(table=None)
    return lexicon.load_lexicon(path)


def _parse_ngram_range(value: str) -> tuple[int, int]:
    try:
        lo, _, hi = value.partition(":")
        return int(lo), int(hi if hi else lo)
    except ValueError:
        raise UsageError(f"invalid --ngram range {value!r}, expected N:M") from None


def _parse_threshold_spec(value: str) -> tuple[str, str]:
    kind, sep, rest = value.partition(":")
    if not sep or kind not in ("fixed", "calibrated") or not rest:
        raise UsageError(
            f"invalid --threshold {value!r}, expected fixed:<value> or "
            "calibrated:<reports-path>"
        )
    return kind, rest


def _resolve_threshold(spec: str) -> tuple[cesd.CesdThreshold, dict[str, str]]:
    kind, rest = _parse_threshold_spec(spec)
    if kind == "fixed":
        try:
            return cesd.fixed_threshold(float(rest)), {}
        except ValueError as exc:
            raise UsageError(f"invalid fixed threshold {rest!r}: {exc}") from None
    reports = [r for r in cesd.load_reports(rest) if r.label == DEPRESSIVE]
    if not reports:
        raise ValueError(
            f"calibration file {rest!r} has no depressive-labeled reports"
        )
    return cesd.calibrate_threshold(reports), {"calibration_reports": util.file_hash(rest)}


def _group_comments(
    docs: list[corpus.Document],
) -> dict[str, list[corpus.Document]]:
    groups: dict[str, list[corpus.Document]] = {}
    for doc in docs:
        if doc.kind == corpus.COMMENT:
            groups.setdefault(doc.video_id, []).append(doc)
    for members in groups.values():
        members.sort(key=lambda d: d.id)
    return groups


# --- score worker (module-level so it pickles for --jobs) ---

_WORKER_BUNDLE: lexicon.LexiconBundle | None = None


def _init_score_worker(bundle_doc: dict) -> None:
    global _WORKER_BUNDLE
    _WORKER_BUNDLE = lexicon.LexiconBundle.from_dict(bundle_doc)


def _score_video_task(task: tuple) -> cesd.CesdReport:
    video_id, texts, comment_ids, aggregate_mode, counting, label, category = task
    return cesd.video_cesd(
        video_id,
        [tokenize(t) for t in texts],
        _WORKER_BUNDLE,
        aggregate_mode,
        counting,
        comment_ids=comment_ids,
        label=label,
        category=category,
    )


def cmd_lexicon_expand(args) -> int:
    seed_config = _load_seed_config(args.seeds)
    table = lexicon.load_embeddings(args.embeddings) if args.embeddings else None
    bundle = lexicon.build_bundle(seed_config, table, args.top_k, args.min_sim)
    inputs = {}
    if args.seeds:
        inputs["seeds"] = util.file_hash(args.seeds)
    if args.embeddings:
        inputs["embeddings"] = util.file_hash(args.embeddings)
    expansion = {
        "top_k": args.top_k,
        "min_sim": args.min_sim,
        "expanded": table is not None,
        "inputs": inputs,
    }
    lexicon.save_lexicon(args.output, bundle, expansion)
    _write_meta(args.output)
    print(
        f"wrote {args.output}: {len(bundle.symptom_categories)} symptom categories, "
        f"{sum(len(c.terms) for c in bundle.categories())} terms"
    )
    return 0


def cmd_score(args) -> int:
    comment_docs = corpus.load_corpus(args.comments)
    groups = _group_comments(comment_docs)
    if not groups:
        raise ValueError(f"no comment documents in {args.comments!r}")
    meta: dict[str, corpus.Document] = {}
    inputs = {"comments": util.file_hash(args.comments)}
    if args.transcripts:
        inputs["transcripts"] = util.file_hash(args.transcripts)
        meta = {
            d.id: d
            for d in corpus.load_corpus(args.transcripts)
            if d.kind == corpus.TRANSCRIPT
        }
    if args.lexicon:
        inputs["lexicon"] = util.file_hash(args.lexicon)
    bundle = _load_bundle(args.lexicon)

    tasks = []
    for video_id in sorted(groups):
        docs = groups[video_id]
        transcript = meta.get(video_id)
        tasks.append(
            (
                video_id,
                [d.text for d in docs],
                [d.id for d in docs],
                args.aggregate,
                args.counting,
                transcript.label if transcript else None,
                transcript.category if transcript else None,
            )
        )
    if args.jobs > 1:
        with ProcessPoolExecutor(
            max_workers=args.jobs,
            initializer=_init_score_worker,
            initargs=(bundle.to_dict(),),
        ) as pool:
            reports = list(pool.map(_score_video_task, tasks, chunksize=8))
    else:
        _init_score_worker(bundle.to_dict())
        reports = [_score_video_task(t) for t in tasks]

    config = {
        "counting": args.counting,
        "aggregate": args.aggregate,
        "jobs": args.jobs,
        "lexicon_hash": bundle.content_hash,
    }
    header = _artifact("score", config, inputs, {})
    rows = [
        {"version": cesd.REPORT_SCHEMA_VERSION, **r.to_dict()} for r in reports
    ]
    _write_jsonl(args.output, header, rows)
    print(f"wrote {args.output}: {len(reports)} video reports")
    return 0


def _build_pipeline(
    train_docs: list[corpus.Document],
    bundle: lexicon.LexiconBundle,
    mode: str,
    ngram_range: tuple[int, int],
    max_features: int,
) -> features.FeaturePipeline:
    if mode == features.EMPATH_ONLY:
        return features.FeaturePipeline(bundle=bundle)
    streams = [tokenize(d.text) for d in train_docs]
    vocab = features.build_vocab(streams, ngram_range[0], ngram_range[1], max_features)
    return features.FeaturePipeline(bundle=bundle, vocab=vocab)


def cmd_train(args) -> int:
    ngram_range = _parse_ngram_range(args.ngram)
    docs = corpus.load_corpus(args.corpus)
    labeled = [
        d for d in docs if d.kind == corpus.TRANSCRIPT and d.label is not None
    ]
    if not labeled:
        raise ValueError(f"no labeled transcripts in {args.corpus!r}")
    inputs = {"corpus": util.file_hash(args.corpus)}
    if args.lexicon:
        inputs["lexicon"] = util.file_hash(args.lexicon)
    bundle = _load_bundle(args.lexicon)

    holdout = None
    if args.test_fraction > 0:
        train_docs, test_docs = corpus.split(labeled, args.test_fraction, args.seed)
    else:
        train_docs, test_docs = labeled, []

    pipeline = _build_pipeline(
        train_docs, bundle, args.features, ngram_range, args.max_features
    )
    vectors = [pipeline.vector(tokenize(d.text)) for d in train_docs]
    model = nb.train(vectors, [d.label for d in train_docs], alpha=args.alpha)

    if test_docs:
        predicted = [
            nb.predict(model, pipeline.vector(tokenize(d.text))).label
            for d in test_docs
        ]
        matrix = evaluate.confusion(predicted, [d.label for d in test_docs])
        holdout = {
            "n_train": len(train_docs),
            "n_test": len(test_docs),
            "confusion": matrix.to_dict(),
            "accuracy": matrix.accuracy,
        }

    config = {
        "features": args.features,
        "ngram": f"{ngram_range[0]}:{ngram_range[1]}",
        "max_features": args.max_features,
        "alpha": args.alpha,
        "test_fraction": args.test_fraction,
        "seed": args.seed,
        "lexicon_hash": bundle.content_hash,
    }
    doc = _artifact(
        "train",
        config,
        inputs,
        {
            "nb": model.to_dict(),
            "pipeline": pipeline.to_dict(),
            "holdout": holdout,
            "training_doc_ids": sorted(d.id for d in train_docs),
        },
    )
    _write_artifact(args.output, doc)
    line = f"wrote {args.output}: {len(train_docs)} training docs"
    if holdout:
        line += f", holdout accuracy {holdout['accuracy']:.3f}"
    print(line)
    return 0


def _load_model_file(path: str) -> tuple[nb.NbModel, features.FeaturePipeline, dict]:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("version") != MODEL_FILE_VERSION:
        raise nb.ModelFormatError(
            f"unsupported model file version: {doc.get('version')!r}"
        )
    model = nb.NbModel.from_dict(doc["nb"])
    pipeline = features.FeaturePipeline.from_dict(doc["pipeline"])
    if (
        model.feature_config_hash is not None
        and model.feature_config_hash != pipeline.config_hash
    ):
        raise nb.FeatureHashMismatch(
            f"model file {path!r} is internally inconsistent: feature hash mismatch"
        )
    return model, pipeline, doc


def cmd_classify(args) -> int:
    model, pipeline, _ = _load_model_file(args.model)
    docs = corpus.load_corpus(args.corpus)
    if not docs:
        raise ValueError(f"no documents in {args.corpus!r}")
    rows = []
    for doc in docs:
        pred = nb.predict(model, pipeline.vector(tokenize(doc.text)))
        rows.append({"id": doc.id, "label": pred.label, "posterior": pred.posterior})
    inputs = {"model": util.file_hash(args.model), "corpus": util.file_hash(args.corpus)}
    header = _artifact("classify", {"model_hash": model.feature_config_hash}, inputs, {})
    _write_jsonl(args.output, header, rows)
    print(f"wrote {args.output}: {len(rows)} predictions")
    return 0


def cmd_evaluate(args) -> int:
    model, pipeline, _ = _load_model_file(args.model)
    transcripts = {
        d.id: d
        for d in corpus.load_corpus(args.videos)
        if d.kind == corpus.TRANSCRIPT
    }
    if not transcripts:
        raise ValueError(f"no transcripts in {args.videos!r}")
    groups = _group_comments(corpus.load_corpus(args.comments))
    threshold, extra_inputs = _resolve_threshold(args.threshold)

    videos = [
        (
            video_id,
            tokenize(transcripts[video_id].text),
            [tokenize(d.text) for d in groups.get(video_id, [])],
        )
        for video_id in sorted(transcripts)
    ]
    result = evaluate.proxy_evaluate(
        model, videos, pipeline, threshold, args.aggregate, args.counting
    )

    with open(args.model, "r", encoding="utf-8") as fh:
        training_ids = set(json.load(fh).get("training_doc_ids", []))
    overlap = sorted(training_ids & set(transcripts))

    inputs = {
        "model": util.file_hash(args.model),
        "videos": util.file_hash(args.videos),
        "comments": util.file_hash(args.comments),
        **extra_inputs,
    }
    config = {
        "threshold_spec": args.threshold,
        "counting": args.counting,
        "aggregate": args.aggregate,
        "lexicon_hash": pipeline.bundle.content_hash,
    }
    doc = _artifact(
        "evaluate",
        config,
        inputs,
        {
            "threshold": result.threshold.to_dict(),
            "confusion": result.matrix.to_dict(),
            "accuracy": result.matrix.accuracy,
            "n_evaluated": result.matrix.total,
            "excluded_no_comments": result.excluded,
            "training_overlap": {"count": len(overlap), "ids": overlap},
            "videos": [r.to_dict() for r in result.records],
        },
    )
    _write_artifact(args.output, doc)
    print(
        f"wrote {args.output}: accuracy {result.matrix.accuracy:.3f} over "
        f"{result.matrix.total} videos ({result.excluded} excluded, "
        f"training overlap {len(overlap)})"
    )
    return 0


def _history_events(args) -> list[patterns_mod.WatchEvent]:
    model = pipeline = None
    transcripts: dict[str, corpus.Document] = {}
    if args.model:
        model, pipeline, _ = _load_model_file(args.model)
    if args.transcripts:
        transcripts = {
            d.id: d
            for d in corpus.load_corpus(args.transcripts)
            if d.kind == corpus.TRANSCRIPT
        }
    label_cache: dict[str, str] = {}

    def classify_text(key: str, text: str) -> str:
        if key not in label_cache:
            if model is None:
                raise ValueError(
                    "history has unlabeled events; pass --model (and --transcripts) "
                    "to classify them"
                )
            label_cache[key] = nb.predict(model, pipeline.vector(tokenize(text))).label
        return label_cache[key]

    events = []
    with open(args.history, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
                video_id = row["video_id"]
                ts = util.parse_timestamp(row["timestamp"])
                label = row.get("label")
                if label is None:
                    if "text" in row:
                        label = classify_text(video_id, row["text"])
                    elif video_id in transcripts:
                        label = classify_text(video_id, transcripts[video_id].text)
                    else:
                        raise ValueError(
                            "event has no label, no text, and no transcript"
                        )
                events.append(
                    patterns_mod.WatchEvent(
                        video_id=video_id,
                        timestamp=ts,
                        label=label,
                        score=row.get("score"),
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{args.history}: line {lineno}: {exc}") from None
    return events


def cmd_patterns(args) -> int:
    events = _history_events(args)
    series = patterns_mod.windows(events, args.window_days, args.overlap_days)
    detections = [
        patterns_mod.detect_decline(series, args.decline_min_windows, args.decline_slope),
        patterns_mod.detect_rumination(events, args.min_run),
        patterns_mod.detect_high_frequency(
            series, args.hf_threshold, args.hf_min_events
        ),
    ]
    inputs = {"history": util.file_hash(args.history)}
    if args.model:
        inputs["model"] = util.file_hash(args.model)
    if args.transcripts:
        inputs["transcripts"] = util.file_hash(args.transcripts)
    config = {
        "window_days": args.window_days,
        "overlap_days": args.overlap_days,
        "decline_min_windows": args.decline_min_windows,
        "decline_slope": args.decline_slope,
        "min_run": args.min_run,
        "hf_threshold": args.hf_threshold,
        "hf_min_events": args.hf_min_events,
    }
    doc = _artifact(
        "patterns",
        config,
        inputs,
        {
            "n_events": len(events),
            "windows": [w.to_dict() for w in series],
            "detections": [d.to_dict() for d in detections],
        },
    )
    _write_artifact(args.output, doc)
    fired = [d.kind for d in detections if d.fired]
    print(
        f"wrote {args.output}: {len(series)} windows, "
        f"fired: {', '.join(fired) if fired else 'none'}"
    )
    return 0


def cmd_stats(args) -> int:
    if bool(args.corpus) == bool(args.reports):
        raise UsageError("stats needs exactly one of --corpus or --reports")
    if args.corpus:
        docs = corpus.load_corpus(args.corpus)
        payload = {"corpus_stats": corpus.corpus_stats(docs).to_dict()}
        inputs = {"corpus": util.file_hash(args.corpus)}
    else:
        reports = cesd.load_reports(args.reports)
        groups: dict[str, list[cesd.CesdReport]] = {}
        for report in reports:
            groups.setdefault(report.category or "uncategorized", []).append(report)
        groups = {k: groups[k] for k in sorted(groups)}
        stats = evaluate.category_stats(groups)
        payload = {"category_stats": [s.to_dict() for s in stats]}
        inputs = {"reports": util.file_hash(args.reports)}
        if args.plot_data:
            rows = evaluate.plot_data_rows(groups)
            util.write_atomic(args.plot_data, "\n".join(rows) + "\n")
    doc = _artifact("stats", {}, inputs, payload)
    if args.output:
        _write_artifact(args.output, doc)
        print(f"wrote {args.output}")
    else:
        print(json.dumps(doc, indent=2, sort_keys=True))
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="moodscreen", description=__doc__)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    lex = sub.add_parser("lexicon", help="lexicon utilities", add_help=True)
    lex_sub = lex.add_subparsers(dest="lexicon_command", metavar="SUBCOMMAND")
    expand = lex_sub.add_parser(
        "expand", help="expand seed terms into a persisted lexicon"
    )
    expand.add_argument("--embeddings", help="word-vector text file (word v1 .. vd)")
    expand.add_argument("--seeds", help="seed configuration JSON (default: built-in)")
    expand.add_argument("--top-k", type=int, default=lexicon.DEFAULT_TOP_K)
    expand.add_argument("--min-sim", type=float, default=lexicon.DEFAULT_MIN_SIM)
    expand.add_argument("-o", "--output", required=True)
    expand.set_defaults(func=cmd_lexicon_expand)

    score = sub.add_parser("score", help="score video comments")
    score.add_argument("--comments", required=True, help="comments corpus (JSONL)")
    score.add_argument("--transcripts", help="transcripts corpus for labels/categories")
    score.add_argument("--lexicon", help="expanded lexicon JSON (default: seed terms)")
    score.add_argument("--counting", choices=cesd.COUNTING_MODES, default=cesd.PRESENCE)
    score.add_argument(
        "--aggregate", choices=cesd.AGGREGATE_MODES, default=cesd.CONNOTATION_WEIGHTED
    )
    score.add_argument("--jobs", type=int, default=1, help="parallel workers")
    score.add_argument("-o", "--output", required=True)
    score.set_defaults(func=cmd_score)

    train = sub.add_parser("train", help="train the transcript classifier")
    train.add_argument("--corpus", required=True, help="labeled transcripts (JSONL)")
    train.add_argument(
        "--features", choices=features.FEATURE_MODES, default=features.TFIDF_EMPATH
    )
    train.add_argument("--ngram", default="2:3", help="n-gram range N:M")
    train.add_argument("--max-features", type=int, default=5000)
    train.add_argument("--alpha", type=float, default=1.0)
    train.add_argument("--lexicon", help="expanded lexicon JSON (default: seed terms)")
    train.add_argument(
        "--test-fraction",
        type=float,
        default=0.0,
        help="hold out a stratified test split and report its accuracy",
    )
    train.add_argument("--seed", type=int, default=0)
    train.add_argument("-o", "--output", required=True)
    train.set_defaults(func=cmd_train)

    classify = sub.add_parser("classify", help="classify documents with a model")
    classify.add_argument("--model", required=True)
    classify.add_argument("--corpus", required=True)
    classify.add_argument("-o", "--output", required=True)
    classify.set_defaults(func=cmd_classify)

    ev = sub.add_parser("evaluate", help="proxy-evaluate a model against comments")
    ev.add_argument("--model", required=True)
    ev.add_argument("--videos", required=True, help="transcripts corpus (JSONL)")
    ev.add_argument("--comments", required=True, help="comments corpus (JSONL)")
    ev.add_argument(
        "--threshold",
        required=True,
        help="fixed:<value> or calibrated:<reports-path>",
    )
    ev.add_argument("--counting", choices=cesd.COUNTING_MODES, default=cesd.PRESENCE)
    ev.add_argument(
        "--aggregate", choices=cesd.AGGREGATE_MODES, default=cesd.CONNOTATION_WEIGHTED
    )
    ev.add_argument("-o", "--output", required=True)
    ev.set_defaults(func=cmd_evaluate)

    pat = sub.add_parser("patterns", help="detect depressive viewing patterns")
    pat.add_argument("--history", required=True, help="watch history (JSONL)")
    pat.add_argument("--model", help="model file for unlabeled events")
    pat.add_argument("--transcripts", help="transcripts corpus for unlabeled events")
    pat.add_argument(
        "--window-days", type=int, default=patterns_mod.DEFAULT_WINDOW_DAYS
    )
    pat.add_argument(
        "--overlap-days", type=int, default=patterns_mod.DEFAULT_OVERLAP_DAYS
    )
    pat.add_argument(
        "--decline-min-windows",
        type=int,
        default=patterns_mod.DEFAULT_DECLINE_MIN_WINDOWS,
    )
    pat.add_argument(
        "--decline-slope", type=float, default=patterns_mod.DEFAULT_DECLINE_SLOPE
    )
    pat.add_argument(
        "--min-run", type=int, default=patterns_mod.DEFAULT_RUMINATION_MIN_RUN
    )
    pat.add_argument(
        "--hf-threshold",
        type=float,
        default=patterns_mod.DEFAULT_HIGH_FREQUENCY_THRESHOLD,
    )
    pat.add_argument(
        "--hf-min-events",
        type=int,
        default=patterns_mod.DEFAULT_HIGH_FREQUENCY_MIN_EVENTS,
    )
    pat.add_argument("-o", "--output", required=True)
    pat.set_defaults(func=cmd_patterns)

    stats = sub.add_parser("stats", help="corpus or per-category report statistics")
    stats.add_argument("--corpus", help="corpus JSONL to summarize")
    stats.add_argument("--reports", help="score reports JSONL to summarize by category")
    stats.add_argument("--plot-data", help="write per-video scores as TSV")
    stats.add_argument("-o", "--output")
    stats.set_defaults(func=cmd_stats)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "func", None):
            if getattr(args, "command", None) == "lexicon":
                raise UsageError("lexicon requires a subcommand (expand)")
            raise UsageError(parser.format_usage())
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (
        ValueError,
        OSError,
        json.JSONDecodeError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
