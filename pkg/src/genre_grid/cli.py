"""Command-line pipeline: ingest | consolidate | alpha | train | evaluate |
predict | grid | render.

Subcommands hand data to each other through files only. Every invocation that
writes output also writes a machine-readable run manifest (inputs, outputs,
seed, version, options) next to its primary output, so a pipeline can be
replayed from the manifests alone. Exit codes: 0 success, 1 invalid data,
2 usage error. Diagnostics go to stderr; data goes to files (plus stdout for
`alpha`, whose report is the data).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .annotation import (
    TASKS,
    consolidate,
    krippendorff_alpha,
    label_set_for_task,
    load_annotations,
    read_gold,
    write_gold,
)
from .classifiers import (
    DEFAULT_SEED,
    NAMED_GRIDS,
    GridCell,
    load_model,
    predict as predict_batch,
    save_model,
    train_for_task,
)
from .corpus import (
    FilterConfig,
    build_sentence_table,
    load_corpus,
    load_filter_config,
    read_sentences,
    write_sentences,
)
from .errors import DataError
from .evaluation import evaluate as evaluate_metrics, save_report
from .grid import (
    DEFAULT_CAP,
    RenderOptions,
    aggregate_units,
    compute_zoom_bounds,
    read_grid_csv,
    render_grid,
    score_items,
    write_grid_csv,
)
from .predictions import PredictionRecord, load_predictions, merge_sources, write_predictions

CONFIG_ENV_VAR = "GENRE_GRID_CONFIG"


def _write_manifest(
    subcommand: str,
    primary_output: str | Path,
    inputs: dict,
    outputs: dict,
    seed: int | None,
    options: dict,
) -> None:
    manifest = {
        "tool": "genre-grid",
        "version": __version__,
        "subcommand": subcommand,
        "inputs": {k: str(v) for k, v in inputs.items() if v is not None},
        "outputs": {k: str(v) for k, v in outputs.items() if v is not None},
        "seed": seed,
        "options": options,
    }
    path = Path(str(primary_output) + ".manifest.json")
    path.write_text(
        json.dumps(manifest, ensure_ascii=False, sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )


def _info(message: str) -> None:
    print(message, file=sys.stderr)


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_ingest(args) -> int:
    config_path = args.config or os.environ.get(CONFIG_ENV_VAR)
    config = load_filter_config(config_path) if config_path else FilterConfig()
    items = load_corpus(args.corpus, format=args.format)
    sentences, counts = build_sentence_table(items, config)
    write_sentences(sentences, args.out)
    _info(
        f"ingest: {len(items)} items -> {counts['kept']} sentences kept "
        f"(dropped: {counts['too_short']} too short, {counts['too_long']} too long, "
        f"{counts['source_leak']} source leaks)"
    )
    _write_manifest(
        "ingest",
        args.out,
        inputs={"corpus": args.corpus, "config": config_path},
        outputs={"sentences": args.out},
        seed=None,
        options={"format": args.format},
    )
    return 0


def _cmd_consolidate(args) -> int:
    records = load_annotations(args.annotations, task=args.task)
    gold, report = consolidate(records, args.task)
    write_gold(gold, args.out)
    if args.report:
        Path(args.report).write_text(
            json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )
    _info(
        f"consolidate[{args.task}]: kept {report.kept} "
        f"(tied {report.tied}, all_neutral {report.all_neutral}, "
        f"too_few_votes {report.too_few_votes})"
    )
    _write_manifest(
        "consolidate",
        args.out,
        inputs={"annotations": args.annotations},
        outputs={"gold": args.out, "report": args.report},
        seed=None,
        options={"task": args.task},
    )
    return 0


def _cmd_alpha(args) -> int:
    records = load_annotations(args.annotations, task=args.task)
    report = krippendorff_alpha(
        records, args.task, metric=args.metric, raw_scale=args.raw_scale
    )
    doc = json.dumps(report.to_dict(), sort_keys=True, indent=2)
    print(doc)
    if args.out:
        Path(args.out).write_text(doc + "\n", encoding="utf-8")
        _write_manifest(
            "alpha",
            args.out,
            inputs={"annotations": args.annotations},
            outputs={"report": args.out},
            seed=None,
            options={"task": args.task, "metric": args.metric, "raw_scale": args.raw_scale},
        )
    return 0


def _load_grid_spec(spec: str) -> list[GridCell]:
    if spec in NAMED_GRIDS:
        return NAMED_GRIDS[spec]()
    path = Path(spec)
    if not path.exists():
        raise DataError(
            f"unknown grid {spec!r}: not a named grid {sorted(NAMED_GRIDS)} "
            "and no such file"
        )
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: malformed grid file: {exc}") from exc
    cells = []
    for entry in raw:
        cells.append(
            GridCell.make(
                entry["model_kind"],
                entry["vectorizer_kind"],
                int(entry.get("min_df", 1)),
                **entry.get("hyperparameters", {}),
            )
        )
    return cells


def _cmd_train(args) -> int:
    sentences = read_sentences(args.sentences)
    gold = read_gold(args.gold, task=args.task)
    if not gold:
        raise DataError(f"no gold labels for task {args.task!r} in {args.gold}")
    by_id = {s.sentence_id: s for s in sentences}
    missing = [g.sentence_id for g in gold if g.sentence_id not in by_id]
    if missing:
        raise DataError(
            f"{len(missing)} gold sentence id(s) missing from the sentence table, "
            f"e.g. {missing[:3]}"
        )
    ordered = sorted(gold, key=lambda g: g.sentence_id)
    texts = [by_id[g.sentence_id].text for g in ordered]
    labels = [g.label for g in ordered]
    outcome = train_for_task(
        texts,
        labels,
        task=args.task,
        grid=_load_grid_spec(args.grid),
        folds=args.folds,
        seed=args.seed,
    )
    save_model(outcome.model, args.out_model)
    best = outcome.search.best
    _info(
        f"train[{args.task}]: best cell {best.cell.to_dict()} "
        f"cv-macro-F1={best.mean_score:.4f} "
        f"test-macro-F1={outcome.test_report.macro_f1:.4f} "
        f"(n_test={outcome.test_report.n})"
    )
    if args.report:
        save_report(outcome.test_report, args.report)
    if args.cv_results:
        Path(args.cv_results).write_text(
            json.dumps(
                {
                    "folds": outcome.search.folds,
                    "seed": outcome.search.seed,
                    "split": outcome.split.to_dict(),
                    "ranked": [r.to_dict() for r in outcome.search.ranked],
                },
                sort_keys=True,
                indent=2,
            )
            + "\n",
            encoding="utf-8",
        )
    _write_manifest(
        "train",
        args.out_model,
        inputs={"sentences": args.sentences, "gold": args.gold},
        outputs={
            "model": args.out_model,
            "report": args.report,
            "cv_results": args.cv_results,
        },
        seed=args.seed,
        options={"task": args.task, "grid": args.grid, "folds": args.folds},
    )
    return 0


def _cmd_evaluate(args) -> int:
    gold = read_gold(args.gold, task=args.task)
    if not gold:
        raise DataError(f"no gold labels for task {args.task!r} in {args.gold}")
    preds = load_predictions(args.predictions, task=args.task)
    by_id = {}
    for p in preds:
        by_id[p.sentence_id] = p.label
    missing = [g.sentence_id for g in gold if g.sentence_id not in by_id]
    if missing:
        raise DataError(
            f"{len(missing)} gold sentence id(s) have no prediction, e.g. {missing[:3]}"
        )
    ordered = sorted(gold, key=lambda g: g.sentence_id)
    y_true = [g.label for g in ordered]
    y_pred = [by_id[g.sentence_id] for g in ordered]
    report = evaluate_metrics(y_true, y_pred, label_set_for_task(args.task))
    save_report(report, args.out)
    if args.text:
        print(report.to_text())
    _info(
        f"evaluate[{args.task}]: accuracy={report.accuracy:.4f} "
        f"macro-F1={report.macro_f1:.4f} (n={report.n})"
    )
    _write_manifest(
        "evaluate",
        args.out,
        inputs={"gold": args.gold, "predictions": args.predictions},
        outputs={"report": args.out},
        seed=None,
        options={"task": args.task},
    )
    return 0


def _cmd_predict(args) -> int:
    model = load_model(args.model)
    sentences = read_sentences(args.sentences)
    model_id = args.model_id or Path(args.model).stem
    outputs = predict_batch(model, [s.text for s in sentences])
    records = [
        PredictionRecord(
            sentence_id=s.sentence_id,
            task=model.task,
            label=p.label,
            model_id=model_id,
            scores=p.scores,
            probabilistic=model.probabilistic,
        )
        for s, p in zip(sentences, outputs)
    ]
    write_predictions(records, args.out)
    _info(f"predict[{model.task}]: {len(records)} sentences with {model.model_kind}")
    _write_manifest(
        "predict",
        args.out,
        inputs={"model": args.model, "sentences": args.sentences},
        outputs={"predictions": args.out},
        seed=None,
        options={"model_id": model_id},
    )
    return 0


def _unique_or_none(values) -> str | None:
    distinct = {v for v in values}
    if len(distinct) == 1:
        return next(iter(distinct))
    return None


def _cmd_grid(args) -> int:
    sentences = read_sentences(args.sentences)
    predictions = []
    precedence: list[str] = []
    for path in args.predictions:
        for record in load_predictions(path):
            predictions.append(record)
            if record.model_id not in precedence:
                precedence.append(record.model_id)
    if args.precedence:
        precedence = [m.strip() for m in args.precedence.split(",") if m.strip()]
    merged = merge_sources(predictions, precedence, sentences)
    cov = merged.coverage
    _info(
        f"grid: {cov.covered}/{cov.n_sentences} sentences labeled on both axes "
        f"({len(cov.missing_factuality)} missing factuality, "
        f"{len(cov.missing_formality)} missing formality)"
    )
    if args.coverage:
        Path(args.coverage).write_text(
            json.dumps(cov.to_dict(), sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )

    cap = args.cap if args.cap and args.cap > 0 else None
    items_meta = {}
    if args.corpus:
        items_meta = {i.item_id: i for i in load_corpus(args.corpus)}
    if args.level == "item":
        display = {
            iid: (meta.genre_tag, meta.text_kind) for iid, meta in items_meta.items()
        }
        points = score_items(merged.pairs, cap=cap, display=display)
        excluded = [
            iid for iid in items_meta if iid not in {p.unit_id for p in points}
        ]
        if excluded:
            _info(
                f"grid: {len(excluded)} item(s) excluded (no sentence labeled on "
                f"both axes), e.g. {excluded[:3]}"
            )
    else:
        if not args.corpus:
            raise DataError(f"--level {args.level} needs --corpus for the item grouping")
        grouping = {}
        for iid, meta in items_meta.items():
            group = meta.outlet if args.level == "outlet" else meta.section
            if group is not None:
                grouping[iid] = group
        groups: dict[str, list] = {}
        for iid, g in grouping.items():
            groups.setdefault(g, []).append(items_meta[iid])
        display = {
            g: (
                _unique_or_none([m.genre_tag for m in members]),
                _unique_or_none([m.text_kind for m in members]),
            )
            for g, members in groups.items()
        }
        points = aggregate_units(
            merged.pairs, grouping, level=args.level, cap=cap, display=display
        )
    write_grid_csv(points, args.out)
    _info(f"grid: wrote {len(points)} {args.level} point(s) to {args.out}")
    _write_manifest(
        "grid",
        args.out,
        inputs={
            "sentences": args.sentences,
            "corpus": args.corpus,
            **{f"predictions_{i}": p for i, p in enumerate(args.predictions)},
        },
        outputs={"grid": args.out, "coverage": args.coverage},
        seed=None,
        options={
            "level": args.level,
            "cap": args.cap,
            "precedence": precedence,
        },
    )
    return 0


def _cmd_render(args) -> int:
    points = read_grid_csv(args.grid)
    zoom = None
    if args.zoom == "auto":
        zoom = compute_zoom_bounds(points, denominator=args.denominator)
    options = RenderOptions(
        color_by=None if args.color_by == "none" else args.color_by,
        shape_by=None if args.shape_by == "none" else args.shape_by,
        size_by=None if args.size_by == "none" else args.size_by,
        hulls=args.hulls,
        zoom=zoom,
        denominator=args.denominator,
        title=args.title,
    )
    svg = render_grid(points, options)
    Path(args.out).write_text(svg, encoding="utf-8")
    _info(f"render: wrote {args.out} ({len(points)} points)")
    _write_manifest(
        "render",
        args.out,
        inputs={"grid": args.grid},
        outputs={"svg": args.out},
        seed=None,
        options={
            "color_by": args.color_by,
            "shape_by": args.shape_by,
            "size_by": args.size_by,
            "hulls": args.hulls,
            "zoom": args.zoom,
            "denominator": args.denominator,
        },
    )
    return 0


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="genre-grid",
        description=(
            "Classify news sentences on the factuality and formality axes and "
            "position items, outlets, and sections on a two-dimensional grid."
        ),
    )
    parser.add_argument("--version", action="version", version=f"genre-grid {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("ingest", help="segment and filter a corpus into a sentence table")
    p.add_argument("--corpus", required=True)
    p.add_argument("--format", choices=("jsonl", "csv"), default=None)
    p.add_argument("--config", default=None, help=f"filter config (default ${CONFIG_ENV_VAR})")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("consolidate", help="majority-vote gold labels from annotations")
    p.add_argument("--annotations", required=True)
    p.add_argument("--task", choices=TASKS, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--report", default=None, help="write the discard report JSON here")
    p.set_defaults(func=_cmd_consolidate)

    p = sub.add_parser("alpha", help="inter-coder reliability (Krippendorff's alpha)")
    p.add_argument("--annotations", required=True)
    p.add_argument("--task", choices=TASKS, required=True)
    p.add_argument("--metric", choices=("nominal", "ordinal", "interval"), default="nominal")
    p.add_argument(
        "--raw-scale",
        action="store_true",
        help="score the raw 1-5 formality ratings instead of the merged binary labels",
    )
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_alpha)

    p = sub.add_parser("train", help="grid-search and train the best baseline model")
    p.add_argument("--sentences", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--task", choices=TASKS, required=True)
    p.add_argument("--grid", default="default", help="named grid (default|fast) or a JSON file")
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out-model", required=True)
    p.add_argument("--report", default=None, help="write the held-out test report here")
    p.add_argument("--cv-results", default=None, help="write ranked CV results here")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("evaluate", help="score predictions against gold labels")
    p.add_argument("--gold", required=True)
    p.add_argument("--predictions", required=True)
    p.add_argument("--task", choices=TASKS, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--text", action="store_true", help="also print an aligned table")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("predict", help="label a sentence table with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--sentences", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--model-id", default=None, help="source id in the output (default: model file stem)")
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("grid", help="compute grid coordinates from predictions")
    p.add_argument(
        "--predictions",
        action="append",
        required=True,
        help="prediction JSONL; repeat for multiple sources",
    )
    p.add_argument("--sentences", required=True)
    p.add_argument("--corpus", default=None, help="corpus file for grouping and display metadata")
    p.add_argument("--level", choices=("item", "outlet", "section"), default="item")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="first-N sentence cap per item (0 = no cap)")
    p.add_argument("--precedence", default=None, help="comma-separated model ids, highest first")
    p.add_argument("--coverage", default=None, help="write the coverage report JSON here")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_grid)

    p = sub.add_parser("render", help="render a grid CSV as an SVG scatter plot")
    p.add_argument("--grid", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--color-by", choices=("genre_tag", "none"), default="genre_tag")
    p.add_argument("--shape-by", choices=("text_kind", "none"), default="text_kind")
    p.add_argument("--size-by", choices=("n_sentences", "none"), default="none")
    p.add_argument("--hulls", action="store_true")
    p.add_argument("--zoom", choices=("auto", "none"), default="none")
    p.add_argument(
        "--denominator",
        choices=("all", "fact-opinion"),
        default="all",
        help="factuality-axis denominator: all sentences, or fact+opinion only",
    )
    p.add_argument("--title", default=None)
    p.set_defaults(func=_cmd_render)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "denominator", None) == "fact-opinion":
        args.denominator = "fact_opinion"
    try:
        return args.func(args)
    except DataError as exc:
        print(f"genre-grid {args.subcommand}: error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
