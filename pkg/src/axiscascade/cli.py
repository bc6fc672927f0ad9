"""
Command-line entry point.

Subcommands: ``prep``, ``embed``, ``run``, ``grid``, ``ablate``,
``select-uncertain``, ``score``, ``regress`` and ``plot``. Exit status is 0 on
success, 1 for invalid input (files, configs, arguments) and 2 for any other
failure.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from axiscascade import __version__
from axiscascade.cascade import load_predictor
from axiscascade.clustering import ClusterMethod, cluster
from axiscascade.core.errors import StageError, ValidationError
from axiscascade.data.dataset import Dataset, load_jsonl, save_jsonl
from axiscascade.embed.words import load_word_vectors
from axiscascade.harness import (
    ablate,
    grid,
    load_grid_spec,
    load_run_config,
    run,
    score_corpus,
    select_uncertain,
)
from axiscascade.harness.pipeline import drop_short_documents, embed_dataset
from axiscascade.nbreg import DesignMatrix, fit_nb2
from axiscascade.reduce import (
    export_scatter_csv,
    pca_fit,
    pca_transform,
    render_scatter_svg,
    scatter_frame,
)
from axiscascade.splitcraft import ThresholdConfig, assign_axis, axis_embeddings
from axiscascade.text.prep import PrepLevel, load_resources, preprocess

__all__ = ["main"]

_logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_FAILURE = 2


def _add_resource_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--level", default="L3", choices=[lvl.name for lvl in PrepLevel]
    )
    for name in ("stopwords", "emoji-map", "insult", "person", "org"):
        parser.add_argument(f"--{name}", type=Path, default=None)


def _resources(args):
    return load_resources(
        stopwords=args.stopwords,
        emoji_map=args.emoji_map,
        insult=args.insult,
        person=args.person,
        org=args.org,
    )


def _cmd_prep(args) -> int:
    res = _resources(args)
    level = PrepLevel.get(args.level)
    ds = load_jsonl(args.input)
    dropped: List[str] = []
    if args.drop_short:
        ds, dropped = drop_short_documents(ds, level, res)
    ds = Dataset(
        doc.replace(text=" ".join(preprocess(doc.text, level, res))) for doc in ds
    )
    save_jsonl(ds, args.output)
    print(f"wrote {len(ds)} records, dropped {len(dropped)}")
    return EXIT_OK


def _cmd_embed(args) -> int:
    res = _resources(args)
    ds = embed_dataset(
        load_jsonl(args.input),
        load_word_vectors(args.word_vectors),
        PrepLevel.get(args.level),
        res,
    )
    save_jsonl(ds, args.output)
    missing = sum(1 for doc in ds if doc.embedding is None)
    print(f"wrote {len(ds)} records, {missing} without a known token")
    return EXIT_OK


def _cmd_run(args) -> int:
    cfg = load_run_config(args.config)
    if args.output_dir is not None:
        cfg = cfg.replace(output_dir=args.output_dir)
    result = run(cfg)
    print(
        f"f1_macro={result.report.f1_macro:.4f} "
        f"f1_weighted={result.report.f1_weighted:.4f} -> {cfg.output_dir}"
    )
    return EXIT_OK


def _cmd_grid(args) -> int:
    cfg = load_run_config(args.config)
    if args.output_dir is not None:
        cfg = cfg.replace(output_dir=args.output_dir)
    gs = load_grid_spec(args.grid)
    rows = grid(cfg, gs)
    failed = sum(1 for row in rows if row["status"] != "ok")
    best = rows[0] if rows and rows[0]["best"] else None
    if best is not None:
        print(
            f"best: {best['method']} {best['stage_a']} {best['stage_b']} "
            f"{gs.selection_metric}={best[gs.selection_metric]:.4f}"
        )
    print(f"{len(rows)} cells, {failed} failed -> {cfg.output_dir}")
    return EXIT_OK


def _cmd_ablate(args) -> int:
    cfg = load_run_config(args.config)
    if args.output_dir is not None:
        cfg = cfg.replace(output_dir=args.output_dir)
    for row in ablate(cfg):
        value = row.get("f1_macro")
        shown = "error" if value is None else f"{value:.4f}"
        print(f"{row['step']}\t{row['features']}\tf1_macro={shown}")
    return EXIT_OK


def _cmd_select_uncertain(args) -> int:
    predictor = load_predictor(args.bundle)
    chosen = select_uncertain(predictor, load_jsonl(args.pool), args.n)
    text = "".join(f"{doc_id}\n" for doc_id in chosen)
    if args.output is None:
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text, encoding="utf-8")
    return EXIT_OK


def _cmd_score(args) -> int:
    summary = score_corpus(
        load_predictor(args.bundle), load_jsonl(args.pool), args.output
    )
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK


def _cmd_regress(args) -> int:
    columns = args.columns.split(",") if args.columns else None
    design = DesignMatrix.from_csv(args.input, args.response, columns)
    result = fit_nb2(design, max_iter=args.max_iter, tol=args.tol)
    print(result.format_table())
    if args.output is not None:
        result.save_csv(args.output)
    return EXIT_OK


def _cmd_plot(args) -> int:
    ds, skipped = load_jsonl(args.input).split_embedded()
    if skipped:
        _logger.warning("%d records without embedding are not plotted", len(skipped))
    X = ds.embedding_matrix()
    coords = pca_transform(pca_fit(X, 2), X)
    group = None
    if args.color_by == "partition":
        part = assign_axis(ds, axis_embeddings(ds), ThresholdConfig(args.threshold))
        group = [part.group_of(doc_id) for doc_id in ds.ids]
    elif args.color_by == "cluster":
        method = ClusterMethod.from_dict(json.loads(args.cluster_method))
        result = cluster(X, method, seed=args.seed)
        group = [str(c) for c in result.assignment]
    frame = scatter_frame(ds.ids, coords, [doc.label for doc in ds], group)
    out = Path(args.output_dir)
    export_scatter_csv(frame, out / "scatter.csv")
    render_scatter_svg(frame, out / "scatter.svg", color_by=args.color_by)
    print(f"wrote {len(frame)} points -> {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="axiscascade",
        description="Two-stage negativity classification experiments.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prep", help="preprocess record texts")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--output", type=Path, required=True)
    p.add_argument("--drop-short", action="store_true")
    _add_resource_args(p)
    p.set_defaults(func=_cmd_prep)

    p = sub.add_parser("embed", help="attach document embeddings")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--output", type=Path, required=True)
    p.add_argument("--word-vectors", type=Path, required=True)
    _add_resource_args(p)
    p.set_defaults(func=_cmd_embed)

    for name, func, help_text in (
        ("run", _cmd_run, "run one configuration end to end"),
        ("ablate", _cmd_ablate, "add feature families one at a time"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=Path, required=True)
        p.add_argument("--output-dir", type=Path, default=None)
        p.set_defaults(func=func)

    p = sub.add_parser("grid", help="grid search over methods and model kinds")
    p.add_argument("--config", type=Path, required=True)
    p.add_argument("--grid", type=Path, required=True)
    p.add_argument("--output-dir", type=Path, default=None)
    p.set_defaults(func=_cmd_grid)

    p = sub.add_parser("select-uncertain", help="pick pool records to annotate")
    p.add_argument("--bundle", type=Path, required=True)
    p.add_argument("--pool", type=Path, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--output", type=Path, default=None)
    p.set_defaults(func=_cmd_select_uncertain)

    p = sub.add_parser("score", help="label a corpus with a trained bundle")
    p.add_argument("--bundle", type=Path, required=True)
    p.add_argument("--pool", type=Path, required=True)
    p.add_argument("--output", type=Path, required=True)
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("regress", help="negative binomial regression on a CSV")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--response", required=True)
    p.add_argument("--columns", default=None, help="comma-separated covariates")
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--output", type=Path, default=None)
    p.set_defaults(func=_cmd_regress)

    p = sub.add_parser("plot", help="2-D PCA scatter of record embeddings")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--output-dir", type=Path, required=True)
    p.add_argument(
        "--color-by",
        default="gold_label",
        choices=["gold_label", "partition", "cluster"],
    )
    p.add_argument("--threshold", type=float, default=0.0)
    p.add_argument("--cluster-method", default='{"name": "kmeans", "k": 2}')
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_plot)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad arguments; those count as invalid input here
        return EXIT_OK if exc.code in (0, None) else EXIT_INVALID
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID if exc.is_validation else EXIT_FAILURE
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:
        _logger.debug("unhandled failure", exc_info=True)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE
