"""Command-line interface: one subcommand per pipeline stage plus ``run``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import cluster as cluster_mod
from . import embedding, validate
from .config import load_config
from .pipeline import PipelineError, PipelineRun, run_pipeline

STAGE_COMMANDS = (
    "filter", "tfidf", "embed", "cluster", "sweep", "project", "summarize", "trends", "quiz"
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="granttopics",
        description="Extract research topics from a grant corpus and report funding trends.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", required=True, help="pipeline config file (key = value lines)")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--threads", type=int, default=None, help="cap worker threads")
        p.add_argument("--out-dir", default=None, help="override the config output directory")

    for name in STAGE_COMMANDS:
        add_common(sub.add_parser(name, help=f"run the {name} stage"))
    add_common(sub.add_parser("run", help="run the full pipeline and write manifest.json"))

    score = sub.add_parser("score", help="score reviewer responses against a quiz")
    score.add_argument("--quiz", required=True, help="quiz items JSONL")
    score.add_argument("--key", required=True, help="answer key JSON")
    score.add_argument("--responses", required=True, help="responses CSV (quiz_id,reviewer_id,choice)")
    score.add_argument("--embeddings", default=None, help="embeddings CSV for the distance split")
    score.add_argument("--model", default=None, help="cluster model JSON for the distance split")
    score.add_argument("--out", default=None, help="write the report JSON here (default stdout)")
    return parser


def _configure(args: argparse.Namespace):
    config = load_config(args.config)
    if args.seed is not None:
        config.seed = args.seed
    if args.threads is not None:
        config.threads = args.threads
    if args.out_dir is not None:
        config.out_dir = args.out_dir
    return config


def _cmd_score(args: argparse.Namespace) -> int:
    items = validate.read_quiz_jsonl(args.quiz, args.key)
    responses = validate.read_responses_csv(args.responses)
    report = validate.score_agreement(items, responses)
    split = None
    if args.embeddings and args.model:
        matrix = embedding.read_matrix_csv(args.embeddings)
        model = cluster_mod.model_from_json(Path(args.model).read_text("utf-8"))
        split = validate.distance_split_analysis(items, responses, matrix, model)
        report.ks_statistic = split.ks_statistic
        report.ks_p_value = split.p_value
    payload = validate.report_to_json(report, split)
    if args.out:
        Path(args.out).write_text(payload, "utf-8")
    else:
        print(payload)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "score":
            return _cmd_score(args)
        config = _configure(args)
        if args.command == "run":
            manifest = run_pipeline(config, args.config)
            print(json.dumps({"stages": sorted(manifest.stages)}, sort_keys=True))
            return 0
        run = PipelineRun(config, args.config)
        outputs = run.run_stage(args.command)
        print(json.dumps({"stage": args.command, "outputs": outputs}, sort_keys=True))
        return 0
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # config/validation problems
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
