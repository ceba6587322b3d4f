"""File-driven pipeline stages and the reproducibility manifest.

Each stage reads the artifacts of earlier stages from the output
directory and writes its own, so stages can run standalone or chained by
``run_pipeline``. Reruns with an identical config produce byte-identical
outputs and therefore identical manifest digests.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import analyze, cluster, embedding, project, svgplot, text, validate
from .config import PipelineConfig
from .corpus import GrantRecord, filter_records, load_records, write_records

logger = logging.getLogger(__name__)

STAGE_ORDER = ("filter", "tfidf", "embed", "cluster", "project", "summarize", "trends", "quiz")


class PipelineError(RuntimeError):
    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class RunManifest:
    config_sha256: str
    tool_version: str
    stages: dict[str, dict[str, str]] = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {
                "config_sha256": self.config_sha256,
                "tool_version": self.tool_version,
                "stages": self.stages,
            },
            sort_keys=True,
            indent=2,
        )


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _record_outputs(manifest: RunManifest, stage: str, out_dir: Path, names: list[str]) -> None:
    manifest.stages.setdefault(stage, {})
    for name in names:
        manifest.stages[stage][name] = _sha256(out_dir / name)


class PipelineRun:
    """Stage runner over one output directory."""

    def __init__(self, config: PipelineConfig, config_path: str | Path | None = None):
        self.config = config
        self.out_dir = Path(config.out_dir)
        self.stop_words = text.load_stop_words(config.stopwords_path)
        config_bytes = Path(config_path).read_bytes() if config_path else b""
        self.manifest = RunManifest(
            config_sha256=hashlib.sha256(config_bytes).hexdigest(),
            tool_version=__version__,
        )

    # -- artifact loaders -------------------------------------------------

    def _filtered_records(self) -> list[GrantRecord]:
        return load_records(self.out_dir / "filtered.csv", "csv")

    def _tfidf(self) -> text.TfIdfModel:
        return text.model_from_json((self.out_dir / "tfidf.json").read_text("utf-8"))

    def _embeddings(self) -> embedding.EmbeddingMatrix:
        return embedding.read_matrix_csv(self.out_dir / "embeddings.csv")

    def _model(self, k: int) -> cluster.ClusterModel:
        return cluster.model_from_json((self.out_dir / f"model_k{k}.json").read_text("utf-8"))

    def _embedded_records(self) -> list[GrantRecord]:
        matrix = self._embeddings()
        wanted = set(matrix.record_ids)
        records = [r for r in self._filtered_records() if r.record_id in wanted]
        if [r.record_id for r in records] != matrix.record_ids:
            raise ValueError("embeddings.csv does not align with filtered.csv")
        return records

    def _topic_names(self, k: int) -> dict[int, str]:
        path = self.out_dir / f"topic_names_k{k}.csv"
        return analyze.read_topic_names(path) if path.exists() else {}

    # -- stages ------------------------------------------------------------

    def stage_filter(self) -> list[str]:
        cfg = self.config
        records = load_records(cfg.corpus_path, cfg.corpus_format)
        vocabulary = None
        if cfg.prune_before_count:
            streams = [text.tokenize(r.abstract, self.stop_words) for r in records]
            try:
                vocabulary = text.build_vocabulary(streams, cfg.min_count).vocabulary
            except text.VocabularyError:
                vocabulary = {}
        counter = text.make_token_counter(self.stop_words, vocabulary)
        filtered, funnel = filter_records(records, cfg.criteria(), counter)
        write_records(filtered, self.out_dir / "filtered.csv", "csv")
        (self.out_dir / "funnel.json").write_text(
            json.dumps({"stages": funnel.stages}, sort_keys=True), "utf-8"
        )
        return ["filtered.csv", "funnel.json"]

    def stage_tfidf(self) -> list[str]:
        records = self._filtered_records()
        streams = [text.tokenize(r.abstract, self.stop_words) for r in records]
        model = text.fit_tfidf(text.build_vocabulary(streams, self.config.min_count))
        (self.out_dir / "tfidf.json").write_text(text.model_to_json(model), "utf-8")
        return ["tfidf.json"]

    def stage_embed(self) -> list[str]:
        cfg = self.config
        if not Path(cfg.vectors_path).exists():
            raise FileNotFoundError(f"word vector file not found: {cfg.vectors_path}")
        store = embedding.load_word_vectors(cfg.vectors_path)
        matrix, excluded = embedding.embed_corpus(
            store, self._tfidf(), self._filtered_records(),
            stop_words=self.stop_words, threads=cfg.threads,
        )
        embedding.write_matrix_csv(matrix, self.out_dir / "embeddings.csv")
        (self.out_dir / "exclusions.json").write_text(
            json.dumps({"excluded_record_ids": excluded}, sort_keys=True), "utf-8"
        )
        return ["embeddings.csv", "exclusions.json"]

    def stage_cluster(self) -> list[str]:
        matrix = self._embeddings()
        outputs = []
        for k in self.config.k_values:
            model = cluster.fit_hsk(matrix.vectors, k)
            name = f"model_k{k}.json"
            (self.out_dir / name).write_text(cluster.model_to_json(model), "utf-8")
            outputs.append(name)
        return outputs

    def stage_sweep(self) -> list[str]:
        matrix = self._embeddings()
        k_range = range(self.config.sweep_min, self.config.sweep_max + 1)
        quality = cluster.sweep_k(matrix.vectors, k_range)
        cluster.write_sweep_csv(quality, self.out_dir / "sweep.csv")
        return ["sweep.csv"]

    def stage_project(self) -> list[str]:
        cfg = self.config
        matrix = self._embeddings()
        tsne_config = project.TsneConfig(
            perplexity=cfg.perplexity,
            learning_rate=cfg.learning_rate,
            iterations=cfg.tsne_iterations,
            early_exaggeration=cfg.early_exaggeration,
            seed=cfg.seed,
        )
        proj = project.tsne_project(matrix.vectors, tsne_config)
        project.write_kl_log(self.out_dir / "kl_log.csv", proj)
        outputs = ["kl_log.csv"]
        for k in cfg.k_values:
            model = self._model(k)
            project.write_projection_csv(
                self.out_dir / f"projection_k{k}.csv", matrix.record_ids, proj, model.assignments
            )
            svg = svgplot.emit_scatter_svg(proj, model, self._topic_names(k))
            (self.out_dir / f"scatter_k{k}.svg").write_text(svg, "utf-8")
            outputs += [f"projection_k{k}.csv", f"scatter_k{k}.svg"]
        # optional hyperparameter grid: panel data files for tuning plots
        if cfg.tsne_grid_perplexities and cfg.tsne_grid_learning_rates:
            labels = self._model(cfg.k_values[0]).assignments
            for perp in cfg.tsne_grid_perplexities:
                for lr in cfg.tsne_grid_learning_rates:
                    grid_proj = project.tsne_project(
                        matrix.vectors,
                        project.TsneConfig(
                            perplexity=perp,
                            learning_rate=lr,
                            iterations=cfg.tsne_iterations,
                            early_exaggeration=cfg.early_exaggeration,
                            seed=cfg.seed,
                        ),
                    )
                    name = f"projection_grid_p{perp:g}_lr{lr:g}.csv"
                    project.write_projection_csv(
                        self.out_dir / name, matrix.record_ids, grid_proj, labels
                    )
                    outputs.append(name)
        return outputs

    def _summaries(self, k: int) -> list[analyze.ClusterSummary]:
        records = self._embedded_records()
        tfidf = self._tfidf()
        matrix = self._embeddings()
        weights = [
            text.doc_term_weights(tfidf, text.tokenize(r.abstract, self.stop_words))
            for r in records
        ]
        return analyze.cluster_summary(self._model(k), weights, matrix.vectors, records)

    def stage_summarize(self) -> list[str]:
        outputs = []
        records = self._embedded_records()
        for k in self.config.k_values:
            summaries = self._summaries(k)
            (self.out_dir / f"summary_k{k}.json").write_text(
                analyze.summaries_to_json(summaries), "utf-8"
            )
            analyze.write_naming_template(
                self.out_dir / f"naming_template_k{k}.csv", summaries, records
            )
            outputs += [f"summary_k{k}.json", f"naming_template_k{k}.csv"]
        return outputs

    def stage_trends(self) -> list[str]:
        cfg = self.config
        records = self._embedded_records()
        year_range = (cfg.year_start, cfg.year_end)
        outputs = []
        for k in cfg.k_values:
            model = self._model(k)
            trends = analyze.build_trends(records, model.assignments, year_range)
            analyze.write_trend_csv(
                self.out_dir / f"trends_k{k}.csv", trends, year_range, self._topic_names(k)
            )
            proj_path = self.out_dir / f"projection_k{k}.csv"
            outputs.append(f"trends_k{k}.csv")
            if proj_path.exists():
                points = _read_projection_points(proj_path)
                report = analyze.quadrant_growth(
                    points, model, trends, cfg.axes(), per_grant=cfg.quadrants_per_grant
                )
                (self.out_dir / f"quadrants_k{k}.json").write_text(
                    analyze.quadrant_to_json(report), "utf-8"
                )
                outputs.append(f"quadrants_k{k}.json")
        return outputs

    def stage_quiz(self) -> list[str]:
        cfg = self.config
        records = self._embedded_records()
        eligible = [k for k in cfg.k_values if k >= 5]
        if not eligible:
            raise ValueError("quiz needs a model with >= 5 clusters; none configured")
        skipped = sorted(set(cfg.k_values) - set(eligible))
        if skipped:
            logger.warning("quiz skipped for k < 5: %s", skipped)
        outputs = []
        for k in eligible:
            model = self._model(k)
            items, plan = validate.generate_quiz(
                model,
                self._summaries(k),
                records,
                sample_fraction=cfg.quiz_sample_fraction,
                n_reviewers=cfg.quiz_reviewers,
                overlap_fraction=cfg.quiz_overlap_fraction,
                seed=cfg.seed,
                stratified=cfg.quiz_stratified,
            )
            validate.write_quiz_jsonl(items, self.out_dir / f"quiz_k{k}.jsonl")
            validate.write_answer_key(items, self.out_dir / f"quiz_key_k{k}.json")
            validate.write_quiz_sheet(items, self.out_dir / f"quiz_sheet_k{k}.txt")
            validate.write_plan_json(plan, self.out_dir / f"quiz_plan_k{k}.json")
            outputs += [
                f"quiz_k{k}.jsonl", f"quiz_key_k{k}.json",
                f"quiz_sheet_k{k}.txt", f"quiz_plan_k{k}.json",
            ]
        return outputs

    def run_stage(self, stage: str) -> list[str]:
        runners = {
            "filter": self.stage_filter,
            "tfidf": self.stage_tfidf,
            "embed": self.stage_embed,
            "sweep": self.stage_sweep,
            "cluster": self.stage_cluster,
            "project": self.stage_project,
            "summarize": self.stage_summarize,
            "trends": self.stage_trends,
            "quiz": self.stage_quiz,
        }
        self.out_dir.mkdir(parents=True, exist_ok=True)
        try:
            outputs = runners[stage]()
        except PipelineError:
            raise
        except Exception as exc:
            raise PipelineError(stage, exc) from exc
        _record_outputs(self.manifest, stage, self.out_dir, outputs)
        return outputs


def _read_projection_points(path: Path) -> np.ndarray:
    import csv as _csv

    with path.open(newline="", encoding="utf-8") as fh:
        reader = _csv.DictReader(fh)
        points = [(float(row["x"]), float(row["y"])) for row in reader]
    return np.array(points, dtype=np.float64)


def run_pipeline(config: PipelineConfig, config_path: str | Path | None = None) -> RunManifest:
    """Execute every stage in order and write the run manifest."""
    config.validate()
    run = PipelineRun(config, config_path)
    stages = [s for s in STAGE_ORDER if s != "quiz" or config.quiz_enabled]
    for stage in stages:
        run.run_stage(stage)
    manifest_path = run.out_dir / "manifest.json"
    manifest_path.write_text(run.manifest.to_json(), "utf-8")
    return run.manifest
