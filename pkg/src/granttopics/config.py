"""Flat key = value config file for pipeline runs.

Lines are ``key = value``; blank lines and ``#`` comments are ignored.
Lists are comma-separated. Unknown keys are rejected so typos surface
immediately.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path

from .analyze import AxisConfig
from .corpus import FilterCriteria


@dataclass
class PipelineConfig:
    corpus_path: str = ""
    corpus_format: str = "csv"
    vectors_path: str = ""
    out_dir: str = "out"
    stopwords_path: str | None = None
    min_count: int = 50
    min_tokens: int = 50
    prune_before_count: bool = True
    institutes: tuple[str, ...] = ("CA",)
    activity_prefixes: tuple[str, ...] = ("R",)
    excluded_activities: tuple[str, ...] = ("R25",)
    year_start: int = 2000
    year_end: int = 2020
    k_values: tuple[int, ...] = (15, 60)
    sweep_min: int = 2
    sweep_max: int = 80
    perplexity: float = 30.0
    learning_rate: float = 200.0
    tsne_iterations: int = 1000
    early_exaggeration: float = 12.0
    axis_x_negative: str = "diagnostics"
    axis_x_positive: str = "therapeutics"
    axis_y_negative: str = "physics"
    axis_y_positive: str = "biology"
    quiz_enabled: bool = False
    quiz_sample_fraction: float = 0.05
    quiz_reviewers: int = 4
    quiz_overlap_fraction: float = 0.25
    quiz_stratified: bool = False
    quadrants_per_grant: bool = False
    tsne_grid_perplexities: tuple[float, ...] = ()
    tsne_grid_learning_rates: tuple[float, ...] = ()
    seed: int = 0
    threads: int = 1

    def validate(self) -> None:
        if not self.corpus_path:
            raise ValueError("corpus_path is required")
        if not Path(self.corpus_path).exists():
            raise ValueError(f"corpus_path does not exist: {self.corpus_path}")
        if not self.vectors_path:
            raise ValueError("vectors_path is required")
        # vectors_path existence is checked by the embed stage so the abort
        # carries the stage name
        if self.stopwords_path and not Path(self.stopwords_path).exists():
            raise ValueError(f"stopwords_path does not exist: {self.stopwords_path}")
        if any(k < 2 for k in self.k_values):
            raise ValueError("k values must be >= 2")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    def criteria(self) -> FilterCriteria:
        return FilterCriteria(
            min_tokens=self.min_tokens,
            institutes=frozenset(self.institutes),
            activity_prefixes=frozenset(self.activity_prefixes),
            excluded_activities=frozenset(self.excluded_activities),
            year_range=(self.year_start, self.year_end),
        )

    def axes(self) -> AxisConfig:
        return AxisConfig(
            x_negative=self.axis_x_negative,
            x_positive=self.axis_x_positive,
            y_negative=self.axis_y_negative,
            y_positive=self.axis_y_positive,
        )


_BOOL_VALUES = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}


def _parse_value(name: str, raw: str, annotation: str) -> object:
    raw = raw.strip()
    if annotation == "bool":
        if raw.lower() not in _BOOL_VALUES:
            raise ValueError(f"{name}: expected true/false, got {raw!r}")
        return _BOOL_VALUES[raw.lower()]
    if annotation.startswith("tuple["):
        parts = [p.strip() for p in raw.split(",") if p.strip()]
        if "int" in annotation:
            return tuple(int(p) for p in parts)
        if "float" in annotation:
            return tuple(float(p) for p in parts)
        return tuple(parts)
    if annotation == "int":
        return int(raw)
    if annotation == "float":
        return float(raw)
    return raw


def load_config(path: str | Path) -> PipelineConfig:
    config = PipelineConfig()
    known = {f.name: f for f in fields(PipelineConfig)}
    for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ValueError(f"line {line_no}: expected 'key = value', got {line!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key not in known:
            raise ValueError(f"line {line_no}: unknown config key {key!r}")
        if key == "stopwords_path":
            setattr(config, key, raw.strip() or None)
        else:
            setattr(config, key, _parse_value(key, raw, known[key].type))
    return config
