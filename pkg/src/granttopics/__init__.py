"""granttopics: deterministic topic extraction and funding-trend analysis."""

__version__ = "0.1.0"

from .corpus import FilterCriteria, FunnelReport, GrantRecord, filter_records, load_records
from .text import TfIdfModel, build_vocabulary, doc_term_weights, fit_tfidf, tokenize
from .embedding import EmbeddingMatrix, WordVectorStore, embed_corpus, embed_document, load_word_vectors
from .cluster import (
    ClusterModel,
    WardMergeTrace,
    baseline_kmeans,
    fit_hsk,
    inertia,
    kmeans_refine,
    silhouette_score,
    sweep_k,
    ward_partition,
)
from .project import Projection2D, TsneConfig, calibrate_affinities, tsne_project
from .analyze import (
    AxisConfig,
    ClusterSummary,
    TopicTrend,
    annual_totals,
    build_trends,
    cluster_sizes,
    cluster_summary,
    emergence_extinction,
    growth_rate,
    quadrant_growth,
    rank_topics,
)
from .validate import (
    AgreementReport,
    QuizItem,
    QuizResponse,
    cohen_kappa,
    distance_split_analysis,
    generate_quiz,
    ks_two_sample,
    score_agreement,
)
from .config import PipelineConfig, load_config
from .pipeline import PipelineError, RunManifest, run_pipeline

__all__ = [
    "AgreementReport",
    "AxisConfig",
    "ClusterModel",
    "ClusterSummary",
    "EmbeddingMatrix",
    "FilterCriteria",
    "FunnelReport",
    "GrantRecord",
    "PipelineConfig",
    "PipelineError",
    "Projection2D",
    "QuizItem",
    "QuizResponse",
    "RunManifest",
    "TfIdfModel",
    "TopicTrend",
    "TsneConfig",
    "WardMergeTrace",
    "WordVectorStore",
    "annual_totals",
    "baseline_kmeans",
    "build_trends",
    "build_vocabulary",
    "calibrate_affinities",
    "cluster_sizes",
    "cluster_summary",
    "cohen_kappa",
    "distance_split_analysis",
    "doc_term_weights",
    "embed_corpus",
    "embed_document",
    "emergence_extinction",
    "filter_records",
    "fit_hsk",
    "fit_tfidf",
    "generate_quiz",
    "growth_rate",
    "inertia",
    "kmeans_refine",
    "ks_two_sample",
    "load_config",
    "load_records",
    "load_word_vectors",
    "quadrant_growth",
    "rank_topics",
    "run_pipeline",
    "score_agreement",
    "silhouette_score",
    "sweep_k",
    "tokenize",
    "tsne_project",
    "ward_partition",
]
