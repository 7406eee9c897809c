"""Histogram-binned Bayesian classifier with boosted bin weights (DBNN) and
the optimal training-data selection loop (ODSA)."""

from dbnn._core import (
    BinningSchema,
    ClassComparison,
    ComparisonStatus,
    CurvePoint,
    Dataset,
    DbnnError,
    DivergenceReport,
    EvalReport,
    Example,
    FeatureBinning,
    FilteredEvalReport,
    Prediction,
    PredictionRecord,
    SelectionReport,
    TrainedModel,
    compare_distributions,
    evaluate,
    filter_by_confidence,
    infer_schema,
    ingest_csv,
    random_baseline,
    read_eval_report,
    run_odsa,
    split_by_indices,
    train,
    write_csv,
)

__all__ = [
    "BinningSchema",
    "ClassComparison",
    "ComparisonStatus",
    "CurvePoint",
    "Dataset",
    "DbnnError",
    "DivergenceReport",
    "EvalReport",
    "Example",
    "FeatureBinning",
    "FilteredEvalReport",
    "Prediction",
    "PredictionRecord",
    "SelectionReport",
    "TrainedModel",
    "compare_distributions",
    "evaluate",
    "filter_by_confidence",
    "infer_schema",
    "ingest_csv",
    "random_baseline",
    "read_eval_report",
    "run_odsa",
    "split_by_indices",
    "train",
    "write_csv",
]
