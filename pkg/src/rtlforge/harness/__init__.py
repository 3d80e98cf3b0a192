"""Benchmark harness: dataset loading, execution, reporting."""

from rtlforge.harness.bench import (
    BenchmarkReport,
    BenchSettings,
    metric_set_of,
    run_benchmark,
)
from rtlforge.harness.dataset import (
    BadMetadata,
    DatasetManifest,
    DesignTriple,
    DuplicateId,
    MissingFile,
    ValidationReport,
    load_dataset,
    load_triple,
    parse_kv,
    validate_triple,
)
from rtlforge.harness.reportgen import (
    WriteFailed,
    emit_report,
    per_design_csv,
    report_json_text,
    summary_markdown,
)

__all__ = [
    "BadMetadata",
    "BenchSettings",
    "BenchmarkReport",
    "DatasetManifest",
    "DesignTriple",
    "DuplicateId",
    "MissingFile",
    "ValidationReport",
    "WriteFailed",
    "emit_report",
    "load_dataset",
    "load_triple",
    "metric_set_of",
    "parse_kv",
    "per_design_csv",
    "report_json_text",
    "run_benchmark",
    "summary_markdown",
    "validate_triple",
]
