"""Benchmark report emission: canonical JSON, markdown summary, CSV."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from rtlforge.errors import RtlforgeError
from rtlforge.harness.bench import BenchmarkReport


class WriteFailed(RtlforgeError):
    pass


def report_json_text(report: BenchmarkReport) -> str:
    """Key-sorted canonical serialization (byte-stable across runs)."""
    return json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"


def summary_markdown(report: BenchmarkReport) -> str:
    lines = ["# Benchmark summary", ""]
    lines.append(f"Overall failure rate: {report.fr_overall:.1f}%")
    lines.append("")
    for kind, stats in sorted(report.per_kind.items()):
        metric = "timing_gain" if kind == "pipelining" else "power_gain"
        label = "T%" if kind == "pipelining" else "P%"
        lines.append(f"## {kind}")
        lines.append("")
        lines.append(f"| A (ratio) | {label} | FR (%) |")
        lines.append("|---|---|---|")
        area = stats.get("area_ratio")
        gain = stats.get(metric)
        fr = stats.get("fr")
        lines.append("| {} | {} | {} |".format(
            _mean_std(area, 3), _mean_std(gain, 1), _mean_std(fr, 1)))
        lines.append("")
    return "\n".join(lines)


def _mean_std(entry: dict | None, digits: int) -> str:
    if entry is None:
        return "n/a"
    mean = f"{entry['mean']:.{digits}f}"
    if entry["n"] > 1:
        return f"{mean} ± {entry['std']:.{digits}f}"
    return mean


def per_design_csv(report: BenchmarkReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["triple_id", "run", "kind", "verdict",
                     "area_ratio", "timing_gain", "power_gain"])
    for entry in report.outcomes:
        metrics = entry.get("final_metrics") or {}
        writer.writerow([
            entry["triple_id"], entry["run"], entry["kind"], entry["verdict"],
            metrics.get("area_ratio", ""), metrics.get("timing_gain", ""),
            metrics.get("power_gain", ""),
        ])
    return buf.getvalue()


def emit_report(report: BenchmarkReport, out_dir: Path | str,
                formats: tuple[str, ...] = ("json", "md", "csv")) -> dict[str, Path]:
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        written: dict[str, Path] = {}
        if "json" in formats:
            path = out_dir / "report.json"
            path.write_text(report_json_text(report), encoding="utf-8")
            written["json"] = path
        if "md" in formats:
            path = out_dir / "summary.md"
            path.write_text(summary_markdown(report), encoding="utf-8")
            written["md"] = path
        if "csv" in formats:
            path = out_dir / "per_design.csv"
            path.write_text(per_design_csv(report), encoding="utf-8")
            written["csv"] = path
        return written
    except OSError as exc:
        raise WriteFailed(str(exc)) from None
