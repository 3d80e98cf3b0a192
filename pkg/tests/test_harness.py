import json
import shutil
from pathlib import Path

import pytest

from rtlforge.goals import GoalSpec, OptimizationKind
from rtlforge.harness import (
    BenchSettings,
    DuplicateId,
    MissingFile,
    emit_report,
    load_dataset,
    per_design_csv,
    report_json_text,
    run_benchmark,
    summary_markdown,
    validate_triple,
)
from rtlforge.loop import DialecticMode, RunConfig
from rtlforge.metrics import failure_rate

SAMPLE = Path(__file__).resolve().parent.parent / "sample_data"


def test_load_bundled_dataset(manifest):
    assert len(manifest.triples) == 5
    counts = {k.value: v for k, v in manifest.counts().items()}
    assert counts == {"pipelining": 3, "clock_gating": 2}
    assert [t.id for t in manifest.triples] == sorted(t.id for t in manifest.triples)


def test_load_is_idempotent(manifest):
    again = load_dataset(SAMPLE / "triples")
    assert [t.id for t in again.triples] == [t.id for t in manifest.triples]


def test_missing_file_named(tmp_path):
    triple = tmp_path / "t1"
    triple.mkdir()
    (triple / "unopt.v").write_text("module m(input a); endmodule")
    (triple / "meta.toml").write_text('kind = "pipelining"\n')
    with pytest.raises(MissingFile) as err:
        load_dataset(tmp_path)
    assert err.value.triple_id == "t1" and err.value.filename == "tb.v"


def test_duplicate_id(tmp_path):
    for name in ("a1", "a2"):
        d = tmp_path / name
        d.mkdir()
        (d / "unopt.v").write_text("module m(input a); endmodule")
        (d / "tb.v").write_text("module tb; endmodule")
        (d / "meta.toml").write_text('kind = "pipelining"\nid = "same"\n')
    with pytest.raises(DuplicateId):
        load_dataset(tmp_path)


def test_empty_root_is_valid(tmp_path):
    manifest = load_dataset(tmp_path)
    assert manifest.triples == []


def test_goal_overrides_from_meta(manifest):
    t = manifest.by_id("mul8_pipe")
    assert t.goal.min_timing_gain == 20.0
    assert t.goal.max_area_ratio == 3.0
    assert t.goal.kind is OptimizationKind.PIPELINING


def test_validate_bundled_triples(manifest, evaluator):
    for triple in manifest.triples:
        report = validate_triple(triple, evaluator(triple.clock))
        assert report.ok, [c for c in report.checks if not c.passed]
        names = [c.name for c in report.checks]
        assert names == ["unoptimized_parses", "testbench_compiles",
                         "reference_equivalent", "reference_improves"]


def test_validate_catches_injected_mismatch(manifest, evaluator, tmp_path):
    import dataclasses
    t = manifest.by_id("mul8_pipe")
    from rtlforge.frontend.syntax import VerilogSource
    import designs
    broken_ref = dataclasses.replace(
        t, reference_optimized=VerilogSource(designs.MUL8_WRONG, "wrong"))
    report = validate_triple(broken_ref, evaluator(t.clock))
    by_name = {c.name: c for c in report.checks}
    assert not by_name["reference_equivalent"].passed
    assert "reference_improves" not in by_name  # gain check skipped


def test_validate_zero_gain_reference(manifest, evaluator):
    import dataclasses
    t = manifest.by_id("mul8_pipe")
    same_ref = dataclasses.replace(t, reference_optimized=t.unoptimized)
    report = validate_triple(same_ref, evaluator(t.clock))
    by_name = {c.name: c for c in report.checks}
    assert by_name["reference_equivalent"].passed
    assert not by_name["reference_improves"].passed
    assert "=" in by_name["reference_improves"].detail  # measured value included


def _settings(out_dir=None):
    return BenchSettings(
        liberty_path=SAMPLE / "lib" / "demo12.lib",
        backend="scripted",
        script_path=SAMPLE / "scripts" / "reference.json",
        fixtures="replay",
        fixture_dir=SAMPLE / "fixtures",
        out_dir=out_dir,
    )


def _cfg(seed=0):
    return RunConfig(goal=GoalSpec(kind=OptimizationKind.PIPELINING), seed=seed)


def test_benchmark_deterministic_across_executions_and_workers(manifest):
    reports = [
        run_benchmark(manifest, _cfg(), runs=1, workers=w, settings=_settings())
        for w in (1, 4, 1)
    ]
    texts = {report_json_text(r) for r in reports}
    assert len(texts) == 1
    assert reports[0].fr_overall == 0.0


def test_benchmark_five_runs_nonzero_std(manifest):
    report = run_benchmark(manifest, _cfg(), runs=5, workers=2, settings=_settings())
    gain = report.per_kind["pipelining"]["timing_gain"]
    assert gain["n"] == 5
    assert gain["std"] > 0.0  # the mul8 script varies by seed


def test_benchmark_fr_matches_independent_recount(manifest):
    report = run_benchmark(manifest, _cfg(), runs=2, workers=2, settings=_settings())
    verdicts = [o["verdict"] for o in report.outcomes]
    recount = 100.0 * sum(1 for v in verdicts if v != "SUCCESS") / len(verdicts)
    assert report.fr_overall == pytest.approx(recount)
    assert failure_rate(verdicts) == pytest.approx(recount)


def test_benchmark_never_aborts_on_triple_failure(manifest, tmp_path):
    # empty scripts leave every run backend-failed, but the bench completes
    script = tmp_path / "empty.json"
    script.write_text("{}")
    settings = _settings()
    settings.script_path = script
    report = run_benchmark(manifest, _cfg(), runs=1, workers=2, settings=settings)
    assert len(report.outcomes) == 5
    assert report.fr_overall == 100.0
    assert all(o["verdict"] == "FAIL_BACKEND" for o in report.outcomes)


def test_emit_report_files(manifest, tmp_path):
    report = run_benchmark(manifest, _cfg(), runs=2, workers=1,
                           settings=_settings(out_dir=tmp_path))
    written = emit_report(report, tmp_path)
    assert set(written) == {"json", "md", "csv"}
    data = json.loads((tmp_path / "report.json").read_text())
    assert len(data["outcomes"]) == 10
    md = (tmp_path / "summary.md").read_text()
    assert "## pipelining" in md and "## clock_gating" in md
    assert "±" in md
    csv_text = (tmp_path / "per_design.csv").read_text()
    assert len(csv_text.strip().splitlines()) == 1 + 5 * 2  # header + triples*runs
    run_records = sorted((tmp_path / "runs").glob("*.json"))
    assert len(run_records) == 10


def test_summary_fr_equals_recount(manifest, tmp_path):
    report = run_benchmark(manifest, _cfg(), runs=1, workers=1, settings=_settings())
    md = summary_markdown(report)
    recount = failure_rate([o["verdict"] for o in report.outcomes])
    assert f"Overall failure rate: {recount:.1f}%" in md


def test_csv_empty_report():
    from rtlforge.harness.bench import BenchmarkReport
    empty = BenchmarkReport(config_echo={}, stamps={})
    assert report_json_text(empty)
    assert per_design_csv(empty).splitlines()[0].startswith("triple_id")
