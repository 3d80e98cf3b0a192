"""Benchmark execution across triples and seeds with a bounded worker pool."""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import rtlforge
from rtlforge.agents.backend import ChatBackend, HttpBackend, HttpBackendConfig, ScriptBank
from rtlforge.evaluation import CodeEvaluator
from rtlforge.goals import OptimizationKind
from rtlforge.harness.dataset import DatasetManifest, DesignTriple
from rtlforge.loop import RunConfig, RunOutcome, Verdict, optimize_design
from rtlforge.metrics import AggregateStats, MetricSet, aggregate_stats, failure_rate
from rtlforge.tools.adapters import EdaToolchain
from rtlforge.tools.invocation import ToolKind
from rtlforge.tools.runner import ToolingConfig, ToolRunner


@dataclass
class BenchSettings:
    liberty_path: Path
    backend: str = "scripted"              # scripted | http
    script_path: Path | None = None
    http: HttpBackendConfig | None = None
    fixtures: str = "off"                  # off | record | replay
    fixture_dir: Path | None = None
    out_dir: Path | None = None
    goal_overrides: dict = field(default_factory=dict)
    binaries: dict[ToolKind, str] = field(default_factory=dict)

    def toolchain(self) -> EdaToolchain:
        config = ToolingConfig(mode=self.fixtures, fixture_dir=self.fixture_dir,
                               binaries=dict(self.binaries))
        return EdaToolchain(ToolRunner(config))

    def make_backend(self, triple_id: str, seed: int) -> ChatBackend:
        if self.backend == "scripted":
            if self.script_path is None:
                raise ValueError("scripted backend requires a script file")
            return ScriptBank.load(self.script_path).backend(triple_id, seed)
        if self.backend == "http":
            if self.http is None:
                raise ValueError("http backend requires endpoint configuration")
            return HttpBackend(self.http)
        raise ValueError(f"unknown backend {self.backend!r}")


@dataclass
class BenchmarkReport:
    config_echo: dict
    stamps: dict
    outcomes: list[dict] = field(default_factory=list)         # per (triple, run)
    per_kind: dict[str, dict] = field(default_factory=dict)
    fr_overall: float = 0.0

    def to_dict(self) -> dict:
        return {
            "config": self.config_echo,
            "stamps": self.stamps,
            "outcomes": self.outcomes,
            "per_kind": self.per_kind,
            "fr_overall": self.fr_overall,
        }


def metric_set_of(outcome: RunOutcome) -> MetricSet:
    m = outcome.final_metrics
    return MetricSet(
        area_ratio=m.area_ratio if m is not None else None,
        timing_gain=m.timing_gain if m is not None else None,
        power_gain=m.power_gain if m is not None else None,
        passed=outcome.verdict is Verdict.SUCCESS,
    )


def _aggregate_to_dict(stats: AggregateStats) -> dict:
    return {
        "fr": stats.fr,
        **{name: {"mean": s.mean, "std": s.std, "n": s.n}
           for name, s in sorted(stats.stats.items())},
    }


def run_benchmark(manifest: DatasetManifest, cfg: RunConfig, runs: int,
                  workers: int, settings: BenchSettings) -> BenchmarkReport:
    """Optimize every (triple, seed) pair and aggregate per optimization kind.

    Individual design failures land in the report; only harness-level
    misconfiguration raises.
    """
    if runs < 1 or workers < 1:
        raise ValueError("runs and workers must be >= 1")
    liberty_text = Path(settings.liberty_path).read_text(encoding="utf-8")
    toolchain = settings.toolchain()

    jobs: list[tuple[DesignTriple, int]] = [
        (triple, run_idx)
        for triple in manifest.triples
        for run_idx in range(runs)
    ]

    def execute(job: tuple[DesignTriple, int]) -> tuple[str, int, RunOutcome]:
        triple, run_idx = job
        seed = cfg.seed + run_idx
        goal = triple.goal.with_overrides(**settings.goal_overrides)
        job_cfg = replace(cfg, seed=seed, goal=goal)
        evaluator = CodeEvaluator(toolchain, liberty_text, clock=triple.clock)
        try:
            backend = settings.make_backend(triple.id, seed)
            outcome = optimize_design(triple, job_cfg, backend, evaluator)
        except Exception as exc:  # defensive: a triple never kills the benchmark
            outcome = RunOutcome(triple_id=triple.id, verdict=Verdict.FAIL_BACKEND,
                                 seed=seed, notes=[f"harness-caught failure: {exc}"])
        return triple.id, run_idx, outcome

    results: dict[tuple[str, int], RunOutcome] = {}
    if workers == 1:
        for job in jobs:
            tid, ridx, outcome = execute(job)
            results[(tid, ridx)] = outcome
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for tid, ridx, outcome in pool.map(execute, jobs):
                results[(tid, ridx)] = outcome

    kind_of = {t.id: t.kind for t in manifest.triples}
    report = BenchmarkReport(
        config_echo={
            "dataset": str(manifest.root),
            "runs": runs,
            "seed_base": cfg.seed,
            "max_iters": cfg.max_iters,
            "k_examples": cfg.k_examples,
            "dialectic_mode": cfg.dialectic_mode.value,
            "backend": settings.backend,
            "fixtures": settings.fixtures,
            "goal_overrides": {k: v for k, v in sorted(settings.goal_overrides.items())},
        },
        stamps={
            "rtlforge_version": rtlforge.__version__,
            "liberty": Path(settings.liberty_path).name,
            "tooling": settings.fixtures if settings.fixtures != "off" else "live",
        },
    )

    ordered = sorted(results)
    for key in ordered:
        outcome = results[key]
        entry = outcome.summary()
        entry["run"] = key[1]
        entry["kind"] = kind_of.get(key[0], "?").value if key[0] in kind_of else "?"
        report.outcomes.append(entry)

    for kind in OptimizationKind:
        triple_ids = [t.id for t in manifest.triples if t.kind is kind]
        if not triple_ids:
            continue
        run_groups = []
        for run_idx in range(runs):
            group = [metric_set_of(results[(tid, run_idx)]) for tid in triple_ids]
            run_groups.append(group)
        report.per_kind[kind.value] = _aggregate_to_dict(aggregate_stats(run_groups))

    report.fr_overall = failure_rate(list(results.values()))

    if settings.out_dir is not None:
        _write_run_records(Path(settings.out_dir), results)
    return report


def _write_run_records(out_dir: Path, results: dict[tuple[str, int], RunOutcome]):
    records_dir = out_dir / "runs"
    records_dir.mkdir(parents=True, exist_ok=True)
    for (tid, ridx), outcome in sorted(results.items()):
        payload = {
            "triple_id": tid,
            "run": ridx,
            "seed": outcome.seed,
            "verdict": outcome.verdict.value,
            "notes": outcome.notes,
            "iterations": [r.full_record() for r in outcome.iterations],
        }
        path = records_dir / f"{tid}__run{ridx}.json"
        path.write_text(json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8")
