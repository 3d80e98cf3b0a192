"""In-process service layer: the operations behind both the HTTP API and
the CLI subcommands."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from rtlforge.agents.backend import ChatBackend, HttpBackendConfig, ScriptBank, ScriptedBackend
from rtlforge.evaluation import CodeEvaluator
from rtlforge.frontend.dfg import build_dataflow_graph
from rtlforge.frontend.parser import parse_module
from rtlforge.frontend.schema import serialize_dfg
from rtlforge.frontend.syntax import VerilogSource
from rtlforge.goals import GoalSpec, OptimizationKind
from rtlforge.harness.bench import BenchSettings, run_benchmark
from rtlforge.harness.dataset import load_dataset, load_triple, validate_triple
from rtlforge.harness.reportgen import emit_report
from rtlforge.loop import DialecticMode, RunConfig, optimize_design
from rtlforge.netlist.gates import parse_netlist
from rtlforge.netlist.liberty import parse_liberty
from rtlforge.netlist.ppa import build_ppa_report
from rtlforge.tools.adapters import EdaToolchain
from rtlforge.tools.invocation import ToolKind
from rtlforge.tools.runner import ToolingConfig, ToolRunner


@dataclass
class ToolSettings:
    """Fixture mode and optional binary overrides for the external tools."""

    fixtures: str = "off"
    fixture_dir: str | None = None
    binaries: dict[ToolKind, str] = field(default_factory=dict)

    def toolchain(self) -> EdaToolchain:
        config = ToolingConfig(
            mode=self.fixtures,
            fixture_dir=Path(self.fixture_dir) if self.fixture_dir else None,
            binaries=dict(self.binaries),
        )
        return EdaToolchain(ToolRunner(config))


def dfg_schema_text(source_text: str, origin: str = "<input>") -> str:
    """Parse one module and serialize its dataflow graph."""
    ast = parse_module(VerilogSource(source_text, origin))
    return serialize_dfg(build_dataflow_graph(ast))


def sta_report(netlist_json: str, liberty_text: str,
               activity: dict[str, float] | None = None,
               f_clk_mhz: float = 100.0) -> dict:
    """Area/timing/power report for a synthesized netlist."""
    lib = parse_liberty(liberty_text)
    netlist = parse_netlist(netlist_json)
    return build_ppa_report(netlist, lib, activity, f_clk_mhz).to_dict()


def goal_from_options(kind: str, min_timing_gain: float | None = None,
                      min_power_gain: float | None = None,
                      max_area_ratio: float | None = None,
                      max_latency_shift: int | None = None) -> GoalSpec:
    return GoalSpec(kind=OptimizationKind(kind)).with_overrides(
        min_timing_gain=min_timing_gain,
        min_power_gain=min_power_gain,
        max_area_ratio=max_area_ratio,
        max_latency_shift=max_latency_shift,
    )


def evaluate_candidate(unoptimized: str, candidate: str, testbench: str,
                       liberty_text: str, goal: GoalSpec,
                       tools: ToolSettings | None = None,
                       clock: str = "clk") -> dict:
    """Full three-stage evaluation of one candidate against its baseline."""
    tools = tools or ToolSettings()
    evaluator = CodeEvaluator(tools.toolchain(), liberty_text, clock=clock)
    report = evaluator.evaluate(
        VerilogSource(unoptimized, "unoptimized"),
        VerilogSource(candidate, "candidate"),
        VerilogSource(testbench, "testbench"),
        goal,
    )
    return report.to_dict()


def optimize_triple_dir(triple_dir: str, liberty_path: str,
                        backend: ChatBackend | None = None,
                        script_path: str | None = None,
                        script_data: dict | None = None,
                        http: HttpBackendConfig | None = None,
                        tools: ToolSettings | None = None,
                        goal_overrides: dict | None = None,
                        max_iters: int = 8, k_examples: int = 2, seed: int = 0,
                        dialectic: str = "full",
                        stop_on_regression: int | None = None) -> dict:
    """Run the optimization loop on one triple directory."""
    triple = load_triple(Path(triple_dir))
    goal = triple.goal.with_overrides(**(goal_overrides or {}))
    cfg = RunConfig(goal=goal, max_iters=max_iters, k_examples=k_examples,
                    seed=seed, dialectic_mode=DialecticMode(dialectic),
                    stop_on_regression=stop_on_regression)

    if backend is None:
        if script_data is not None:
            backend = ScriptBank(script_data).backend(triple.id, cfg.seed)
        elif script_path is not None:
            backend = ScriptBank.load(script_path).backend(triple.id, cfg.seed)
        elif http is not None:
            from rtlforge.agents.backend import HttpBackend
            backend = HttpBackend(http)
        else:
            raise ValueError("no backend configured: pass a script or an endpoint")

    tools = tools or ToolSettings()
    liberty_text = Path(liberty_path).read_text(encoding="utf-8")
    evaluator = CodeEvaluator(tools.toolchain(), liberty_text, clock=triple.clock)
    outcome = optimize_design(triple, cfg, backend, evaluator)
    return outcome.summary()


def optimize_inline(unoptimized: str, testbench: str, kind: str, liberty_text: str,
                    script: dict, cfg: RunConfig | None = None,
                    tools: ToolSettings | None = None,
                    triple_id: str = "inline", clock: str = "clk") -> dict:
    """Optimization loop over inline sources with an inline script backend."""
    from rtlforge.harness.dataset import DesignTriple

    cfg = cfg or RunConfig(goal=GoalSpec(kind=OptimizationKind(kind)))
    triple = DesignTriple(
        id=triple_id,
        unoptimized=VerilogSource(unoptimized, "unoptimized"),
        testbench=VerilogSource(testbench, "testbench"),
        kind=OptimizationKind(kind),
        goal=cfg.goal,
        clock=clock,
    )
    backend: ChatBackend = ScriptBank(script).backend(triple_id, cfg.seed) \
        if any(k in script for k in ("default", "by_triple", "by_seed")) \
        else ScriptedBackend(script)
    tools = tools or ToolSettings()
    evaluator = CodeEvaluator(tools.toolchain(), liberty_text, clock=clock)
    outcome = optimize_design(triple, cfg, backend, evaluator)
    return outcome.summary()


def validate_dataset(root: str, liberty_path: str,
                     tools: ToolSettings | None = None) -> dict:
    manifest = load_dataset(root)
    tools = tools or ToolSettings()
    liberty_text = Path(liberty_path).read_text(encoding="utf-8")
    results = []
    for triple in manifest.triples:
        evaluator = CodeEvaluator(tools.toolchain(), liberty_text, clock=triple.clock)
        report = validate_triple(triple, evaluator)
        results.append({
            "triple_id": report.triple_id,
            "ok": report.ok,
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail}
                       for c in report.checks],
        })
    return {
        "root": str(manifest.root),
        "count": len(manifest.triples),
        "counts_by_kind": {k.value: v for k, v in sorted(
            manifest.counts().items(), key=lambda kv: kv[0].value)},
        "triples": results,
        "all_ok": all(r["ok"] for r in results),
    }


def bench_dataset(dataset_dir: str, liberty_path: str, out_dir: str,
                  runs: int = 1, workers: int = 1,
                  cfg: RunConfig | None = None,
                  settings: BenchSettings | None = None) -> dict:
    manifest = load_dataset(dataset_dir)
    if settings is None:
        settings = BenchSettings(liberty_path=Path(liberty_path))
    settings.out_dir = Path(out_dir)
    if cfg is None:
        cfg = RunConfig(goal=GoalSpec(kind=OptimizationKind.PIPELINING))
    report = run_benchmark(manifest, cfg, runs, workers, settings)
    written = emit_report(report, out_dir)
    return {
        "out_dir": str(out_dir),
        "files": {k: str(v) for k, v in written.items()},
        "fr_overall": report.fr_overall,
        "outcome_count": len(report.outcomes),
    }
