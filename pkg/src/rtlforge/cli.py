"""Command-line interface.

Subcommands mirror the service surface: dfg, sta, eval, optimize, bench,
dataset validate, and serve (which starts the HTTP API). A key=value
config file can supply any flag's default; explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import rtlforge
from rtlforge import service
from rtlforge.errors import RtlforgeError
from rtlforge.goals import GoalSpec, OptimizationKind
from rtlforge.harness.bench import BenchSettings
from rtlforge.harness.dataset import parse_kv
from rtlforge.loop import DialecticMode, RunConfig


def _tool_settings(args) -> service.ToolSettings:
    return service.ToolSettings(
        fixtures=getattr(args, "fixtures", "off") or "off",
        fixture_dir=getattr(args, "fixture_dir", None),
    )


def _goal_overrides(args) -> dict:
    out = {}
    if getattr(args, "goal_timing", None) is not None:
        out["min_timing_gain"] = args.goal_timing
    if getattr(args, "goal_power", None) is not None:
        out["min_power_gain"] = args.goal_power
    if getattr(args, "goal_area", None) is not None:
        out["max_area_ratio"] = args.goal_area
    return out


def _emit(payload) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def cmd_dfg(args) -> int:
    text = Path(args.file).read_text(encoding="utf-8")
    print(service.dfg_schema_text(text, origin=args.file), end="")
    return 0


def cmd_sta(args) -> int:
    netlist = Path(args.netlist).read_text(encoding="utf-8")
    liberty = Path(args.liberty).read_text(encoding="utf-8")
    activity = None
    if args.activity:
        activity = json.loads(Path(args.activity).read_text(encoding="utf-8"))
    _emit(service.sta_report(netlist, liberty, activity, args.f_clk))
    return 0


def cmd_eval(args) -> int:
    goal = service.goal_from_options(
        args.kind,
        min_timing_gain=args.goal_timing,
        min_power_gain=args.goal_power,
        max_area_ratio=args.goal_area,
        max_latency_shift=args.max_latency_shift,
    )
    report = service.evaluate_candidate(
        Path(args.unopt).read_text(encoding="utf-8"),
        Path(args.cand).read_text(encoding="utf-8"),
        Path(args.tb).read_text(encoding="utf-8"),
        Path(args.liberty).read_text(encoding="utf-8"),
        goal,
        _tool_settings(args),
        clock=args.clock,
    )
    _emit(report)
    return 0


def _http_config(args):
    from rtlforge.agents.backend import HttpBackendConfig

    if getattr(args, "endpoint", None) is None:
        return None
    return HttpBackendConfig(endpoint=args.endpoint, model_id=args.model,
                             temperature=args.temperature)


def cmd_optimize(args) -> int:
    summary = service.optimize_triple_dir(
        args.triple,
        args.liberty,
        script_path=args.script,
        http=_http_config(args),
        tools=_tool_settings(args),
        goal_overrides=_goal_overrides(args),
        max_iters=args.max_iters,
        k_examples=args.k_examples,
        seed=args.seed,
        dialectic=args.dialectic,
        stop_on_regression=args.stop_on_regression,
    )
    _emit(summary)
    return 0


def cmd_bench(args) -> int:
    cfg = RunConfig(
        goal=GoalSpec(kind=OptimizationKind.PIPELINING),
        max_iters=args.max_iters,
        k_examples=args.k_examples,
        seed=args.seed,
        dialectic_mode=DialecticMode(args.dialectic),
    )
    settings = BenchSettings(
        liberty_path=Path(args.liberty),
        backend=args.backend,
        script_path=Path(args.script) if args.script else None,
        http=_http_config(args),
        fixtures=args.fixtures or "off",
        fixture_dir=Path(args.fixture_dir) if args.fixture_dir else None,
        goal_overrides=_goal_overrides(args),
    )
    result = service.bench_dataset(
        args.dataset, args.liberty, args.out,
        runs=args.runs, workers=args.workers, cfg=cfg, settings=settings)
    _emit(result)
    return 0


def cmd_dataset_validate(args) -> int:
    result = service.validate_dataset(args.root, args.liberty, _tool_settings(args))
    _emit(result)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("rtlforge.api.app:app", host=args.host, port=args.port)
    return 0


def _add_tool_flags(p: argparse.ArgumentParser):
    p.add_argument("--fixtures", choices=["off", "record", "replay"], default=None,
                   help="tool fixture mode (default off)")
    p.add_argument("--fixture-dir", default=None, help="fixture store directory")


def _add_goal_flags(p: argparse.ArgumentParser):
    p.add_argument("--goal-timing", type=float, default=None,
                   help="minimum timing gain percent (pipelining)")
    p.add_argument("--goal-power", type=float, default=None,
                   help="minimum power gain percent (clock gating)")
    p.add_argument("--goal-area", type=float, default=None,
                   help="maximum area ratio")


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(
        prog="rtlforge",
        description="Closed-loop RTL optimization: dataflow extraction, PPA "
                    "evaluation, and the agent-driven optimization loop.")
    parser.add_argument("--config", default=None,
                        help="key=value file supplying flag defaults")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {rtlforge.__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    registry: dict[str, argparse.ArgumentParser] = {}

    p = sub.add_parser("dfg", help="print the dataflow-graph schema of a module")
    p.add_argument("file")
    p.set_defaults(func=cmd_dfg)
    registry["dfg"] = p

    p = sub.add_parser("sta", help="area/timing/power report for a netlist")
    p.add_argument("netlist")
    p.add_argument("--liberty", required=True)
    p.add_argument("--activity", default=None, help="JSON file of net toggle rates")
    p.add_argument("--f-clk", type=float, default=100.0, help="clock frequency in MHz")
    p.set_defaults(func=cmd_sta)
    registry["sta"] = p

    p = sub.add_parser("eval", help="evaluate one candidate against its baseline")
    p.add_argument("--unopt", required=True)
    p.add_argument("--cand", required=True)
    p.add_argument("--tb", required=True)
    p.add_argument("--liberty", required=True)
    p.add_argument("--kind", choices=["pipelining", "clock_gating"],
                   default="pipelining")
    p.add_argument("--max-latency-shift", type=int, default=None)
    p.add_argument("--clock", default="clk")
    _add_goal_flags(p)
    _add_tool_flags(p)
    p.set_defaults(func=cmd_eval)
    registry["eval"] = p

    p = sub.add_parser("optimize", help="run the optimization loop on one triple")
    p.add_argument("--triple", required=True, help="triple directory")
    p.add_argument("--liberty", required=True)
    p.add_argument("--script", default=None, help="scripted-backend JSON file")
    p.add_argument("--endpoint", default=None, help="chat-completions endpoint URL")
    p.add_argument("--model", default="default", help="model id for the HTTP backend")
    p.add_argument("--temperature", type=float, default=0.2)
    p.add_argument("--max-iters", type=int, default=8)
    p.add_argument("--k-examples", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dialectic", choices=["full", "merged", "off"], default="full")
    p.add_argument("--stop-on-regression", type=int, default=None)
    _add_goal_flags(p)
    _add_tool_flags(p)
    p.set_defaults(func=cmd_optimize)
    registry["optimize"] = p

    p = sub.add_parser("bench", help="run the benchmark over a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--liberty", required=True)
    p.add_argument("--backend", choices=["scripted", "http"], default="scripted")
    p.add_argument("--script", default=None)
    p.add_argument("--endpoint", default=None, help="chat-completions endpoint URL")
    p.add_argument("--model", default="default", help="model id for the HTTP backend")
    p.add_argument("--temperature", type=float, default=0.2)
    p.add_argument("--out", required=True)
    p.add_argument("--max-iters", type=int, default=8)
    p.add_argument("--k-examples", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dialectic", choices=["full", "merged", "off"], default="full")
    _add_goal_flags(p)
    _add_tool_flags(p)
    p.set_defaults(func=cmd_bench)
    registry["bench"] = p

    p = sub.add_parser("dataset", help="dataset utilities")
    dataset_sub = p.add_subparsers(dest="dataset_command", required=True)
    v = dataset_sub.add_parser("validate", help="validate every triple in a dataset")
    v.add_argument("root")
    v.add_argument("--liberty", required=True)
    _add_tool_flags(v)
    v.set_defaults(func=cmd_dataset_validate)
    registry["dataset validate"] = v

    p = sub.add_parser("serve", help="start the HTTP API")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)
    registry["serve"] = p

    return parser, registry


def _apply_config(subparser: argparse.ArgumentParser, values: dict[str, str]):
    """Install config values as subparser defaults; explicit flags still win."""
    known = {a.dest: a for a in subparser._actions}
    defaults = {}
    for key, raw in values.items():
        dest = key.replace(".", "_").replace("-", "_")
        action = known.get(dest)
        if action is None:
            continue
        defaults[dest] = action.type(raw) if callable(action.type) else raw
        action.required = False  # the config satisfies it
    subparser.set_defaults(**defaults)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, registry = build_parser()
    if "--config" in argv:
        idx = argv.index("--config")
        config_path = argv[idx + 1]
        del argv[idx:idx + 2]
        values = parse_kv(Path(config_path).read_text(encoding="utf-8"))
        for subparser in registry.values():
            _apply_config(subparser, values)
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except RtlforgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
