import json
import os
import stat
from pathlib import Path

import pytest

from rtlforge.frontend.syntax import VerilogSource
from rtlforge.tools import (
    EdaToolchain,
    FinishReason,
    FixtureMissing,
    FixtureStore,
    ToolInvocation,
    ToolKind,
    ToolMissing,
    ToolResult,
    ToolRunner,
    ToolingConfig,
    activity_from_vcd,
    build_compile_invocation,
    compile_diagnostics,
    parse_vcd,
)

SAMPLE = Path(__file__).resolve().parent.parent / "sample_data"


def replay_runner():
    return ToolRunner(ToolingConfig(mode="replay", fixture_dir=SAMPLE / "fixtures"))


def triple_sources(tid):
    d = SAMPLE / "triples" / tid
    return (VerilogSource((d / "unopt.v").read_text(), "unopt"),
            VerilogSource((d / "tb.v").read_text(), "tb"))


# --- invocation keys ---

def test_key_depends_on_content_not_origin():
    a = VerilogSource("module m(input x); endmodule", "one/path.v")
    b = VerilogSource("module m(input x); endmodule", "generated@iter-3")
    assert build_compile_invocation([a]).key() == build_compile_invocation([b]).key()


def test_key_changes_with_content_and_args():
    a = VerilogSource("module m(input x); endmodule", "p")
    b = VerilogSource("module m(input y); endmodule", "p")
    k1 = build_compile_invocation([a]).key()
    assert k1 != build_compile_invocation([b]).key()
    inv = ToolInvocation(ToolKind.COMPILE, (("src0.v", a.text),), args=("-g2001",))
    assert inv.key() != build_compile_invocation([a]).key()


def test_default_timeouts():
    a = VerilogSource("module m(input x); endmodule", "p")
    assert build_compile_invocation([a]).timeout == 30.0
    inv = ToolInvocation(ToolKind.SYNTHESIZE, (("d.v", "x"),))
    assert inv.timeout == 300.0


# --- fixture store ---

def test_fixture_round_trip(tmp_path):
    store = FixtureStore(tmp_path)
    result = ToolResult(0, "out", "err", {"a.txt": "hello\n"}, 0.5)
    store.save("k" * 64, result)
    loaded = store.load("k" * 64)
    assert loaded == result
    # byte-identical determinism across loads
    assert store.load("k" * 64) == loaded


def test_replay_missing_fixture_raises(tmp_path):
    runner = ToolRunner(ToolingConfig(mode="replay", fixture_dir=tmp_path))
    inv = build_compile_invocation([VerilogSource("module m(); endmodule", "p")])
    with pytest.raises(FixtureMissing):
        runner.run(inv)


def test_replay_is_byte_identical():
    runner = replay_runner()
    unopt, tb = triple_sources("mul8_pipe")
    inv = build_compile_invocation([unopt, tb])
    first = runner.run(inv)
    second = runner.run(inv)
    assert first == second


# --- live execution with a fake tool ---

FAKE_TOOL = """#!/bin/sh
# fake compiler: record cwd contents, emit the expected artifact
ls -1 > observed_files.txt
echo "fake stdout"
cat src*.v > design.vvp 2>/dev/null || true
exit 0
"""


def make_fake_tool(tmp_path) -> str:
    path = tmp_path / "fake-iverilog"
    path.write_text(FAKE_TOOL)
    path.chmod(path.stat().st_mode | stat.S_IEXEC)
    return str(path)


def test_tool_missing():
    runner = ToolRunner(ToolingConfig(
        binaries={ToolKind.COMPILE: "/nonexistent/tool-binary"}))
    inv = build_compile_invocation([VerilogSource("module m(); endmodule", "p")])
    with pytest.raises(ToolMissing):
        runner.run(inv)


def test_staging_isolation(tmp_path):
    """The invocation sees exactly its staged inputs, in a private cwd."""
    fake = make_fake_tool(tmp_path)
    runner = ToolRunner(ToolingConfig(binaries={ToolKind.COMPILE: fake}))
    src = VerilogSource("module m(input a); endmodule", "p")
    tb = VerilogSource("module tb; endmodule", "t")
    inv = ToolInvocation(
        ToolKind.COMPILE,
        inputs=(("src0.v", src.text), ("src1.v", tb.text)),
        args=(),
        expected_artifacts=("design.vvp", "observed_files.txt"),
    )
    result = runner.run(inv)
    assert result.exit_status == 0
    observed = set(result.artifacts["observed_files.txt"].split())
    assert observed == {"src0.v", "src1.v", "observed_files.txt"}
    # two invocations never share a directory
    first_dir = runner.last_workdir
    runner.run(inv)
    assert runner.last_workdir != first_dir


def test_record_then_replay_identical(tmp_path):
    fake = make_fake_tool(tmp_path)
    fixture_dir = tmp_path / "fx"
    record = ToolRunner(ToolingConfig(mode="record", fixture_dir=fixture_dir,
                                      binaries={ToolKind.COMPILE: fake}))
    src = VerilogSource("module m(input a); endmodule", "p")
    inv = ToolInvocation(ToolKind.COMPILE, (("src0.v", src.text),),
                         expected_artifacts=("design.vvp",))
    recorded = record.run(inv)
    replay = ToolRunner(ToolingConfig(mode="replay", fixture_dir=fixture_dir,
                                      binaries={ToolKind.COMPILE: "/none"}))
    replayed = replay.run(inv)
    assert replayed.exit_status == recorded.exit_status
    assert replayed.artifacts == recorded.artifacts


# --- adapters over fixtures ---

def test_compile_valid_pair_has_no_diagnostics():
    tc = EdaToolchain(replay_runner())
    unopt, tb = triple_sources("mul8_pipe")
    result = tc.compile_design([unopt, tb])
    assert result.exit_status == 0
    assert compile_diagnostics(result, [unopt, tb]) == []


def _design(name: str) -> str:
    import designs
    return getattr(designs, name)


def test_compile_undeclared_net_diagnostic_names_the_net():
    tc = EdaToolchain(replay_runner())
    bad = VerilogSource(_design("UNDECLARED_NET"), "badnet")
    result = tc.compile_design([bad])
    assert result.exit_status != 0
    diags = compile_diagnostics(result, [bad])
    assert diags and any("foo" in d.message for d in diags)
    assert diags[0].origin == "badnet"
    assert diags[0].line == 2


def test_counter_simulation_semantics():
    # hand-simulated 3-bit counter: the value captured at edge k is k
    tc = EdaToolchain(replay_runner())
    counter = VerilogSource(_design("COUNTER3"), "counter3")
    tb = VerilogSource(_design("COUNTER3_TB"), "tb")
    trace = tc.simulate_sources([counter, tb], ["count"], max_cycles=8)
    assert trace.finish_reason is FinishReason.FINISH
    values = [int(v, 2) for v in trace.signal("count")]
    assert values == [0, 1, 2, 3, 4, 5, 6, 7]
    assert len(trace.samples) == 8


def test_simulation_without_finish_times_out_at_cap():
    tc = EdaToolchain(replay_runner())
    counter = VerilogSource(_design("COUNTER3"), "counter3")
    tb = VerilogSource(_design("COUNTER3_TB_NOFINISH"), "tb")
    trace = tc.simulate_sources([counter, tb], ["count"], max_cycles=100)
    assert trace.finish_reason is FinishReason.TIMEOUT
    assert trace.cycles == 100


def test_x_values_recorded_not_error():
    # gated_bank's q is undriven until the first enable; cycle 0 reads x
    tc = EdaToolchain(replay_runner())
    unopt, tb = triple_sources("gated_bank")
    trace = tc.simulate_sources([unopt, tb], ["q"], max_cycles=4)
    assert "x" in trace.value_at("q", 0)


def test_synthesize_inverter_single_cell(liberty_text):
    tc = EdaToolchain(replay_runner())
    inv = VerilogSource(_design("INVERTER"), "inv1")
    netlist_text, log = tc.synthesize_design(inv, liberty_text)
    data = json.loads(netlist_text)
    cells = data["modules"]["inv1"]["cells"]
    assert len(cells) == 1
    assert next(iter(cells.values()))["type"] == "INV"


def test_synthesize_latch_fails_with_named_error(liberty_text):
    from rtlforge.tools import SynthesisFailed
    tc = EdaToolchain(replay_runner())
    latchy = VerilogSource(_design("LATCHY"), "latchy")
    with pytest.raises(SynthesisFailed) as err:
        tc.synthesize_design(latchy, liberty_text)
    assert "latch" in err.value.first_error.lower()


def test_synthesize_empty_module(liberty_text):
    tc = EdaToolchain(replay_runner())
    empty = VerilogSource(_design("EMPTY_MODULE"), "empty")
    netlist_text, _ = tc.synthesize_design(empty, liberty_text)
    data = json.loads(netlist_text)
    assert data["modules"]["empty"]["cells"] == {}


# --- VCD parsing and activity ---

def test_vcd_parse_and_posedges():
    tc = EdaToolchain(replay_runner())
    unopt, tb = triple_sources("mul8_pipe")
    trace = tc.simulate_sources([unopt, tb], ["p"], max_cycles=512)
    vcd = parse_vcd(trace.vcd_text)
    assert vcd.find("clk") is not None
    assert vcd.find("p").width == 16
    assert trace.cycles == 65


def test_activity_rates_in_range_and_duty_sensitive():
    tc = EdaToolchain(replay_runner())
    pp = SAMPLE / "powerpair"
    gated = VerilogSource((pp / "gated.v").read_text(), "gated")
    rates = {}
    for duty in (10, 90):
        tb = VerilogSource((pp / f"tb_duty{duty}.v").read_text(), "tb")
        trace = tc.simulate_sources([gated, tb], ["q"], 512)
        act = activity_from_vcd(parse_vcd(trace.vcd_text))
        assert all(0.0 <= r <= 1.0 for r in act.values())
        assert "clk" not in act
        rates[duty] = sum(act.get(f"q[{i}]", 0.0) for i in range(16)) / 16
    assert rates[10] < rates[90]
