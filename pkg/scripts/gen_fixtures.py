"""Generate the bundled sample dataset, scripted-backend files, and the
replay fixture store.

Run from the repository root:  python scripts/gen_fixtures.py

Fixtures are content-addressed tool results produced by the reference flow
(refsim for simulation traces, refsynth for netlists), so the test suite
and the sample benchmark run fully offline. Running real EDA tools in
record mode writes fixtures with identical shape.
"""

from __future__ import annotations

import hashlib
import json
import shutil
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "scripts"))

import designs  # noqa: E402
from refsim import Interpreter, make_vcd  # noqa: E402
from refsynth import synthesize_to_json  # noqa: E402

from rtlforge.frontend.syntax import VerilogSource  # noqa: E402
from rtlforge.tools.adapters import (  # noqa: E402
    build_compile_invocation,
    build_simulation_invocation,
    build_synthesis_invocation,
)
from rtlforge.tools.fixtures import FixtureStore  # noqa: E402
from rtlforge.tools.invocation import ToolResult  # noqa: E402

SAMPLE = REPO / "sample_data"
LIBERTY = (SAMPLE / "lib" / "demo12.lib").read_text(encoding="utf-8")

WALL = 0.01  # fixed recorded wall time keeps replay byte-stable


def _src(text: str, origin: str) -> VerilogSource:
    return VerilogSource(text, origin)


def _vvp_stub(sources: list[VerilogSource]) -> str:
    entries = [hashlib.sha256(s.text.encode()).hexdigest() for s in sources]
    return json.dumps({"pseudo_vvp": entries}) + "\n"


class Generator:
    def __init__(self, store: FixtureStore):
        self.store = store
        self.count = 0

    def put(self, invocation, result: ToolResult):
        self.store.save(invocation.key(), result)
        self.count += 1

    def compile_ok(self, sources: list[VerilogSource]):
        inv = build_compile_invocation(sources)
        self.put(inv, ToolResult(0, "", "", {"design.vvp": _vvp_stub(sources)}, WALL))
        return _vvp_stub(sources)

    def compile_fail(self, sources: list[VerilogSource], stderr: str):
        inv = build_compile_invocation(sources)
        self.put(inv, ToolResult(1, "", stderr, {}, WALL))

    def simulate(self, sources: list[VerilogSource], design_text: str,
                 stimulus, cycles: int, exit_status: int = 0):
        stub = _vvp_stub(sources)
        inv = build_simulation_invocation(stub)
        vcd = make_vcd(Interpreter(design_text), stimulus, cycles)
        self.put(inv, ToolResult(exit_status, "", "", {"trace.vcd": vcd}, WALL))

    def synth_ok(self, design_text: str, name: str):
        inv = build_synthesis_invocation(_src(design_text, name), LIBERTY)
        netlist = synthesize_to_json(design_text, name)
        log = f"reference flow: mapped module '{name}'\n"
        self.put(inv, ToolResult(0, log, "", {"netlist.json": netlist}, WALL))
        return netlist

    def synth_fail(self, design_text: str, name: str, log: str):
        inv = build_synthesis_invocation(_src(design_text, name), LIBERTY)
        self.put(inv, ToolResult(1, log, "", {}, WALL))


def write_dataset():
    triples_dir = SAMPLE / "triples"
    for tid, info in designs.TRIPLES.items():
        d = triples_dir / tid
        d.mkdir(parents=True, exist_ok=True)
        (d / "unopt.v").write_text(info["unopt"], encoding="utf-8")
        (d / "opt_ref.v").write_text(info["opt"], encoding="utf-8")
        (d / "tb.v").write_text(info["tb"], encoding="utf-8")
        meta = [f'kind = "{info["kind"]}"',
                f'difficulty = "{info["difficulty"]}"',
                "clock_period_ns = 10.0"]
        meta += [f"{k} = {v}" for k, v in sorted(info["meta_extra"].items())]
        (d / "meta.toml").write_text("\n".join(meta) + "\n", encoding="utf-8")

    pp = SAMPLE / "powerpair"
    pp.mkdir(parents=True, exist_ok=True)
    (pp / "gated.v").write_text(designs.BANK16_GATED, encoding="utf-8")
    (pp / "free.v").write_text(designs.BANK16_FREE, encoding="utf-8")
    for duty in (1, 5, 9):
        (pp / f"tb_duty{duty}0.v").write_text(designs.bank16_tb(duty), encoding="utf-8")

    cands = SAMPLE / "candidates"
    cands.mkdir(parents=True, exist_ok=True)
    (cands / "mul8_broken.v").write_text(designs.MUL8_BROKEN, encoding="utf-8")
    (cands / "mul8_wrong.v").write_text(designs.MUL8_WRONG, encoding="utf-8")
    (cands / "mul8_opt3.v").write_text(designs.MUL8_OPT3, encoding="utf-8")


def _fenced(code: str) -> str:
    return "Optimized module:\n```verilog\n" + code + "```\n"


def write_scripts():
    out = SAMPLE / "scripts"
    out.mkdir(parents=True, exist_ok=True)

    plan_pipe = ("STEP 1: shorten the register-to-register path by inserting "
                 "stage registers @p\nSTEP 2: keep output width and module "
                 "interface unchanged\nASSUME: inputs are valid every cycle")
    plan_gate = ("STEP 1: qualify the register write with its enable signal @q\n"
                 "STEP 2: remove the recirculation mux\n"
                 "ASSUME: enable timing is unchanged")
    hypo_pipe = ("PREDICT timing_gain=30 power_gain=0 area_ratio=1.8\n"
                 "RISK: output latency grows by the pipeline depth @p")
    hypo_gate = ("PREDICT timing_gain=0 power_gain=15 area_ratio=0.9\n"
                 "RISK: enable glitches could drop writes @q")

    def roles(plan, hypo, candidate):
        return {
            "articulator": [plan, plan, plan],
            "hypothesis": [hypo, hypo, hypo],
            "coder": [_fenced(candidate)] * 3,
            "dialectic": [plan + "\n" + hypo] * 3,
        }

    reference = {
        "default": roles(plan_pipe, hypo_pipe, designs.MUL8_OPT),
        "by_triple": {
            "mul8_pipe": dict(
                roles(plan_pipe, hypo_pipe, designs.MUL8_OPT),
                by_seed={str(s): {"coder": [_fenced(designs.MUL8_OPT3)] * 3}
                         for s in (1, 3)},
            ),
            "add32_pipe": roles(plan_pipe, hypo_pipe, designs.ADD32_OPT),
            "alu8_pipe": roles(plan_pipe, hypo_pipe, designs.ALU8_OPT),
            "gated_bank": roles(plan_gate, hypo_gate, designs.GATED_BANK_OPT),
            "gated_accum": roles(plan_gate, hypo_gate, designs.GATED_ACCUM_OPT),
        },
    }
    (out / "reference.json").write_text(
        json.dumps(reference, indent=2, sort_keys=True), encoding="utf-8")

    convergence = {
        "articulator": [plan_pipe, plan_pipe + "\nSTEP 3: declare every stage register",
                        plan_pipe + "\nSTEP 3: align output capture with stage depth"],
        "hypothesis": [hypo_pipe,
                       hypo_pipe + "\nCAUSE: candidate diverged from the datapath"],
        "coder": [_fenced(designs.MUL8_BROKEN), _fenced(designs.MUL8_WRONG),
                  _fenced(designs.MUL8_OPT)],
    }
    (out / "convergence.json").write_text(
        json.dumps(convergence, indent=2, sort_keys=True), encoding="utf-8")


def write_fixtures():
    fixture_dir = SAMPLE / "fixtures"
    if fixture_dir.exists():
        shutil.rmtree(fixture_dir)
    gen = Generator(FixtureStore(fixture_dir))

    for tid, info in designs.TRIPLES.items():
        unopt = _src(info["unopt"], f"{tid}/unopt.v")
        opt = _src(info["opt"], f"{tid}/opt_ref.v")
        tb = _src(info["tb"], f"{tid}/tb.v")
        stimulus, cycles = info["stimulus"], info["cycles"]

        gen.compile_ok([unopt])
        gen.compile_ok([opt])
        gen.compile_ok([unopt, tb])
        gen.simulate([unopt, tb], info["unopt"], stimulus, cycles)
        gen.compile_ok([opt, tb])
        gen.simulate([opt, tb], info["opt"], stimulus, cycles)
        gen.synth_ok(info["unopt"], tid)
        gen.synth_ok(info["opt"], tid)

    # mul8 candidate variants for the loop-conformance tests
    mul = designs.TRIPLES["mul8_pipe"]
    tb = _src(mul["tb"], "mul8_pipe/tb.v")
    broken = _src(designs.MUL8_BROKEN, "broken")
    gen.compile_fail(
        [broken],
        "src0.v:3: syntax error\nsrc0.v:3: error: malformed statement\n")
    wrong = _src(designs.MUL8_WRONG, "wrong")
    gen.compile_ok([wrong])
    gen.compile_ok([wrong, tb])
    gen.simulate([wrong, tb], designs.MUL8_WRONG, mul["stimulus"], mul["cycles"])
    gen.synth_ok(designs.MUL8_WRONG, "mul8")
    opt3 = _src(designs.MUL8_OPT3, "opt3")
    gen.compile_ok([opt3])
    gen.compile_ok([opt3, tb])
    gen.simulate([opt3, tb], designs.MUL8_OPT3, mul["stimulus"], mul["cycles"])
    gen.synth_ok(designs.MUL8_OPT3, "mul8")

    # power pair: gated vs free-running register bank at three duty cycles
    for text, name in ((designs.BANK16_GATED, "bank16_gated"),
                       (designs.BANK16_FREE, "bank16_free")):
        gen.synth_ok(text, name)
        design = _src(text, name)
        for duty in (1, 5, 9):
            tb_text = designs.bank16_tb(duty)
            tb_src = _src(tb_text, f"tb_duty{duty}0")
            gen.compile_ok([design, tb_src])
            gen.simulate([design, tb_src], text, designs.bank16_stimulus(duty), 65)

    # counter: normal run plus a missing-$finish timeout recording
    counter = _src(designs.COUNTER3, "counter3")
    tb_c = _src(designs.COUNTER3_TB, "counter3 tb")
    gen.compile_ok([counter, tb_c])
    gen.simulate([counter, tb_c], designs.COUNTER3, designs.counter_stimulus, 16)
    tb_nf = _src(designs.COUNTER3_TB_NOFINISH, "counter3 tb nofinish")
    gen.compile_ok([counter, tb_nf])
    gen.simulate([counter, tb_nf], designs.COUNTER3, designs.counter_stimulus, 120,
                 exit_status=124)

    # diagnostics and edge cases
    gen.compile_fail(
        [_src(designs.UNDECLARED_NET, "badnet")],
        "src0.v:2: error: Unable to bind wire/reg/memory `foo' in `badnet'\n"
        "1 error(s) during elaboration.\n")
    gen.compile_ok([_src(designs.GENERATE_BLOCK, "genblk")])
    gen.synth_fail(
        designs.LATCHY, "latchy",
        "Warning: Latch inferred for signal `\\latchy.\\q' from process "
        "`\\latchy.$proc$latchy.v:2$1'.\nERROR: Latch inferred (treated as "
        "error by -e); aborting.\n")
    gen.synth_ok(designs.EMPTY_MODULE, "empty")
    gen.synth_ok(designs.INVERTER, "inv1")
    inv_src = _src(designs.INVERTER, "inv1")
    inv_tb = _src(designs.INVERTER_TB, "inv1 tb")
    gen.compile_ok([inv_src])
    gen.compile_ok([inv_src, inv_tb])
    gen.simulate([inv_src, inv_tb], designs.INVERTER, designs.inverter_stimulus, 16)

    print(f"wrote {gen.count} fixtures to {fixture_dir}")


def main():
    write_dataset()
    write_scripts()
    write_fixtures()
    print("sample data ready")


if __name__ == "__main__":
    main()
