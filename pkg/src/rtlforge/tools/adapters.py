"""High-level compile / simulate / synthesize operations.

Sources are staged under position-derived names (src0.v, src1.v, ...) so
fixture keys depend only on content; diagnostics are mapped back to each
source's origin label.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from rtlforge.errors import RtlforgeError
from rtlforge.frontend.syntax import VerilogSource
from rtlforge.tools.invocation import ToolInvocation, ToolKind, ToolResult, ToolTimeout
from rtlforge.tools.runner import ToolRunner
from rtlforge.tools.vcd import (
    FinishReason,
    SimulationTrace,
    VcdParseError,
    extract_trace,
    parse_vcd,
)

SYNTH_SCRIPT = """\
read_verilog design.v
hierarchy -check -auto-top
proc
opt
fsm
memory
techmap
opt
dfflibmap -liberty cells.lib
abc -liberty cells.lib
opt_clean
write_json netlist.json
"""

# log lines promoted to hard errors when running the real tool
SYNTH_ERROR_REGEX = "[Ll]atch inferred"


class SynthesisFailed(RtlforgeError):
    def __init__(self, first_error: str, log: str = ""):
        self.first_error = first_error
        self.log = log
        super().__init__(first_error)


class SimulationFailed(RtlforgeError):
    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(reason)


@dataclass(frozen=True)
class ToolDiagnostic:
    origin: str
    line: int
    message: str


_DIAG_RE = re.compile(r"^(?P<file>[^:\s]+):(?P<line>\d+):\s*(?P<rest>.*)$")


def build_compile_invocation(sources: list[VerilogSource],
                             timeout: float = 0.0) -> ToolInvocation:
    inputs = tuple((f"src{i}.v", s.text) for i, s in enumerate(sources))
    names = [name for name, _ in inputs]
    return ToolInvocation(
        tool=ToolKind.COMPILE,
        inputs=inputs,
        args=("-g2001", "-o", "design.vvp", *names),
        timeout=timeout,
        expected_artifacts=("design.vvp",),
    )


def build_simulation_invocation(vvp_text: str, timeout: float = 0.0) -> ToolInvocation:
    return ToolInvocation(
        tool=ToolKind.SIMULATE,
        inputs=(("design.vvp", vvp_text),),
        args=("design.vvp",),
        timeout=timeout,
        expected_artifacts=("trace.vcd",),
    )


def build_synthesis_invocation(src: VerilogSource, liberty_text: str,
                               timeout: float = 0.0) -> ToolInvocation:
    return ToolInvocation(
        tool=ToolKind.SYNTHESIZE,
        inputs=(
            ("design.v", src.text),
            ("cells.lib", liberty_text),
            ("synth.ys", SYNTH_SCRIPT),
        ),
        args=("-e", SYNTH_ERROR_REGEX, "-s", "synth.ys"),
        timeout=timeout,
        expected_artifacts=("netlist.json",),
    )


def compile_diagnostics(result: ToolResult,
                        sources: list[VerilogSource]) -> list[ToolDiagnostic]:
    """Extract (origin, line, message) error records from compiler stderr."""
    staged = {f"src{i}.v": s.origin for i, s in enumerate(sources)}
    out: list[ToolDiagnostic] = []
    for raw in result.stderr.splitlines():
        m = _DIAG_RE.match(raw.strip())
        if not m:
            continue
        rest = m.group("rest")
        low = rest.lower()
        if "warning" in low.split(":")[0]:
            continue
        message = re.sub(r"^(syntax\s+)?error:?\s*", "", rest, flags=re.IGNORECASE)
        if not message:
            message = "syntax error"
        origin = staged.get(m.group("file"), m.group("file"))
        out.append(ToolDiagnostic(origin, int(m.group("line")), message))
    return out


class EdaToolchain:
    """Compile, simulate and synthesize through the configured runner."""

    def __init__(self, runner: ToolRunner | None = None):
        self.runner = runner or ToolRunner()

    def compile_design(self, sources: list[VerilogSource],
                       timeout: float = 0.0) -> ToolResult:
        if not sources:
            raise ValueError("compile_design requires at least one source")
        inv = build_compile_invocation(sources, timeout)
        result = self.runner.run(inv)
        if result.timed_out:
            raise ToolTimeout(ToolKind.COMPILE, inv.timeout)
        return result

    def run_simulation(self, compiled: ToolResult, monitored: list[str],
                       max_cycles: int, timeout: float = 0.0,
                       clock: str = "clk") -> SimulationTrace:
        vvp_text = compiled.artifacts.get("design.vvp")
        if vvp_text is None:
            raise SimulationFailed("no compiled design artifact to simulate")
        inv = build_simulation_invocation(vvp_text, timeout)
        result = self.runner.run(inv)
        vcd_text = result.artifacts.get("trace.vcd")
        if vcd_text is None:
            if result.timed_out:
                raise ToolTimeout(ToolKind.SIMULATE, inv.timeout)
            raise SimulationFailed(
                f"simulator produced no trace (exit {result.exit_status}): "
                + (result.stderr or result.stdout).strip()[:200])
        try:
            samples, total = extract_trace(parse_vcd(vcd_text), monitored, max_cycles, clock)
        except VcdParseError as exc:
            raise SimulationFailed(str(exc)) from None
        # TIMEOUT means the run itself never reached $finish; truncating a
        # finished run to max_cycles keeps its FINISH status
        if result.timed_out:
            reason = FinishReason.TIMEOUT
        elif result.exit_status != 0:
            reason = FinishReason.RUNTIME_ERROR
        else:
            reason = FinishReason.FINISH
        return SimulationTrace(samples=samples, finish_reason=reason,
                               cycles=min(total, max_cycles), vcd_text=vcd_text)

    def simulate_sources(self, sources: list[VerilogSource], monitored: list[str],
                         max_cycles: int = 512, clock: str = "clk") -> SimulationTrace:
        compiled = self.compile_design(sources)
        if compiled.exit_status != 0:
            raise SimulationFailed(
                "compile failed: " + (compiled.stderr.strip().splitlines() or ["?"])[0])
        return self.run_simulation(compiled, monitored, max_cycles, clock=clock)

    def synthesize_design(self, src: VerilogSource, liberty_text: str,
                          timeout: float = 0.0) -> tuple[str, str]:
        inv = build_synthesis_invocation(src, liberty_text, timeout)
        result = self.runner.run(inv)
        log = result.stdout + ("\n" + result.stderr if result.stderr else "")
        if result.timed_out:
            raise ToolTimeout(ToolKind.SYNTHESIZE, inv.timeout)
        if result.exit_status != 0 or "netlist.json" not in result.artifacts:
            first = ""
            for line in log.splitlines():
                if "ERROR" in line or "error" in line.lower():
                    first = line.strip()
                    break
            if not first:
                first = f"synthesis failed with exit status {result.exit_status}"
            raise SynthesisFailed(first, log)
        return result.artifacts["netlist.json"], log
