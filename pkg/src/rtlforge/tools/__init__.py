"""External tool adapters: invocation, record/replay fixtures, VCD handling."""

from rtlforge.tools.adapters import (
    EdaToolchain,
    SimulationFailed,
    SYNTH_SCRIPT,
    SynthesisFailed,
    ToolDiagnostic,
    build_compile_invocation,
    build_simulation_invocation,
    build_synthesis_invocation,
    compile_diagnostics,
)
from rtlforge.tools.fixtures import FixtureStore
from rtlforge.tools.invocation import (
    DEFAULT_TIMEOUTS,
    FixtureMissing,
    ToolError,
    ToolInvocation,
    ToolKind,
    ToolMissing,
    ToolResult,
    ToolTimeout,
)
from rtlforge.tools.runner import ToolingConfig, ToolRunner
from rtlforge.tools.vcd import (
    FinishReason,
    SimulationTrace,
    VcdParseError,
    activity_from_vcd,
    extract_trace,
    parse_vcd,
    posedge_times,
)

__all__ = [
    "DEFAULT_TIMEOUTS",
    "EdaToolchain",
    "FinishReason",
    "FixtureMissing",
    "FixtureStore",
    "SYNTH_SCRIPT",
    "SimulationFailed",
    "SimulationTrace",
    "SynthesisFailed",
    "ToolDiagnostic",
    "ToolError",
    "ToolInvocation",
    "ToolKind",
    "ToolMissing",
    "ToolResult",
    "ToolRunner",
    "ToolTimeout",
    "ToolingConfig",
    "VcdParseError",
    "activity_from_vcd",
    "build_compile_invocation",
    "build_simulation_invocation",
    "build_synthesis_invocation",
    "compile_diagnostics",
    "extract_trace",
    "parse_vcd",
    "posedge_times",
]
