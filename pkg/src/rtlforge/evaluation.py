"""Code evaluation: syntax verification, latency-aware functional
equivalence, and PPA assessment with short-circuit staging.

The three checks run strictly in order. Fatal syntax errors clear the
downstream results; functional mismatches suppress the PPA stage. A report
therefore never carries mismatches next to syntax errors, or PPA numbers
next to mismatches.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from rtlforge.agents.coder import CandidateCode
from rtlforge.errors import RtlforgeError
from rtlforge.frontend.parse_errors import (
    FrontendError,
    SyntaxIssue,
    UnsupportedConstruct,
    VerilogSyntaxError,
)
from rtlforge.frontend.parser import parse_module
from rtlforge.frontend.syntax import PortDir, VerilogSource
from rtlforge.goals import GoalSpec, OptimizationKind
from rtlforge.metrics import area_ratio as area_ratio_of
from rtlforge.metrics import power_gain as power_gain_of
from rtlforge.metrics import timing_gain as timing_gain_of
from rtlforge.netlist.gates import parse_netlist
from rtlforge.netlist.liberty import LibertyLibrary
from rtlforge.netlist.ppa import PpaReport, build_ppa_report
from rtlforge.tools.adapters import EdaToolchain, SimulationFailed, SynthesisFailed, compile_diagnostics
from rtlforge.tools.invocation import ToolError
from rtlforge.tools.vcd import SimulationTrace, activity_from_vcd, parse_vcd


class TraceTooShort(RtlforgeError):
    def __init__(self, needed: int, have: int):
        super().__init__(f"traces must cover at least {needed} cycles, have {have}")


@dataclass(frozen=True)
class FunctionalMismatch:
    signal: str
    cycle: int
    expected: str
    observed: str

    def __post_init__(self):
        if self.expected == self.observed:
            raise ValueError("a mismatch requires differing values")

    def render(self) -> str:
        return (f"signal {self.signal} at aligned cycle {self.cycle}: "
                f"expected {self.expected}, observed {self.observed}")


@dataclass
class PpaAssessment:
    baseline: PpaReport
    candidate: PpaReport
    area_ratio: float
    timing_gain: float
    power_gain: float
    latency_shift: int
    goals_met: bool
    kind: OptimizationKind

    def primary_metric_name(self) -> str:
        return "timing_gain" if self.kind is OptimizationKind.PIPELINING else "power_gain"

    @property
    def primary_gain(self) -> float:
        return getattr(self, self.primary_metric_name())

    def feedback_text(self) -> str:
        return (
            f"area_ratio={self.area_ratio:.3f} timing_gain={self.timing_gain:.1f}% "
            f"power_gain={self.power_gain:.1f}% latency_shift={self.latency_shift} "
            f"goals_met={'yes' if self.goals_met else 'no'}"
        )

    def to_dict(self) -> dict:
        return {
            "baseline": self.baseline.to_dict(),
            "candidate": self.candidate.to_dict(),
            "area_ratio": self.area_ratio,
            "timing_gain": self.timing_gain,
            "power_gain": self.power_gain,
            "latency_shift": self.latency_shift,
            "goals_met": self.goals_met,
            "kind": self.kind.value,
        }


class EvalStage(Enum):
    SYNTAX = "SYNTAX"
    FUNCTIONAL = "FUNCTIONAL"
    PPA = "PPA"
    COMPLETE = "COMPLETE"


@dataclass
class EvaluationReport:
    syntax_errors: list[SyntaxIssue] = field(default_factory=list)
    warnings: list[SyntaxIssue] = field(default_factory=list)
    functional_mismatches: list[FunctionalMismatch] = field(default_factory=list)
    ppa: PpaAssessment | None = None
    stage_reached: EvalStage = EvalStage.SYNTAX
    latency_shift: int = 0
    notes: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.check_invariants()

    def check_invariants(self):
        if self.syntax_errors:
            assert not self.functional_mismatches and self.ppa is None, \
                "syntax errors must clear downstream results"
        if self.ppa is not None:
            assert not self.functional_mismatches, \
                "PPA results require functional equivalence"

    @property
    def goals_met(self) -> bool:
        return self.ppa is not None and self.ppa.goals_met

    def to_dict(self) -> dict:
        return {
            "syntax_errors": [(i.line, i.column, i.message) for i in self.syntax_errors],
            "warnings": [(i.line, i.column, i.message) for i in self.warnings],
            "functional_mismatches": [
                (m.signal, m.cycle, m.expected, m.observed)
                for m in self.functional_mismatches],
            "ppa": self.ppa.to_dict() if self.ppa else None,
            "stage_reached": self.stage_reached.value,
            "latency_shift": self.latency_shift,
            "notes": list(self.notes),
        }


MISMATCH_CAP = 50


def check_goals(a: PpaAssessment, g: GoalSpec) -> bool:
    """Alg-style goal test: area bound plus the kind's primary gain bound."""
    if a.area_ratio > g.max_area_ratio:
        return False
    if g.kind is OptimizationKind.PIPELINING:
        return a.timing_gain >= g.min_timing_gain
    return a.power_gain >= g.min_power_gain


def _canon(bits: str) -> str:
    bits = bits.lower()
    if bits and all(c in "01" for c in bits):
        return str(int(bits, 2))
    stripped = bits.lstrip("0")
    return stripped if stripped else "0"


def _has_x(bits: str) -> bool:
    return any(c in "xz" for c in bits.lower())


def _by_signal(trace: SimulationTrace, outputs: list[str]) -> dict[str, list[str]]:
    table: dict[str, list[str]] = {name: [] for name in outputs}
    for _, signal, bits in sorted(trace.samples, key=lambda s: (s[0],)):
        if signal in table:
            table[signal].append(bits)
    return table


def align_latency(ref: SimulationTrace, cand: SimulationTrace, outputs: list[str],
                  max_shift: int) -> tuple[int, float]:
    """Cycle shift of the candidate that best matches the reference.

    Tries delays s in [0, max_shift], comparing ref cycle j against
    candidate cycle j+s; x-valued reference samples leave the denominator.
    Ties resolve to the smallest shift.
    """
    ref_by = _by_signal(ref, outputs)
    cand_by = _by_signal(cand, outputs)
    needed = max_shift + 4
    have = min((len(v) for v in list(ref_by.values()) + list(cand_by.values())), default=0)
    if have < needed:
        raise TraceTooShort(needed, have)

    best_shift = 0
    best_score = -1.0
    for s in range(max_shift + 1):
        matches = 0
        total = 0
        for name in outputs:
            rv = ref_by[name]
            cv = cand_by[name]
            for j in range(min(len(rv), len(cv) - s)):
                if _has_x(rv[j]):
                    continue
                total += 1
                if _canon(rv[j]) == _canon(cv[j + s]):
                    matches += 1
        score = matches / total if total else 0.0
        if score > best_score:
            best_score = score
            best_shift = s
    return best_shift, best_score


def mismatches_at_shift(ref: SimulationTrace, cand: SimulationTrace,
                        outputs: list[str], shift: int,
                        cap: int = MISMATCH_CAP) -> list[FunctionalMismatch]:
    ref_by = _by_signal(ref, outputs)
    cand_by = _by_signal(cand, outputs)
    out: list[FunctionalMismatch] = []
    for name in outputs:
        rv = ref_by[name]
        cv = cand_by[name]
        for j in range(min(len(rv), len(cv) - shift)):
            if _has_x(rv[j]):
                continue
            if _canon(rv[j]) != _canon(cv[j + shift]):
                out.append(FunctionalMismatch(name, j, rv[j], cv[j + shift]))
                if len(out) >= cap:
                    return out
    return out


def _simulation_failure(reason: str) -> FunctionalMismatch:
    return FunctionalMismatch("<simulation>", 0, "finish", reason or "failed")


class CodeEvaluator:
    """Runs the three evaluation stages over the configured toolchain."""

    def __init__(self, toolchain: EdaToolchain, liberty_text: str,
                 max_cycles: int = 512, f_clk_mhz: float = 100.0,
                 clock: str = "clk", lib: LibertyLibrary | None = None):
        from rtlforge.netlist.liberty import parse_liberty
        self.toolchain = toolchain
        self.liberty_text = liberty_text
        self.lib = lib or parse_liberty(liberty_text)
        self.max_cycles = max_cycles
        self.f_clk_mhz = f_clk_mhz
        self.clock = clock

    # --- stage 1 ---

    def verify_syntax(self, c: CandidateCode | VerilogSource) -> list[SyntaxIssue]:
        """Merged frontend + external-compiler diagnostics.

        The external tool owns compilability: when it accepts the design,
        frontend complaints are downgraded to non-fatal warnings (they only
        gate dataflow-graph features).
        """
        src = c.source if isinstance(c, CandidateCode) else c
        frontend_issues: list[SyntaxIssue] = []
        try:
            parse_module(src)
        except VerilogSyntaxError as exc:
            frontend_issues = list(exc.errors)
        except UnsupportedConstruct as exc:
            frontend_issues = [exc.as_issue()]

        result = self.toolchain.compile_design([src])
        tool_ok = result.exit_status == 0
        issues: list[SyntaxIssue] = []
        seen: set[tuple[int, str]] = set()
        if not tool_ok:
            for diag in compile_diagnostics(result, [src]):
                key = (diag.line, diag.message)
                if key not in seen:
                    seen.add(key)
                    issues.append(SyntaxIssue(diag.line, 1, diag.message, fatal=True))
        for issue in frontend_issues:
            key = (issue.line, issue.message)
            if key in seen:
                continue
            seen.add(key)
            if tool_ok:
                issue = SyntaxIssue(issue.line, issue.column, issue.message, fatal=False)
            issues.append(issue)
        return issues

    # --- stage 2 ---

    def evaluate_functionality(self, c0: VerilogSource, c: CandidateCode | VerilogSource,
                               tb: VerilogSource, goal: GoalSpec,
                               ) -> tuple[list[FunctionalMismatch], int]:
        mismatches, shift, _, _ = self._functionality_with_traces(c0, c, tb, goal)
        return mismatches, shift

    def _functionality_with_traces(self, c0: VerilogSource, c: CandidateCode | VerilogSource,
                                   tb: VerilogSource, goal: GoalSpec,
                                   ) -> tuple[list[FunctionalMismatch], int,
                                              SimulationTrace | None, SimulationTrace | None]:
        cand_src = c.source if isinstance(c, CandidateCode) else c
        try:
            outputs = [p.name for p in parse_module(c0).ports
                       if p.direction is PortDir.OUTPUT]
        except FrontendError as exc:
            return [_simulation_failure(f"baseline does not parse: {exc}")], 0, None, None
        try:
            ref = self.toolchain.simulate_sources(
                [c0, tb], outputs, self.max_cycles, clock=self.clock)
            cand = self.toolchain.simulate_sources(
                [cand_src, tb], outputs, self.max_cycles, clock=self.clock)
        except (SimulationFailed, ToolError) as exc:
            return [_simulation_failure(str(exc))], 0, None, None
        try:
            shift, score = align_latency(ref, cand, outputs, goal.max_latency_shift)
        except TraceTooShort as exc:
            return [_simulation_failure(str(exc))], 0, None, None
        if score >= 1.0:
            return [], shift, ref, cand
        return mismatches_at_shift(ref, cand, outputs, shift), shift, ref, cand

    # --- stage 3 ---

    def assess_ppa(self, c0: VerilogSource, c: CandidateCode | VerilogSource,
                   goal: GoalSpec, latency_shift: int = 0,
                   baseline_activity: dict[str, float] | None = None,
                   candidate_activity: dict[str, float] | None = None) -> PpaAssessment:
        cand_src = c.source if isinstance(c, CandidateCode) else c
        base_json, _ = self.toolchain.synthesize_design(c0, self.liberty_text)
        cand_json, _ = self.toolchain.synthesize_design(cand_src, self.liberty_text)
        baseline = build_ppa_report(parse_netlist(base_json), self.lib,
                                    baseline_activity, self.f_clk_mhz)
        candidate = build_ppa_report(parse_netlist(cand_json), self.lib,
                                     candidate_activity, self.f_clk_mhz)
        assessment = PpaAssessment(
            baseline=baseline,
            candidate=candidate,
            area_ratio=area_ratio_of(candidate.area, baseline.area),
            timing_gain=timing_gain_of(candidate.cpd, baseline.cpd)
            if baseline.cpd > 0 else 0.0,
            power_gain=power_gain_of(candidate.total_power, baseline.total_power)
            if baseline.total_power > 0 else 0.0,
            latency_shift=latency_shift,
            goals_met=False,
            kind=goal.kind,
        )
        assessment.goals_met = check_goals(assessment, goal)
        return assessment

    # --- combined ---

    def evaluate(self, c0: VerilogSource, c: CandidateCode | VerilogSource,
                 tb: VerilogSource, goal: GoalSpec) -> EvaluationReport:
        """All three stages with short-circuit staging; never raises tool errors."""
        try:
            issues = self.verify_syntax(c)
        except ToolError as exc:
            return EvaluationReport(
                syntax_errors=[SyntaxIssue(0, 0, str(exc))],
                stage_reached=EvalStage.SYNTAX,
                notes=[f"tool error during syntax stage: {exc}"])
        fatal = [i for i in issues if i.fatal]
        warnings = [i for i in issues if not i.fatal]
        if fatal:
            return EvaluationReport(syntax_errors=fatal, warnings=warnings,
                                    stage_reached=EvalStage.SYNTAX)

        mismatches, shift, ref_trace, cand_trace = self._functionality_with_traces(
            c0, c, tb, goal)
        if mismatches:
            return EvaluationReport(warnings=warnings,
                                    functional_mismatches=mismatches,
                                    stage_reached=EvalStage.FUNCTIONAL,
                                    latency_shift=shift)

        base_act = activity_from_vcd(parse_vcd(ref_trace.vcd_text), self.clock) \
            if ref_trace is not None and ref_trace.vcd_text else None
        cand_act = activity_from_vcd(parse_vcd(cand_trace.vcd_text), self.clock) \
            if cand_trace is not None and cand_trace.vcd_text else None
        try:
            assessment = self.assess_ppa(c0, c, goal, shift, base_act, cand_act)
        except (SynthesisFailed, ToolError) as exc:
            return EvaluationReport(warnings=warnings,
                                    stage_reached=EvalStage.PPA,
                                    latency_shift=shift,
                                    notes=[f"ppa stage failed: {exc}"])
        return EvaluationReport(warnings=warnings, ppa=assessment,
                                stage_reached=EvalStage.COMPLETE,
                                latency_shift=shift)
