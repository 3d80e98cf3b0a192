"""Benchmark dataset loading and triple validation.

A dataset root holds one directory per triple:

    <root>/<id>/unopt.v      unoptimized design (required)
    <root>/<id>/tb.v         shared testbench (required)
    <root>/<id>/opt_ref.v    reference optimized design (optional)
    <root>/<id>/meta.toml    key = value metadata (kind is required)

Recognized meta keys: id, kind (pipelining | clock_gating), difficulty
(easy | hard), clock_period_ns, clock, max_latency_shift, goal.min_timing_gain,
goal.min_power_gain, goal.max_area_ratio. Full format in docs/dataset-format.md.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path

from rtlforge.errors import RtlforgeError
from rtlforge.frontend.parse_errors import FrontendError
from rtlforge.frontend.parser import parse_module
from rtlforge.frontend.syntax import VerilogSource
from rtlforge.goals import GoalSpec, OptimizationKind


class MissingFile(RtlforgeError):
    def __init__(self, triple_id: str, filename: str):
        self.triple_id = triple_id
        self.filename = filename
        super().__init__(f"triple '{triple_id}' is missing {filename}")


class DuplicateId(RtlforgeError):
    def __init__(self, triple_id: str):
        super().__init__(f"duplicate triple id '{triple_id}'")


class BadMetadata(RtlforgeError):
    pass


@dataclass
class DesignTriple:
    id: str
    unoptimized: VerilogSource
    testbench: VerilogSource
    kind: OptimizationKind
    reference_optimized: VerilogSource | None = None
    goal: GoalSpec = None  # type: ignore[assignment]
    clock_period_ns: float = 10.0
    clock: str = "clk"
    difficulty: str = "untagged"

    def __post_init__(self):
        if self.goal is None:
            self.goal = GoalSpec(kind=self.kind)
        if self.difficulty not in ("easy", "hard", "untagged"):
            raise BadMetadata(f"triple '{self.id}': bad difficulty {self.difficulty!r}")


@dataclass
class DatasetManifest:
    root: Path
    triples: list[DesignTriple] = field(default_factory=list)

    def counts(self) -> dict[OptimizationKind, int]:
        out: dict[OptimizationKind, int] = {}
        for t in self.triples:
            out[t.kind] = out.get(t.kind, 0) + 1
        return out

    def by_id(self, triple_id: str) -> DesignTriple:
        for t in self.triples:
            if t.id == triple_id:
                return t
        raise KeyError(triple_id)


def parse_kv(text: str) -> dict[str, str]:
    """Minimal key = value reader for the TOML-subset metadata files."""
    out: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise BadMetadata(f"malformed metadata line: {raw!r}")
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip().strip('"').strip("'")
    return out


def _triple_from_dir(path: Path) -> DesignTriple:
    triple_id = path.name
    unopt = path / "unopt.v"
    tb = path / "tb.v"
    meta_path = path / "meta.toml"
    for required in (unopt, tb, meta_path):
        if not required.is_file():
            raise MissingFile(triple_id, required.name)
    meta = parse_kv(meta_path.read_text(encoding="utf-8"))
    if "kind" not in meta:
        raise BadMetadata(f"triple '{triple_id}': meta.toml lacks 'kind'")
    try:
        kind = OptimizationKind(meta["kind"])
    except ValueError:
        raise BadMetadata(f"triple '{triple_id}': unknown kind {meta['kind']!r}") from None

    triple_id = meta.get("id", triple_id)
    goal = GoalSpec(kind=kind).with_overrides(
        min_timing_gain=_opt_float(meta, "goal.min_timing_gain"),
        min_power_gain=_opt_float(meta, "goal.min_power_gain"),
        max_area_ratio=_opt_float(meta, "goal.max_area_ratio"),
        max_latency_shift=_opt_int(meta, "max_latency_shift"),
    )
    ref_path = path / "opt_ref.v"
    return DesignTriple(
        id=triple_id,
        unoptimized=VerilogSource(unopt.read_text(encoding="utf-8"), str(unopt)),
        testbench=VerilogSource(tb.read_text(encoding="utf-8"), str(tb)),
        kind=kind,
        reference_optimized=(
            VerilogSource(ref_path.read_text(encoding="utf-8"), str(ref_path))
            if ref_path.is_file() else None),
        goal=goal,
        clock_period_ns=float(meta.get("clock_period_ns", 10.0)),
        clock=meta.get("clock", "clk"),
        difficulty=meta.get("difficulty", "untagged"),
    )


def _opt_float(meta: dict[str, str], key: str) -> float | None:
    return float(meta[key]) if key in meta else None


def _opt_int(meta: dict[str, str], key: str) -> int | None:
    return int(meta[key]) if key in meta else None


def load_triple(path: Path | str) -> DesignTriple:
    """Load one triple directory."""
    return _triple_from_dir(Path(path))


def load_dataset(root: Path | str) -> DatasetManifest:
    """Scan a dataset root; entries come back sorted by id."""
    root = Path(root)
    if not root.is_dir():
        raise MissingFile(str(root), "(dataset root)")
    manifest = DatasetManifest(root=root)
    seen: set[str] = set()
    for entry in sorted(root.iterdir()):
        if not entry.is_dir() or entry.name.startswith("."):
            continue
        triple = _triple_from_dir(entry)
        if triple.id in seen:
            raise DuplicateId(triple.id)
        seen.add(triple.id)
        manifest.triples.append(triple)
    manifest.triples.sort(key=lambda t: t.id)
    if not manifest.triples:
        warnings.warn(f"dataset root {root} contains no triples", stacklevel=2)
    return manifest


@dataclass
class ValidationCheck:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class ValidationReport:
    triple_id: str
    checks: list[ValidationCheck] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)


def validate_triple(triple: DesignTriple, evaluator) -> ValidationReport:
    """Spec checks for one triple: parses, compiles, reference equivalence,
    and a positive primary-metric improvement of the reference."""
    report = ValidationReport(triple.id)

    try:
        parse_module(triple.unoptimized)
        report.checks.append(ValidationCheck("unoptimized_parses", True))
    except FrontendError as exc:
        report.checks.append(ValidationCheck("unoptimized_parses", False, str(exc)))

    try:
        compiled = evaluator.toolchain.compile_design([triple.unoptimized, triple.testbench])
        ok = compiled.exit_status == 0
        detail = "" if ok else compiled.stderr.strip().splitlines()[:1]
        report.checks.append(ValidationCheck(
            "testbench_compiles", ok, detail[0] if detail else ""))
    except Exception as exc:
        report.checks.append(ValidationCheck("testbench_compiles", False, str(exc)))

    if triple.reference_optimized is None:
        return report

    try:
        mismatches, shift = evaluator.evaluate_functionality(
            triple.unoptimized, triple.reference_optimized, triple.testbench, triple.goal)
        equivalent = not mismatches
        report.checks.append(ValidationCheck(
            "reference_equivalent", equivalent,
            "" if equivalent else mismatches[0].render()))
    except Exception as exc:
        report.checks.append(ValidationCheck("reference_equivalent", False, str(exc)))
        return report

    if not equivalent:
        return report

    try:
        assessment = evaluator.assess_ppa(
            triple.unoptimized, triple.reference_optimized, triple.goal, shift)
        gain = assessment.primary_gain
        report.checks.append(ValidationCheck(
            "reference_improves", gain > 0,
            f"{assessment.primary_metric_name()}={gain:.2f}%"))
    except Exception as exc:
        report.checks.append(ValidationCheck("reference_improves", False, str(exc)))
    return report
