"""Line-tagged grammar for structured agent responses.

Agents answer in plain text using tagged lines (full grammar in
docs/agent-protocol.md):

    STEP <n>: <action, optionally naming a construct as @label>
    ASSUME: <assumption>
    PREDICT timing_gain=<x> power_gain=<y> area_ratio=<z>
    RISK: <description, optionally @label>
    CAUSE: <failure attribution>
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from rtlforge.errors import RtlforgeError


class PlanParseError(RtlforgeError):
    pass


class HypothesisParseError(RtlforgeError):
    pass


@dataclass(frozen=True)
class PlanStep:
    index: int
    action: str
    target: str          # construct label, possibly empty
    anchored: bool


@dataclass(frozen=True)
class PlanDiff:
    added: tuple[int, ...]
    removed: tuple[int, ...]
    modified: tuple[int, ...]


@dataclass(frozen=True)
class Risk:
    description: str
    target: str = ""


@dataclass(frozen=True)
class Prediction:
    timing_gain: float | None = None
    power_gain: float | None = None
    area_ratio: float | None = None


_STEP_RE = re.compile(r"^STEP\s+(\d+)\s*:\s*(.+)$")
_ASSUME_RE = re.compile(r"^ASSUME\s*:\s*(.+)$")
_PREDICT_RE = re.compile(r"^PREDICT\b(.*)$")
_RISK_RE = re.compile(r"^RISK\s*:\s*(.+)$")
_CAUSE_RE = re.compile(r"^CAUSE\s*:\s*(.+)$")
_LABEL_RE = re.compile(r"@([A-Za-z_][A-Za-z0-9_$\[\].]*)")
_NUMBER_RE = re.compile(r"(timing_gain|power_gain|area_ratio)\s*=\s*([^\s,;]+)")


def find_target(text: str, labels: set[str]) -> tuple[str, bool]:
    """Extract the referenced construct label and whether it anchors.

    An explicit @label wins; otherwise the first schema label appearing as
    a whole word in the text is used.
    """
    m = _LABEL_RE.search(text)
    if m:
        label = m.group(1)
        return label, label in labels
    for word in re.findall(r"[A-Za-z_][A-Za-z0-9_$]*", text):
        if word in labels:
            return word, True
    return "", False


def parse_plan_lines(text: str, labels: set[str]) -> tuple[list[PlanStep], list[str]]:
    """Parse STEP/ASSUME lines; raises PlanParseError when no steps parse."""
    raw_steps: list[tuple[int, str]] = []
    assumptions: list[str] = []
    for line in text.splitlines():
        line = line.strip()
        m = _STEP_RE.match(line)
        if m:
            raw_steps.append((int(m.group(1)), m.group(2).strip()))
            continue
        m = _ASSUME_RE.match(line)
        if m:
            assumptions.append(m.group(1).strip())
    if not raw_steps:
        raise PlanParseError("response contains no STEP lines")
    raw_steps.sort(key=lambda pair: pair[0])
    steps = []
    for new_index, (_, action) in enumerate(raw_steps, start=1):
        target, anchored = find_target(action, labels)
        steps.append(PlanStep(new_index, action, target, anchored))
    return steps, assumptions


def parse_prediction(text: str) -> Prediction | None:
    """Parse the first well-formed PREDICT line, if any."""
    for line in text.splitlines():
        m = _PREDICT_RE.match(line.strip())
        if not m:
            continue
        values: dict[str, float] = {}
        for key, raw in _NUMBER_RE.findall(m.group(1)):
            try:
                values[key] = float(raw.rstrip("%"))
            except ValueError:
                continue
        if values:
            return Prediction(
                timing_gain=values.get("timing_gain"),
                power_gain=values.get("power_gain"),
                area_ratio=values.get("area_ratio"),
            )
    return None


def parse_risks(text: str, labels: set[str]) -> list[Risk]:
    risks = []
    for line in text.splitlines():
        m = _RISK_RE.match(line.strip())
        if m:
            body = m.group(1).strip()
            target, _ = find_target(body, labels)
            risks.append(Risk(body, target))
    return risks


def parse_cause(text: str) -> str:
    for line in text.splitlines():
        m = _CAUSE_RE.match(line.strip())
        if m:
            return m.group(1).strip()
    return ""


FORMAT_REMINDER = (
    "Answer only with tagged lines: 'STEP <n>: <action>' (reference constructs "
    "as @label), 'ASSUME: <assumption>', 'PREDICT timing_gain=<x> power_gain=<y> "
    "area_ratio=<z>', 'RISK: <description>', 'CAUSE: <attribution>'."
)
