"""Value-change-dump parsing, cycle sampling, and toggle-rate extraction."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from rtlforge.errors import RtlforgeError


class VcdParseError(RtlforgeError):
    pass


@dataclass(frozen=True)
class VcdVar:
    code: str
    name: str
    width: int
    scope: tuple[str, ...]


@dataclass
class VcdData:
    vars: list[VcdVar] = field(default_factory=list)
    changes: list[tuple[int, str, str]] = field(default_factory=list)  # (time, code, bits)

    def find(self, name: str) -> VcdVar | None:
        """Shallowest-scope variable with the given reference name."""
        hits = [v for v in self.vars if v.name == name]
        if not hits:
            return None
        return min(hits, key=lambda v: (len(v.scope), v.scope))


def parse_vcd(text: str) -> VcdData:
    data = VcdData()
    scope: list[str] = []
    tokens = text.split()
    i = 0
    now = 0
    in_header = True
    n = len(tokens)
    while i < n:
        tok = tokens[i]
        if tok == "$scope":
            scope.append(tokens[i + 2])
            i += 4 if tokens[i + 3] == "$end" else 3
            continue
        if tok == "$upscope":
            if scope:
                scope.pop()
            i += 2
            continue
        if tok == "$var":
            # $var <type> <width> <code> <name> [range] $end
            width = int(tokens[i + 2])
            code = tokens[i + 3]
            name = tokens[i + 4]
            j = i + 5
            while tokens[j] != "$end":
                j += 1
            data.vars.append(VcdVar(code, name, width, tuple(scope)))
            i = j + 1
            continue
        if tok in ("$date", "$version", "$timescale", "$comment"):
            while i < n and tokens[i] != "$end":
                i += 1
            i += 1
            continue
        if tok in ("$enddefinitions", "$dumpvars", "$dumpall", "$dumpon", "$dumpoff"):
            in_header = tok == "$enddefinitions" and in_header
            if tok == "$enddefinitions":
                i += 2 if i + 1 < n and tokens[i + 1] == "$end" else 1
            else:
                i += 1
            continue
        if tok == "$end":
            i += 1
            continue
        if tok.startswith("#"):
            now = int(tok[1:])
            i += 1
            continue
        first = tok[0]
        if first in "01xXzZ" and len(tok) > 1:
            data.changes.append((now, tok[1:], first.lower()))
            i += 1
            continue
        if first in "bB":
            bits = tok[1:].lower()
            code = tokens[i + 1]
            data.changes.append((now, code, bits))
            i += 2
            continue
        if first in "rR":
            i += 2  # real values are not monitored
            continue
        raise VcdParseError(f"unrecognized VCD token {tok!r}")
    return data


class FinishReason(Enum):
    FINISH = "FINISH"
    TIMEOUT = "TIMEOUT"
    RUNTIME_ERROR = "RUNTIME_ERROR"


@dataclass
class SimulationTrace:
    samples: list[tuple[int, str, str]] = field(default_factory=list)
    finish_reason: FinishReason = FinishReason.FINISH
    cycles: int = 0
    vcd_text: str = ""   # raw dump, kept for activity extraction

    def signal(self, name: str) -> list[str]:
        return [bits for _, s, bits in self.samples if s == name]

    def value_at(self, name: str, cycle: int) -> str | None:
        for c, s, bits in self.samples:
            if s == name and c == cycle:
                return bits
        return None


def _timeline(data: VcdData, code: str, width: int) -> list[tuple[int, str]]:
    out = []
    for t, c, bits in data.changes:
        if c == code:
            out.append((t, _pad(bits, width)))
    return out


def _pad(bits: str, width: int) -> str:
    if len(bits) >= width:
        return bits[-width:] if width else bits
    fill = "x" if bits[0] in "xz" else "0"
    return fill * (width - len(bits)) + bits


def _value_before(timeline: list[tuple[int, str]], t: int, width: int) -> str:
    value = "x" * width
    for when, bits in timeline:
        if when >= t:
            break
        value = bits
    return value


def posedge_times(data: VcdData, clock: str = "clk") -> list[int]:
    var = data.find(clock)
    if var is None:
        raise VcdParseError(f"clock signal '{clock}' not found in VCD")
    times = []
    prev = "x"
    for t, code, bits in data.changes:
        if code != var.code:
            continue
        if prev == "0" and bits == "1":
            times.append(t)
        prev = bits
    return times


def extract_trace(data: VcdData, monitored: list[str], max_cycles: int,
                  clock: str = "clk") -> tuple[list[tuple[int, str, str]], int]:
    """Sample each monitored signal just before every rising clock edge.

    Returns (samples, total posedge count before truncation). Cycle k holds
    the values a register would capture at edge k.
    """
    edges = posedge_times(data, clock)
    total = len(edges)
    edges = edges[:max_cycles]
    lines = {}
    for name in monitored:
        var = data.find(name)
        if var is None:
            raise VcdParseError(f"monitored signal '{name}' not found in VCD")
        lines[name] = (var.width, _timeline(data, var.code, var.width))
    samples: list[tuple[int, str, str]] = []
    for cycle, t in enumerate(edges):
        for name in monitored:
            width, timeline = lines[name]
            samples.append((cycle, name, _value_before(timeline, t, width)))
    return samples, total


def activity_from_vcd(data: VcdData, clock: str = "clk") -> dict[str, float]:
    """Per-bit toggle rates relative to the clock cycle count, clamped to 1.

    Multi-bit signals produce ``name[i]`` entries (i = 0 at the LSB); 1-bit
    signals use their bare name. x-involved changes are not counted. The
    clock itself is excluded.
    """
    cycles = len(posedge_times(data, clock))
    if cycles == 0:
        return {}
    clock_var = data.find(clock)
    seen: dict[str, VcdVar] = {}
    for var in data.vars:
        if var.code == clock_var.code or var.name == clock:
            continue
        if var.name not in seen or len(var.scope) < len(seen[var.name].scope):
            seen[var.name] = var
    rates: dict[str, float] = {}
    for name in sorted(seen):
        var = seen[name]
        timeline = _timeline(data, var.code, var.width)
        toggles = [0] * var.width
        prev = "x" * var.width
        for _, bits in timeline:
            for i in range(var.width):
                a, b = prev[-1 - i], bits[-1 - i]
                if a in "01" and b in "01" and a != b:
                    toggles[i] += 1
            prev = bits
        for i in range(var.width):
            key = name if var.width == 1 else f"{name}[{i}]"
            rates[key] = min(1.0, toggles[i] / cycles)
    return rates
