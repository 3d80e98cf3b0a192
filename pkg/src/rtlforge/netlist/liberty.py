"""Parser for a Liberty standard-cell library subset.

Recognized structure: library / cell / pin / ff / timing groups with the
attributes area, cell_leakage_power, direction, capacitance, clocked_on,
nom_voltage, default_toggle_rate, related_pin, cell_rise/cell_fall value
tables and intrinsic_rise/intrinsic_fall. Unknown attributes and groups
are skipped and reported in the warning list.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from rtlforge.errors import RtlforgeError


class LibertyParseError(RtlforgeError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


@dataclass(frozen=True)
class LibertyPin:
    name: str
    direction: str           # input | output
    capacitance: float       # pF


@dataclass(frozen=True)
class TimingArc:
    from_pin: str
    to_pin: str
    delay: float             # ns


@dataclass
class LibertyCell:
    name: str
    area: float              # um^2
    leakage_power: float     # nW
    is_sequential: bool
    pins: list[LibertyPin] = field(default_factory=list)
    arcs: list[TimingArc] = field(default_factory=list)
    clock_pin: str | None = None
    data_pins: tuple[str, ...] = ()

    def pin(self, name: str) -> LibertyPin | None:
        for p in self.pins:
            if p.name == name:
                return p
        return None

    def output_pins(self) -> list[str]:
        return [p.name for p in self.pins if p.direction == "output"]

    def input_pins(self) -> list[str]:
        return [p.name for p in self.pins if p.direction == "input"]


@dataclass
class LibertyLibrary:
    name: str
    cells: dict[str, LibertyCell]
    default_voltage: float = 1.0
    default_toggle_rate: float = 0.2
    warnings: list[str] = field(default_factory=list)

    def cell(self, name: str) -> LibertyCell:
        try:
            return self.cells[name]
        except KeyError:
            raise UnknownCell(name) from None


class UnknownCell(RtlforgeError):
    def __init__(self, name: str):
        self.cell_name = name
        super().__init__(f"cell '{name}' not in library")


# --- group tree ---


@dataclass
class _Group:
    kind: str
    args: list[str]
    attrs: list[tuple[str, str, int]]       # (name, raw value, line)
    complex_attrs: list[tuple[str, list[str], int]]
    children: list["_Group"]
    line: int


_TOKEN = re.compile(r'"(?:[^"\\]|\\.)*"|[A-Za-z0-9_.+\-!*/]+|[(){},:;]')


def _tokenize(text: str):
    line = 1
    pos = 0
    clean = re.sub(r"/\*.*?\*/", lambda m: re.sub(r"[^\n]", " ", m.group(0)), text, flags=re.DOTALL)
    clean = re.sub(r"//[^\n]*", "", clean)
    clean = re.sub(r"\\\n", " ", clean)
    out = []
    for m in _TOKEN.finditer(clean):
        line += clean.count("\n", pos, m.start())
        pos = m.start()
        out.append((m.group(0), line))
    line += clean.count("\n", pos)
    out.append((None, line))  # EOF marker carries the last line number
    return out


def _parse_group(tokens, i) -> tuple[_Group, int]:
    name, line = tokens[i]
    args: list[str] = []
    i += 1
    if tokens[i][0] == "(":
        i += 1
        while tokens[i][0] != ")":
            if tokens[i][0] is None:
                raise LibertyParseError(tokens[i][1], "unexpected end of file in group header")
            if tokens[i][0] != ",":
                args.append(tokens[i][0].strip('"'))
            i += 1
        i += 1
    if tokens[i][0] != "{":
        raise LibertyParseError(tokens[i][1], f"expected '{{' after group '{name}'")
    i += 1
    group = _Group(name, args, [], [], [], line)
    while True:
        tok, tline = tokens[i]
        if tok is None:
            raise LibertyParseError(tline, f"missing closing brace for group '{name}'")
        if tok == "}":
            i += 1
            if tokens[i][0] == ";":
                i += 1
            return group, i
        nxt = tokens[i + 1][0]
        if nxt == ":":
            value_parts = []
            j = i + 2
            while tokens[j][0] not in (";", None, "}"):
                value_parts.append(tokens[j][0])
                j += 1
            if tokens[j][0] == ";":
                j += 1
            group.attrs.append((tok, " ".join(value_parts).strip('"'), tline))
            i = j
        elif nxt == "(":
            # lookahead: '(' args ')' then '{' means subgroup, ';' means complex attribute
            j = i + 2
            depth = 1
            args2 = []
            while depth:
                t2 = tokens[j][0]
                if t2 is None:
                    raise LibertyParseError(tokens[j][1], "unexpected end of file")
                if t2 == "(":
                    depth += 1
                elif t2 == ")":
                    depth -= 1
                elif t2 != ",":
                    args2.append(t2.strip('"'))
                j += 1
            if tokens[j][0] == "{":
                sub, i = _parse_group(tokens, i)
                group.children.append(sub)
            else:
                if tokens[j][0] == ";":
                    j += 1
                group.complex_attrs.append((tok, args2, tline))
                i = j
        else:
            raise LibertyParseError(tline, f"malformed statement near '{tok}'")


_KNOWN_CELL_ATTRS = {"area", "cell_leakage_power"}
_KNOWN_PIN_ATTRS = {"direction", "capacitance", "clock", "function", "clocked_on"}
_KNOWN_TIMING_ATTRS = {"related_pin", "intrinsic_rise", "intrinsic_fall", "timing_type"}


def _float(value: str, line: int, what: str) -> float:
    try:
        return float(value.split()[0])
    except ValueError:
        raise LibertyParseError(line, f"bad numeric value for {what}: {value!r}") from None


def _table_values(args: list[str]) -> list[float]:
    out = []
    for chunk in args:
        for piece in chunk.replace(",", " ").split():
            out.append(float(piece))
    return out


def parse_liberty(text: str) -> LibertyLibrary:
    """Parse Liberty text into a library, recording warnings for skipped input."""
    if not text.strip():
        raise LibertyParseError(1, "empty library text")
    tokens = _tokenize(text)
    if tokens[0][0] != "library":
        raise LibertyParseError(tokens[0][1], "expected top-level 'library' group")
    root, i = _parse_group(tokens, 0)
    if tokens[i][0] is not None:
        raise LibertyParseError(tokens[i][1], "trailing text after library group")

    lib = LibertyLibrary(name=root.args[0] if root.args else "unnamed", cells={})
    for attr, value, line in root.attrs:
        if attr == "nom_voltage":
            lib.default_voltage = _float(value, line, attr)
        elif attr == "default_toggle_rate":
            lib.default_toggle_rate = _float(value, line, attr)
        else:
            lib.warnings.append(f"line {line}: ignored library attribute '{attr}'")

    for child in root.children:
        if child.kind != "cell":
            lib.warnings.append(f"line {child.line}: ignored group '{child.kind}'")
            continue
        cell = _parse_cell(child, lib.warnings)
        lib.cells[cell.name] = cell

    _validate(lib)
    return lib


def _parse_cell(g: _Group, warnings: list[str]) -> LibertyCell:
    if not g.args:
        raise LibertyParseError(g.line, "cell group without a name")
    name = g.args[0]
    area = None
    leakage = 0.0
    for attr, value, line in g.attrs:
        if attr == "area":
            area = _float(value, line, "area")
        elif attr == "cell_leakage_power":
            leakage = _float(value, line, "cell_leakage_power")
        elif attr not in _KNOWN_CELL_ATTRS:
            warnings.append(f"line {line}: ignored cell attribute '{attr}'")
    if area is None:
        raise LibertyParseError(g.line, f"cell '{name}' has no area")

    is_seq = False
    clock_pin = None
    pins: list[LibertyPin] = []
    arcs: list[TimingArc] = []
    for child in g.children:
        if child.kind == "ff":
            is_seq = True
            for attr, value, _ in child.attrs:
                if attr == "clocked_on":
                    clock_pin = value.strip('" ').lstrip("!").strip()
        elif child.kind == "pin":
            pin_name = child.args[0]
            direction = "input"
            cap = 0.0
            for attr, value, line in child.attrs:
                if attr == "direction":
                    direction = value
                elif attr == "capacitance":
                    cap = _float(value, line, "capacitance")
                elif attr == "clock" and value.lower() == "true":
                    clock_pin = pin_name
                    is_seq = True
                elif attr == "clocked_on":
                    clock_pin = value.strip('" ')
                    is_seq = True
                elif attr not in _KNOWN_PIN_ATTRS:
                    warnings.append(f"line {line}: ignored pin attribute '{attr}'")
            pins.append(LibertyPin(pin_name, direction, cap))
            for tg in child.children:
                if tg.kind != "timing":
                    warnings.append(f"line {tg.line}: ignored group '{tg.kind}'")
                    continue
                arc = _parse_timing(tg, pin_name, name, warnings)
                if arc is not None:
                    arcs.append(arc)
        else:
            warnings.append(f"line {child.line}: ignored group '{child.kind}'")

    data_pins = tuple(
        p.name for p in pins if p.direction == "input" and p.name != clock_pin)
    return LibertyCell(name, area, leakage, is_seq, pins, arcs,
                       clock_pin=clock_pin, data_pins=data_pins)


def _parse_timing(g: _Group, to_pin: str, cell_name: str,
                  warnings: list[str]) -> TimingArc | None:
    related = None
    intrinsic: list[float] = []
    table: list[float] = []
    for attr, value, line in g.attrs:
        if attr == "related_pin":
            related = value.strip('" ')
        elif attr in ("intrinsic_rise", "intrinsic_fall"):
            intrinsic.append(_float(value, line, attr))
        elif attr not in _KNOWN_TIMING_ATTRS:
            warnings.append(f"line {line}: ignored timing attribute '{attr}'")
    for child in g.children:
        if child.kind in ("cell_rise", "cell_fall"):
            for name, args, _ in child.complex_attrs:
                if name == "values":
                    table.extend(_table_values(args))
        else:
            warnings.append(f"line {child.line}: ignored group '{child.kind}'")
    if related is None:
        raise LibertyParseError(g.line, f"timing group in cell '{cell_name}' lacks related_pin")
    # delay model: max over table entries; intrinsic fallback; unit default
    if table:
        delay = max(table)
    elif intrinsic:
        delay = max(intrinsic)
    else:
        delay = 1.0
        warnings.append(
            f"line {g.line}: arc {related}->{to_pin} in '{cell_name}' has no delay data, "
            f"using 1.0 ns")
    return TimingArc(related, to_pin, delay)


def _validate(lib: LibertyLibrary):
    for cell in lib.cells.values():
        if cell.area <= 0:
            raise LibertyParseError(0, f"cell '{cell.name}' has non-positive area")
        pin_names = {p.name for p in cell.pins}
        for arc in cell.arcs:
            if arc.from_pin not in pin_names or arc.to_pin not in pin_names:
                raise LibertyParseError(
                    0, f"cell '{cell.name}' arc references undeclared pin")
            if cell.pin(arc.from_pin).direction != "input":
                raise LibertyParseError(
                    0, f"cell '{cell.name}' arc starts at non-input pin '{arc.from_pin}'")
            if cell.pin(arc.to_pin).direction != "output":
                raise LibertyParseError(
                    0, f"cell '{cell.name}' arc ends at non-output pin '{arc.to_pin}'")
        if not cell.is_sequential and not cell.arcs:
            raise LibertyParseError(0, f"combinational cell '{cell.name}' has no timing arcs")
        if cell.is_sequential and cell.clock_pin is None:
            raise LibertyParseError(0, f"sequential cell '{cell.name}' has no clock pin")
