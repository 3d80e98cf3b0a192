"""Cycle-accurate reference simulator for the frontend's Verilog subset.

Used only to generate tool fixtures (VCD traces) in environments without a
real simulator. Semantics: inputs change at falling edges, registers update
at rising edges with non-blocking reads of pre-edge values, combinational
nets settle between events. Unknown values propagate as whole-signal x.
"""

from __future__ import annotations

from rtlforge.frontend.parser import parse_module
from rtlforge.frontend.syntax import (
    AlwaysBlock,
    Assignment,
    Binary,
    BitSelect,
    Block,
    Case,
    Concat,
    ContAssign,
    Ident,
    If,
    ModuleAst,
    NetKind,
    Number,
    PartSelect,
    PortDir,
    Repeat,
    Ternary,
    Unary,
    VerilogSource,
    lhs_targets,
    walk_expr,
    walk_stmts,
)

X = None  # unknown marker


def _mask(value, width):
    if value is X:
        return X
    return value & ((1 << width) - 1)


class Interpreter:
    def __init__(self, source: str, name: str = "design"):
        self.ast: ModuleAst = parse_module(VerilogSource(source, name))
        self.widths: dict[str, int] = {}
        for p in self.ast.ports:
            self.widths[p.name] = p.width
        for n in self.ast.nets:
            self.widths.setdefault(n.name, n.width)
        self.inputs = [p.name for p in self.ast.ports if p.direction is PortDir.INPUT]
        self.outputs = [p.name for p in self.ast.ports if p.direction is PortDir.OUTPUT]
        self.clocks = {sig for blk in self.ast.always_blocks
                       for _, sig in blk.trigger.edges}
        self.clocked = [b for b in self.ast.always_blocks if b.trigger.is_clocked]
        self.comb_blocks = [b for b in self.ast.always_blocks if not b.trigger.is_clocked]
        self.reg_names: list[str] = []
        for blk in self.clocked:
            for st in walk_stmts(blk.body):
                if isinstance(st, Assignment):
                    for t in lhs_targets(st.lhs):
                        if t not in self.reg_names:
                            self.reg_names.append(t)
        self.init_values = {n.name: n.init for n in self.ast.nets if n.init is not None}
        self._comb_order = self._order_comb()

    def _order_comb(self):
        """Topological order of combinational drivers by net dependency."""
        items: list[tuple[str, object]] = []
        produces: dict[int, set[str]] = {}
        consumes: dict[int, set[str]] = {}
        for a in self.ast.assigns:
            idx = len(items)
            items.append(("assign", a))
            produces[idx] = set(lhs_targets(a.lhs))
            consumes[idx] = {n.name for n in walk_expr(a.rhs) if isinstance(n, Ident)}
        for blk in self.comb_blocks:
            idx = len(items)
            items.append(("block", blk))
            prod, cons = set(), set()
            for st in walk_stmts(blk.body):
                if isinstance(st, Assignment):
                    prod |= set(lhs_targets(st.lhs))
                    cons |= {n.name for n in walk_expr(st.rhs) if isinstance(n, Ident)}
                elif isinstance(st, If):
                    cons |= {n.name for n in walk_expr(st.cond) if isinstance(n, Ident)}
                elif isinstance(st, Case):
                    cons |= {n.name for n in walk_expr(st.subject) if isinstance(n, Ident)}
            produces[idx] = prod
            consumes[idx] = cons
        order = []
        placed: set[str] = set(self.inputs) | set(self.reg_names)
        pending = list(range(len(items)))
        while pending:
            progressed = False
            for idx in list(pending):
                if consumes[idx] - placed - produces[idx] <= set():
                    order.append(items[idx])
                    placed |= produces[idx]
                    pending.remove(idx)
                    progressed = True
            if not progressed:
                raise ValueError("combinational dependency cycle in reference model")
        return order

    # --- expression evaluation ---

    def natural_width(self, e) -> int:
        if isinstance(e, Ident):
            return self.widths.get(e.name, 1)
        if isinstance(e, Number):
            return e.width or 32
        if isinstance(e, Unary):
            return 1 if e.op in ("!", "&", "|", "^") else self.natural_width(e.operand)
        if isinstance(e, Binary):
            if e.op in ("==", "!=", "<", ">", "<=", ">=", "&&", "||"):
                return 1
            if e.op in ("<<", ">>", "<<<", ">>>"):
                return self.natural_width(e.left)
            return max(self.natural_width(e.left), self.natural_width(e.right))
        if isinstance(e, Ternary):
            return max(self.natural_width(e.then), self.natural_width(e.other))
        if isinstance(e, Concat):
            return sum(self.natural_width(p) for p in e.parts)
        if isinstance(e, Repeat):
            return e.count * self.natural_width(e.part)
        if isinstance(e, BitSelect):
            return 1
        if isinstance(e, PartSelect):
            return e.msb - e.lsb + 1
        raise TypeError(type(e))

    def eval(self, e, env, ctx: int = 0):
        width = max(ctx, self.natural_width(e))
        if isinstance(e, Number):
            return X if e.value is None else _mask(e.value, width)
        if isinstance(e, Ident):
            return _mask(env.get(e.name, X), width) if env.get(e.name, X) is not X else X
        if isinstance(e, Unary):
            if e.op in ("!", "&", "|", "^"):
                v = self.eval(e.operand, env)
                if v is X:
                    return X
                w = self.natural_width(e.operand)
                if e.op == "!":
                    return 0 if v else 1
                bits = [(v >> i) & 1 for i in range(w)]
                if e.op == "&":
                    return int(all(bits))
                if e.op == "|":
                    return int(any(bits))
                acc = 0
                for b in bits:
                    acc ^= b
                return acc
            v = self.eval(e.operand, env, width)
            if v is X:
                return X
            if e.op == "~":
                return _mask(~v, width)
            if e.op == "-":
                return _mask(-v, width)
            return v
        if isinstance(e, Binary):
            if e.op in ("==", "!=", "<", ">", "<=", ">="):
                w = max(self.natural_width(e.left), self.natural_width(e.right))
                a = self.eval(e.left, env, w)
                b = self.eval(e.right, env, w)
                if a is X or b is X:
                    return X
                return int({"==": a == b, "!=": a != b, "<": a < b,
                            ">": a > b, "<=": a <= b, ">=": a >= b}[e.op])
            if e.op in ("&&", "||"):
                a = self.eval(e.left, env)
                b = self.eval(e.right, env)
                if a is X or b is X:
                    return X
                return int((a and b) if e.op == "&&" else (a or b))
            if e.op in ("<<", ">>", "<<<", ">>>"):
                a = self.eval(e.left, env, width)
                n = self.eval(e.right, env)
                if a is X or n is X:
                    return X
                return _mask(a << n, width) if e.op in ("<<", "<<<") else a >> n
            a = self.eval(e.left, env, width)
            b = self.eval(e.right, env, width)
            if a is X or b is X:
                return X
            ops = {"+": a + b, "-": a - b, "*": a * b,
                   "/": a // b if b else 0, "%": a % b if b else 0,
                   "&": a & b, "|": a | b, "^": a ^ b}
            if e.op in ("~^", "^~"):
                return _mask(~(a ^ b), width)
            return _mask(ops[e.op], width)
        if isinstance(e, Ternary):
            c = self.eval(e.cond, env)
            if c is X:
                return X
            return self.eval(e.then if c else e.other, env, width)
        if isinstance(e, Concat):
            acc = 0
            for part in e.parts:
                w = self.natural_width(part)
                v = self.eval(part, env)
                if v is X:
                    return X
                acc = (acc << w) | _mask(v, w)
            return acc
        if isinstance(e, Repeat):
            w = self.natural_width(e.part)
            v = self.eval(e.part, env)
            if v is X:
                return X
            acc = 0
            for _ in range(e.count):
                acc = (acc << w) | _mask(v, w)
            return acc
        if isinstance(e, BitSelect):
            v = env.get(e.base.name, X)
            i = self.eval(e.index, env)
            if v is X or i is X:
                return X
            return (v >> i) & 1
        if isinstance(e, PartSelect):
            v = env.get(e.base.name, X)
            if v is X:
                return X
            return (v >> e.lsb) & ((1 << (e.msb - e.lsb + 1)) - 1)
        raise TypeError(type(e))

    # --- statement resolution (one target, non-blocking view) ---

    def _assigns_target(self, stmt, target) -> bool:
        for st in walk_stmts(stmt):
            if isinstance(st, Assignment) and target in lhs_targets(st.lhs):
                return True
        return False

    def next_value(self, stmt, target, env, current):
        if isinstance(stmt, Assignment):
            if target in lhs_targets(stmt.lhs):
                value = self.eval(stmt.rhs, env, self.widths.get(target, 1))
                if isinstance(stmt.lhs, Concat):
                    # slice this target's field out of the packed value
                    parts = list(stmt.lhs.parts)
                    value_full = self.eval(stmt.rhs, env,
                                           sum(self.natural_width(p) for p in parts))
                    if value_full is X:
                        return X
                    offset = 0
                    for part in reversed(parts):
                        w = self.natural_width(part)
                        if isinstance(part, Ident) and part.name == target:
                            return (value_full >> offset) & ((1 << w) - 1)
                        offset += w
                    return X
                return _mask(value, self.widths.get(target, 1)) if value is not X else X
            return current
        if isinstance(stmt, Block):
            value = current
            for inner in stmt.stmts:
                value = self.next_value(inner, target, env, value)
            return value
        if isinstance(stmt, If):
            if not self._assigns_target(stmt, target):
                return current
            c = self.eval(stmt.cond, env)
            if c is X:
                return X
            if c:
                return self.next_value(stmt.then, target, env, current)
            if stmt.other is not None:
                return self.next_value(stmt.other, target, env, current)
            return current
        if isinstance(stmt, Case):
            if not self._assigns_target(stmt, target):
                return current
            subject = self.eval(stmt.subject, env)
            if subject is X:
                return X
            default_item = None
            for item in stmt.items:
                if not item.labels:
                    default_item = item
                    continue
                for label in item.labels:
                    lv = self.eval(label, env)
                    if lv is not X and lv == subject:
                        return self.next_value(item.body, target, env, current)
            if default_item is not None:
                return self.next_value(default_item.body, target, env, current)
            return current
        raise TypeError(type(stmt))

    # --- cycle engine ---

    def settle(self, env):
        for kind, item in self._comb_order:
            if kind == "assign":
                a: ContAssign = item
                for target in lhs_targets(a.lhs):
                    env[target] = self.next_value(
                        Assignment(a.lhs, a.rhs, True, a.line), target, env, X)
            else:
                blk: AlwaysBlock = item
                targets = []
                for st in walk_stmts(blk.body):
                    if isinstance(st, Assignment):
                        for t in lhs_targets(st.lhs):
                            if t not in targets:
                                targets.append(t)
                for target in targets:
                    env[target] = self.next_value(blk.body, target, env, X)
        return env

    def run(self, stimulus, cycles: int):
        """Simulate; returns (events, var order) for VCD emission.

        events: list of (time, {signal: value}) covering initial state,
        rising edges (register updates) and falling edges (input updates).
        """
        regs = {r: self.init_values.get(r, X) for r in self.reg_names}
        env: dict = {}
        env.update(regs)
        env.update({k: _mask(v, self.widths.get(k, 1))
                    for k, v in stimulus(0).items()})
        for c in self.clocks:
            env[c] = 0
        self.settle(env)

        events: list[tuple[int, dict]] = [(0, dict(env, clk=0))]
        for j in range(cycles):
            t_rise = 5 + 10 * j
            new_regs = {}
            for blk in self.clocked:
                for st in walk_stmts(blk.body):
                    if isinstance(st, Assignment):
                        for target in lhs_targets(st.lhs):
                            if target not in new_regs:
                                new_regs[target] = self.next_value(
                                    blk.body, target, env, env.get(target, X))
            env.update(new_regs)
            env["clk"] = 1
            self.settle(env)
            events.append((t_rise, dict(env)))

            t_fall = 10 + 10 * j
            env.update({k: _mask(v, self.widths.get(k, 1))
                        for k, v in stimulus(j + 1).items()})
            env["clk"] = 0
            self.settle(env)
            events.append((t_fall, dict(env)))
        return events


# --- VCD emission ---

_ID_CHARS = [chr(c) for c in range(33, 127) if chr(c) not in "$ "]


def _id_code(i: int) -> str:
    out = ""
    i += 1
    while i > 0:
        i, rem = divmod(i - 1, len(_ID_CHARS))
        out = _ID_CHARS[rem] + out
    return out


def make_vcd(interp: Interpreter, stimulus, cycles: int, top: str = "tb") -> str:
    events = interp.run(stimulus, cycles)
    dut_signals = [p.name for p in interp.ast.ports] + [
        n.name for n in interp.ast.nets
        if n.name not in {p.name for p in interp.ast.ports}]

    lines = ["$date", "  fixture generation", "$end",
             "$version", "  rtlforge reference flow", "$end",
             "$timescale", "  1ns", "$end"]
    codes: dict[tuple[str, str], str] = {}
    counter = 0

    def declare(scope: str, names: list[str]):
        nonlocal counter
        out = []
        for name in names:
            width = 1 if name == "clk" else interp.widths.get(name, 1)
            code = _id_code(counter)
            counter += 1
            codes[(scope, name)] = code
            ref = f"{name} [{width - 1}:0]" if width > 1 else name
            out.append(f"$var wire {width} {code} {ref} $end")
        return out

    lines.append(f"$scope module {top} $end")
    lines += declare("tb", list(dict.fromkeys(["clk"] + interp.inputs + interp.outputs)))
    lines.append("$scope module dut $end")
    lines += declare("dut", dut_signals)
    lines.append("$upscope $end")
    lines.append("$upscope $end")
    lines.append("$enddefinitions $end")

    def fmt(name: str, value) -> list[str]:
        width = 1 if name == "clk" else interp.widths.get(name, 1)
        bits = "x" * width if value is X else format(value, "b").zfill(width)
        out = []
        for scope in ("tb", "dut"):
            code = codes.get((scope, name))
            if code is None:
                continue
            out.append(f"{bits}{code}" if width == 1 else f"b{bits} {code}")
        return out

    body = []
    last: dict[str, object] = {}
    for t, state in events:
        changes = []
        for name in ["clk"] + dut_signals:
            value = state.get(name, X)
            if name not in last or last[name] != value:
                changes += fmt(name, value)
                last[name] = value
        if changes:
            body.append(f"#{t}")
            if t == 0:
                body.append("$dumpvars")
            body += changes
            if t == 0:
                body.append("$end")
    body.append(f"#{events[-1][0] + 5}")
    return "\n".join(lines + body) + "\n"
