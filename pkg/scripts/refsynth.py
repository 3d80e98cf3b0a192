"""Naive structural tech mapper for the frontend's Verilog subset.

Produces Yosys-shaped JSON netlists over the demo cell library (INV, BUF,
AND2, OR2, XOR2, XNOR2, NAND2, NOR2, MUX2, DFF, DFFE). Word-level operators
are bit-blasted: adders become ripple full-adder chains, multipliers become
AND-array plus adder rows, muxes become per-bit MUX2 trees. Used only to
generate synthesis fixtures where no real tool is available.
"""

from __future__ import annotations

import json

from rtlforge.frontend.parser import parse_module
from rtlforge.frontend.syntax import (
    Assignment,
    Binary,
    BitSelect,
    Block,
    Case,
    Concat,
    ContAssign,
    Ident,
    If,
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

CONST0 = "0"
CONST1 = "1"


class Mapper:
    def __init__(self, source: str, name: str = "design"):
        self.ast = parse_module(VerilogSource(source, name))
        self.next_net = 2
        self.cells: dict[str, dict] = {}
        self.cell_seq = 0
        self.env: dict[str, list] = {}        # name -> bit list (LSB first)
        self.widths: dict[str, int] = {}
        for p in self.ast.ports:
            self.widths[p.name] = p.width
        for n in self.ast.nets:
            self.widths.setdefault(n.name, n.width)

    # --- net/cell helpers ---

    def net(self) -> int:
        nid = self.next_net
        self.next_net += 1
        return nid

    def nets(self, n: int) -> list[int]:
        return [self.net() for _ in range(n)]

    def cell(self, kind: str, **pins) -> int:
        """Instantiate one cell; returns the output net (pin Y or Q)."""
        out = self.net()
        name = f"${kind.lower()}${self.cell_seq}"
        self.cell_seq += 1
        dirs = {p: "input" for p in pins}
        out_pin = "Q" if kind in ("DFF", "DFFE") else "Y"
        dirs[out_pin] = "output"
        conns = {p: [b] for p, b in pins.items()}
        conns[out_pin] = [out]
        self.cells[name] = {"type": kind, "port_directions": dirs,
                            "connections": conns}
        return out

    # --- bit-level primitives ---

    def b_inv(self, a):
        if a == CONST0:
            return CONST1
        if a == CONST1:
            return CONST0
        return self.cell("INV", A=a)

    def b_and(self, a, b):
        if CONST0 in (a, b):
            return CONST0
        if a == CONST1:
            return b
        if b == CONST1:
            return a
        return self.cell("AND2", A=a, B=b)

    def b_or(self, a, b):
        if CONST1 in (a, b):
            return CONST1
        if a == CONST0:
            return b
        if b == CONST0:
            return a
        return self.cell("OR2", A=a, B=b)

    def b_xor(self, a, b):
        if a == CONST0:
            return b
        if b == CONST0:
            return a
        if a == CONST1:
            return self.b_inv(b)
        if b == CONST1:
            return self.b_inv(a)
        return self.cell("XOR2", A=a, B=b)

    def b_mux(self, sel, a, b):
        """sel ? b : a (A taken when S=0)."""
        if sel == CONST0:
            return a
        if sel == CONST1:
            return b
        if a == b:
            return a
        return self.cell("MUX2", S=sel, A=a, B=b)

    def full_adder(self, a, b, cin):
        s1 = self.b_xor(a, b)
        total = self.b_xor(s1, cin)
        c1 = self.b_and(a, b)
        c2 = self.b_and(s1, cin)
        return total, self.b_or(c1, c2)

    # --- vector operations (LSB first) ---

    def v_pad(self, bits, width):
        out = list(bits[:width])
        while len(out) < width:
            out.append(CONST0)
        return out

    def v_add(self, a, b, width):
        a = self.v_pad(a, width)
        b = self.v_pad(b, width)
        out = []
        carry = CONST0
        for i in range(width):
            s, carry = self.full_adder(a[i], b[i], carry)
            out.append(s)
        return out

    def v_sub(self, a, b, width):
        a = self.v_pad(a, width)
        b = [self.b_inv(x) for x in self.v_pad(b, width)]
        out = []
        carry = CONST1
        for i in range(width):
            s, carry = self.full_adder(a[i], b[i], carry)
            out.append(s)
        return out

    def v_mul(self, a, b):
        width = len(a) + len(b)
        acc = [CONST0] * width
        for i, bb in enumerate(b):
            row = [CONST0] * i + [self.b_and(x, bb) for x in a]
            acc = self.v_add(acc, self.v_pad(row, width), width)
        return acc

    def v_bitwise(self, op, a, b):
        width = max(len(a), len(b))
        a = self.v_pad(a, width)
        b = self.v_pad(b, width)
        fn = {"&": self.b_and, "|": self.b_or, "^": self.b_xor}[op]
        out = [fn(a[i], b[i]) for i in range(width)]
        if op in ("~^", "^~"):
            out = [self.b_inv(x) for x in out]
        return out

    def v_eq(self, a, b):
        width = max(len(a), len(b))
        a = self.v_pad(a, width)
        b = self.v_pad(b, width)
        diff = [self.b_xor(a[i], b[i]) for i in range(width)]
        any_diff = diff[0]
        for d in diff[1:]:
            any_diff = self.b_or(any_diff, d)
        return [self.b_inv(any_diff)]

    def v_mux(self, sel_bit, a, b):
        width = max(len(a), len(b))
        a = self.v_pad(a, width)
        b = self.v_pad(b, width)
        return [self.b_mux(sel_bit, a[i], b[i]) for i in range(width)]

    def const_bits(self, value: int, width: int):
        return [CONST1 if (value >> i) & 1 else CONST0 for i in range(width)]

    # --- expression mapping ---

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
            if e.op in ("<<", ">>"):
                return self.natural_width(e.left)
            if e.op == "*":
                return self.natural_width(e.left) + self.natural_width(e.right)
            if e.op in ("+", "-"):
                return max(self.natural_width(e.left), self.natural_width(e.right)) + 1
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

    def map_expr(self, e) -> list:
        if isinstance(e, Number):
            if e.value is None:
                raise ValueError("x/z literal in synthesizable expression")
            return self.const_bits(e.value, self.natural_width(e))
        if isinstance(e, Ident):
            return list(self.env[e.name])
        if isinstance(e, Unary):
            bits = self.map_expr(e.operand)
            if e.op == "~":
                return [self.b_inv(b) for b in bits]
            if e.op == "!":
                acc = bits[0]
                for b in bits[1:]:
                    acc = self.b_or(acc, b)
                return [self.b_inv(acc)]
            if e.op == "&":
                acc = bits[0]
                for b in bits[1:]:
                    acc = self.b_and(acc, b)
                return [acc]
            if e.op in ("|",):
                acc = bits[0]
                for b in bits[1:]:
                    acc = self.b_or(acc, b)
                return [acc]
            if e.op == "^":
                acc = bits[0]
                for b in bits[1:]:
                    acc = self.b_xor(acc, b)
                return [acc]
            if e.op == "-":
                width = len(bits)
                return self.v_sub(self.const_bits(0, width), bits, width)
            return bits
        if isinstance(e, Binary):
            if e.op == "+":
                width = self.natural_width(e)
                return self.v_add(self.map_expr(e.left), self.map_expr(e.right), width)
            if e.op == "-":
                width = self.natural_width(e)
                return self.v_sub(self.map_expr(e.left), self.map_expr(e.right), width)
            if e.op == "*":
                return self.v_mul(self.map_expr(e.left), self.map_expr(e.right))
            if e.op in ("&", "|", "^", "~^", "^~"):
                return self.v_bitwise(e.op, self.map_expr(e.left), self.map_expr(e.right))
            if e.op == "==":
                return self.v_eq(self.map_expr(e.left), self.map_expr(e.right))
            if e.op == "!=":
                return [self.b_inv(self.v_eq(self.map_expr(e.left),
                                             self.map_expr(e.right))[0])]
            if e.op == "<<":
                if not isinstance(e.right, Number):
                    raise ValueError("only constant shift amounts are mappable")
                bits = self.map_expr(e.left)
                return [CONST0] * e.right.value + bits
            if e.op == ">>":
                if not isinstance(e.right, Number):
                    raise ValueError("only constant shift amounts are mappable")
                bits = self.map_expr(e.left)
                return bits[e.right.value:] or [CONST0]
            raise ValueError(f"operator {e.op!r} not mappable")
        if isinstance(e, Ternary):
            sel = self.map_expr(e.cond)[0]
            return self.v_mux(sel, self.map_expr(e.other), self.map_expr(e.then))
        if isinstance(e, Concat):
            out = []
            for part in reversed(e.parts):   # last part is least significant
                out += self.map_expr(part)
            return out
        if isinstance(e, Repeat):
            out = []
            for _ in range(e.count):
                out += self.map_expr(e.part)
            return out
        if isinstance(e, BitSelect):
            if not isinstance(e.index, Number):
                raise ValueError("only constant bit selects are mappable")
            return [self.env[e.base.name][e.index.value]]
        if isinstance(e, PartSelect):
            return self.env[e.base.name][e.lsb:e.msb + 1]
        raise TypeError(type(e))

    # --- statement mapping (next-state per register) ---

    def next_bits(self, stmt, target, env_bits, current):
        if isinstance(stmt, Assignment):
            if target in lhs_targets(stmt.lhs):
                width = self.widths[target]
                value = self.map_expr(stmt.rhs)
                if isinstance(stmt.lhs, Concat):
                    offset = 0
                    for part in reversed(stmt.lhs.parts):
                        w = self.widths.get(part.name, 1) if isinstance(part, Ident) else 1
                        if isinstance(part, Ident) and part.name == target:
                            return self.v_pad(value[offset:offset + w], w)
                        offset += w
                return self.v_pad(value, width)
            return current
        if isinstance(stmt, Block):
            value = current
            for inner in stmt.stmts:
                value = self.next_bits(inner, target, env_bits, value)
            return value
        if isinstance(stmt, If):
            sel = self.map_expr(stmt.cond)[0]
            t = self.next_bits(stmt.then, target, env_bits, current)
            o = self.next_bits(stmt.other, target, env_bits, current) \
                if stmt.other is not None else current
            return self.v_mux(sel, o, t)
        if isinstance(stmt, Case):
            result = current
            default_item = None
            for item in stmt.items:
                if not item.labels:
                    default_item = item
            if default_item is not None:
                result = self.next_bits(default_item.body, target, env_bits, current)
            for item in reversed(stmt.items):
                if not item.labels:
                    continue
                body_bits = self.next_bits(item.body, target, env_bits, current)
                hit = None
                for label in item.labels:
                    eq = self.v_eq(self.map_expr(stmt.subject), self.map_expr(label))[0]
                    hit = eq if hit is None else self.b_or(hit, eq)
                result = self.v_mux(hit, result, body_bits)
            return result
        raise TypeError(type(stmt))

    # --- module mapping ---

    def run(self) -> dict:
        clk_net = None
        clocks = {sig for blk in self.ast.always_blocks for _, sig in blk.trigger.edges}
        ports_json = {}
        for p in self.ast.ports:
            if p.direction is PortDir.INPUT:
                if p.name in clocks:
                    clk_net = self.net()
                    self.env[p.name] = [clk_net]
                    ports_json[p.name] = {"direction": "input", "bits": [clk_net]}
                else:
                    bits = self.nets(p.width)
                    self.env[p.name] = bits
                    ports_json[p.name] = {"direction": "input", "bits": bits}

        clocked = [b for b in self.ast.always_blocks if b.trigger.is_clocked]
        reg_targets: list[str] = []
        for blk in clocked:
            for st in walk_stmts(blk.body):
                if isinstance(st, Assignment):
                    for t in lhs_targets(st.lhs):
                        if t not in reg_targets:
                            reg_targets.append(t)
        for t in reg_targets:
            self.env[t] = self.nets(self.widths[t])

        # combinational drivers in dependency order
        placed = set(self.env)
        pending = list(self.ast.assigns) + [
            b for b in self.ast.always_blocks if not b.trigger.is_clocked]

        def deps_of(item):
            if isinstance(item, ContAssign):
                return ({n.name for n in walk_expr(item.rhs) if isinstance(n, Ident)},
                        set(lhs_targets(item.lhs)))
            needs, prods = set(), set()
            for st in walk_stmts(item.body):
                if isinstance(st, Assignment):
                    prods |= set(lhs_targets(st.lhs))
                    needs |= {n.name for n in walk_expr(st.rhs) if isinstance(n, Ident)}
                elif isinstance(st, If):
                    needs |= {n.name for n in walk_expr(st.cond) if isinstance(n, Ident)}
                elif isinstance(st, Case):
                    needs |= {n.name for n in walk_expr(st.subject) if isinstance(n, Ident)}
            return needs, prods

        while pending:
            progressed = False
            for item in list(pending):
                needs, prods = deps_of(item)
                if needs - placed - prods:
                    continue
                if isinstance(item, ContAssign):
                    value = self.map_expr(item.rhs)
                    for t in lhs_targets(item.lhs):
                        self.env[t] = self.v_pad(value, self.widths.get(t, len(value)))
                else:
                    targets = []
                    for st in walk_stmts(item.body):
                        if isinstance(st, Assignment):
                            for t in lhs_targets(st.lhs):
                                if t not in targets:
                                    targets.append(t)
                    for t in targets:
                        zero = self.const_bits(0, self.widths[t])
                        self.env[t] = self.next_bits(item.body, t, None, zero)
                placed |= prods
                pending.remove(item)
                progressed = True
            if not progressed:
                raise ValueError("combinational mapping cycle")

        # registers: enable pattern maps to DFFE, everything else to DFF+mux
        for blk in clocked:
            body = blk.body
            while isinstance(body, Block) and len(body.stmts) == 1:
                body = body.stmts[0]
            enable_bit = None
            inner = body
            if isinstance(body, If) and body.other is None and isinstance(body.cond, Ident):
                enable_bit = self.env[body.cond.name][0]
                inner = body.then
            targets = []
            for st in walk_stmts(blk.body):
                if isinstance(st, Assignment):
                    for t in lhs_targets(st.lhs):
                        if t not in targets:
                            targets.append(t)
            for t in targets:
                q_bits = list(self.env[t])
                d_bits = self.v_pad(self.next_bits(inner, t, None, q_bits),
                                    self.widths[t])
                mapping = {}
                for i, q in enumerate(q_bits):
                    if enable_bit is not None:
                        new_q = self.cell("DFFE", CLK=clk_net, D=d_bits[i],
                                          EN=enable_bit)
                    else:
                        new_q = self.cell("DFF", CLK=clk_net, D=d_bits[i])
                    mapping[q] = new_q
                # repoint every consumer of the placeholder nets, DFF data
                # inputs included (self-references and cross-bit shifts)
                for cell in self.cells.values():
                    for pin, bits in cell["connections"].items():
                        cell["connections"][pin] = [mapping.get(b, b) for b in bits]
                self.env[t] = [mapping[q] for q in q_bits]

        for p in self.ast.ports:
            if p.direction is PortDir.OUTPUT:
                bits = self.v_pad(self.env.get(p.name, []), p.width)
                named = []
                for b in bits:
                    named.append(self._materialize(b))
                self.env[p.name] = named
                ports_json[p.name] = {"direction": "output", "bits": named}

        netnames = {}
        for name, bits in sorted(self.env.items()):
            if name in clocks and len(bits) == 1 and bits[0] == clk_net:
                netnames[name] = {"bits": [clk_net]}
                continue
            netnames[name] = {"bits": [self._materialize(b) for b in bits]}

        return {"modules": {self.ast.name: {
            "ports": ports_json,
            "cells": dict(sorted(self.cells.items())),
            "netnames": netnames,
        }}}

    def _materialize(self, bit):
        return bit


def synthesize_to_json(source: str, name: str = "design") -> str:
    data = Mapper(source, name).run()
    return json.dumps(data, indent=1, sort_keys=True)
