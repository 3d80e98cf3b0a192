"""Recursive-descent parser for the Verilog subset."""

from __future__ import annotations

from typing import Optional

from rtlforge.frontend.lexer import Token, tokenize
from rtlforge.frontend.parse_errors import SyntaxIssue, UnsupportedConstruct, VerilogSyntaxError
from rtlforge.frontend.syntax import (
    AlwaysBlock,
    Assignment,
    Binary,
    BitSelect,
    Block,
    Case,
    CaseItem,
    Concat,
    ContAssign,
    EdgeKind,
    Expr,
    Ident,
    If,
    ModuleAst,
    Net,
    NetKind,
    Number,
    Parameter,
    PartSelect,
    Port,
    PortDir,
    Repeat,
    Stmt,
    Ternary,
    Trigger,
    Unary,
    VerilogSource,
    walk_expr,
    walk_stmts,
)

_UNSUPPORTED_ITEMS = {
    "generate", "genvar", "task", "function", "initial", "specify",
    "primitive", "real", "time", "fork",
}

# binary operator precedence, low to high (Verilog-2001 ordering)
_BINARY_LEVELS = [
    ["||"],
    ["&&"],
    ["|"],
    ["^", "~^", "^~"],
    ["&"],
    ["==", "!=", "===", "!=="],
    ["<", "<=", ">", ">="],
    ["<<", ">>", "<<<", ">>>"],
    ["+", "-"],
    ["*", "/", "%"],
]

_UNARY_OPS = {"!", "~", "-", "+", "&", "|", "^"}


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0
        self.errors: list[SyntaxIssue] = []
        self.params: dict[str, int] = {}

    # --- token helpers ---

    def peek(self, ahead: int = 0) -> Token:
        i = min(self.pos + ahead, len(self.tokens) - 1)
        return self.tokens[i]

    def next(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def at(self, text: str) -> bool:
        return self.peek().text == text

    def accept(self, text: str) -> Optional[Token]:
        if self.at(text):
            return self.next()
        return None

    def expect(self, text: str) -> Token:
        t = self.peek()
        if t.text != text:
            got = t.text if t.kind != "eof" else "end of file"
            self.fail(t, f"expected '{text}', found '{got}'")
        return self.next()

    def expect_id(self, what: str = "identifier") -> Token:
        t = self.peek()
        if t.kind != "id":
            self.fail(t, f"expected {what}, found '{t.text or 'end of file'}'")
        return self.next()

    def fail(self, tok: Token, message: str):
        raise VerilogSyntaxError([SyntaxIssue(tok.line, tok.col, message)])

    def sync_to_semicolon(self):
        depth = 0
        while True:
            t = self.peek()
            if t.kind == "eof":
                return
            if t.text in ("(", "[", "{"):
                depth += 1
            elif t.text in (")", "]", "}"):
                depth -= 1
            self.next()
            if t.text == ";" and depth <= 0:
                return
            if t.text == "endmodule":
                self.pos -= 1
                return

    # --- constant evaluation (parameter expressions, widths) ---

    def const_eval(self, e: Expr) -> int:
        if isinstance(e, Number):
            if e.value is None:
                raise VerilogSyntaxError(
                    [SyntaxIssue(e.line, 1, f"x/z literal '{e.text}' in constant expression")])
            return e.value
        if isinstance(e, Ident):
            if e.name in self.params:
                return self.params[e.name]
            raise VerilogSyntaxError(
                [SyntaxIssue(e.line, 1, f"'{e.name}' is not a constant parameter")])
        if isinstance(e, Unary):
            v = self.const_eval(e.operand)
            if e.op == "-":
                return -v
            if e.op == "+":
                return v
            if e.op == "~":
                return ~v
            if e.op == "!":
                return 0 if v else 1
            raise VerilogSyntaxError(
                [SyntaxIssue(e.line, 1, f"operator '{e.op}' not allowed in constant expression")])
        if isinstance(e, Binary):
            a, b = self.const_eval(e.left), self.const_eval(e.right)
            ops = {
                "+": lambda: a + b, "-": lambda: a - b, "*": lambda: a * b,
                "/": lambda: a // b if b else 0, "%": lambda: a % b if b else 0,
                "<<": lambda: a << b, ">>": lambda: a >> b,
                "&": lambda: a & b, "|": lambda: a | b, "^": lambda: a ^ b,
                "==": lambda: int(a == b), "!=": lambda: int(a != b),
                "<": lambda: int(a < b), ">": lambda: int(a > b),
                "<=": lambda: int(a <= b), ">=": lambda: int(a >= b),
            }
            if e.op in ops:
                return ops[e.op]()
            raise VerilogSyntaxError(
                [SyntaxIssue(e.line, 1, f"operator '{e.op}' not allowed in constant expression")])
        raise VerilogSyntaxError(
            [SyntaxIssue(getattr(e, "line", 1), 1, "expression is not constant")])

    def parse_range(self) -> int:
        """``[msb:lsb]`` -> width; returns 1 when no range is present."""
        if not self.at("["):
            return 1
        self.next()
        msb = self.const_eval(self.parse_expr())
        self.expect(":")
        lsb = self.const_eval(self.parse_expr())
        tok = self.expect("]")
        width = msb - lsb + 1
        if width < 1:
            self.fail(tok, f"bad range [{msb}:{lsb}]")
        return width

    # --- expressions ---

    def parse_expr(self) -> Expr:
        return self.parse_ternary()

    def parse_ternary(self) -> Expr:
        cond = self.parse_binary(0)
        if self.at("?"):
            tok = self.next()
            then = self.parse_ternary()
            self.expect(":")
            other = self.parse_ternary()
            return Ternary(cond, then, other, tok.line)
        return cond

    def parse_binary(self, level: int) -> Expr:
        if level >= len(_BINARY_LEVELS):
            return self.parse_unary()
        left = self.parse_binary(level + 1)
        while self.peek().text in _BINARY_LEVELS[level]:
            tok = self.next()
            right = self.parse_binary(level + 1)
            left = Binary(tok.text, left, right, tok.line)
        return left

    def parse_unary(self) -> Expr:
        t = self.peek()
        if t.kind == "op" and t.text in _UNARY_OPS:
            self.next()
            return Unary(t.text, self.parse_unary(), t.line)
        return self.parse_primary()

    def parse_number(self, tok: Token) -> Number:
        text = tok.text
        if tok.kind == "number":
            return Number(text, int(text.replace("_", "")), None, tok.line)
        # based literal: [size]'[s]base digits
        tick = text.index("'")
        size = text[:tick].strip()
        width = int(size) if size else None
        rest = text[tick + 1:]
        if rest[0] in "sS":
            rest = rest[1:]
        base_ch = rest[0].lower()
        digits = rest[1:].replace("_", "")
        base = {"b": 2, "o": 8, "d": 10, "h": 16}[base_ch]
        if any(c in "xXzZ?" for c in digits):
            return Number(text, None, width, tok.line)
        return Number(text, int(digits, base), width, tok.line)

    def parse_primary(self) -> Expr:
        t = self.peek()
        if t.kind in ("number", "based"):
            self.next()
            return self.parse_number(t)
        if t.kind == "id":
            self.next()
            base = Ident(t.text, t.line)
            if self.at("["):
                self.next()
                first = self.parse_expr()
                if self.at(":"):
                    self.next()
                    lsb = self.const_eval(self.parse_expr())
                    self.expect("]")
                    return PartSelect(base, self.const_eval(first), lsb, t.line)
                if self.peek().text in ("+:", "-:"):
                    tok = self.next()
                    raise UnsupportedConstruct(f"indexed part select '{tok.text}'", tok.line)
                self.expect("]")
                return BitSelect(base, first, t.line)
            return base
        if t.text == "(":
            self.next()
            e = self.parse_expr()
            self.expect(")")
            return e
        if t.text == "{":
            self.next()
            first = self.parse_expr()
            if self.at("{"):  # replication {N{expr}}
                self.next()
                part = self.parse_expr()
                self.expect("}")
                self.expect("}")
                return Repeat(self.const_eval(first), part, t.line)
            parts = [first]
            while self.accept(","):
                parts.append(self.parse_expr())
            self.expect("}")
            return Concat(tuple(parts), t.line)
        if t.kind == "keyword" and t.text in _UNSUPPORTED_ITEMS:
            raise UnsupportedConstruct(t.text, t.line)
        self.fail(t, f"expected expression, found '{t.text or 'end of file'}'")
        raise AssertionError  # unreachable

    # --- statements ---

    def parse_lvalue(self) -> Expr:
        t = self.peek()
        if t.text == "{":
            self.next()
            parts = [self.parse_lvalue()]
            while self.accept(","):
                parts.append(self.parse_lvalue())
            self.expect("}")
            return Concat(tuple(parts), t.line)
        name = self.expect_id("assignment target")
        base = Ident(name.text, name.line)
        if self.at("["):
            self.next()
            first = self.parse_expr()
            if self.at(":"):
                self.next()
                lsb = self.const_eval(self.parse_expr())
                self.expect("]")
                return PartSelect(base, self.const_eval(first), lsb, name.line)
            self.expect("]")
            return BitSelect(base, first, name.line)
        return base

    def parse_stmt(self) -> Stmt:
        t = self.peek()
        if t.text == "begin":
            self.next()
            if self.accept(":"):
                self.expect_id("block label")
            stmts = []
            while not self.at("end"):
                if self.peek().kind == "eof":
                    self.fail(self.peek(), "expected 'end', found end of file")
                stmts.append(self.parse_stmt())
            self.expect("end")
            return Block(tuple(stmts), t.line)
        if t.text == "if":
            self.next()
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            then = self.parse_stmt()
            other = None
            if self.accept("else"):
                other = self.parse_stmt()
            return If(cond, then, other, t.line)
        if t.text in ("case", "casez", "casex"):
            self.next()
            self.expect("(")
            subject = self.parse_expr()
            self.expect(")")
            items = []
            while not self.at("endcase"):
                if self.peek().kind == "eof":
                    self.fail(self.peek(), "expected 'endcase', found end of file")
                if self.accept("default"):
                    self.accept(":")
                    items.append(CaseItem((), self.parse_stmt()))
                    continue
                labels = [self.parse_expr()]
                while self.accept(","):
                    labels.append(self.parse_expr())
                self.expect(":")
                items.append(CaseItem(tuple(labels), self.parse_stmt()))
            self.expect("endcase")
            return Case(subject, tuple(items), t.line)
        if t.kind == "keyword" and t.text in _UNSUPPORTED_ITEMS | {"forever", "while", "repeat", "wait", "for"}:
            raise UnsupportedConstruct(t.text, t.line)
        # assignment
        lhs = self.parse_lvalue()
        if self.accept("<="):
            blocking = False
        else:
            self.expect("=")
            blocking = True
        rhs = self.parse_expr()
        self.expect(";")
        return Assignment(lhs, rhs, blocking, t.line)

    # --- declarations & module items ---

    def parse_decl_names(self, kind: NetKind, width: int, nets: list[Net]):
        while True:
            name = self.expect_id("net name")
            init = None
            if self.accept("="):
                init = self.const_eval(self.parse_expr())
            nets.append(Net(name.text, kind, width, init, name.line))
            if not self.accept(","):
                break
        self.expect(";")

    def parse_port_decl(self, direction: PortDir, mod: ModuleAst, header_names: set[str]):
        """Non-ANSI body declaration: ``input [7:0] a, b;``."""
        is_reg = bool(self.accept("reg"))
        self.accept("signed")
        width = self.parse_range()
        while True:
            name = self.expect_id("port name")
            if name.text not in header_names:
                self.fail(name, f"'{name.text}' is not listed in the module port list")
            replaced = False
            for i, p in enumerate(mod.ports):
                if p.name == name.text:
                    mod.ports[i] = Port(name.text, direction, width, name.line)
                    replaced = True
            if not replaced:
                mod.ports.append(Port(name.text, direction, width, name.line))
            if is_reg:
                mod.nets.append(Net(name.text, NetKind.REG, width, None, name.line))
            if not self.accept(","):
                break
        self.expect(";")

    def parse_sensitivity(self) -> Trigger:
        self.expect("@")
        if self.accept("*"):
            return Trigger(())
        self.expect("(")
        if self.accept("*"):
            self.expect(")")
            return Trigger(())
        edges: list[tuple[EdgeKind, str]] = []
        plain_only = True
        while True:
            if self.at("posedge") or self.at("negedge"):
                tok = self.next()
                kind = EdgeKind.POSEDGE if tok.text == "posedge" else EdgeKind.NEGEDGE
                sig = self.expect_id("clock name")
                edges.append((kind, sig.text))
                plain_only = False
            else:
                self.expect_id("signal name")
            if self.accept("or") or self.accept(","):
                continue
            break
        self.expect(")")
        if plain_only:
            return Trigger(())  # explicit sensitivity list == combinational
        return Trigger(tuple(edges))

    def parse_ansi_ports(self, mod: ModuleAst):
        direction: Optional[PortDir] = None
        width = 1
        is_reg = False
        while True:
            t = self.peek()
            if t.text in ("input", "output", "inout"):
                self.next()
                direction = PortDir(t.text)
                is_reg = bool(self.accept("reg"))
                self.accept("wire")
                self.accept("signed")
                width = self.parse_range()
            elif t.kind == "id" and direction is not None:
                pass  # same direction/width/regness as previous entry
            elif t.kind == "id":
                # classic header: bare names, declared in the body
                name = self.next()
                mod.ports.append(Port(name.text, PortDir.INPUT, 1, name.line))
                if self.accept(","):
                    continue
                break
            else:
                self.fail(t, f"expected port declaration, found '{t.text or 'end of file'}'")
            name = self.expect_id("port name")
            mod.ports.append(Port(name.text, direction, width, name.line))
            if is_reg:
                mod.nets.append(Net(name.text, NetKind.REG, width, None, name.line))
            if self.accept(","):
                continue
            break

    def parse_parameter_assignment(self, local: bool):
        self.accept("integer")
        self.accept("signed")
        if self.at("["):
            self.parse_range()
        while True:
            name = self.expect_id("parameter name")
            self.expect("=")
            value = self.const_eval(self.parse_expr())
            self.params[name.text] = value
            self.module.parameters.append(Parameter(name.text, value, name.line))
            if not self.accept(","):
                break

    def parse_module(self) -> ModuleAst:
        self.expect("module")
        name = self.expect_id("module name")
        self.module = mod = ModuleAst(name.text)

        if self.accept("#"):  # parameter port list
            self.expect("(")
            while not self.at(")"):
                self.expect("parameter")
                self.parse_parameter_assignment(local=False)
                if not self.accept(","):
                    break
            self.expect(")")

        header_is_ansi = False
        if self.accept("("):
            if not self.at(")"):
                nxt = self.peek()
                header_is_ansi = nxt.text in ("input", "output", "inout")
                self.parse_ansi_ports(mod)
            self.expect(")")
        self.expect(";")
        header_names = {p.name for p in mod.ports}

        while not self.at("endmodule"):
            t = self.peek()
            if t.kind == "eof":
                self.errors.append(SyntaxIssue(t.line, t.col, "expected 'endmodule', found end of file"))
                break
            try:
                self.parse_module_item(mod, header_names, header_is_ansi)
            except VerilogSyntaxError as exc:
                self.errors.extend(exc.errors)
                self.sync_to_semicolon()
        else:
            self.expect("endmodule")
            tail = self.peek()
            if tail.kind != "eof":
                if tail.text == "module":
                    self.errors.append(SyntaxIssue(
                        tail.line, tail.col, "multiple modules in one source unit"))
                else:
                    self.errors.append(SyntaxIssue(
                        tail.line, tail.col, f"unexpected '{tail.text}' after endmodule"))

        if self.errors:
            raise VerilogSyntaxError(self.errors)
        self.check_module(mod)
        return mod

    def parse_module_item(self, mod: ModuleAst, header_names: set[str], ansi: bool):
        t = self.peek()
        if t.text in ("input", "output", "inout"):
            self.next()
            if ansi:
                self.fail(t, "port declaration after an ANSI port list")
            self.parse_port_decl(PortDir(t.text), mod, header_names)
        elif t.text in ("wire", "reg"):
            self.next()
            self.accept("signed")
            width = self.parse_range()
            self.parse_decl_names(NetKind(t.text), width, mod.nets)
        elif t.text == "integer":
            self.next()
            self.parse_decl_names(NetKind.REG, 32, mod.nets)
        elif t.text in ("parameter", "localparam"):
            self.next()
            self.parse_parameter_assignment(local=t.text == "localparam")
            self.expect(";")
        elif t.text == "assign":
            self.next()
            lhs = self.parse_lvalue()
            self.expect("=")
            rhs = self.parse_expr()
            self.expect(";")
            mod.assigns.append(ContAssign(lhs, rhs, t.line))
        elif t.text == "always":
            self.next()
            trig = self.parse_sensitivity()
            body = self.parse_stmt()
            mod.always_blocks.append(AlwaysBlock(trig, body, t.line))
        elif t.kind == "keyword" and t.text in _UNSUPPORTED_ITEMS:
            raise UnsupportedConstruct(t.text, t.line)
        elif t.kind == "id" and self.peek(1).kind == "id":
            raise UnsupportedConstruct(f"module instantiation '{t.text}'", t.line)
        elif t.kind == "id" and self.peek(1).text == "#":
            raise UnsupportedConstruct(f"module instantiation '{t.text}'", t.line)
        else:
            self.fail(t, f"unexpected '{t.text}' at module level")

    # --- post-parse checks ---

    def check_module(self, mod: ModuleAst):
        issues: list[SyntaxIssue] = []
        seen_ports: set[str] = set()
        for p in mod.ports:
            if p.name in seen_ports:
                issues.append(SyntaxIssue(p.line, 1, f"duplicate port name '{p.name}'"))
            seen_ports.add(p.name)

        declared = mod.declared_names()

        def check_expr(e):
            for node in walk_expr(e):
                if isinstance(node, Ident) and node.name not in declared:
                    issues.append(SyntaxIssue(
                        node.line, 1, f"undeclared net '{node.name}'"))

        for a in mod.assigns:
            check_expr(a.lhs)
            check_expr(a.rhs)
        for blk in mod.always_blocks:
            for s in walk_stmts(blk.body):
                if isinstance(s, Assignment):
                    check_expr(s.lhs)
                    check_expr(s.rhs)
                elif isinstance(s, If):
                    check_expr(s.cond)
                elif isinstance(s, Case):
                    check_expr(s.subject)
                    for item in s.items:
                        for lbl in item.labels:
                            check_expr(lbl)
        if issues:
            raise VerilogSyntaxError(issues)


def parse_module(src: VerilogSource) -> ModuleAst:
    """Parse one self-contained module.

    Raises VerilogSyntaxError with the full diagnostics list on malformed
    input, or UnsupportedConstruct for code outside the subset.
    """
    try:
        return _Parser(src.text).parse_module()
    except RecursionError:
        raise VerilogSyntaxError(
            [SyntaxIssue(1, 1, "expression nesting too deep")]) from None
