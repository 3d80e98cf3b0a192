"""AST node types for the supported Verilog subset.

The subset covers self-contained synthesizable modules: ANSI and classic
port lists, wire/reg/integer declarations, continuous assigns, always
blocks (posedge/negedge/star), if/else, case, blocking and non-blocking
assignment, the usual operator zoo, concatenation, replication, bit and
part selects, and integer parameters. Everything else is rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union


@dataclass(frozen=True)
class VerilogSource:
    """A unit of Verilog text plus a provenance label."""

    text: str
    origin: str

    def __post_init__(self):
        if not self.text:
            raise ValueError("source text must be non-empty")
        if not self.origin:
            raise ValueError("source origin must be non-empty")


class PortDir(Enum):
    INPUT = "input"
    OUTPUT = "output"
    INOUT = "inout"


class NetKind(Enum):
    WIRE = "wire"
    REG = "reg"


# --- expressions ---


@dataclass(frozen=True)
class Ident:
    name: str
    line: int = 0


@dataclass(frozen=True)
class Number:
    text: str          # literal as written, e.g. "8'hFF"
    value: Optional[int]  # None when the literal contains x/z digits
    width: Optional[int]
    line: int = 0


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Expr"
    line: int = 0


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    line: int = 0


@dataclass(frozen=True)
class Ternary:
    cond: "Expr"
    then: "Expr"
    other: "Expr"
    line: int = 0


@dataclass(frozen=True)
class Concat:
    parts: tuple["Expr", ...]
    line: int = 0


@dataclass(frozen=True)
class Repeat:
    count: int
    part: "Expr"
    line: int = 0


@dataclass(frozen=True)
class BitSelect:
    base: Ident
    index: "Expr"
    line: int = 0


@dataclass(frozen=True)
class PartSelect:
    base: Ident
    msb: int
    lsb: int
    line: int = 0


Expr = Union[Ident, Number, Unary, Binary, Ternary, Concat, Repeat, BitSelect, PartSelect]


# --- statements ---


@dataclass(frozen=True)
class Assignment:
    lhs: Expr            # Ident, BitSelect, PartSelect or Concat of those
    rhs: Expr
    blocking: bool
    line: int = 0


@dataclass(frozen=True)
class If:
    cond: Expr
    then: "Stmt"
    other: Optional["Stmt"]
    line: int = 0


@dataclass(frozen=True)
class CaseItem:
    labels: tuple[Expr, ...]   # empty tuple marks the default item
    body: "Stmt"


@dataclass(frozen=True)
class Case:
    subject: Expr
    items: tuple[CaseItem, ...]
    line: int = 0


@dataclass(frozen=True)
class Block:
    stmts: tuple["Stmt", ...]
    line: int = 0


Stmt = Union[Assignment, If, Case, Block]


# --- module items ---


class EdgeKind(Enum):
    POSEDGE = "posedge"
    NEGEDGE = "negedge"
    COMB = "combinational"


@dataclass(frozen=True)
class Trigger:
    """Sensitivity of an always block.

    For clocked blocks ``edges`` holds (edge kind, net) events in source
    order; the first event is taken as the clock. Combinational blocks
    (@* or a plain signal list) have no edges.
    """

    edges: tuple[tuple[EdgeKind, str], ...]

    @property
    def is_clocked(self) -> bool:
        return bool(self.edges)

    @property
    def clock(self) -> Optional[str]:
        return self.edges[0][1] if self.edges else None

    @property
    def kind(self) -> EdgeKind:
        return self.edges[0][0] if self.edges else EdgeKind.COMB


@dataclass(frozen=True)
class Port:
    name: str
    direction: PortDir
    width: int
    line: int = 0


@dataclass(frozen=True)
class Net:
    name: str
    kind: NetKind
    width: int
    init: Optional[int] = None
    line: int = 0


@dataclass(frozen=True)
class Parameter:
    name: str
    value: int
    line: int = 0


@dataclass(frozen=True)
class AlwaysBlock:
    trigger: Trigger
    body: Stmt
    line: int = 0


@dataclass(frozen=True)
class ContAssign:
    lhs: Expr
    rhs: Expr
    line: int = 0


@dataclass
class ModuleAst:
    name: str
    ports: list[Port] = field(default_factory=list)
    nets: list[Net] = field(default_factory=list)
    always_blocks: list[AlwaysBlock] = field(default_factory=list)
    assigns: list[ContAssign] = field(default_factory=list)
    parameters: list[Parameter] = field(default_factory=list)

    def port(self, name: str) -> Optional[Port]:
        for p in self.ports:
            if p.name == name:
                return p
        return None

    def width_of(self, name: str) -> int:
        for n in self.nets:
            if n.name == name:
                return n.width
        p = self.port(name)
        if p is not None:
            return p.width
        raise KeyError(name)

    def declared_names(self) -> set[str]:
        return {p.name for p in self.ports} | {n.name for n in self.nets} | {
            q.name for q in self.parameters
        }


def walk_expr(e: Expr):
    """Yield every node of an expression tree, root first."""
    yield e
    if isinstance(e, Unary):
        yield from walk_expr(e.operand)
    elif isinstance(e, Binary):
        yield from walk_expr(e.left)
        yield from walk_expr(e.right)
    elif isinstance(e, Ternary):
        yield from walk_expr(e.cond)
        yield from walk_expr(e.then)
        yield from walk_expr(e.other)
    elif isinstance(e, (Concat,)):
        for p in e.parts:
            yield from walk_expr(p)
    elif isinstance(e, Repeat):
        yield from walk_expr(e.part)
    elif isinstance(e, BitSelect):
        yield e.base
        yield from walk_expr(e.index)
    elif isinstance(e, PartSelect):
        yield e.base


def walk_stmts(s: Stmt):
    """Yield every statement in a statement tree, outermost first."""
    yield s
    if isinstance(s, Block):
        for inner in s.stmts:
            yield from walk_stmts(inner)
    elif isinstance(s, If):
        yield from walk_stmts(s.then)
        if s.other is not None:
            yield from walk_stmts(s.other)
    elif isinstance(s, Case):
        for item in s.items:
            yield from walk_stmts(item.body)


def lhs_targets(lhs: Expr) -> list[str]:
    """Base net names written by an assignment left-hand side."""
    if isinstance(lhs, Ident):
        return [lhs.name]
    if isinstance(lhs, (BitSelect, PartSelect)):
        return [lhs.base.name]
    if isinstance(lhs, Concat):
        out: list[str] = []
        for p in lhs.parts:
            out.extend(lhs_targets(p))
        return out
    raise ValueError(f"unsupported assignment target: {type(lhs).__name__}")
