"""Dataflow graph extraction from the parsed module.

The graph models registers, combinational operator cones, mux/select
structures, constants and clock-enable points. Register nodes are the only
cycle breakers; the combinational subgraph is checked for acyclicity on
every construction. Pipeline stages: inputs are stage 0, a register fed
only by stage<=k logic is stage k+1, combinational nodes inherit the max
stage of their fan-in.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

from rtlforge.frontend.parse_errors import CombinationalLoop, UnsupportedConstruct
from rtlforge.frontend.syntax import (
    AlwaysBlock,
    Assignment,
    Binary,
    BitSelect,
    Block,
    Case,
    Concat,
    ContAssign,
    Expr,
    Ident,
    If,
    ModuleAst,
    Number,
    PartSelect,
    PortDir,
    Repeat,
    Stmt,
    Ternary,
    Unary,
    lhs_targets,
    walk_expr,
    walk_stmts,
)


class DfgKind(Enum):
    INPUT = "INPUT"
    OUTPUT = "OUTPUT"
    REG = "REG"
    COMB = "COMB"
    MUX = "MUX"
    CONST = "CONST"
    CLOCK_ENABLE = "CLOCK_ENABLE"


@dataclass
class DfgNode:
    id: int
    kind: DfgKind
    label: str
    width: int
    enable_net: Optional[str] = None   # REG only
    clock: Optional[str] = None        # REG only


@dataclass
class DataflowGraph:
    nodes: list[DfgNode] = field(default_factory=list)
    edges: list[tuple[int, int, str]] = field(default_factory=list)
    stage_of: dict[int, int] = field(default_factory=dict)
    clock_domains: list[str] = field(default_factory=list)

    def node(self, nid: int) -> DfgNode:
        return self.nodes[nid]

    def preds(self, nid: int) -> list[int]:
        return [s for s, d, _ in self.edges if d == nid]

    def succs(self, nid: int) -> list[int]:
        return [d for s, d, _ in self.edges if s == nid]

    def check_invariants(self):
        ids = {n.id for n in self.nodes}
        for s, d, _ in self.edges:
            if s not in ids or d not in ids:
                raise ValueError(f"edge ({s},{d}) references unknown node")
        _comb_cycle_check(self)
        for s, d, _ in self.edges:
            if self.node(s).kind is DfgKind.REG and self.node(d).kind is DfgKind.REG:
                if self.stage_of[d] < self.stage_of[s]:
                    raise ValueError("register stage order violated")


_OP_NAMES = {
    "+": "add", "-": "sub", "*": "mul", "/": "div", "%": "mod",
    "&": "and", "|": "or", "^": "xor", "~^": "xnor", "^~": "xnor",
    "&&": "land", "||": "lor", "==": "eq", "!=": "ne", "===": "eq", "!==": "ne",
    "<": "lt", ">": "gt", "<=": "le", ">=": "ge",
    "<<": "shl", ">>": "shr", "<<<": "shl", ">>>": "shr",
    "~": "not", "!": "lnot",
}

_ANON = "_"

# a pending reference to a named net, resolved once all drivers are known
_NetRef = tuple


class _Builder:
    def __init__(self, ast: ModuleAst):
        self.ast = ast
        self.nodes: list[DfgNode] = []
        self.edges: list[tuple[Union[int, _NetRef], int, str]] = []
        self.drivers: dict[str, int] = {}
        self.partial_nets: set[str] = set()
        self.op_seq = 0
        self.enable_nodes: dict[str, int] = {}
        self._rhs_cache: dict[int, Union[int, _NetRef]] = {}

    def new_node(self, kind: DfgKind, label: str, width: int, **kw) -> int:
        nid = len(self.nodes)
        self.nodes.append(DfgNode(nid, kind, label, max(1, width), **kw))
        return nid

    def add_edge(self, src: Union[int, _NetRef], dst: int, net: str = _ANON):
        self.edges.append((src, dst, net))

    def net_ref(self, name: str) -> _NetRef:
        return ("net", name)

    def width_of(self, name: str) -> int:
        try:
            return self.ast.width_of(name)
        except KeyError:
            return 1

    # --- expression elaboration ---

    def expr_width(self, e: Expr) -> int:
        if isinstance(e, Ident):
            return self.width_of(e.name)
        if isinstance(e, Number):
            return e.width or 32
        if isinstance(e, Unary):
            if e.op in ("!", "&", "|", "^"):
                return 1
            return self.expr_width(e.operand)
        if isinstance(e, Binary):
            if e.op in ("==", "!=", "===", "!==", "<", ">", "<=", ">=", "&&", "||"):
                return 1
            if e.op in ("<<", ">>", "<<<", ">>>"):
                return self.expr_width(e.left)
            return max(self.expr_width(e.left), self.expr_width(e.right))
        if isinstance(e, Ternary):
            return max(self.expr_width(e.then), self.expr_width(e.other))
        if isinstance(e, Concat):
            return sum(self.expr_width(p) for p in e.parts)
        if isinstance(e, Repeat):
            return e.count * self.expr_width(e.part)
        if isinstance(e, BitSelect):
            return 1
        if isinstance(e, PartSelect):
            return e.msb - e.lsb + 1
        raise UnsupportedConstruct(type(e).__name__, getattr(e, "line", 0))

    def op_label(self, name: str) -> str:
        self.op_seq += 1
        return f"{name}_{self.op_seq}"

    def build_expr(self, e: Expr) -> Union[int, _NetRef]:
        """Elaborate an expression; returns a node id or a pending net ref."""
        if isinstance(e, Ident):
            return self.net_ref(e.name)
        if isinstance(e, Number):
            return self.new_node(DfgKind.CONST, e.text.replace(" ", ""), e.width or 32)
        if isinstance(e, Unary):
            nid = self.new_node(DfgKind.COMB, self.op_label(_OP_NAMES.get(e.op, "op")),
                                self.expr_width(e))
            self.add_edge(self.build_expr(e.operand), nid)
            return nid
        if isinstance(e, Binary):
            nid = self.new_node(DfgKind.COMB, self.op_label(_OP_NAMES.get(e.op, "op")),
                                self.expr_width(e))
            self.add_edge(self.build_expr(e.left), nid)
            self.add_edge(self.build_expr(e.right), nid)
            return nid
        if isinstance(e, Ternary):
            nid = self.new_node(DfgKind.MUX, self.op_label("mux"), self.expr_width(e))
            self.add_edge(self.build_expr(e.cond), nid)
            self.add_edge(self.build_expr(e.then), nid)
            self.add_edge(self.build_expr(e.other), nid)
            return nid
        if isinstance(e, Concat):
            nid = self.new_node(DfgKind.COMB, self.op_label("cat"), self.expr_width(e))
            for p in e.parts:
                self.add_edge(self.build_expr(p), nid)
            return nid
        if isinstance(e, Repeat):
            nid = self.new_node(DfgKind.COMB, self.op_label("rep"), self.expr_width(e))
            self.add_edge(self.build_expr(e.part), nid)
            return nid
        if isinstance(e, BitSelect):
            nid = self.new_node(DfgKind.COMB, self.op_label("sel"), 1)
            self.add_edge(self.net_ref(e.base.name), nid)
            if not isinstance(e.index, Number):
                self.add_edge(self.build_expr(e.index), nid)
            return nid
        if isinstance(e, PartSelect):
            nid = self.new_node(DfgKind.COMB, self.op_label("sel"), e.msb - e.lsb + 1)
            self.add_edge(self.net_ref(e.base.name), nid)
            return nid
        raise UnsupportedConstruct(type(e).__name__, getattr(e, "line", 0))

    def build_root(self, net: str, e: Expr) -> int:
        """Elaborate the driver of a named net; the root node takes the net's label."""
        if isinstance(e, (Ident, Number)):
            nid = self.new_node(DfgKind.COMB, net, self.width_of(net))
            self.add_edge(self.build_expr(e), nid)
            return nid
        return self.as_root_node(net, self.build_expr(e))

    # --- statement resolution (next-value per target) ---

    def resolve_target(self, s: Stmt, target: str,
                       default: Union[int, _NetRef, None]) -> Union[int, _NetRef, None]:
        if isinstance(s, Assignment):
            if target in lhs_targets(s.lhs):
                # concat targets share one elaboration of the right-hand side
                key = id(s)
                if key not in self._rhs_cache:
                    self._rhs_cache[key] = self.build_expr(s.rhs)
                return self._rhs_cache[key]
            return default
        if isinstance(s, Block):
            ref = default
            for inner in s.stmts:
                ref = self.resolve_target(inner, target, ref)
            return ref
        if isinstance(s, If):
            t = self.resolve_target(s.then, target, default)
            o = self.resolve_target(s.other, target, default) if s.other else default
            if t == o:
                return t
            if t is None or o is None:
                raise UnsupportedConstruct(
                    f"latch inferred for net '{target}'", s.line)
            nid = self.new_node(DfgKind.MUX, self.op_label("mux"), self.width_of(target))
            self.add_edge(self.build_expr(s.cond), nid)
            self.add_edge(t, nid)
            self.add_edge(o, nid)
            return nid
        if isinstance(s, Case):
            branches = []
            default_ref = default
            has_default = False
            for item in s.items:
                r = self.resolve_target(item.body, target, default)
                if item.labels:
                    branches.append(r)
                else:
                    has_default = True
                    default_ref = r
            if all(b == default_ref for b in branches):
                return default_ref
            if default_ref is None or any(b is None for b in branches):
                raise UnsupportedConstruct(
                    f"latch inferred for net '{target}'", s.line)
            nid = self.new_node(DfgKind.MUX, self.op_label("mux"), self.width_of(target))
            self.add_edge(self.build_expr(s.subject), nid)
            for b in branches:
                self.add_edge(b, nid)
            self.add_edge(default_ref, nid)
            return nid
        raise UnsupportedConstruct(type(s).__name__, getattr(s, "line", 0))

    # --- top-level construction ---

    def build(self) -> DataflowGraph:
        ast = self.ast

        clock_nets: set[str] = set()
        for blk in ast.always_blocks:
            for _, sig in blk.trigger.edges:
                clock_nets.add(sig)

        data_reads: set[str] = set()
        for a in ast.assigns:
            for node in walk_expr(a.rhs):
                if isinstance(node, Ident):
                    data_reads.add(node.name)
        for blk in ast.always_blocks:
            for st in walk_stmts(blk.body):
                if isinstance(st, Assignment):
                    for node in walk_expr(st.rhs):
                        if isinstance(node, Ident):
                            data_reads.add(node.name)
                    for node in walk_expr(st.lhs):
                        if isinstance(node, (BitSelect,)):
                            if not isinstance(node.index, Number):
                                for sub in walk_expr(node.index):
                                    if isinstance(sub, Ident):
                                        data_reads.add(sub.name)
                elif isinstance(st, If):
                    for node in walk_expr(st.cond):
                        if isinstance(node, Ident):
                            data_reads.add(node.name)
                elif isinstance(st, Case):
                    for node in walk_expr(st.subject):
                        if isinstance(node, Ident):
                            data_reads.add(node.name)

        # 1. inputs (clock-only ports stay out of the dataflow)
        for p in ast.ports:
            if p.direction in (PortDir.INPUT, PortDir.INOUT):
                if p.name in clock_nets and p.name not in data_reads:
                    continue
                nid = self.new_node(DfgKind.INPUT, p.name, p.width)
                self.register_driver(p.name, nid, p.line)

        # 2. registers: reg nets assigned in clocked blocks
        clocked: list[tuple[AlwaysBlock, list[str]]] = []
        for blk in ast.always_blocks:
            if not blk.trigger.is_clocked:
                continue
            targets: list[str] = []
            for st in walk_stmts(blk.body):
                if isinstance(st, Assignment):
                    if not isinstance(st.lhs, (Ident, Concat)):
                        raise UnsupportedConstruct(
                            "bit/part-select register write", st.line)
                    for t in lhs_targets(st.lhs):
                        if t not in targets:
                            targets.append(t)
            clocked.append((blk, targets))
            for t in targets:
                nid = self.new_node(DfgKind.REG, t, self.width_of(t),
                                    clock=blk.trigger.clock)
                self.register_driver(t, nid, blk.line)

        # 3. combinational drivers in source order
        items: list[tuple[int, object]] = [(a.line, a) for a in ast.assigns]
        items += [(blk.line, blk) for blk in ast.always_blocks if not blk.trigger.is_clocked]
        items.sort(key=lambda pair: pair[0])
        for _, item in items:
            if isinstance(item, ContAssign):
                self.elaborate_assign(item)
            else:
                self.elaborate_comb_block(item)

        # 4. register data / enables
        for blk, targets in clocked:
            self.elaborate_clocked_block(blk, targets)

        # 5. outputs
        for p in ast.ports:
            if p.direction is PortDir.OUTPUT:
                nid = self.new_node(DfgKind.OUTPUT, p.name, p.width)
                self.add_edge(self.net_ref(p.name), nid)

        return self.finish(clock_nets)

    def register_driver(self, net: str, nid: int, line: int):
        if net in self.drivers:
            raise UnsupportedConstruct(f"multiple drivers for net '{net}'", line)
        self.drivers[net] = nid

    def elaborate_assign(self, a: ContAssign):
        if isinstance(a.lhs, Ident):
            nid = self.build_root(a.lhs.name, a.rhs)
            self.register_driver(a.lhs.name, nid, a.line)
        elif isinstance(a.lhs, (BitSelect, PartSelect, Concat)):
            # partial/split drivers merge into one assembly node per net
            ref = self.build_expr(a.rhs)
            for net in lhs_targets(a.lhs):
                if net in self.drivers and net not in self.partial_nets:
                    raise UnsupportedConstruct(f"multiple drivers for net '{net}'", a.line)
                if net not in self.drivers:
                    nid = self.new_node(DfgKind.COMB, net, self.width_of(net))
                    self.drivers[net] = nid
                    self.partial_nets.add(net)
                self.add_edge(ref, self.drivers[net])
        else:
            raise UnsupportedConstruct("assignment target", a.line)

    def elaborate_comb_block(self, blk: AlwaysBlock):
        targets: list[str] = []
        for st in walk_stmts(blk.body):
            if isinstance(st, Assignment):
                for t in lhs_targets(st.lhs):
                    if t not in targets:
                        targets.append(t)
        for t in targets:
            ref = self.resolve_target(blk.body, t, None)
            if ref is None:
                raise UnsupportedConstruct(f"latch inferred for net '{t}'", blk.line)
            nid = self.as_root_node(t, ref)
            self.register_driver(t, nid, blk.line)

    def as_root_node(self, net: str, ref: Union[int, _NetRef]) -> int:
        claimed = set(self.drivers.values())
        if (isinstance(ref, int) and ref not in claimed
                and self.nodes[ref].kind in (DfgKind.COMB, DfgKind.MUX)):
            self.nodes[ref].label = net
            self.nodes[ref].width = self.width_of(net)
            return ref
        nid = self.new_node(DfgKind.COMB, net, self.width_of(net))
        self.add_edge(ref, nid)
        return nid

    def elaborate_clocked_block(self, blk: AlwaysBlock, targets: list[str]):
        body = blk.body
        while isinstance(body, Block) and len(body.stmts) == 1:
            body = body.stmts[0]

        enable: Optional[str] = None
        inner: Stmt = body
        if isinstance(body, If) and body.other is None and isinstance(body.cond, Ident):
            enable = body.cond.name
            inner = body.then

        for t in targets:
            reg = self.drivers[t]
            hold: Union[int, _NetRef] = self.net_ref(t)
            data = self.resolve_target(inner, t, hold)
            self.add_edge(data, reg, t if data == hold else _ANON)
            if enable is not None:
                self.nodes[reg].enable_net = enable
                if enable not in self.enable_nodes:
                    en_nid = self.new_node(DfgKind.CLOCK_ENABLE, enable, 1)
                    self.add_edge(self.net_ref(enable), en_nid)
                    self.enable_nodes[enable] = en_nid
                self.add_edge(self.enable_nodes[enable], reg, enable)

    def finish(self, clock_nets: set[str]) -> DataflowGraph:
        g = DataflowGraph(nodes=self.nodes)
        for src, dst, net in self.edges:
            if isinstance(src, tuple):
                name = src[1]
                if name not in self.drivers:
                    raise UnsupportedConstruct(f"undriven net '{name}'", 0)
                g.edges.append((self.drivers[name], dst, name if net == _ANON else net))
            else:
                g.edges.append((src, dst, net))
        g.edges.sort(key=lambda e: (e[0], e[1], e[2]))
        g.clock_domains = sorted(clock_nets)
        _comb_cycle_check(g)
        g.stage_of = _compute_stages(g)
        g.check_invariants()
        return g


_COMB_KINDS = {DfgKind.COMB, DfgKind.MUX, DfgKind.CONST, DfgKind.CLOCK_ENABLE}


def _tarjan_sccs(n: int, succs: dict[int, list[int]]) -> list[list[int]]:
    """Tarjan's strongly connected components, iterative."""
    index = {}
    low = {}
    on_stack = set()
    stack: list[int] = []
    sccs: list[list[int]] = []
    counter = [0]

    for root in range(n):
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter[0]
                counter[0] += 1
                stack.append(v)
                on_stack.add(v)
            advanced = False
            children = succs.get(v, [])
            while pi < len(children):
                w = children[pi]
                pi += 1
                if w not in index:
                    work[-1] = (v, pi)
                    work.append((w, 0))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(comp)
            if work:
                u, _ = work[-1]
                low[u] = min(low[u], low[v])
    return sccs


def _comb_cycle_check(g: DataflowGraph):
    comb_ids = {n.id for n in g.nodes if n.kind in _COMB_KINDS}
    succs: dict[int, list[int]] = {}
    for s, d, _ in g.edges:
        if s in comb_ids and d in comb_ids:
            succs.setdefault(s, []).append(d)
    self_loops = {s for s, d, _ in g.edges if s == d and s in comb_ids}
    for comp in _tarjan_sccs(len(g.nodes), succs):
        members = [c for c in comp if c in comb_ids]
        if len(members) > 1 or (members and members[0] in self_loops):
            labels = [g.node(i).label for i in sorted(members)]
            raise CombinationalLoop(labels)


def _compute_stages(g: DataflowGraph) -> dict[int, int]:
    succs: dict[int, list[int]] = {}
    for s, d, _ in g.edges:
        succs.setdefault(s, []).append(d)
    sccs = _tarjan_sccs(len(g.nodes), succs)
    comp_of = {}
    for ci, comp in enumerate(sccs):
        for v in comp:
            comp_of[v] = ci
    # Tarjan emits components in reverse topological order
    stages: dict[int, int] = {}
    comp_stage: dict[int, int] = {}
    for ci in range(len(sccs) - 1, -1, -1):
        comp = sccs[ci]
        ext = [comp_stage[comp_of[s]]
               for v in comp
               for s, d, _ in g.edges
               if d == v and comp_of[s] != ci]
        base = max(ext) if ext else 0
        has_reg = any(g.node(v).kind is DfgKind.REG for v in comp)
        if len(comp) == 1 and comp[0] not in (s for s, d, _ in g.edges if d == comp[0]):
            node = g.node(comp[0])
            if node.kind is DfgKind.REG:
                stage = base + 1
            elif node.kind is DfgKind.INPUT:
                stage = 0
            else:
                stage = base
        else:
            stage = base + 1 if has_reg else base
        comp_stage[ci] = stage
        for v in comp:
            stages[v] = stage
    return stages


def build_dataflow_graph(ast: ModuleAst) -> DataflowGraph:
    """Construct the annotated dataflow graph for a parsed module."""
    return _Builder(ast).build()


def longest_comb_path(g: DataflowGraph) -> tuple[int, list[int]]:
    """Longest path (by node count) whose interior is purely COMB/MUX.

    Endpoints run from {INPUT, REG} to {OUTPUT, REG}; ties break toward the
    lexicographically smallest node-id sequence.
    """
    starts = {n.id for n in g.nodes if n.kind in (DfgKind.INPUT, DfgKind.REG)}
    ends = {n.id for n in g.nodes if n.kind in (DfgKind.OUTPUT, DfgKind.REG)}
    interior = {n.id for n in g.nodes if n.kind in (DfgKind.COMB, DfgKind.MUX)}

    succs: dict[int, list[int]] = {}
    for s, d, _ in g.edges:
        succs.setdefault(s, []).append(d)

    # best path from a start node to each interior node, inclusive
    best: dict[int, tuple[int, tuple[int, ...]]] = {}

    order = _comb_topo_order(g, interior)
    for s in sorted(starts):
        for d in sorted(set(succs.get(s, []))):
            if d in interior:
                cand = (2, (s, d))
                if d not in best or _better(cand, best[d]):
                    best[d] = cand
    for v in order:
        if v not in best:
            continue
        base = best[v]
        for d in sorted(set(succs.get(v, []))):
            if d in interior:
                cand = (base[0] + 1, base[1] + (d,))
                if d not in best or _better(cand, best[d]):
                    best[d] = cand

    result: Optional[tuple[int, tuple[int, ...]]] = None
    for s in sorted(starts):
        for d in sorted(set(succs.get(s, []))):
            if d in ends and d != s:
                cand = (2, (s, d))
                if result is None or _better(cand, result):
                    result = cand
    for v, (length, path) in sorted(best.items()):
        for d in sorted(set(succs.get(v, []))):
            if d in ends:
                cand = (length + 1, path + (d,))
                if result is None or _better(cand, result):
                    result = cand

    if result is None:
        return 0, []
    return result[0], list(result[1])


def _better(a: tuple[int, tuple[int, ...]], b: tuple[int, tuple[int, ...]]) -> bool:
    if a[0] != b[0]:
        return a[0] > b[0]
    return a[1] < b[1]


def _comb_topo_order(g: DataflowGraph, interior: set[int]) -> list[int]:
    indeg = {v: 0 for v in interior}
    succs: dict[int, list[int]] = {}
    for s, d, _ in g.edges:
        if s in interior and d in interior:
            succs.setdefault(s, []).append(d)
            indeg[d] += 1
    ready = sorted(v for v, k in indeg.items() if k == 0)
    order = []
    while ready:
        v = ready.pop(0)
        order.append(v)
        for d in succs.get(v, []):
            indeg[d] -= 1
            if indeg[d] == 0:
                ready.append(d)
        ready.sort()
    return order
