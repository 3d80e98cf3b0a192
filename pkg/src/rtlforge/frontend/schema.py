"""Line-oriented text schema for dataflow graphs.

Format, one record per line:

    NODE <id> <kind> <label> <width> [stage=<s>] [en=<net>] [clk=<net>]
    EDGE <src> <dst> <net>
    LONGEST_COMB_PATH <id>-><id>->...

NODE lines are emitted in id order, EDGE lines in (src, dst, net) order,
and the path line is always last. Anonymous edges carry the net name "_".
The text round-trips: parse_dfg(serialize_dfg(g)) reproduces g exactly.
"""

from __future__ import annotations

from rtlforge.errors import RtlforgeError
from rtlforge.frontend.dfg import DataflowGraph, DfgKind, DfgNode, longest_comb_path


class SchemaParseError(RtlforgeError):
    pass


def serialize_dfg(g: DataflowGraph) -> str:
    lines = []
    for n in sorted(g.nodes, key=lambda n: n.id):
        parts = ["NODE", str(n.id), n.kind.value, n.label or "_", str(n.width)]
        if n.id in g.stage_of:
            parts.append(f"stage={g.stage_of[n.id]}")
        if n.enable_net:
            parts.append(f"en={n.enable_net}")
        if n.clock:
            parts.append(f"clk={n.clock}")
        lines.append(" ".join(parts))
    for s, d, net in sorted(g.edges):
        lines.append(f"EDGE {s} {d} {net}")
    _, path = longest_comb_path(g)
    lines.append("LONGEST_COMB_PATH " + "->".join(str(i) for i in path))
    return "\n".join(lines) + "\n"


def parse_dfg(text: str) -> DataflowGraph:
    g = DataflowGraph()
    clocks = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        fields = line.split()
        tag = fields[0]
        if tag == "NODE":
            if len(fields) < 5:
                raise SchemaParseError(f"line {lineno}: malformed NODE record")
            nid = int(fields[1])
            try:
                kind = DfgKind(fields[2])
            except ValueError:
                raise SchemaParseError(f"line {lineno}: unknown node kind {fields[2]!r}")
            node = DfgNode(nid, kind, fields[3], int(fields[4]))
            for attr in fields[5:]:
                key, _, value = attr.partition("=")
                if key == "stage":
                    g.stage_of[nid] = int(value)
                elif key == "en":
                    node.enable_net = value
                elif key == "clk":
                    node.clock = value
                    clocks.add(value)
                else:
                    raise SchemaParseError(f"line {lineno}: unknown attribute {key!r}")
            g.nodes.append(node)
        elif tag == "EDGE":
            if len(fields) != 4:
                raise SchemaParseError(f"line {lineno}: malformed EDGE record")
            g.edges.append((int(fields[1]), int(fields[2]), fields[3]))
        elif tag == "LONGEST_COMB_PATH":
            pass  # derived record, recomputed on demand
        else:
            raise SchemaParseError(f"line {lineno}: unknown record {tag!r}")
    g.nodes.sort(key=lambda n: n.id)
    g.edges.sort()
    g.clock_domains = sorted(clocks)
    return g


def schema_labels(g: DataflowGraph) -> set[str]:
    """Construct labels present in a graph (used to anchor plan steps)."""
    return {n.label for n in g.nodes if n.label and n.label != "_"}
