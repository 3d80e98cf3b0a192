"""Verilog-subset frontend: parsing and dataflow graph extraction."""

from rtlforge.frontend.dfg import (
    DataflowGraph,
    DfgKind,
    DfgNode,
    build_dataflow_graph,
    longest_comb_path,
)
from rtlforge.frontend.parse_errors import (
    CombinationalLoop,
    FrontendError,
    SyntaxIssue,
    UnsupportedConstruct,
    VerilogSyntaxError,
)
from rtlforge.frontend.parser import parse_module
from rtlforge.frontend.schema import parse_dfg, schema_labels, serialize_dfg
from rtlforge.frontend.syntax import ModuleAst, NetKind, PortDir, VerilogSource

__all__ = [
    "CombinationalLoop",
    "DataflowGraph",
    "DfgKind",
    "DfgNode",
    "FrontendError",
    "ModuleAst",
    "NetKind",
    "PortDir",
    "SyntaxIssue",
    "UnsupportedConstruct",
    "VerilogSource",
    "VerilogSyntaxError",
    "build_dataflow_graph",
    "longest_comb_path",
    "parse_dfg",
    "parse_module",
    "schema_labels",
    "serialize_dfg",
]
