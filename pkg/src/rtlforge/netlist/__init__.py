"""Gate-level evaluation: Liberty parsing, netlist ingestion, STA, power, area."""

from rtlforge.netlist.gates import (
    GateInstance,
    GateNetlist,
    MultipleDrivers,
    NetlistFormatError,
    parse_netlist,
)
from rtlforge.netlist.liberty import (
    LibertyCell,
    LibertyLibrary,
    LibertyParseError,
    LibertyPin,
    TimingArc,
    UnknownCell,
    parse_liberty,
)
from rtlforge.netlist.power import InvalidActivity, estimate_power, resolve_activity
from rtlforge.netlist.ppa import PpaReport, build_ppa_report, compute_area, register_count
from rtlforge.netlist.timing import TimingLoop, compute_cpd

__all__ = [
    "GateInstance",
    "GateNetlist",
    "InvalidActivity",
    "LibertyCell",
    "LibertyLibrary",
    "LibertyParseError",
    "LibertyPin",
    "MultipleDrivers",
    "NetlistFormatError",
    "PpaReport",
    "TimingArc",
    "TimingLoop",
    "UnknownCell",
    "build_ppa_report",
    "compute_area",
    "compute_cpd",
    "estimate_power",
    "parse_liberty",
    "parse_netlist",
    "register_count",
    "resolve_activity",
]
