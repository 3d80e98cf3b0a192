"""First-order CMOS power model.

static = sum of cell leakage (nW). dynamic = sum over nets of
rate * C_load * V^2 * f_clk, where C_load is the total capacitance of
fanout input pins (clock pins excluded: clock-tree power is out of scope)
and rate defaults to the library's default toggle rate for nets absent
from the activity map. Result is normalized to nW.
"""

from __future__ import annotations

from rtlforge.errors import RtlforgeError
from rtlforge.netlist.gates import GateNetlist, is_const_instance
from rtlforge.netlist.liberty import LibertyLibrary


class InvalidActivity(RtlforgeError):
    def __init__(self, net: str, rate: float):
        self.net = net
        self.rate = rate
        super().__init__(f"toggle rate {rate} for net '{net}' outside [0, 1]")


def resolve_activity(n: GateNetlist, activity: dict[str, float] | None) -> dict[str, float]:
    """Map a name-keyed activity table onto net ids by exact alias match."""
    if not activity:
        return {}
    for name, rate in activity.items():
        if not 0.0 <= rate <= 1.0:
            raise InvalidActivity(name, rate)
    by_net: dict[str, float] = {}
    for nid, aliases in n.net_names.items():
        for alias in aliases:
            if alias in activity:
                by_net[nid] = activity[alias]
                break
    return by_net


def estimate_power(n: GateNetlist, lib: LibertyLibrary,
                   activity: dict[str, float] | None = None,
                   f_clk_mhz: float = 100.0) -> tuple[float, float]:
    """Return (static nW, dynamic nW)."""
    if f_clk_mhz <= 0:
        raise ValueError("f_clk must be positive")
    rates = resolve_activity(n, activity)

    static = 0.0
    for inst in n.instances:
        if is_const_instance(inst):
            continue
        static += lib.cell(inst.cell).leakage_power

    volts = lib.default_voltage
    dynamic = 0.0
    for nid in sorted(n.nets):
        info = n.nets[nid]
        if nid.startswith("const"):
            continue
        c_load_pf = 0.0
        for inst_name, pin in info.fanout:
            inst = n.instance(inst_name)
            if is_const_instance(inst):
                continue
            cell = lib.cell(inst.cell)
            if cell.is_sequential and pin == cell.clock_pin:
                continue
            p = cell.pin(pin)
            if p is not None:
                c_load_pf += p.capacitance
        rate = rates.get(nid, lib.default_toggle_rate)
        # pF * V^2 * MHz -> W carries 1e-12 * 1e6; nW multiplies by 1e9
        dynamic += rate * c_load_pf * volts * volts * f_clk_mhz * 1e3
    return static, dynamic
