"""Area summation and the combined PPA report."""

from __future__ import annotations

from dataclasses import dataclass, field

from rtlforge.netlist.gates import GateNetlist, is_const_instance
from rtlforge.netlist.liberty import LibertyLibrary
from rtlforge.netlist.power import estimate_power
from rtlforge.netlist.timing import compute_cpd


@dataclass
class PpaReport:
    area: float                 # um^2
    cpd: float                  # ns
    static_power: float         # nW
    dynamic_power: float        # nW
    critical_path: list[str] = field(default_factory=list)
    register_count: int = 0

    @property
    def total_power(self) -> float:
        return self.static_power + self.dynamic_power

    def __post_init__(self):
        if self.cpd < 0:
            raise ValueError("cpd must be non-negative")
        if (self.cpd > 0) != bool(self.critical_path):
            raise ValueError("critical_path must be nonempty exactly when cpd > 0")

    def to_dict(self) -> dict:
        return {
            "area": self.area,
            "cpd": self.cpd,
            "static_power": self.static_power,
            "dynamic_power": self.dynamic_power,
            "total_power": self.total_power,
            "critical_path": list(self.critical_path),
            "register_count": self.register_count,
        }


def compute_area(n: GateNetlist, lib: LibertyLibrary) -> float:
    """Exact sum of per-instance areas; CONST pseudo-cells contribute 0."""
    total = 0.0
    for inst in n.instances:
        if is_const_instance(inst):
            continue
        total += lib.cell(inst.cell).area
    return total


def register_count(n: GateNetlist, lib: LibertyLibrary) -> int:
    return sum(1 for inst in n.instances
               if not is_const_instance(inst) and lib.cell(inst.cell).is_sequential)


def build_ppa_report(n: GateNetlist, lib: LibertyLibrary,
                     activity: dict[str, float] | None = None,
                     f_clk_mhz: float = 100.0) -> PpaReport:
    area = compute_area(n, lib)
    cpd, path = compute_cpd(n, lib)
    static, dyn = estimate_power(n, lib, activity, f_clk_mhz)
    return PpaReport(area=area, cpd=cpd, static_power=static, dynamic_power=dyn,
                     critical_path=path, register_count=register_count(n, lib))
