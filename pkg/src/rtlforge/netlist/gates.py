"""Gate-level netlist model and ingestion of the synthesis tool's JSON export."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from rtlforge.errors import RtlforgeError

CONST_CELLS = {"CONST0": "0", "CONST1": "1", "CONSTX": "x"}


class NetlistFormatError(RtlforgeError):
    def __init__(self, key: str, detail: str = ""):
        self.key = key
        super().__init__(f"netlist JSON missing or malformed key '{key}'"
                         + (f": {detail}" if detail else ""))


class MultipleDrivers(RtlforgeError):
    def __init__(self, net: str):
        self.net = net
        super().__init__(f"net '{net}' has more than one driver")


@dataclass(frozen=True)
class GateInstance:
    name: str
    cell: str
    pins: dict[str, str]  # pin name -> net id

    def __hash__(self):
        return hash(self.name)


@dataclass
class NetInfo:
    driver: tuple[str, str] | None = None   # (instance or "$port"/"$const", pin/name)
    fanout: list[tuple[str, str]] = field(default_factory=list)


@dataclass
class GateNetlist:
    module: str
    instances: list[GateInstance] = field(default_factory=list)
    nets: dict[str, NetInfo] = field(default_factory=dict)
    inputs: list[str] = field(default_factory=list)    # net ids
    outputs: list[str] = field(default_factory=list)
    net_names: dict[str, list[str]] = field(default_factory=dict)  # net id -> aliases

    def instance(self, name: str) -> GateInstance:
        for inst in self.instances:
            if inst.name == name:
                return inst
        raise KeyError(name)


def parse_netlist(text: str) -> GateNetlist:
    """Ingest one module from the synthesis tool's JSON netlist export.

    Constant bit connections ("0"/"1"/"x") become CONST pseudo-cell
    instances driving shared const nets. Cell pin directions come from the
    export's port_directions records.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetlistFormatError("<json>", str(exc)) from None
    if "modules" not in data or not isinstance(data["modules"], dict):
        raise NetlistFormatError("modules")
    if len(data["modules"]) != 1:
        raise NetlistFormatError("modules", f"expected 1 module, found {len(data['modules'])}")
    (mod_name, mod), = data["modules"].items()

    nl = GateNetlist(module=mod_name, net_names={})

    def net_id(bit) -> str:
        if isinstance(bit, int):
            return str(bit)
        if bit in ("0", "1", "x"):
            return f"const{bit}"
        raise NetlistFormatError("connections", f"bad bit value {bit!r}")

    def net(nid: str) -> NetInfo:
        if nid not in nl.nets:
            nl.nets[nid] = NetInfo()
        return nl.nets[nid]

    def set_driver(nid: str, who: tuple[str, str]):
        info = net(nid)
        if info.driver is not None and info.driver != who:
            raise MultipleDrivers(nid)
        info.driver = who

    ports = mod.get("ports")
    if not isinstance(ports, dict):
        raise NetlistFormatError("ports")
    for pname in sorted(ports):
        port = ports[pname]
        if "direction" not in port or "bits" not in port:
            raise NetlistFormatError(f"ports.{pname}")
        for bit in port["bits"]:
            nid = net_id(bit)
            if port["direction"] == "input":
                nl.inputs.append(nid)
                set_driver(nid, ("$port", pname))
            elif port["direction"] == "output":
                nl.outputs.append(nid)
                net(nid)
            else:
                raise NetlistFormatError(f"ports.{pname}", "inout ports unsupported")

    cells = mod.get("cells")
    if not isinstance(cells, dict):
        raise NetlistFormatError("cells")
    consts_used: set[str] = set()
    for cname in sorted(cells):
        cell = cells[cname]
        if "type" not in cell:
            raise NetlistFormatError(f"cells.{cname}.type")
        conns = cell.get("connections")
        dirs = cell.get("port_directions")
        if not isinstance(conns, dict):
            raise NetlistFormatError(f"cells.{cname}.connections")
        if not isinstance(dirs, dict):
            raise NetlistFormatError(f"cells.{cname}.port_directions")
        pin_map: dict[str, str] = {}
        for pin in sorted(conns):
            bits = conns[pin]
            if not isinstance(bits, list) or len(bits) != 1:
                raise NetlistFormatError(
                    f"cells.{cname}.connections.{pin}", "expected a single bit")
            nid = net_id(bits[0])
            if nid.startswith("const"):
                consts_used.add(nid)
            pin_map[pin] = nid
        inst = GateInstance(cname, cell["type"], pin_map)
        nl.instances.append(inst)
        for pin, nid in pin_map.items():
            direction = dirs.get(pin)
            if direction == "output":
                set_driver(nid, (cname, pin))
            else:
                net(nid).fanout.append((cname, pin))

    for nid in sorted(consts_used):
        pseudo = GateInstance(f"${nid}", CONST_CELLS_REV[nid], {"Y": nid})
        nl.instances.append(pseudo)
        set_driver(nid, (pseudo.name, "Y"))

    netnames = mod.get("netnames", {})
    for name in sorted(netnames):
        bits = netnames[name].get("bits", [])
        for i, bit in enumerate(bits):
            nid = net_id(bit)
            alias = name if len(bits) == 1 else f"{name}[{i}]"
            nl.net_names.setdefault(nid, []).append(alias)

    for nid, info in nl.nets.items():
        info.fanout.sort()
    return nl


CONST_CELLS_REV = {"const0": "CONST0", "const1": "CONST1", "constx": "CONSTX"}


def is_const_instance(inst: GateInstance) -> bool:
    return inst.cell in CONST_CELLS
