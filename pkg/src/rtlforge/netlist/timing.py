"""Static timing: longest combinational path delay over Liberty arcs.

Paths run from {primary inputs, sequential-cell outputs} to {primary
outputs, sequential-cell data inputs}; sequential cells break the timing
graph. Delay ties resolve toward the lexicographically smallest instance
name sequence.
"""

from __future__ import annotations

from rtlforge.errors import RtlforgeError
from rtlforge.netlist.gates import GateNetlist, is_const_instance
from rtlforge.netlist.liberty import LibertyLibrary


class TimingLoop(RtlforgeError):
    def __init__(self, cycle: list[str]):
        self.cycle = cycle
        super().__init__("combinational timing loop: " + " -> ".join(cycle))


def _timing_edges(n: GateNetlist, lib: LibertyLibrary):
    """Yield (from_net, to_net, delay, instance) for combinational arcs."""
    for inst in n.instances:
        if is_const_instance(inst):
            continue
        cell = lib.cell(inst.cell)
        if cell.is_sequential:
            continue
        for arc in cell.arcs:
            src = inst.pins.get(arc.from_pin)
            dst = inst.pins.get(arc.to_pin)
            if src is not None and dst is not None:
                yield src, dst, arc.delay, inst.name


def _endpoints(n: GateNetlist, lib: LibertyLibrary):
    starts: set[str] = set(n.inputs)
    ends: set[str] = set(n.outputs)
    for inst in n.instances:
        if is_const_instance(inst):
            continue
        cell = lib.cell(inst.cell)
        if not cell.is_sequential:
            continue
        for pin, net in inst.pins.items():
            p = cell.pin(pin)
            if p is None:
                continue
            if p.direction == "output":
                starts.add(net)
            elif pin in cell.data_pins:
                ends.add(net)
    return starts, ends


def compute_cpd(n: GateNetlist, lib: LibertyLibrary) -> tuple[float, list[str]]:
    """Critical path delay in ns plus the instance names along the path."""
    adj: dict[str, list[tuple[str, float, str]]] = {}
    for src, dst, delay, inst in _timing_edges(n, lib):
        adj.setdefault(src, []).append((dst, delay, inst))
    for edges in adj.values():
        edges.sort()

    starts, ends = _endpoints(n, lib)

    order = _net_topo_order(n, adj)

    # longest (delay, instance-sequence) arriving at each net
    best: dict[str, tuple[float, tuple[str, ...]]] = {}
    for s in sorted(starts):
        cand = (0.0, ())
        if s not in best or _better(cand, best[s]):
            best[s] = cand
    for net in order:
        if net not in best:
            continue
        d0, path0 = best[net]
        for dst, delay, inst in adj.get(net, []):
            cand = (d0 + delay, path0 + (inst,))
            if dst not in best or _better(cand, best[dst]):
                best[dst] = cand

    result: tuple[float, tuple[str, ...]] = (0.0, ())
    for net in sorted(ends):
        if net in best and _better(best[net], result):
            result = best[net]
    return result[0], list(result[1])


def _better(a: tuple[float, tuple[str, ...]], b: tuple[float, tuple[str, ...]]) -> bool:
    if a[0] != b[0]:
        return a[0] > b[0]
    return a[1] < b[1]


def _net_topo_order(n: GateNetlist,
                    adj: dict[str, list[tuple[str, float, str]]]) -> list[str]:
    indeg: dict[str, int] = {nid: 0 for nid in n.nets}
    for src, edges in adj.items():
        for dst, _, _ in edges:
            indeg[dst] = indeg.get(dst, 0) + 1
    ready = sorted(nid for nid, k in indeg.items() if k == 0)
    order: list[str] = []
    while ready:
        v = ready.pop(0)
        order.append(v)
        for dst, _, _ in adj.get(v, []):
            indeg[dst] -= 1
            if indeg[dst] == 0:
                ready.append(dst)
        ready.sort()
    if len(order) < len(indeg):
        cyclic = sorted(set(indeg) - set(order))
        names = []
        for nid in cyclic:
            aliases = n.net_names.get(nid)
            names.append(aliases[0] if aliases else nid)
        raise TimingLoop(names)
    return order
