"""Exhaustive-enumeration timing oracle and random netlist builder.

Shared between the STA unit tests and the acceptance suite; the oracle
deliberately reimplements path search by brute force so it stays
independent of the production DP implementation.
"""

import json
import random

COMB_CELLS = {
    "INV": (["A"], 0.05), "BUF": (["A"], 0.03), "AND2": (["A", "B"], None),
    "OR2": (["A", "B"], None), "XOR2": (["A", "B"], None),
    "NAND2": (["A", "B"], None), "NOR2": (["A", "B"], None),
    "MUX2": (["A", "B", "S"], None), "XNOR2": (["A", "B"], None),
}


def oracle_cpd(n, lib):
    """Exhaustive DFS path enumeration with the same endpoint and tie rules."""
    from rtlforge.netlist.timing import _endpoints, _timing_edges
    adj = {}
    for src, dst, delay, inst in _timing_edges(n, lib):
        adj.setdefault(src, []).append((dst, delay, inst))
    starts, ends = _endpoints(n, lib)
    best = (0.0, ())

    def walk(net, delay, path):
        nonlocal best
        if net in ends and path:
            cand = (delay, tuple(path))
            if cand[0] > best[0] + 1e-15 or (abs(cand[0] - best[0]) <= 1e-15
                                             and cand[1] < best[1]):
                best = cand
        for dst, d, inst in adj.get(net, []):
            walk(dst, delay + d, path + [inst])

    for s in sorted(starts):
        walk(s, 0.0, [])
    return best


def random_netlist(rng, max_cells=40):
    """Random acyclic netlist over the demo library, DFFs included."""
    kinds = list(COMB_CELLS) + ["DFF", "DFF"]
    n_cells = rng.randint(3, max_cells)
    nets = [2, 3, 4]  # primary inputs
    clk = 100000
    cells = {}
    outputs = []
    for i in range(n_cells):
        kind = rng.choice(kinds)
        out = 5 + i
        if kind == "DFF":
            d = rng.choice(nets)
            cells[f"u{i:03d}"] = {
                "type": "DFF",
                "port_directions": {"CLK": "input", "D": "input", "Q": "output"},
                "connections": {"CLK": [clk], "D": [d], "Q": [out]}}
        else:
            pins = COMB_CELLS[kind][0]
            conns = {"Y": [out]}
            dirs = {"Y": "output"}
            for p in pins:
                conns[p] = [rng.choice(nets)]
                dirs[p] = "input"
            cells[f"u{i:03d}"] = {"type": kind, "port_directions": dirs,
                                  "connections": conns}
        nets.append(out)
        if rng.random() < 0.3:
            outputs.append(out)
    if not outputs:
        outputs = [nets[-1]]
    ports = {"i0": {"direction": "input", "bits": [2]},
             "i1": {"direction": "input", "bits": [3]},
             "i2": {"direction": "input", "bits": [4]},
             "clk": {"direction": "input", "bits": [clk]}}
    for k, out in enumerate(dict.fromkeys(outputs)):
        ports[f"o{k}"] = {"direction": "output", "bits": [out]}
    return json.dumps({"modules": {"m": {"ports": ports, "cells": cells,
                                         "netnames": {}}}})


