import json
import random

import pytest

from rtlforge.netlist import TimingLoop, compute_cpd, parse_netlist
from sta_oracle import COMB_CELLS, oracle_cpd, random_netlist


def chain_netlist(kinds):
    """input -> cell -> cell -> ... -> output, single-input pins only."""
    nets = list(range(2, 3 + len(kinds)))
    cells = {}
    for i, kind in enumerate(kinds):
        pins = COMB_CELLS[kind][0]
        conns = {"Y": [nets[i + 1]]}
        dirs = {"Y": "output"}
        for p in pins:
            conns[p] = [nets[i]]
            dirs[p] = "input"
        cells[f"u{i}"] = {"type": kind, "port_directions": dirs, "connections": conns}
    return json.dumps({"modules": {"m": {
        "ports": {"a": {"direction": "input", "bits": [nets[0]]},
                  "y": {"direction": "output", "bits": [nets[-1]]}},
        "cells": cells, "netnames": {}}}})


def test_two_arc_chain(liberty):
    n = parse_netlist(chain_netlist(["INV", "BUF"]))
    cpd, path = compute_cpd(n, liberty)
    assert cpd == pytest.approx(0.08, abs=1e-12)
    assert path == ["u0", "u1"]


def test_purely_sequential_gives_zero(liberty):
    text = json.dumps({"modules": {"m": {
        "ports": {"clk": {"direction": "input", "bits": [2]},
                  "d": {"direction": "input", "bits": [3]},
                  "q": {"direction": "output", "bits": [4]}},
        "cells": {"r0": {"type": "DFF",
                         "port_directions": {"CLK": "input", "D": "input",
                                             "Q": "output"},
                         "connections": {"CLK": [2], "D": [3], "Q": [4]}}},
        "netnames": {}}}})
    n = parse_netlist(text)
    cpd, path = compute_cpd(n, liberty)
    assert cpd == 0.0 and path == []


def test_cpd_matches_enumeration_oracle_on_random_netlists(liberty):
    rng = random.Random(42)
    for _ in range(50):
        n = parse_netlist(random_netlist(rng))
        cpd, path = compute_cpd(n, liberty)
        exp_cpd, exp_path = oracle_cpd(n, liberty)
        assert cpd == pytest.approx(exp_cpd, abs=1e-9)
        assert tuple(path) == exp_path


def test_pipelined_fixture_shorter_than_unpipelined(liberty, replay_tools,
                                                    manifest, liberty_text):
    tc = replay_tools.toolchain()
    triple = manifest.by_id("mul8_pipe")
    base = parse_netlist(tc.synthesize_design(triple.unoptimized, liberty_text)[0])
    piped = parse_netlist(tc.synthesize_design(triple.reference_optimized,
                                               liberty_text)[0])
    cpd_base, _ = compute_cpd(base, liberty)
    cpd_piped, _ = compute_cpd(piped, liberty)
    assert cpd_piped < cpd_base
    # both agree with the enumeration oracle
    assert cpd_piped == pytest.approx(oracle_cpd(piped, liberty)[0], abs=1e-9)


def test_register_on_critical_path_never_increases_cpd(liberty):
    # chain fixtures: splitting a chain with a DFF can only shorten the path
    for split in range(1, 5):
        kinds = ["INV", "BUF", "INV", "BUF", "INV"]
        whole = parse_netlist(chain_netlist(kinds))
        cpd_whole, _ = compute_cpd(whole, liberty)

        nets = list(range(2, 3 + len(kinds)))
        cells = {}
        for i, kind in enumerate(kinds):
            cells[f"u{i}"] = {
                "type": kind,
                "port_directions": {"A": "input", "Y": "output"},
                "connections": {"A": [nets[i]], "Y": [nets[i + 1]]}}
        # insert a register after position `split`
        reg_out = 90
        cells[f"u{split}"]["connections"]["A"] = [reg_out]
        cells["r"] = {"type": "DFF",
                      "port_directions": {"CLK": "input", "D": "input", "Q": "output"},
                      "connections": {"CLK": [99], "D": [nets[split]], "Q": [reg_out]}}
        text = json.dumps({"modules": {"m": {
            "ports": {"a": {"direction": "input", "bits": [nets[0]]},
                      "clk": {"direction": "input", "bits": [99]},
                      "y": {"direction": "output", "bits": [nets[-1]]}},
            "cells": cells, "netnames": {}}}})
        cpd_split, _ = compute_cpd(parse_netlist(text), liberty)
        assert cpd_split <= cpd_whole + 1e-12


def test_timing_loop_detected(liberty):
    text = json.dumps({"modules": {"m": {
        "ports": {"a": {"direction": "input", "bits": [2]}},
        "cells": {
            "u0": {"type": "INV", "port_directions": {"A": "input", "Y": "output"},
                   "connections": {"A": [3], "Y": [4]}},
            "u1": {"type": "INV", "port_directions": {"A": "input", "Y": "output"},
                   "connections": {"A": [4], "Y": [3]}}},
        "netnames": {"loop_a": {"bits": [3]}, "loop_b": {"bits": [4]}}}}})
    n = parse_netlist(text)
    with pytest.raises(TimingLoop) as err:
        compute_cpd(n, liberty)
    assert "loop_a" in err.value.cycle or "loop_b" in err.value.cycle
