import json

import pytest

from rtlforge.netlist import InvalidActivity, estimate_power, parse_netlist


def single_load_netlist(cap_pin="A"):
    """One named net 'n' driving one BUF input."""
    return parse_netlist(json.dumps({"modules": {"m": {
        "ports": {"n": {"direction": "input", "bits": [2]},
                  "y": {"direction": "output", "bits": [3]}},
        "cells": {"u0": {"type": "BUF",
                         "port_directions": {"A": "input", "Y": "output"},
                         "connections": {"A": [2], "Y": [3]}}},
        "netnames": {"n": {"bits": [2]}, "y": {"bits": [3]}}}}}))


def test_all_zero_rates_only_static(liberty):
    n = single_load_netlist()
    static, dynamic = estimate_power(n, liberty, {"n": 0.0, "y": 0.0}, 100.0)
    assert dynamic == 0.0
    assert static == pytest.approx(1.1)  # BUF leakage


def test_hand_computed_dynamic_power(liberty):
    # rate 0.5 on a 0.010 pF load at 1.0 V, 100 MHz -> 500 nW
    n = single_load_netlist()
    _, dynamic = estimate_power(n, liberty, {"n": 0.5, "y": 0.0}, 100.0)
    assert dynamic == pytest.approx(0.5 * 0.010e-12 * 1.0 * 100e6 * 1e9, rel=1e-12)
    assert dynamic == pytest.approx(500.0, rel=1e-12)


def test_default_rate_applies_to_unlisted_nets(liberty):
    n = single_load_netlist()
    _, dynamic = estimate_power(n, liberty, {}, 100.0)
    # default toggle rate 0.2 on the same load
    assert dynamic == pytest.approx(200.0, rel=1e-12)


def test_rate_out_of_range_rejected(liberty):
    n = single_load_netlist()
    with pytest.raises(InvalidActivity):
        estimate_power(n, liberty, {"n": 1.5}, 100.0)
    with pytest.raises(InvalidActivity):
        estimate_power(n, liberty, {"n": -0.1}, 100.0)


def test_monotone_in_every_rate(liberty):
    n = single_load_netlist()
    last = -1.0
    for rate in (0.0, 0.1, 0.3, 0.7, 1.0):
        _, dynamic = estimate_power(n, liberty, {"n": rate, "y": 0.0}, 100.0)
        assert dynamic >= last
        last = dynamic


def test_clock_pins_excluded(liberty):
    n = parse_netlist(json.dumps({"modules": {"m": {
        "ports": {"clk": {"direction": "input", "bits": [2]},
                  "d": {"direction": "input", "bits": [3]},
                  "q": {"direction": "output", "bits": [4]}},
        "cells": {"r0": {"type": "DFF",
                         "port_directions": {"CLK": "input", "D": "input",
                                             "Q": "output"},
                         "connections": {"CLK": [2], "D": [3], "Q": [4]}}},
        "netnames": {"clk": {"bits": [2]}, "d": {"bits": [3]}, "q": {"bits": [4]}}}}}))
    _, dyn_idle = estimate_power(n, liberty, {"clk": 1.0, "d": 0.0, "q": 0.0}, 100.0)
    assert dyn_idle == 0.0  # clock pin capacitance carries no budget here


def test_gated_lower_than_free_running(liberty, replay_tools, liberty_text):
    from pathlib import Path
    from rtlforge.frontend.syntax import VerilogSource
    from rtlforge.tools.vcd import activity_from_vcd, parse_vcd

    sample = Path(__file__).resolve().parent.parent / "sample_data" / "powerpair"
    tc = replay_tools.toolchain()
    gated = VerilogSource((sample / "gated.v").read_text(), "gated")
    free = VerilogSource((sample / "free.v").read_text(), "free")
    tb = VerilogSource((sample / "tb_duty10.v").read_text(), "tb")
    net_g = parse_netlist(tc.synthesize_design(gated, liberty_text)[0])
    net_f = parse_netlist(tc.synthesize_design(free, liberty_text)[0])
    act_g = activity_from_vcd(parse_vcd(tc.simulate_sources([gated, tb], ["q"], 512).vcd_text))
    act_f = activity_from_vcd(parse_vcd(tc.simulate_sources([free, tb], ["q"], 512).vcd_text))
    total_g = sum(estimate_power(net_g, liberty, act_g, 100.0))
    total_f = sum(estimate_power(net_f, liberty, act_f, 100.0))
    assert total_g < total_f
