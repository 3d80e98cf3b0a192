import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from rtlforge.api import create_app

SAMPLE = Path(__file__).resolve().parent.parent / "sample_data"


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def _triple(tid):
    d = SAMPLE / "triples" / tid
    return {name: (d / f"{name}.v").read_text() for name in ("unopt", "opt_ref", "tb")}


def test_health(client):
    body = client.get("/health").json()
    assert body["status"] == "ok"


def test_dfg_endpoint(client):
    source = "module dff(input clk, input d, output reg q);\n" \
             "  always @(posedge clk) q <= d;\nendmodule"
    response = client.post("/dfg", json={"source": source})
    assert response.status_code == 200
    schema = response.json()["schema_text"]
    assert "NODE 0 INPUT d" in schema
    assert schema.strip().splitlines()[-1].startswith("LONGEST_COMB_PATH")


def test_dfg_endpoint_rejects_bad_source(client):
    response = client.post("/dfg", json={"source": "module broken("})
    assert response.status_code == 422
    assert "detail" in response.json()


def test_sta_endpoint(client, liberty_text):
    netlist = json.dumps({"modules": {"m": {
        "ports": {"a": {"direction": "input", "bits": [2]},
                  "y": {"direction": "output", "bits": [4]}},
        "cells": {
            "u0": {"type": "INV", "port_directions": {"A": "input", "Y": "output"},
                   "connections": {"A": [2], "Y": [3]}},
            "u1": {"type": "BUF", "port_directions": {"A": "input", "Y": "output"},
                   "connections": {"A": [3], "Y": [4]}}},
        "netnames": {}}}})
    response = client.post("/sta", json={
        "netlist_json": netlist, "liberty_text": liberty_text})
    assert response.status_code == 200
    body = response.json()
    assert body["cpd"] == pytest.approx(0.08)
    assert body["critical_path"] == ["u0", "u1"]
    assert body["total_power"] == pytest.approx(
        body["static_power"] + body["dynamic_power"])


def test_evaluate_endpoint(client, liberty_text):
    files = _triple("mul8_pipe")
    response = client.post("/evaluate", json={
        "unoptimized": files["unopt"],
        "candidate": files["opt_ref"],
        "testbench": files["tb"],
        "liberty_text": liberty_text,
        "goal": {"kind": "pipelining", "min_timing_gain": 20.0,
                 "max_area_ratio": 3.0},
        "tools": {"fixtures": "replay", "fixture_dir": str(SAMPLE / "fixtures")},
    })
    assert response.status_code == 200
    body = response.json()
    assert body["stage_reached"] == "COMPLETE"
    assert body["latency_shift"] == 2
    assert body["ppa"]["goals_met"] is True


def test_optimize_endpoint(client, liberty_text, convergence_script):
    files = _triple("mul8_pipe")
    response = client.post("/optimize", json={
        "unoptimized": files["unopt"],
        "testbench": files["tb"],
        "goal": {"kind": "pipelining", "min_timing_gain": 20.0,
                 "max_area_ratio": 3.0},
        "liberty_text": liberty_text,
        "script": convergence_script,
        "tools": {"fixtures": "replay", "fixture_dir": str(SAMPLE / "fixtures")},
        "max_iters": 8,
        "triple_id": "mul8_pipe",
    })
    assert response.status_code == 200
    body = response.json()
    assert body["verdict"] == "SUCCESS"
    assert body["routes"] == ["SYNTAX", "FUNCTIONAL", "NONE"]
