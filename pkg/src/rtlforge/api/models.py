"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str
    version: str


class DfgRequest(BaseModel):
    source: str = Field(min_length=1, description="Verilog module text")
    origin: str = "api"


class DfgResponse(BaseModel):
    schema_text: str


class StaRequest(BaseModel):
    netlist_json: str = Field(min_length=1)
    liberty_text: str = Field(min_length=1)
    activity: Optional[dict[str, float]] = None
    f_clk_mhz: float = 100.0


class StaResponse(BaseModel):
    area: float
    cpd: float
    static_power: float
    dynamic_power: float
    total_power: float
    critical_path: list[str]
    register_count: int


class GoalOptions(BaseModel):
    kind: str = Field(pattern="^(pipelining|clock_gating)$")
    min_timing_gain: Optional[float] = None
    min_power_gain: Optional[float] = None
    max_area_ratio: Optional[float] = None
    max_latency_shift: Optional[int] = None


class ToolOptions(BaseModel):
    fixtures: str = Field(default="off", pattern="^(off|record|replay)$")
    fixture_dir: Optional[str] = None


class EvaluateRequest(BaseModel):
    unoptimized: str = Field(min_length=1)
    candidate: str = Field(min_length=1)
    testbench: str = Field(min_length=1)
    liberty_text: str = Field(min_length=1)
    goal: GoalOptions
    tools: ToolOptions = ToolOptions()
    clock: str = "clk"


class EvaluateResponse(BaseModel):
    stage_reached: str
    syntax_errors: list[tuple[int, int, str]]
    warnings: list[tuple[int, int, str]]
    functional_mismatches: list[tuple[str, int, str, str]]
    ppa: Optional[dict] = None
    latency_shift: int
    notes: list[str]


class OptimizeRequest(BaseModel):
    unoptimized: str = Field(min_length=1)
    testbench: str = Field(min_length=1)
    goal: GoalOptions
    liberty_text: str = Field(min_length=1)
    script: dict
    tools: ToolOptions = ToolOptions()
    max_iters: int = Field(default=8, ge=1)
    k_examples: int = Field(default=2, ge=0)
    seed: int = 0
    dialectic: str = Field(default="full", pattern="^(full|merged|off)$")
    triple_id: str = "inline"
    clock: str = "clk"


class OptimizeResponse(BaseModel):
    triple_id: str
    verdict: str
    routes: list[str]
    iterations: list[dict]
    final_metrics: Optional[dict] = None
    notes: list[str]
    seed: int


class ErrorResponse(BaseModel):
    detail: str
