"""FastAPI service wrapping the core package."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

import rtlforge
from rtlforge import service
from rtlforge.api.models import (
    DfgRequest,
    DfgResponse,
    EvaluateRequest,
    EvaluateResponse,
    GoalOptions,
    HealthResponse,
    OptimizeRequest,
    OptimizeResponse,
    StaRequest,
    StaResponse,
    ToolOptions,
)
from rtlforge.errors import RtlforgeError
from rtlforge.goals import GoalSpec
from rtlforge.loop import DialecticMode, RunConfig


def _goal(options: GoalOptions) -> GoalSpec:
    return service.goal_from_options(
        options.kind,
        min_timing_gain=options.min_timing_gain,
        min_power_gain=options.min_power_gain,
        max_area_ratio=options.max_area_ratio,
        max_latency_shift=options.max_latency_shift,
    )


def _tools(options: ToolOptions) -> service.ToolSettings:
    return service.ToolSettings(fixtures=options.fixtures,
                                fixture_dir=options.fixture_dir)


def create_app() -> FastAPI:
    app = FastAPI(
        title="rtlforge",
        description="Closed-loop RTL optimization service: dataflow extraction, "
                    "netlist PPA evaluation, candidate assessment, and the full "
                    "optimization loop.",
        version=rtlforge.__version__,
    )

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=rtlforge.__version__)

    @app.post("/dfg", response_model=DfgResponse)
    def dfg(request: DfgRequest) -> DfgResponse:
        try:
            return DfgResponse(schema_text=service.dfg_schema_text(
                request.source, request.origin))
        except RtlforgeError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None

    @app.post("/sta", response_model=StaResponse)
    def sta(request: StaRequest) -> StaResponse:
        try:
            report = service.sta_report(request.netlist_json, request.liberty_text,
                                        request.activity, request.f_clk_mhz)
        except RtlforgeError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        return StaResponse(**report)

    @app.post("/evaluate", response_model=EvaluateResponse)
    def evaluate(request: EvaluateRequest) -> EvaluateResponse:
        try:
            report = service.evaluate_candidate(
                request.unoptimized, request.candidate, request.testbench,
                request.liberty_text, _goal(request.goal), _tools(request.tools),
                clock=request.clock)
        except RtlforgeError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        return EvaluateResponse(**report)

    @app.post("/optimize", response_model=OptimizeResponse)
    def optimize(request: OptimizeRequest) -> OptimizeResponse:
        try:
            goal = _goal(request.goal)
            cfg = RunConfig(goal=goal, max_iters=request.max_iters,
                            k_examples=request.k_examples, seed=request.seed,
                            dialectic_mode=DialecticMode(request.dialectic))
            summary = service.optimize_inline(
                request.unoptimized, request.testbench, request.goal.kind,
                request.liberty_text, request.script, cfg, _tools(request.tools),
                triple_id=request.triple_id, clock=request.clock)
        except RtlforgeError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        return OptimizeResponse(**summary)

    return app


app = create_app()
