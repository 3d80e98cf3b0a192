"""Optimization goals shared across agents, evaluation, and the harness."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum


class OptimizationKind(Enum):
    PIPELINING = "pipelining"
    CLOCK_GATING = "clock_gating"


@dataclass(frozen=True)
class GoalSpec:
    kind: OptimizationKind
    min_timing_gain: float = 10.0     # percent, pipelining
    min_power_gain: float = 10.0      # percent, clock gating
    max_area_ratio: float = 1.10
    max_latency_shift: int = 8        # cycles

    def __post_init__(self):
        for value in (self.min_timing_gain, self.min_power_gain, self.max_area_ratio):
            if not math.isfinite(value):
                raise ValueError("goal thresholds must be finite")
        if self.max_area_ratio <= 0:
            raise ValueError("max_area_ratio must be positive")
        if self.max_latency_shift < 0:
            raise ValueError("max_latency_shift must be non-negative")

    def with_overrides(self, **kw) -> "GoalSpec":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def primary_metric(self) -> str:
        return "timing_gain" if self.kind is OptimizationKind.PIPELINING else "power_gain"

    def describe(self) -> str:
        if self.kind is OptimizationKind.PIPELINING:
            head = f"pipelining with timing gain >= {self.min_timing_gain:g}%"
        else:
            head = f"clock gating with power gain >= {self.min_power_gain:g}%"
        return f"{head}, area ratio <= {self.max_area_ratio:g}"
