"""Metric formulas and aggregate statistics.

Area is reported relative to baseline (A/A0); timing and power improvements
are percentage gains against baseline; failure rate is the fraction of
designs whose optimization run did not succeed. Aggregates are mean and
sample standard deviation across repeated runs, compared with paired
t-tests whose p-values come from an in-repo regularized incomplete beta
(continued-fraction evaluation, no external statistics dependency).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from rtlforge.errors import RtlforgeError


class ZeroBaseline(RtlforgeError):
    def __init__(self, what: str):
        super().__init__(f"baseline {what} must be positive")


class EmptyList(RtlforgeError):
    pass


class DegenerateInput(RtlforgeError):
    pass


def area_ratio(a: float, a0: float) -> float:
    if a0 <= 0:
        raise ZeroBaseline("area")
    return a / a0


def timing_gain(cpd: float, cpd0: float) -> float:
    """Percent reduction of critical path delay; negative for regressions."""
    if cpd0 <= 0:
        raise ZeroBaseline("critical path delay")
    return (cpd0 - cpd) / cpd0 * 100.0


def power_gain(p: float, p0: float) -> float:
    if p0 <= 0:
        raise ZeroBaseline("power")
    return (p0 - p) / p0 * 100.0


def failure_rate(outcomes) -> float:
    """Percent of outcomes whose verdict is anything but SUCCESS."""
    items = list(outcomes)
    if not items:
        raise EmptyList("failure_rate requires at least one outcome")
    failed = 0
    for item in items:
        verdict = getattr(item, "verdict", item)
        name = getattr(verdict, "name", str(verdict))
        if name != "SUCCESS":
            failed += 1
    return 100.0 * failed / len(items)


@dataclass(frozen=True)
class MetricSet:
    area_ratio: float | None
    timing_gain: float | None
    power_gain: float | None
    passed: bool

    def __post_init__(self):
        if self.area_ratio is not None and self.area_ratio <= 0:
            raise ValueError("area_ratio must be positive when present")
        for value in (self.timing_gain, self.power_gain):
            if value is not None and not math.isfinite(value):
                raise ValueError("gains must be finite")


@dataclass(frozen=True)
class MetricSummary:
    mean: float
    std: float
    n: int


@dataclass(frozen=True)
class AggregateStats:
    stats: dict[str, MetricSummary]
    fr: float

    def __post_init__(self):
        if not 0.0 <= self.fr <= 100.0:
            raise ValueError("failure rate outside [0, 100]")


def summarize(values: list[float]) -> MetricSummary:
    """Mean and sample (n-1) standard deviation; a single value has std 0."""
    if not values:
        raise EmptyList("summarize requires at least one value")
    n = len(values)
    mean = math.fsum(values) / n
    if n == 1:
        return MetricSummary(mean, 0.0, 1)
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    return MetricSummary(mean, math.sqrt(var), n)


def aggregate_stats(run_groups: list[list[MetricSet]]) -> AggregateStats:
    """Aggregate repeated runs: each group is one run's per-design metrics.

    A run's value for a metric is the mean over designs where it was
    measured; FR per run counts all designs. Summaries are across runs.
    """
    if not run_groups or any(not g for g in run_groups):
        raise EmptyList("aggregate_stats requires nonempty run groups")
    per_run: dict[str, list[float]] = {
        "area_ratio": [], "timing_gain": [], "power_gain": [], "fr": []}
    for group in run_groups:
        for metric in ("area_ratio", "timing_gain", "power_gain"):
            values = [getattr(m, metric) for m in group if getattr(m, metric) is not None]
            if values:
                per_run[metric].append(math.fsum(values) / len(values))
        per_run["fr"].append(100.0 * sum(1 for m in group if not m.passed) / len(group))
    stats = {name: summarize(values)
             for name, values in per_run.items() if values}
    return AggregateStats(stats=stats, fr=stats["fr"].mean)


@dataclass(frozen=True)
class TTestResult:
    t: float
    df: int
    p: float

    def __post_init__(self):
        if self.df < 1:
            raise ValueError("df must be >= 1")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p outside [0, 1]")


def paired_t_test(x: list[float], y: list[float]) -> TTestResult:
    """Two-sided paired t-test on matched samples."""
    if len(x) != len(y):
        raise ValueError("paired samples must have equal length")
    if len(x) < 2:
        raise ValueError("need at least two pairs")
    diffs = [a - b for a, b in zip(x, y)]
    n = len(diffs)
    mean = math.fsum(diffs) / n
    var = math.fsum((d - mean) ** 2 for d in diffs) / (n - 1)
    if var == 0.0:
        raise DegenerateInput("all paired differences are equal")
    sem = math.sqrt(var / n)
    t = mean / sem
    df = n - 1
    return TTestResult(t=t, df=df, p=student_t_p_value(t, df))


def student_t_p_value(t: float, df: int) -> float:
    """Two-sided p-value from the Student-t distribution."""
    if df < 1:
        raise ValueError("df must be >= 1")
    x = df / (df + t * t)
    return min(1.0, max(0.0, regularized_incomplete_beta(df / 2.0, 0.5, x)))


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) via the symmetric continued-fraction evaluation."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, 1.0 - x) / b


def _beta_cf(a: float, b: float, x: float, max_iter: int = 300,
             eps: float = 1e-15) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    tiny = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            return h
    return h
