import math
import random
import time

import pytest

from rtlforge.loop import Verdict
from rtlforge.metrics import (
    AggregateStats,
    DegenerateInput,
    EmptyList,
    MetricSet,
    ZeroBaseline,
    aggregate_stats,
    area_ratio,
    failure_rate,
    paired_t_test,
    power_gain,
    student_t_p_value,
    summarize,
    timing_gain,
)


def test_area_ratio_basics():
    assert area_ratio(5.0, 5.0) == 1.0
    assert area_ratio(96.0, 100.0) == pytest.approx(0.960)
    with pytest.raises(ZeroBaseline):
        area_ratio(1.0, 0.0)


def test_timing_gain_basics():
    assert timing_gain(100.0, 100.0) == 0.0
    assert timing_gain(74.5, 100.0) == pytest.approx(25.5)
    assert timing_gain(120.0, 100.0) == pytest.approx(-20.0)
    with pytest.raises(ZeroBaseline):
        timing_gain(1.0, 0.0)


def test_power_gain_basics():
    assert power_gain(1000.0, 1000.0) == 0.0
    assert power_gain(783.0, 1000.0) == pytest.approx(21.7)
    assert power_gain(0.0, 500.0) == 100.0


def test_identity_cases_are_exact():
    for value in (0.3, 1.0, 7.25, 1234.5):
        assert area_ratio(value, value) == 1.0
        assert timing_gain(value, value) == 0.0
        assert power_gain(value, value) == 0.0
    assert power_gain(0.0, 123.0) == 100.0


def test_formula_oracle_randomized():
    # test-side reimplementation of the ratio/gain definitions
    rng = random.Random(2024)
    started = time.monotonic()
    for _ in range(1000):
        a = rng.uniform(0.1, 1e4)
        a0 = rng.uniform(0.1, 1e4)
        p = rng.uniform(0.1, 2e4)
        p0 = rng.uniform(0.1, 2e4)
        cpd = rng.uniform(0.1, 1.6e3)
        cpd0 = rng.uniform(0.1, 1.6e3)
        assert math.isclose(area_ratio(a, a0), a / a0, rel_tol=1e-12)
        assert math.isclose(timing_gain(cpd, cpd0),
                            (cpd0 - cpd) / cpd0 * 100.0, rel_tol=1e-12)
        assert math.isclose(power_gain(p, p0),
                            (p0 - p) / p0 * 100.0, rel_tol=1e-12)
    assert time.monotonic() - started < 1.0


def test_failure_rate():
    ok = type("O", (), {"verdict": Verdict.SUCCESS})()
    bad = type("O", (), {"verdict": Verdict.FAIL_SYNTAX})()
    assert failure_rate([ok, ok]) == 0.0
    assert failure_rate([bad] * 4) == 100.0
    outcomes = [bad] * 39 + [ok] * 161
    assert failure_rate(outcomes) == pytest.approx(19.5)
    # permutation invariance
    rng = random.Random(1)
    for _ in range(5):
        rng.shuffle(outcomes)
        assert failure_rate(outcomes) == pytest.approx(19.5)
    with pytest.raises(EmptyList):
        failure_rate([])


def test_summarize_single_and_identical():
    s = summarize([4.2])
    assert s.mean == 4.2 and s.std == 0.0 and s.n == 1
    s = summarize([3.0, 3.0, 3.0])
    assert s.std == 0.0


def test_summarize_two_pass_oracle():
    values = [24.3, 25.5, 26.7, 25.1, 25.9]
    s = summarize(values)
    mean = sum(values) / len(values)
    var = sum((v - mean) ** 2 for v in values) / (len(values) - 1)
    assert s.mean == pytest.approx(25.5)
    assert s.std == pytest.approx(math.sqrt(var), rel=1e-12)
    assert s.n == 5


def test_aggregate_stats_five_run_grouping():
    runs = []
    for gain in (24.3, 25.5, 26.7, 25.1, 25.9):
        runs.append([MetricSet(0.96, gain, None, True),
                     MetricSet(1.01, gain + 1.0, None, False)])
    stats = aggregate_stats(runs)
    assert stats.stats["timing_gain"].n == 5
    assert stats.stats["timing_gain"].mean == pytest.approx(26.0)
    assert stats.fr == pytest.approx(50.0)
    # presentation format used by the summary table
    s = stats.stats["timing_gain"]
    assert f"{s.mean:.1f} ± {s.std:.1f}" == "26.0 ± 0.9"


def test_aggregate_stats_empty_rejected():
    with pytest.raises(EmptyList):
        aggregate_stats([])


# --- paired t-test ---


def test_t_test_identical_inputs_degenerate():
    with pytest.raises(DegenerateInput):
        paired_t_test([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])


def test_t_test_known_value():
    r = paired_t_test([2.0, 2.0, 2.0, 2.0, 3.0], [1.0, 1.0, 1.0, 1.0, 1.0])
    assert r.t == pytest.approx(6.0, rel=1e-12)
    assert r.df == 4


def test_t_test_symmetric_case():
    r = paired_t_test([0.0, 2.0], [1.0, 1.0])
    assert r.t == 0.0 and r.p == 1.0


def test_t_test_antisymmetry():
    x = [5.0, 4.0, 6.0, 5.5]
    y = [4.0, 4.2, 5.1, 5.0]
    fwd = paired_t_test(x, y)
    rev = paired_t_test(y, x)
    assert fwd.t == pytest.approx(-rev.t, rel=1e-15)
    assert fwd.p == pytest.approx(rev.p, rel=1e-15)


def test_t_test_against_reference_vectors(ttest_reference):
    for vec in ttest_reference["vectors"]:
        r = paired_t_test(vec["x"], vec["y"])
        assert r.df == vec["df"]
        assert r.t == pytest.approx(vec["t"], rel=1e-9, abs=1e-9)
        assert r.p == pytest.approx(vec["p"], abs=1e-6)


def test_p_values_match_cdf_table(ttest_reference):
    for row in ttest_reference["cdf_table"]:
        p = student_t_p_value(row["t"], row["df"])
        assert p == pytest.approx(row["p"], abs=1e-6), (row["t"], row["df"])


def test_aggregate_stats_bounds():
    with pytest.raises(ValueError):
        AggregateStats(stats={}, fr=101.0)
