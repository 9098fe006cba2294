import functools
import itertools
import math

import numpy as np
import pytest
from scipy.stats import binom, binomtest, fisher_exact, norm

from ivfalsify.exception import ConfigurationError, ParameterError
from ivfalsify.inequality import CELLS, TwoByTwo, q_table, u_stat
from ivfalsify.tabulate import JointCounts
from ivfalsify.twobytwo import (
    TestMethod,
    berger_boos,
    boschloo_exact,
    clopper_pearson,
    fisher_one_sided,
    resolve_method,
    run_test,
    wald_one_sided,
)

ORACLE_STEP = 1e-4


def _oracle_fisher(a: int, n1: int, b: int, n0: int) -> float:
    return fisher_exact([[a, n1 - a], [b, n0 - b]], alternative="greater")[1]


def _oracle_supremum(t: TwoByTwo, lower: float = 0.0, upper: float = 1.0) -> float:
    """Enumerate every table, then maximise the rejection probability over a fine grid of the nuisance."""
    observed = _oracle_fisher(t.x1, t.n1, t.x0, t.n0)
    region = np.array(
        [[_oracle_fisher(a, t.n1, b, t.n0) <= observed * (1 + 1e-7) for b in range(t.n0 + 1)] for a in range(t.n1 + 1)],
        dtype=float,
    )

    def tail(grid: np.ndarray) -> np.ndarray:
        pmf1 = binom.pmf(np.arange(t.n1 + 1)[None, :], t.n1, grid[:, None])
        pmf0 = binom.pmf(np.arange(t.n0 + 1)[None, :], t.n0, grid[:, None])
        return np.einsum("ga,ab,gb->g", pmf1, region, pmf0)

    grid = np.arange(lower, upper + ORACLE_STEP / 2, ORACLE_STEP)
    grid = np.clip(np.append(grid, upper), lower, upper)
    values = tail(grid)
    best = grid[int(np.argmax(values))]
    fine = np.clip(np.linspace(best - ORACLE_STEP, best + ORACLE_STEP, 201), lower, upper)
    return float(min(1.0, max(values.max(), tail(fine).max())))


def _oracle_interval(x: int, n: int, gamma: float) -> tuple[float, float]:
    interval = binomtest(x, n).proportion_ci(confidence_level=1 - gamma, method="exact")
    return interval.low, interval.high


def test_wald_statistic_and_p_value():
    result = wald_one_sided(TwoByTwo(x1=60, n1=100, x0=40, n0=100))
    se = math.sqrt(0.6 * 0.4 / 100 + 0.4 * 0.6 / 100)
    assert result.statistic == pytest.approx(0.2 / se)
    assert result.p_value == pytest.approx(norm.sf(0.2 / se))
    assert result.method == TestMethod.WALD


@pytest.mark.parametrize(
    ("table", "p_value", "statistic"),
    [
        (TwoByTwo(x1=10, n1=10, x0=0, n0=10), 0.0, math.inf),
        (TwoByTwo(x1=0, n1=10, x0=10, n0=10), 1.0, -math.inf),
        (TwoByTwo(x1=10, n1=10, x0=5, n0=5), 1.0, 0.0),
        (TwoByTwo(x1=0, n1=3, x0=0, n0=7), 1.0, 0.0),
    ],
)
def test_wald_degenerate_arms(table, p_value, statistic):
    result = wald_one_sided(table)
    assert result.p_value == p_value
    assert result.statistic == statistic


def test_fisher_matches_scipy():
    for x1, n1, x0, n0 in [(7, 10, 2, 12), (0, 5, 5, 5), (3, 3, 0, 4), (12, 40, 15, 41)]:
        assert fisher_one_sided(TwoByTwo(x1=x1, n1=n1, x0=x0, n0=n0)) == pytest.approx(
            _oracle_fisher(x1, n1, x0, n0), rel=1e-9
        )


def test_boschloo_is_never_less_powerful_than_fisher():
    for x1, x0 in itertools.product(range(6), range(6)):
        t = TwoByTwo(x1=x1, n1=5, x0=x0, n0=5)
        assert boschloo_exact(t).p_value <= fisher_one_sided(t) + 1e-9


@pytest.mark.parametrize(("x1", "n1", "x0", "n0"), [(7, 8, 1, 8), (4, 6, 3, 7), (0, 4, 4, 4), (5, 5, 0, 3)])
def test_boschloo_matches_enumeration_oracle(x1, n1, x0, n0):
    t = TwoByTwo(x1=x1, n1=n1, x0=x0, n0=n0)
    result = boschloo_exact(t)
    assert result.p_value == pytest.approx(_oracle_supremum(t), abs=1e-3)
    assert result.statistic == pytest.approx(fisher_one_sided(t))
    assert result.method == TestMethod.BOSCHLOO


def test_boschloo_extreme_tables():
    assert boschloo_exact(TwoByTwo(x1=0, n1=6, x0=6, n0=6)).p_value == pytest.approx(1.0)
    assert boschloo_exact(TwoByTwo(x1=20, n1=20, x0=0, n0=20)).p_value < 1e-6


@pytest.mark.slow
def test_boschloo_and_berger_boos_match_oracle_on_all_small_tables():
    gamma = 0.001
    for n1, n0 in itertools.product(range(1, 9), repeat=2):
        for x1, x0 in itertools.product(range(n1 + 1), range(n0 + 1)):
            t = TwoByTwo(x1=x1, n1=n1, x0=x0, n0=n0)
            assert boschloo_exact(t).p_value == pytest.approx(_oracle_supremum(t), abs=1e-3), t

            lower, upper = _oracle_interval(x1 + x0, n1 + n0, gamma)
            expected = min(1.0, gamma + _oracle_supremum(t, lower, upper))
            assert berger_boos(t, gamma).p_value == pytest.approx(expected, abs=1e-3), t


def test_clopper_pearson_matches_exact_binomial_interval():
    assert clopper_pearson(5, 10, 0.05) == pytest.approx(_oracle_interval(5, 10, 0.05), abs=1e-10)
    assert clopper_pearson(5, 10, 0.05) == pytest.approx((0.1871, 0.8129), abs=1e-4)
    assert clopper_pearson(0, 10, 0.01)[0] == 0.0
    assert clopper_pearson(10, 10, 0.01)[1] == 1.0


def test_clopper_pearson_rejects_bad_arguments():
    with pytest.raises(ParameterError):
        clopper_pearson(3, 10, 0.0)
    with pytest.raises(ParameterError):
        clopper_pearson(11, 10, 0.05)


def test_berger_boos_adds_gamma_and_restricts_supremum():
    t = TwoByTwo(x1=6, n1=8, x0=2, n0=8)
    gamma = 0.001
    result = berger_boos(t, gamma)
    lower, upper = _oracle_interval(8, 16, gamma)

    assert result.p_value >= gamma
    assert result.p_value <= boschloo_exact(t).p_value + gamma + 1e-6
    assert result.p_value == pytest.approx(gamma + _oracle_supremum(t, lower, upper), abs=1e-3)
    assert result.gamma == gamma


def test_berger_boos_gamma_range():
    with pytest.raises(ParameterError):
        berger_boos(TwoByTwo(x1=1, n1=2, x0=1, n0=2), 1.5)


def test_auto_method_switches_on_arm_size():
    small = TwoByTwo(x1=5, n1=10, x0=5, n0=300)
    large = TwoByTwo(x1=100, n1=250, x0=100, n0=300)
    assert resolve_method(small, TestMethod.AUTO) == TestMethod.BOSCHLOO
    assert resolve_method(large, TestMethod.AUTO) == TestMethod.WALD
    assert resolve_method(large, TestMethod.AUTO, exact_threshold=251) == TestMethod.BOSCHLOO
    assert resolve_method(small, "wald") == TestMethod.WALD

    assert run_test(large, TestMethod.AUTO).method == TestMethod.WALD


def test_berger_boos_requires_gamma():
    with pytest.raises(ConfigurationError):
        run_test(TwoByTwo(x1=1, n1=2, x0=1, n0=2), TestMethod.BERGER_BOOS)


def test_boschloo_with_one_small_and_one_large_arm():
    # auto picks the exact test here because the smaller arm has fewer than 200 units
    t = TwoByTwo(x1=30, n1=50, x0=6000, n0=20_000)
    assert resolve_method(t, TestMethod.AUTO) == TestMethod.BOSCHLOO
    assert 0 < boschloo_exact(t).p_value <= fisher_one_sided(t) + 1e-9

    flipped = TwoByTwo(x1=6000, n1=20_000, x0=15, n0=50)
    assert boschloo_exact(flipped).p_value <= fisher_one_sided(flipped) + 1e-9


def test_fisher_p_value_is_monotone_in_both_arms():
    """Non-increasing in x1 and non-decreasing in x0, so every Boschloo region is a staircase."""
    for n1, n0 in itertools.product(range(1, 11), repeat=2):
        grid = np.array(
            [[fisher_one_sided(TwoByTwo(x1=a, n1=n1, x0=b, n0=n0)) for b in range(n0 + 1)] for a in range(n1 + 1)]
        )
        assert np.all(np.diff(grid, axis=0) <= 1e-12), (n1, n0)
        assert np.all(np.diff(grid, axis=1) >= -1e-12), (n1, n0)


@functools.cache
def _p_values(n1: int, n0: int, method: TestMethod) -> np.ndarray:
    """p-value of every table with arm sizes (n1, n0), indexed [x1, x0]."""
    tests = {
        TestMethod.WALD: wald_one_sided,
        TestMethod.BOSCHLOO: boschloo_exact,
        TestMethod.BERGER_BOOS: lambda t: berger_boos(t, 0.001),
    }
    return np.array(
        [
            [tests[method](TwoByTwo(x1=x1, n1=n1, x0=x0, n0=n0)).p_value for x0 in range(n0 + 1)]
            for x1 in range(n1 + 1)
        ]
    )


SMALL_ARMS = [(n1, n0) for n1 in range(1, 6) for n0 in range(1, 6)]


@pytest.mark.parametrize(("n1", "n0"), SMALL_ARMS)
def test_p_value_is_non_increasing_in_x1(n1, n0):
    boschloo = _p_values(n1, n0, TestMethod.BOSCHLOO)
    assert np.all(np.diff(boschloo, axis=0) <= 1e-5)

    # x0 = n0 is excluded for Wald: the all-successes table gets p = 1 by the degenerate-se rule
    wald = _p_values(n1, n0, TestMethod.WALD)[:, :n0]
    assert np.all(np.diff(wald, axis=0) <= 1e-12)


@pytest.mark.parametrize("method", [TestMethod.WALD, TestMethod.BOSCHLOO, TestMethod.BERGER_BOOS])
@pytest.mark.parametrize(("n1", "n0"), SMALL_ARMS)
def test_rejection_needs_a_positive_difference(n1, n0, method):
    p_values = _p_values(n1, n0, method)
    for x1, x0 in itertools.product(range(n1 + 1), range(n0 + 1)):
        if p_values[x1, x0] <= 0.025:
            assert x1 / n1 > x0 / n0, (x1, n1, x0, n0, method)


def test_wald_on_q_table_is_the_wald_test_of_the_inequality():
    rng = np.random.default_rng(17)
    for _ in range(200):
        table = JointCounts(counts=rng.integers(1, 60, size=(2, 2, 2)))
        n1, n0 = table.arm_total(1), table.arm_total(0)
        for d, y in CELLS:
            p = table.cell(1, d, y) / n1
            q = table.cell(0, d, 1 - y) / n0
            se = math.sqrt(p * (1 - p) / n1 + q * (1 - q) / n0)
            statistic = (u_stat(table, d, y) - 1) / se

            result = wald_one_sided(q_table(table, d, y))
            assert result.statistic == pytest.approx(statistic, rel=1e-12, abs=1e-12)
            assert result.p_value == pytest.approx(norm.sf(statistic), rel=1e-9, abs=1e-15)


@pytest.mark.slow
@pytest.mark.parametrize("method", [TestMethod.BOSCHLOO, TestMethod.BERGER_BOOS])
@pytest.mark.parametrize("pi", [0.1, 0.5, 0.9])
def test_exact_tests_hold_their_level_under_the_null(pi, method):
    n, reps, level = 50, 10_000, 0.025
    p_values = _p_values(n, n, method)
    rng = np.random.default_rng(20240 + int(pi * 10))
    x1 = rng.binomial(n, pi, size=reps)
    x0 = rng.binomial(n, pi, size=reps)

    rate = np.mean(p_values[x1, x0] <= level)
    assert rate <= level + 3 * math.sqrt(level * (1 - level) / reps)
