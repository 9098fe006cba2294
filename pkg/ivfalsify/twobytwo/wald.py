import math

from scipy.stats import norm

from ivfalsify.inequality.core import delta_of
from ivfalsify.inequality.types import TwoByTwo
from ivfalsify.twobytwo.types import TestMethod, TestResult


def wald_one_sided(t: TwoByTwo) -> TestResult:
    """Asymptotic test based on (p1 - p0) / se with unpooled binomial variances."""
    estimate = delta_of(t)
    difference = t.p1 - t.p0

    if estimate.se == 0:
        # both arms degenerate: only a strictly positive difference counts as evidence
        if difference > 0:
            return TestResult(p_value=0.0, statistic=math.inf, method=TestMethod.WALD)
        statistic = 0.0 if difference == 0 else -math.inf
        return TestResult(p_value=1.0, statistic=statistic, method=TestMethod.WALD)

    statistic = difference / estimate.se
    return TestResult(p_value=float(norm.sf(statistic)), statistic=statistic, method=TestMethod.WALD)
