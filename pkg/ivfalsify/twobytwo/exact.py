import logging
from collections.abc import Callable
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.stats import beta, binom, hypergeom

from ivfalsify.config import get_settings
from ivfalsify.exception import ParameterError
from ivfalsify.inequality.types import TwoByTwo
from ivfalsify.twobytwo.types import TestMethod, TestResult

logger = logging.getLogger(__name__)

# Fisher p-values within this relative distance of the observed one count as ties.
_TIE_RTOL = 1e-9

# Most binomial probabilities the tail function evaluates in one block of nuisance values.
_BLOCK = 1 << 20

TailFunction = Callable[[np.ndarray], np.ndarray]


def fisher_one_sided(t: TwoByTwo) -> float:
    """Hypergeometric upper-tail probability of x1 given the success margin x1 + x0."""
    return float(np.clip(hypergeom.sf(t.x1 - 1, t.n1 + t.n0, t.x1 + t.x0, t.n1), 0.0, 1.0))


@lru_cache(maxsize=256)
def _region_counts(n1: int, n0: int, threshold: float) -> tuple[bool, np.ndarray]:
    """
    Size of the region {(a, b): fisher(a, b) <= threshold} along each level of the smaller arm.

    The one-sided Fisher p-value is non-decreasing in b and non-increasing in a, so the region
    is a prefix b < counts[a] of every row when `by_row`, and a suffix a > n1 - counts[b] of
    every column otherwise. Only one row or column is held at a time.
    """
    total = n1 + n0
    by_row = n1 <= n0
    if by_row:
        b = np.arange(n0 + 1)
        counts = [np.count_nonzero(hypergeom.sf(a - 1, total, a + b, n1) <= threshold) for a in range(n1 + 1)]
    else:
        a = np.arange(n1 + 1)
        counts = [np.count_nonzero(hypergeom.sf(a - 1, total, a + b, n1) <= threshold) for b in range(n0 + 1)]
    region = np.array(counts)
    region.setflags(write=False)
    return by_row, region


def _tail_function(t: TwoByTwo) -> TailFunction:
    """Pr_pi{fisher(T) <= fisher(t)} under independent binomials with common success probability pi."""
    by_row, counts = _region_counts(t.n1, t.n0, fisher_one_sided(t) * (1 + _TIE_RTOL))
    outer_n, inner_n = (t.n1, t.n0) if by_row else (t.n0, t.n1)
    outer = np.arange(outer_n + 1)
    block = max(1, _BLOCK // (outer_n + 1))

    def tail(pi: np.ndarray) -> np.ndarray:
        pi = np.atleast_1d(np.asarray(pi, dtype=float))
        values = np.empty(len(pi))
        for start in range(0, len(pi), block):
            p = pi[start : start + block, None]
            if by_row:
                inner = binom.cdf(counts - 1, inner_n, p)
            else:
                inner = binom.sf(inner_n - counts, inner_n, p)
            values[start : start + block] = (binom.pmf(outer, outer_n, p) * inner).sum(axis=1)
        return values

    return tail


def _supremum(tail: TailFunction, lower: float, upper: float) -> float:
    """Grid search for the largest tail probability on [lower, upper], refined around the best grid point."""
    settings = get_settings()
    step = settings.grid_step
    grid = np.linspace(step, 1 - step, int(round(1 / step)) - 1)
    grid = np.unique(np.concatenate([[lower, upper], grid[(grid > lower) & (grid < upper)]]))

    values = tail(grid)
    best = int(np.argmax(values))
    supremum = float(values[best])

    left, right = grid[max(best - 1, 0)], grid[min(best + 1, len(grid) - 1)]
    if right > left:
        refined = minimize_scalar(
            lambda pi: -tail(pi)[0], bounds=(left, right), method="bounded", options={"xatol": settings.refine_xatol}
        )
        supremum = max(supremum, float(-refined.fun))

    return min(1.0, supremum)


def boschloo_exact(t: TwoByTwo) -> TestResult:
    """Exact unconditional test ordering tables by their one-sided Fisher p-value."""
    statistic = fisher_one_sided(t)
    p_value = _supremum(_tail_function(t), 0.0, 1.0)
    logger.debug(f"Boschloo {t.x1}/{t.n1} vs {t.x0}/{t.n0}: fisher={statistic:.6g}, p={p_value:.6g}")
    return TestResult(p_value=p_value, statistic=statistic, method=TestMethod.BOSCHLOO)


def clopper_pearson(x: int, n: int, gamma: float) -> tuple[float, float]:
    """Exact 100(1 - gamma)% confidence interval for a binomial proportion."""
    if not 0 < gamma < 1:
        raise ParameterError(f"gamma must lie in (0, 1), got {gamma}")
    if not 0 <= x <= n or n < 1:
        raise ParameterError(f"need 0 <= x <= n and n >= 1, got x={x}, n={n}")
    lower = 0.0 if x == 0 else float(beta.ppf(gamma / 2, x, n - x + 1))
    upper = 1.0 if x == n else float(beta.ppf(1 - gamma / 2, x + 1, n - x))
    return lower, upper


def berger_boos(t: TwoByTwo, gamma: float) -> TestResult:
    """Boschloo test with the supremum restricted to a confidence interval for the pooled proportion, plus gamma."""
    if not 0 < gamma < 1:
        raise ParameterError(f"gamma must lie in (0, 1), got {gamma}")
    lower, upper = clopper_pearson(t.x1 + t.x0, t.n1 + t.n0, gamma)
    statistic = fisher_one_sided(t)
    p_value = min(1.0, gamma + _supremum(_tail_function(t), lower, upper))
    logger.debug(f"Berger-Boos {t.x1}/{t.n1} vs {t.x0}/{t.n0}: interval=[{lower:.4g}, {upper:.4g}], p={p_value:.6g}")
    return TestResult(p_value=p_value, statistic=statistic, method=TestMethod.BERGER_BOOS, gamma=gamma)
