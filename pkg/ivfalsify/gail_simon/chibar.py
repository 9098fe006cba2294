import logging
import math
from collections.abc import Sequence

import numpy as np
from scipy.stats import binom, chi2

from ivfalsify.exception import EstimationError
from ivfalsify.gail_simon.types import GsResult, StratumDelta
from ivfalsify.inequality.core import delta_of, q_table
from ivfalsify.inequality.types import TwoByTwo
from ivfalsify.tabulate.types import StratifiedCounts

logger = logging.getLogger(__name__)


def _stratum_se(t: TwoByTwo) -> tuple[float, bool]:
    """Unpooled standard error, with half a unit added to every cell when any cell is empty."""
    if 0 not in t.cells:
        return delta_of(t).se, False
    p1 = (t.x1 + 0.5) / (t.n1 + 1)
    p0 = (t.x0 + 0.5) / (t.n0 + 1)
    return math.sqrt(p1 * (1 - p1) / (t.n1 + 1) + p0 * (1 - p0) / (t.n0 + 1)), True


def stratum_deltas(s: StratifiedCounts, d: int, y: int) -> list[StratumDelta]:
    """Per-stratum estimate of Delta^{dy}(v); strata with an empty instrument arm are flagged unusable."""
    deltas: list[StratumDelta] = []
    for key, table in s.strata.items():
        try:
            t = q_table(table, d, y)
        except EstimationError as e:
            logger.warning(f"Stratum {key} unusable for H{d}{y}: {e}")
            deltas.append(StratumDelta(key=key, usable=False))
            continue
        se, corrected = _stratum_se(t)
        estimate = delta_of(t).model_copy(update={"se": se})
        deltas.append(StratumDelta(key=key, delta=estimate, usable=True, corrected=corrected))
    return deltas


def chibar_squared_sf(q_plus: float, k: int) -> float:
    """Upper tail of the chi-bar-squared distribution with binomial(k, 1/2) mixing weights."""
    if q_plus <= 0:
        return 1.0
    if math.isinf(q_plus):
        return 0.0
    degrees = np.arange(1, k + 1)
    tail = np.sum(binom.pmf(degrees, k, 0.5) * chi2.sf(q_plus, degrees))
    return float(min(1.0, tail))


def gs_test(deltas: Sequence[StratumDelta]) -> GsResult:
    """Sum of squared positive standardized differences referred to the chi-bar-squared null."""
    usable = [item for item in deltas if item.usable]
    if not usable:
        raise EstimationError("no usable strata for the qualitative interaction test")

    q_plus = 0.0
    for item in usable:
        estimate = item.delta
        if estimate.estimate <= 0:
            continue
        if estimate.se == 0:
            q_plus = math.inf
            break
        q_plus += (estimate.estimate / estimate.se) ** 2

    p_value = chibar_squared_sf(q_plus, len(usable))
    result = GsResult(
        q_plus=q_plus,
        k_used=len(usable),
        p_value=p_value,
        dropped=[item.key for item in deltas if not item.usable],
        corrected=[item.key for item in usable if item.corrected],
    )
    logger.debug(f"Gail-Simon Q+={q_plus:.6g} over {result.k_used} strata, p={p_value:.6g}")
    return result
