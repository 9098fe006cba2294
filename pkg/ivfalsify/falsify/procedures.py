import logging
from typing import Optional

from ivfalsify.exception import ConfigurationError, EstimationError, ParameterError
from ivfalsify.falsify.types import (
    AcdeConclusion,
    FalsifyReport,
    IneqId,
    ModelKind,
    ReportEntry,
    ReportMetadata,
)
from ivfalsify.gail_simon.chibar import gs_test, stratum_deltas
from ivfalsify.inequality.core import pair_q_table
from ivfalsify.inequality.types import CELLS, AcdeSign
from ivfalsify.tabulate.types import JointCounts, StratifiedCounts, StratumKey
from ivfalsify.twobytwo.runner import run_test
from ivfalsify.twobytwo.types import TestMethod

logger = logging.getLogger(__name__)


def _check_alpha(alpha: float) -> None:
    if not 0 < alpha < 1:
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha}")


def _check_gamma(method: TestMethod, gamma: Optional[float], level: float) -> Optional[float]:
    """Gamma is only meaningful for Berger-Boos, where it must stay below the per-test level."""
    if method != TestMethod.BERGER_BOOS:
        return None
    if gamma is None:
        raise ConfigurationError("the Berger-Boos procedure needs gamma")
    if not 0 < gamma < level:
        raise ConfigurationError(f"gamma must lie in (0, {level:.6g}) for per-test level {level:.6g}, got {gamma}")
    return gamma


def _require_arms(table: JointCounts, stratum: Optional[StratumKey] = None) -> list[int]:
    empty = [z for z in range(table.L) if table.arm_total(z) == 0]
    if empty:
        where = f" in stratum {stratum}" if stratum is not None else ""
        logger.warning(f"Empty instrument arms {empty}{where}")
    return empty


def _orient(z1: int, z2: int) -> tuple[int, int, int]:
    """Arms (hi, lo) and outcome level y of the Q table for p(Y=0, D=d | z1) + p(Y=1, D=d | z2) <= 1."""
    if z2 > z1:
        return z2, z1, 1
    return z1, z2, 0


def _test_entry(
    table: JointCounts,
    ineq: IneqId,
    hi: int,
    lo: int,
    y: int,
    level: float,
    method: TestMethod,
    gamma: Optional[float],
    stratum: Optional[StratumKey],
) -> ReportEntry:
    try:
        t = pair_q_table(table, hi, lo, ineq.d, y)
    except EstimationError as e:
        logger.warning(f"{ineq.label} unevaluable: {e}")
        return ReportEntry(ineq=ineq, stratum=stratum, level=level, evaluable=False)
    result = run_test(t, method, gamma)
    logger.debug(f"{ineq.label} stratum={stratum}: p={result.p_value:.6g} ({result.method}) at level {level:.6g}")
    return ReportEntry(
        ineq=ineq,
        stratum=stratum,
        level=level,
        p_value=result.p_value,
        statistic=result.statistic,
        method=result.method,
        reject=result.p_value <= level,
    )


def _binary_entries(
    table: JointCounts,
    level: float,
    method: TestMethod,
    gamma: Optional[float],
    stratum: Optional[StratumKey] = None,
) -> list[ReportEntry]:
    return [
        _test_entry(table, IneqId(d=d, y=y), 1, 0, y, level, method, gamma, stratum)
        for d, y in CELLS
    ]


def _discrete_entries(
    table: JointCounts,
    level: float,
    method: TestMethod,
    gamma: Optional[float],
    stratum: Optional[StratumKey] = None,
) -> list[ReportEntry]:
    entries: list[ReportEntry] = []
    for z1 in range(table.L):
        for z2 in range(table.L):
            if z1 == z2:
                continue
            hi, lo, y = _orient(z1, z2)
            for d in range(table.M):
                entries.append(_test_entry(table, IneqId(z1=z1, z2=z2, d=d), hi, lo, y, level, method, gamma, stratum))
    return entries


def _conclusions(entries: list[ReportEntry]) -> list[AcdeConclusion]:
    """ACDE signs implied by each rejected inequality: rejecting y = 1 means positive, y = 0 negative."""
    conclusions: list[AcdeConclusion] = []
    for entry in entries:
        if not entry.reject:
            continue
        ineq = entry.ineq
        if ineq.is_binary:
            hi, lo, y = 1, 0, ineq.y
        else:
            hi, lo, y = _orient(ineq.z1, ineq.z2)
        sign = AcdeSign.POSITIVE if y == 1 else AcdeSign.NEGATIVE
        conclusion = AcdeConclusion(d=ineq.d, sign=sign, z_hi=hi, z_lo=lo, stratum=entry.stratum)
        if conclusion not in conclusions:
            conclusions.append(conclusion)
    return conclusions


def _assemble(
    model: ModelKind,
    alpha: float,
    entries: list[ReportEntry],
    acde_signs: list[AcdeConclusion],
    metadata: ReportMetadata,
) -> FalsifyReport:
    # stable: strata keep their table order within each inequality
    entries = sorted(entries, key=lambda entry: entry.ineq.sort_key)
    metadata = metadata.model_copy(update={"unevaluable": sum(not entry.evaluable for entry in entries)})
    report = FalsifyReport(
        model=model,
        alpha=alpha,
        entries=entries,
        overall_reject=any(entry.reject for entry in entries),
        acde_signs=acde_signs,
        metadata=metadata,
    )
    logger.info(
        f"{model}: {len(report.rejected)} of {len(entries)} inequalities rejected, "
        f"overall_reject={report.overall_reject}"
    )
    return report


def test_unconditional(
    table: JointCounts,
    alpha: float,
    method: TestMethod = TestMethod.AUTO,
    gamma: Optional[float] = None,
) -> FalsifyReport:
    """Test the four binary inequalities, each at level alpha/2."""
    _check_alpha(alpha)
    if not table.is_binary:
        raise ConfigurationError(f"the unconditional binary procedure needs L = M = 2, got L={table.L}, M={table.M}")
    level = alpha / 2
    gamma = _check_gamma(method, gamma, level)
    empty = _require_arms(table)
    if empty:
        raise EstimationError(f"instrument arms {empty} are empty")

    entries = _binary_entries(table, level, method, gamma)
    rejected = _conclusions(entries)
    acde_signs = []
    for d in range(2):
        signs = [conclusion.sign for conclusion in rejected if conclusion.d == d]
        acde_signs.append(AcdeConclusion(d=d, sign=signs[0] if signs else AcdeSign.UNDETERMINED))

    metadata = ReportMetadata(method=method, gamma=gamma)
    return _assemble(ModelKind.UNCONDITIONAL_BINARY, alpha, entries, acde_signs, metadata)


def test_conditional_gs(s: StratifiedCounts, alpha: float) -> FalsifyReport:
    """Qualitative interaction test of each conditional inequality across strata, each at level alpha/4."""
    _check_alpha(alpha)
    if s.L != 2 or s.M != 2:
        raise ConfigurationError(f"the conditional binary procedure needs L = M = 2, got L={s.L}, M={s.M}")
    level = alpha / 4

    entries: list[ReportEntry] = []
    dropped: list[StratumKey] = []
    corrected: list[StratumKey] = []
    for d, y in CELLS:
        ineq = IneqId(d=d, y=y)
        deltas = stratum_deltas(s, d, y)
        try:
            result = gs_test(deltas)
        except EstimationError as e:
            logger.warning(f"{ineq.label} unevaluable: {e}")
            entries.append(ReportEntry(ineq=ineq, level=level, evaluable=False))
            dropped.extend(key for key in s.strata if key not in dropped)
            continue
        dropped.extend(key for key in result.dropped if key not in dropped)
        corrected.extend(key for key in result.corrected if key not in corrected)
        entries.append(
            ReportEntry(
                ineq=ineq,
                level=level,
                p_value=result.p_value,
                statistic=result.q_plus,
                k_used=result.k_used,
                reject=result.p_value <= level,
            )
        )

    if corrected:
        logger.warning(f"Half-unit cell correction applied to the standard error of {len(corrected)} strata")

    acde_signs = [
        conclusion.model_copy(update={"in_some_stratum": True}) for conclusion in _conclusions(entries)
    ]
    metadata = ReportMetadata(n_strata=s.K, dropped_strata=dropped, corrected_strata=corrected)
    return _assemble(ModelKind.CONDITIONAL_BINARY_GS, alpha, entries, acde_signs, metadata)


def test_conditional_perlevel(
    s: StratifiedCounts,
    alpha: float,
    method: TestMethod = TestMethod.AUTO,
    gamma: Optional[float] = None,
) -> FalsifyReport:
    """Four binary inequalities within every stratum, each at level alpha/(2K)."""
    _check_alpha(alpha)
    if s.L != 2 or s.M != 2:
        raise ConfigurationError(f"the conditional binary procedure needs L = M = 2, got L={s.L}, M={s.M}")
    level = alpha / (2 * s.K)
    gamma = _check_gamma(method, gamma, level)

    entries: list[ReportEntry] = []
    dropped: list[StratumKey] = []
    for key, table in s.strata.items():
        if _require_arms(table, key):
            dropped.append(key)
            continue
        entries.extend(_binary_entries(table, level, method, gamma, stratum=key))

    metadata = ReportMetadata(method=method, gamma=gamma, n_strata=s.K, dropped_strata=dropped)
    return _assemble(ModelKind.CONDITIONAL_BINARY_PERLEVEL, alpha, entries, _conclusions(entries), metadata)


def test_discrete(
    table: JointCounts,
    alpha: float,
    method: TestMethod = TestMethod.AUTO,
    gamma: Optional[float] = None,
) -> FalsifyReport:
    """All L(L-1)M inequalities of a discrete instrument, each at level alpha/{L(L-1)}."""
    _check_alpha(alpha)
    level = alpha / (table.L * (table.L - 1))
    gamma = _check_gamma(method, gamma, level)
    skipped = _require_arms(table)

    entries = _discrete_entries(table, level, method, gamma)
    metadata = ReportMetadata(
        method=method,
        gamma=gamma,
        instrument_levels=table.L,
        treatment_levels=table.M,
        skipped_arms=skipped,
    )
    return _assemble(ModelKind.DISCRETE, alpha, entries, _conclusions(entries), metadata)


def test_conditional_discrete(
    s: StratifiedCounts,
    alpha: float,
    method: TestMethod = TestMethod.AUTO,
    gamma: Optional[float] = None,
) -> FalsifyReport:
    """Discrete-instrument inequalities within every stratum, Bonferroni over strata: level alpha/{K L(L-1)}."""
    _check_alpha(alpha)
    level = alpha / (s.K * s.L * (s.L - 1))
    gamma = _check_gamma(method, gamma, level)

    entries: list[ReportEntry] = []
    dropped: list[StratumKey] = []
    for key, table in s.strata.items():
        if len(_require_arms(table, key)) >= table.L - 1:
            dropped.append(key)
        entries.extend(_discrete_entries(table, level, method, gamma, stratum=key))

    metadata = ReportMetadata(
        method=method,
        gamma=gamma,
        n_strata=s.K,
        instrument_levels=s.L,
        treatment_levels=s.M,
        dropped_strata=dropped,
    )
    return _assemble(ModelKind.CONDITIONAL_DISCRETE, alpha, entries, _conclusions(entries), metadata)
