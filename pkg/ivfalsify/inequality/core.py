import math
from fractions import Fraction

from ivfalsify.config import get_settings
from ivfalsify.exception import DomainError, EstimationError
from ivfalsify.inequality.types import (
    CELLS,
    AcdeInterval,
    AcdeSign,
    Cell,
    DeltaEstimate,
    Membership,
    MembershipKind,
    TwoByTwo,
    ZetaPoint,
)
from ivfalsify.tabulate.types import JointCounts


def _check_indices(table: JointCounts, hi: int, lo: int, d: int, y: int) -> None:
    if not (0 <= hi < table.L and 0 <= lo < table.L and hi != lo):
        raise DomainError(f"instrument arms ({hi}, {lo}) invalid for {table.L} levels")
    if not 0 <= d < table.M:
        raise DomainError(f"treatment level {d} invalid for {table.M} levels")
    if y not in (0, 1):
        raise DomainError(f"outcome level must be 0 or 1, got {y}")


def _check_arms(table: JointCounts, *arms: int) -> None:
    for z in arms:
        if table.arm_total(z) == 0:
            raise EstimationError(f"instrument arm Z={z} is empty")


def pair_q_table(table: JointCounts, hi: int, lo: int, d: int, y: int) -> TwoByTwo:
    """Two-by-two table of Q against the instrument for arms `hi` (role of Z=1) and `lo` (role of Z=0)."""
    _check_indices(table, hi, lo, d, y)
    _check_arms(table, hi, lo)
    n1 = table.arm_total(hi)
    n0 = table.arm_total(lo)
    return TwoByTwo(x1=table.cell(hi, d, y), n1=n1, x0=n0 - table.cell(lo, d, 1 - y), n0=n0)


def q_table(table: JointCounts, d: int, y: int) -> TwoByTwo:
    """Two-by-two table whose proportion difference equals u^{dy} - 1."""
    return pair_q_table(table, 1, 0, d, y)


def u_stat(table: JointCounts, d: int, y: int) -> float:
    """Empirical pr(D=d, Y=y | Z=1) + pr(D=d, Y=1-y | Z=0)."""
    _check_indices(table, 1, 0, d, y)
    _check_arms(table, 1, 0)
    return table.cell(1, d, y) / table.arm_total(1) + table.cell(0, d, 1 - y) / table.arm_total(0)


def delta_of(t: TwoByTwo) -> DeltaEstimate:
    """Proportion difference of a two-by-two table with the unpooled (Wald) standard error."""
    p1, p0 = t.p1, t.p0
    se = math.sqrt(p1 * (1 - p1) / t.n1 + p0 * (1 - p0) / t.n0)
    return DeltaEstimate(estimate=min(1.0, max(-1.0, p1 - p0)), se=se, n1=t.n1, n0=t.n0)


def delta(table: JointCounts, d: int, y: int) -> DeltaEstimate:
    return delta_of(q_table(table, d, y))


def _require_binary(table: JointCounts) -> None:
    if not table.is_binary:
        raise DomainError(f"expected a binary table (L = M = 2), got L={table.L}, M={table.M}")


def zeta_of(table: JointCounts) -> ZetaPoint:
    """Empirical point (u00, u01, u10) of a binary table."""
    _require_binary(table)
    return ZetaPoint(u00=u_stat(table, 0, 0), u01=u_stat(table, 0, 1), u10=u_stat(table, 1, 0))


def _classify(values: dict[Cell, float | Fraction], tol: float | Fraction) -> Membership:
    active = tuple(cell for cell in CELLS if abs(values[cell] - 1) <= tol)
    violated = tuple(cell for cell in CELLS if values[cell] > 1 + tol)
    # the four left-hand sides sum to 2, so three active constraints would force the fourth negative
    assert len(active) <= 2, f"more than two active constraints: {active}"
    if violated:
        return Membership(kind=MembershipKind.EXTERIOR, active=active, violated=violated)
    if active:
        return Membership(kind=MembershipKind.BOUNDARY, active=active)
    return Membership(kind=MembershipKind.INTERIOR)


def octahedron_membership(zeta: ZetaPoint, tol: float | None = None) -> Membership:
    """Classify a point against the four constraints u^{dy} <= 1."""
    tol = get_settings().boundary_tol if tol is None else tol
    values = {cell: zeta.u(*cell) for cell in CELLS}
    if min(values.values()) < -tol or values[(1, 1)] > 2 + tol:
        raise DomainError(f"point {zeta.coordinates} lies outside the simplex")
    return _classify(values, tol)


def membership_of(table: JointCounts) -> Membership:
    """Exact classification of the empirical point of a binary table."""
    _require_binary(table)
    _check_arms(table, 1, 0)
    n1, n0 = table.arm_total(1), table.arm_total(0)
    values: dict[Cell, Fraction] = {
        (d, y): Fraction(table.cell(1, d, y), n1) + Fraction(table.cell(0, d, 1 - y), n0) for d, y in CELLS
    }
    return _classify(values, Fraction(0))


def acde_bounds(table: JointCounts, d: int) -> AcdeInterval:
    """Bounds on ACDE(d) = E{Y(z=1, d)} - E{Y(z=0, d)}, valid under randomization of Z."""
    _check_indices(table, 1, 0, d, 0)
    _check_arms(table, 1, 0)
    p1 = table.counts[1, d] / table.arm_total(1)
    p0 = table.counts[0, d] / table.arm_total(0)
    lower = float(p1[1] + p0[0] - 1)
    upper = float(1 - p1[0] - p0[1])
    return AcdeInterval(lower=min(1.0, max(-1.0, lower)), upper=min(1.0, max(-1.0, upper)))


def acde_sign(interval: AcdeInterval) -> AcdeSign:
    if interval.lower > 0:
        return AcdeSign.POSITIVE
    if interval.upper < 0:
        return AcdeSign.NEGATIVE
    return AcdeSign.UNDETERMINED
