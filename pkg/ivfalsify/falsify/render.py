from typing import Optional

from ivfalsify.falsify.types import (
    NON_REJECTION_CAVEAT,
    RANDOMIZATION_NOTE,
    AcdeConclusion,
    FalsifyReport,
    ModelKind,
    ReportEntry,
)
from ivfalsify.inequality.types import AcdeSign

_LABEL_WIDTH = 30
_P_WIDTH = 5


def format_p_value(p_value: Optional[float]) -> str:
    """Three decimals, clamped at 1.000; unevaluable tests print as n/a."""
    if p_value is None:
        return "n/a"
    return f"{min(p_value, 1.0):.3f}"


def render_json(report: FalsifyReport) -> str:
    return report.model_dump_json(indent=2)


def _stratum_label(stratum) -> str:
    if stratum is None or stratum == ():
        return "all"
    return ", ".join(str(value) for value in stratum)


def _rows(report: FalsifyReport) -> tuple[list[str], list[tuple[str, list[ReportEntry]]]]:
    """Column headers and (row label, entries) pairs in report order."""
    binary = report.model not in (ModelKind.DISCRETE, ModelKind.CONDITIONAL_DISCRETE)
    if binary:
        headers = ["H00", "H01", "H10", "H11"]
    else:
        headers = [f"d={d}" for d in range(report.metadata.treatment_levels)]

    groups: dict[tuple, list[ReportEntry]] = {}
    labels: dict[tuple, str] = {}
    for entry in report.entries:
        family = () if binary else (entry.ineq.z1, entry.ineq.z2)
        group = (repr(entry.stratum), family)
        groups.setdefault(group, []).append(entry)
        if group not in labels:
            label = _stratum_label(entry.stratum)
            if not binary:
                label = f"{label} z=({entry.ineq.z1},{entry.ineq.z2})"
            labels[group] = label

    rows = []
    for group, entries in groups.items():
        entries.sort(key=lambda entry: entry.ineq.sort_key)
        rows.append((labels[group], entries))
    return headers, rows


def _acde_line(conclusion: AcdeConclusion) -> Optional[str]:
    if conclusion.sign == AcdeSign.UNDETERMINED:
        return None
    contrast = "" if (conclusion.z_hi, conclusion.z_lo) == (1, 0) else f" (Z={conclusion.z_hi} vs Z={conclusion.z_lo})"
    if conclusion.in_some_stratum:
        where = " in some subgroup"
    elif conclusion.stratum not in (None, ()):
        where = f" in stratum {_stratum_label(conclusion.stratum)}"
    else:
        where = ""
    return f"ACDE({conclusion.d}){contrast} {conclusion.sign}{where}"


def render_text(report: FalsifyReport, subgroups: Optional[int] = None) -> str:
    """Aligned table of p-values, one row per hypothesis family, followed by the decision."""
    subgroups = report.metadata.n_strata if subgroups is None else subgroups
    headers, rows = _rows(report)

    lines = [f"Model: {report.model}    alpha = {report.alpha:g}"]
    levels = sorted({entry.level for entry in report.entries})
    if levels:
        lines.append("Per-test level: " + ", ".join(f"{level:.6g}" for level in levels))
    lines.append("")
    header = f"{'Covariate stratum':<{_LABEL_WIDTH}}" + " ".join(f"{h:>{_P_WIDTH}}" for h in headers)
    lines.append(header + "  No. of subgroups")
    for label, entries in rows:
        cells = " ".join(f"{format_p_value(entry.p_value):>{_P_WIDTH}}" for entry in entries)
        lines.append(f"{label:<{_LABEL_WIDTH}}{cells}  {subgroups}")
    lines.append("")

    for entry in report.rejected:
        stratum = "" if entry.stratum in (None, ()) else f" in stratum {_stratum_label(entry.stratum)}"
        lines.append(
            f"Rejected {entry.ineq.label}{stratum}: p = {format_p_value(entry.p_value)} <= {entry.level:.6g}"
        )
    acde_lines = [line for line in (_acde_line(conclusion) for conclusion in report.acde_signs) if line]
    if acde_lines:
        lines.extend(acde_lines)
        lines.append(RANDOMIZATION_NOTE)

    if report.metadata.dropped_strata:
        lines.append(f"Dropped strata (empty instrument arm): {len(report.metadata.dropped_strata)}")
    if report.metadata.unevaluable:
        lines.append(f"Unevaluable tests: {report.metadata.unevaluable}")

    if report.overall_reject:
        lines.append("Decision: the instrumental variable model is rejected.")
    else:
        lines.append("Decision: the instrumental variable model is not rejected.")
        lines.append(NON_REJECTION_CAVEAT)
    return "\n".join(lines) + "\n"
