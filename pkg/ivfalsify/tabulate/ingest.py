import logging
import math
from collections.abc import Sequence
from os import PathLike

import numpy as np
import pandas as pd
from pydantic import ValidationError

from ivfalsify.exception import ParseError, RecordValidationError, SchemaError
from ivfalsify.tabulate.types import ColumnMapping, CovariateValue, JointCounts, Record, StratifiedCounts, StratumKey

logger = logging.getLogger(__name__)

# header is line 1
_FIRST_DATA_LINE = 2


def _parse_level(raw: str, field: str, row: int) -> int:
    try:
        value = float(raw)
    except ValueError:
        raise ParseError(f"non-numeric {field} value {raw!r}", row=row) from None
    if not value.is_integer() or value < 0:
        raise ParseError(f"{field} must be a non-negative integer, got {raw!r}", row=row)
    return int(value)


def _covariate_column(values: pd.Series) -> list[CovariateValue]:
    """Use numbers when the whole column is numeric, the raw strings otherwise."""
    numeric = pd.to_numeric(values, errors="coerce")
    if numeric.notna().all():
        return [int(x) if float(x).is_integer() else float(x) for x in numeric]
    return list(values)


def ingest_csv(path: str | PathLike[str], schema: ColumnMapping) -> list[Record]:
    """Read unit-level records from a UTF-8, comma-delimited CSV file with a header row."""
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8", sep=",")
    except pd.errors.EmptyDataError:
        raise SchemaError(f"`{path}` is empty, expected a header row") from None
    except pd.errors.ParserError as e:
        raise ParseError(f"malformed CSV `{path}`: {e}") from None
    except UnicodeDecodeError as e:
        raise ParseError(f"`{path}` is not valid UTF-8 (byte offset {e.start})") from None

    missing = [column for column in schema.columns if column not in frame.columns]
    if missing:
        raise SchemaError(f"columns {missing} not found in header {list(frame.columns)}")

    for column in schema.columns:
        blank = frame.index[frame[column].str.strip() == ""]
        if len(blank):
            raise ParseError(f"missing value in column `{column}`", row=int(blank[0]) + _FIRST_DATA_LINE)

    covariates = [_covariate_column(frame[column].str.strip()) for column in schema.covariates]

    records: list[Record] = []
    for i, (raw_z, raw_d, raw_y) in enumerate(zip(frame[schema.z], frame[schema.d], frame[schema.y])):
        row = i + _FIRST_DATA_LINE
        z = _parse_level(raw_z.strip(), "z", row)
        d = _parse_level(raw_d.strip(), "d", row)
        try:
            y = float(raw_y)
        except ValueError:
            raise ParseError(f"non-numeric y value {raw_y!r}", row=row) from None
        if not math.isfinite(y):
            raise ParseError(f"y must be finite, got {raw_y!r}", row=row)
        try:
            records.append(Record(z=z, d=d, y=y, v=tuple(column[i] for column in covariates)))
        except ValidationError as e:
            raise RecordValidationError(row=row, validation_error=e, source=str(path)) from e

    logger.info(f"Ingested {len(records)} records from {path}")
    return records


def dichotomize_median(records: Sequence[Record]) -> list[Record]:
    """Set y to 1 when strictly above the sample median, 0 otherwise (ties go to 0)."""
    if not records:
        raise ParseError("cannot dichotomize an empty sample")
    values = np.array([record.y for record in records], dtype=float)
    median = float(np.median(values))
    logger.info(f"Dichotomizing outcome at median {median}")
    return [record.model_copy(update={"y": 1.0 if record.y > median else 0.0}) for record in records]


def bin_covariate(records: Sequence[Record], index: int, edges: Sequence[float]) -> list[Record]:
    """Replace covariate `index` by the label of its bin [edges[i], edges[i+1]); the last bin is closed."""
    edges_array = np.asarray(edges, dtype=float)
    if edges_array.ndim != 1 or len(edges_array) < 2 or np.any(np.diff(edges_array) <= 0):
        raise ParseError(f"bin edges must be strictly increasing with at least two values, got {list(edges)}")

    labels = [f"[{lo:g},{hi:g})" for lo, hi in zip(edges_array[:-1], edges_array[1:])]
    labels[-1] = labels[-1][:-1] + "]"

    binned: list[Record] = []
    for i, record in enumerate(records):
        try:
            value = float(record.v[index])
        except (TypeError, ValueError):
            raise ParseError(f"covariate {index} value {record.v[index]!r} is not numeric", row=i + _FIRST_DATA_LINE)
        if value < edges_array[0] or value > edges_array[-1]:
            raise ParseError(
                f"covariate {index} value {value:g} outside bin edges [{edges_array[0]:g}, {edges_array[-1]:g}]",
                row=i + _FIRST_DATA_LINE,
            )
        position = min(int(np.searchsorted(edges_array, value, side="right")) - 1, len(labels) - 1)
        v = list(record.v)
        v[index] = labels[position]
        binned.append(record.model_copy(update={"v": tuple(v)}))
    return binned


def _key_order(key: StratumKey) -> tuple:
    return tuple((0, value, "") if isinstance(value, (int, float)) else (1, 0, str(value)) for value in key)


def tabulate(records: Sequence[Record], covariate_columns: Sequence[int] = ()) -> StratifiedCounts:
    """Cross-classify records on the listed covariates and count n(z, d, y) per observed stratum."""
    for i, record in enumerate(records):
        if record.y not in (0.0, 1.0):
            raise ParseError(f"outcome must be binary before tabulation, got {record.y}", row=i + _FIRST_DATA_LINE)

    levels = max([record.z for record in records] + [1]) + 1
    treatments = max([record.d for record in records] + [1]) + 1

    cells: dict[StratumKey, np.ndarray] = {}
    for record in records:
        key = tuple(record.v[column] for column in covariate_columns)
        if key not in cells:
            cells[key] = np.zeros((levels, treatments, 2), dtype=np.int64)
        cells[key][record.z, record.d, int(record.y)] += 1

    if not cells:
        cells[()] = np.zeros((levels, treatments, 2), dtype=np.int64)

    strata = {key: JointCounts(counts=cells[key]) for key in sorted(cells, key=_key_order)}
    logger.info(f"Tabulated {len(records)} records into {len(strata)} strata of shape ({levels}, {treatments}, 2)")
    return StratifiedCounts(strata=strata)
