from __future__ import annotations

from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator, model_validator

CovariateValue = str | float | int
StratumKey = tuple[CovariateValue, ...]


class Record(BaseModel):
    """One observed unit: instrument, treatment, outcome and covariates."""

    model_config = ConfigDict(frozen=True)

    z: int = Field(ge=0)
    d: int = Field(ge=0)
    y: float = Field(allow_inf_nan=False)
    v: tuple[CovariateValue, ...] = ()


class ColumnMapping(BaseModel):
    """Maps CSV header names onto the record fields."""

    z: str = "z"
    d: str = "d"
    y: str = "y"
    covariates: list[str] = Field(default_factory=list)

    @property
    def columns(self) -> list[str]:
        return [self.z, self.d, self.y, *self.covariates]


class JointCounts(BaseModel):
    """Cell counts n(z, d, y) for one stratum, shape (L, M, 2)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    counts: np.ndarray

    @field_validator("counts", mode="before")
    @classmethod
    def _as_count_array(cls, value: Any) -> np.ndarray:
        array = np.asarray(value)
        if array.ndim != 3 or array.shape[2] != 2:
            raise ValueError(f"counts must have shape (L, M, 2), got {array.shape}")
        if array.shape[0] < 2 or array.shape[1] < 2:
            raise ValueError(f"need at least 2 instrument and 2 treatment levels, got {array.shape[:2]}")
        if not np.all(np.equal(np.mod(array, 1), 0)):
            raise ValueError("counts must be integers")
        array = array.astype(np.int64)
        if np.any(array < 0):
            raise ValueError("counts must be non-negative")
        array.setflags(write=False)
        return array

    @field_serializer("counts")
    def _serialize_counts(self, counts: np.ndarray) -> list:
        return counts.tolist()

    @classmethod
    def zeros(cls, levels: int = 2, treatments: int = 2) -> JointCounts:
        return cls(counts=np.zeros((levels, treatments, 2), dtype=np.int64))

    @property
    def L(self) -> int:
        return int(self.counts.shape[0])

    @property
    def M(self) -> int:
        return int(self.counts.shape[1])

    @property
    def is_binary(self) -> bool:
        return self.L == 2 and self.M == 2

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def arm_total(self, z: int) -> int:
        return int(self.counts[z].sum())

    def cell(self, z: int, d: int, y: int) -> int:
        return int(self.counts[z, d, y])

    def __add__(self, other: JointCounts) -> JointCounts:
        if self.counts.shape != other.counts.shape:
            raise ValueError(f"cannot add tables of shape {self.counts.shape} and {other.counts.shape}")
        return JointCounts(counts=self.counts + other.counts)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, JointCounts):
            return NotImplemented
        return self.counts.shape == other.counts.shape and bool(np.array_equal(self.counts, other.counts))

    __hash__ = None  # type: ignore[assignment]


class StratifiedCounts(BaseModel):
    """Contingency tables keyed by covariate cross-classification, in sorted key order."""

    model_config = ConfigDict(frozen=True)

    strata: dict[StratumKey, JointCounts]

    @model_validator(mode="after")
    def _check_shapes(self) -> StratifiedCounts:
        if not self.strata:
            raise ValueError("at least one stratum is required")
        shapes = {table.counts.shape for table in self.strata.values()}
        if len(shapes) > 1:
            raise ValueError(f"all strata must share (L, M), got {sorted(shapes)}")
        return self

    @classmethod
    def single(cls, table: JointCounts) -> StratifiedCounts:
        """Wrap an unconditional table as one stratum with the empty key."""
        return cls(strata={(): table})

    @property
    def K(self) -> int:
        return len(self.strata)

    @property
    def L(self) -> int:
        return next(iter(self.strata.values())).L

    @property
    def M(self) -> int:
        return next(iter(self.strata.values())).M

    @property
    def total(self) -> int:
        return sum(table.total for table in self.strata.values())

    def collapse(self) -> JointCounts:
        """Sum all strata into one table."""
        tables = iter(self.strata.values())
        result = next(tables)
        for table in tables:
            result = result + table
        return result
