"""
Unit-level data ingestion and stratified contingency tables.

Reads CSV records, dichotomizes the outcome, discretizes covariates and counts
n(z, d, y) within every observed covariate cross-classification.
"""

from .ingest import bin_covariate, dichotomize_median, ingest_csv, tabulate
from .types import ColumnMapping, JointCounts, Record, StratifiedCounts, StratumKey

__all__ = [
    "ColumnMapping",
    "JointCounts",
    "Record",
    "StratifiedCounts",
    "StratumKey",
    "bin_covariate",
    "dichotomize_median",
    "ingest_csv",
    "tabulate",
]
