import numpy as np
import pandas as pd

from ivfalsify.tabulate.types import JointCounts


def counts_from_margins(p1: list[float], p0: list[float], n_per_arm: int) -> JointCounts:
    """Table whose arm proportions equal the given cell probabilities (cells ordered (0,0), (0,1), (1,0), (1,1))."""
    arm1 = np.rint(np.asarray(p1) * n_per_arm).astype(np.int64).reshape(2, 2)
    arm0 = np.rint(np.asarray(p0) * n_per_arm).astype(np.int64).reshape(2, 2)
    return JointCounts(counts=np.stack([arm0, arm1]))


def frame_from_counts(table: JointCounts, **covariates) -> pd.DataFrame:
    """One row per unit of a count table, with constant covariate columns."""
    rows = []
    for (z, d, y), n in np.ndenumerate(table.counts):
        rows.extend([{"z": z, "d": d, "y": y, **covariates}] * int(n))
    return pd.DataFrame(rows, columns=["z", "d", "y", *covariates])
