from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from ivfalsify.tabulate.types import JointCounts

from .helpers import counts_from_margins


@pytest.fixture
def write_csv(tmp_path: Path):
    def _write(frame: pd.DataFrame, name: str = "data.csv") -> Path:
        path = tmp_path / name
        frame.to_csv(path, index=False)
        return path

    return _write


@pytest.fixture
def uniform_table() -> JointCounts:
    return JointCounts(counts=np.full((2, 2, 2), 50))


@pytest.fixture
def exterior_table() -> JointCounts:
    """u01 = 0.8 + 0.5 = 1.3 with 3000 units per arm."""
    return counts_from_margins(p1=[0.2 / 3, 0.8, 0.2 / 3, 0.2 / 3], p0=[0.5, 0.5 / 3, 0.5 / 3, 0.5 / 3], n_per_arm=3000)
