import logging
from pathlib import Path
from typing import Optional

import pandas as pd

from ivfalsify.simlab.montecarlo import mc_rejection_rate
from ivfalsify.simlab.types import McResult, ScenarioFile

logger = logging.getLogger(__name__)

LOG_COLUMNS = ["schema_version", "scenario_id", "n", "reps", "rate", "mc_se", "seed"]


def load_scenarios(path: str | Path) -> ScenarioFile:
    return ScenarioFile.model_validate_json(Path(path).read_text())


def run_scenarios(
    path: str | Path,
    log_path: str | Path,
    workers: Optional[int] = None,
    seed: Optional[int] = None,
) -> list[McResult]:
    """
    Run every scenario of a JSON scenario file and append one row per scenario to a CSV log.

    A `seed` replaces the seeds stored in the file, so all scenarios share one master seed.
    """
    scenario_file = load_scenarios(path)
    log_path = Path(log_path)
    logger.info(f"Running {len(scenario_file.scenarios)} scenarios from {path}")

    results: list[McResult] = []
    for scenario in scenario_file.scenarios:
        master = scenario.seed if seed is None else seed
        result = mc_rejection_rate(scenario.spec, scenario.n, scenario.reps, master, scenario.test, workers)
        row = pd.DataFrame(
            [
                {
                    "schema_version": scenario_file.schema_version,
                    "scenario_id": scenario.id,
                    "n": scenario.n,
                    "reps": result.reps,
                    "rate": result.rate,
                    "mc_se": result.mc_se,
                    "seed": result.seed,
                }
            ],
            columns=LOG_COLUMNS,
        )
        # one row per scenario so a partial campaign still leaves a usable log
        row.to_csv(log_path, mode="a", header=not log_path.exists(), index=False)
        results.append(result)
    return results
