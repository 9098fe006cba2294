"""
Generating distributions for the binary and discrete IV model and a seeded Monte Carlo harness.
"""

from .dgp import boundary_spec, draw, population_u, sample, sample_stratified, zeta_of_dgp
from .montecarlo import mc_chibar_tail, mc_rejection_rate
from .scenarios import LOG_COLUMNS, load_scenarios, run_scenarios
from .types import (
    COMPLIANCE_TYPES,
    RESPONSE_TYPES,
    AnySpec,
    ArmsSpec,
    DgpSpec,
    LatentSpec,
    MarginsSpec,
    McResult,
    Regime,
    Scenario,
    ScenarioFile,
    StratifiedSpec,
)

__all__ = [
    "COMPLIANCE_TYPES",
    "LOG_COLUMNS",
    "RESPONSE_TYPES",
    "AnySpec",
    "ArmsSpec",
    "DgpSpec",
    "LatentSpec",
    "MarginsSpec",
    "McResult",
    "Regime",
    "Scenario",
    "ScenarioFile",
    "StratifiedSpec",
    "boundary_spec",
    "draw",
    "load_scenarios",
    "mc_chibar_tail",
    "mc_rejection_rate",
    "population_u",
    "run_scenarios",
    "sample",
    "sample_stratified",
    "zeta_of_dgp",
]
