"""
Falsification procedures for the binary and discrete instrumental variable model.

Multiplicity rules: alpha/2 per inequality for the unconditional binary model,
alpha/4 per Gail-Simon test for the conditional model, alpha/(2K) for the
per-stratum alternative, alpha/{L(L-1)} for a discrete instrument.
"""

from .config import ProcedureConfig
from .procedures import (
    test_conditional_discrete,
    test_conditional_gs,
    test_conditional_perlevel,
    test_discrete,
    test_unconditional,
)
from .render import format_p_value, render_json, render_text
from .types import (
    NON_REJECTION_CAVEAT,
    SCHEMA_VERSION,
    AcdeConclusion,
    FalsifyReport,
    IneqId,
    ModelKind,
    ReportEntry,
    ReportMetadata,
)

__all__ = [
    "NON_REJECTION_CAVEAT",
    "SCHEMA_VERSION",
    "AcdeConclusion",
    "FalsifyReport",
    "IneqId",
    "ModelKind",
    "ProcedureConfig",
    "ReportEntry",
    "ReportMetadata",
    "format_p_value",
    "render_json",
    "render_text",
    "test_conditional_discrete",
    "test_conditional_gs",
    "test_conditional_perlevel",
    "test_discrete",
    "test_unconditional",
]
