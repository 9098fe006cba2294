"""
One-sided tests of p1 <= p0 against p1 > p0 for a two-by-two table.

Asymptotic Wald test, exact unconditional Fisher-Boschloo test and the
Berger-Boos confidence-interval refinement of its nuisance supremum.
"""

from .exact import berger_boos, boschloo_exact, clopper_pearson, fisher_one_sided
from .runner import resolve_method, run_test
from .types import TestMethod, TestResult
from .wald import wald_one_sided

__all__ = [
    "TestMethod",
    "TestResult",
    "berger_boos",
    "boschloo_exact",
    "clopper_pearson",
    "fisher_one_sided",
    "resolve_method",
    "run_test",
    "wald_one_sided",
]
