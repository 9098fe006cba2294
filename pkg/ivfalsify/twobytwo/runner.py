from ivfalsify.config import get_settings
from ivfalsify.exception import ConfigurationError
from ivfalsify.inequality.types import TwoByTwo
from ivfalsify.twobytwo.exact import berger_boos, boschloo_exact
from ivfalsify.twobytwo.types import TestMethod, TestResult
from ivfalsify.twobytwo.wald import wald_one_sided


def resolve_method(t: TwoByTwo, method: TestMethod, exact_threshold: int | None = None) -> TestMethod:
    """Replace AUTO by Wald for large arms and by the Boschloo test otherwise."""
    if method != TestMethod.AUTO:
        return TestMethod(method)
    threshold = get_settings().exact_threshold if exact_threshold is None else exact_threshold
    return TestMethod.WALD if min(t.n1, t.n0) >= threshold else TestMethod.BOSCHLOO


def run_test(
    t: TwoByTwo,
    method: TestMethod,
    gamma: float | None = None,
    exact_threshold: int | None = None,
) -> TestResult:
    """Run the one-sided test selected by `method` on a two-by-two table."""
    match resolve_method(t, method, exact_threshold):
        case TestMethod.WALD:
            return wald_one_sided(t)
        case TestMethod.BOSCHLOO:
            return boschloo_exact(t)
        case TestMethod.BERGER_BOOS:
            if gamma is None:
                raise ConfigurationError("the Berger-Boos procedure needs gamma")
            return berger_boos(t, gamma)
        case other:
            raise ConfigurationError(f"unsupported test method {other}")
