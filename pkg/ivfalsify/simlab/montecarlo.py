import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Optional

import numpy as np

from ivfalsify.config import get_settings
from ivfalsify.exception import EstimationError, ParameterError
from ivfalsify.falsify.config import ProcedureConfig
from ivfalsify.simlab.dgp import draw
from ivfalsify.simlab.types import AnySpec, McResult

logger = logging.getLogger(__name__)


def _run_chunk(
    spec: AnySpec, n: int, seeds: list[np.random.SeedSequence], test: ProcedureConfig
) -> tuple[int, int]:
    """(rejections, unevaluable) over one chunk of replicates."""
    rejections = 0
    unevaluable = 0
    for seed in seeds:
        data = draw(spec, n, seed)
        try:
            report = test.run(data)
        except EstimationError:
            unevaluable += 1
            continue
        if report.metadata.unevaluable:
            unevaluable += 1
        rejections += report.overall_reject
    return rejections, unevaluable


def mc_rejection_rate(
    spec: AnySpec,
    n: int,
    reps: int,
    seed: int,
    test: ProcedureConfig,
    workers: Optional[int] = None,
) -> McResult:
    """
    Rejection rate of `test` over `reps` samples of size n drawn from `spec`.

    Replicate i draws from child i of `SeedSequence(seed)`, so the result does not
    depend on the number of workers. A replicate whose report is unevaluable (or
    cannot be produced because an arm is empty) counts as a non-rejection.
    """
    if reps < 1:
        raise ParameterError(f"reps must be positive, got {reps}")
    workers = get_settings().workers if workers is None else workers
    children = np.random.SeedSequence(seed).spawn(reps)

    if workers <= 1 or reps == 1:
        rejections, unevaluable = _run_chunk(spec, n, children, test)
    else:
        chunks = [list(chunk) for chunk in np.array_split(np.asarray(children, dtype=object), workers) if len(chunk)]
        with ProcessPoolExecutor(max_workers=workers) as executor:
            futures = [executor.submit(_run_chunk, spec, n, chunk, test) for chunk in chunks]
            counts = [future.result() for future in futures]
        rejections = sum(count[0] for count in counts)
        unevaluable = sum(count[1] for count in counts)

    result = McResult.from_counts(rejections, reps, seed, unevaluable)
    logger.info(
        f"{test.model} ({test.method}) n={n}: {rejections}/{reps} rejections, "
        f"rate={result.rate:.4f} +/- {result.mc_se:.4f}, unevaluable={unevaluable}"
    )
    return result


def mc_chibar_tail(q_plus: float, k: int, reps: int, seed: int) -> McResult:
    """Monte Carlo estimate of P(sum of max(Z_i, 0)^2 over k standard normals >= q_plus)."""
    if k < 1:
        raise ParameterError(f"k must be positive, got {k}")
    if reps < 1:
        raise ParameterError(f"reps must be positive, got {reps}")
    rng = np.random.default_rng(seed)
    draws = rng.standard_normal((reps, k))
    statistic = (np.maximum(draws, 0.0) ** 2).sum(axis=1)
    return McResult.from_counts(int((statistic >= q_plus).sum()), reps, seed)
