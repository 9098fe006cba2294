import numpy as np

from ivfalsify.exception import DomainError
from ivfalsify.inequality.types import CELLS, ZetaPoint
from ivfalsify.simlab.types import DgpSpec, MarginsSpec, Regime, StratifiedSpec
from ivfalsify.tabulate.types import JointCounts, StratifiedCounts

Seed = int | np.random.SeedSequence


def population_u(spec: DgpSpec, d: int, y: int) -> float:
    """pr(D=d, Y=y | Z=1) + pr(D=d, Y=1-y | Z=0) under a binary spec."""
    arms = spec.arm_distributions()
    if arms.shape != (2, 2, 2):
        raise DomainError(f"expected a binary spec, got arm distributions of shape {arms.shape}")
    return float(arms[1, d, y] + arms[0, d, 1 - y])


def zeta_of_dgp(spec: DgpSpec) -> ZetaPoint:
    """Population point (u00, u01, u10) of a binary spec."""
    return ZetaPoint(u00=population_u(spec, 0, 0), u01=population_u(spec, 0, 1), u10=population_u(spec, 1, 0))


def _exterior(d: int, y: int) -> MarginsSpec:
    """u^{dy} = 0.8 + 0.5 = 1.3, remaining mass spread evenly so every other u^{d'y'} is 7/30."""
    target = CELLS.index((d, y))
    mirror = CELLS.index((d, 1 - y))
    p1 = [0.2 / 3] * 4
    p1[target] = 0.8
    p0 = [0.5 / 3] * 4
    p0[mirror] = 0.5
    return MarginsSpec(p1=p1, p0=p0)


def boundary_spec(regime: Regime, cell: tuple[int, int] = (0, 1)) -> MarginsSpec:
    """Canonical margins spec in a given position relative to the null octahedron."""
    match Regime(regime):
        case Regime.TWO_EQUALITIES:
            # u00 = u01 = 1 with non-degenerate Q proportions, u10 = u11 = 0
            return MarginsSpec(p1=[0.5, 0.5, 0.0, 0.0], p0=[0.5, 0.5, 0.0, 0.0])
        case Regime.ONE_EQUALITY:
            # u00 = 1, u01 = 0.5, u10 = u11 = 0.25
            return MarginsSpec(p1=[0.5, 0.2, 0.15, 0.15], p0=[0.3, 0.5, 0.1, 0.1])
        case Regime.INTERIOR:
            return MarginsSpec(p1=[0.25] * 4, p0=[0.25] * 4)
        case Regime.EXTERIOR:
            return _exterior(*cell)


def sample(spec: DgpSpec, n: int, seed: Seed) -> JointCounts:
    """n independent draws of Z from its distribution, then (D, Y) from the arm of the drawn Z."""
    if n < 1:
        raise ValueError(f"sample size must be positive, got {n}")
    rng = np.random.default_rng(seed)
    arms = spec.arm_distributions()
    instrument = spec.instrument_probs()
    arm_sizes = rng.multinomial(n, instrument / instrument.sum())

    counts = np.zeros(arms.shape, dtype=np.int64)
    for z, size in enumerate(arm_sizes):
        cells = arms[z].ravel()
        counts[z] = rng.multinomial(size, cells / cells.sum()).reshape(arms.shape[1:])
    return JointCounts(counts=counts)


def sample_stratified(spec: StratifiedSpec, n_per_stratum: int, seed: Seed) -> StratifiedCounts:
    """Independent samples per stratum, keyed (0,), (1,), ..."""
    sequence = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    children = sequence.spawn(len(spec.strata))
    strata = {(k,): sample(stratum, n_per_stratum, child) for k, (stratum, child) in enumerate(zip(spec.strata, children))}
    return StratifiedCounts(strata=strata)


def draw(spec: DgpSpec | StratifiedSpec, n: int, seed: Seed) -> JointCounts | StratifiedCounts:
    if isinstance(spec, StratifiedSpec):
        return sample_stratified(spec, n, seed)
    return sample(spec, n, seed)
