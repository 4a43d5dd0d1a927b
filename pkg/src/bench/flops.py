"""Analytic operation count of step 1"""
from ..models.reports import FlopReport
from ..models.ring_grid import RingGrid
from ..utils.validators import validate_band_limits

# (muls, adds, special ops) per unit of work
RECURRENCE_STEP = (3, 1, 0)         # beta_{l+1} (x P_l - P_{l-1} / beta_l) with a staged 1/beta
ACCUMULATION = (5, 4, 0)            # unscale, complex a_lm * P into Delta
SEED_PER_RING_ORDER = (5, 2, 2)     # exponent split: m log2 s, t / 126, exp2, P_{m+1,m}
LOG_PER_RING = (0, 0, 1)            # log2 sin(theta)
PER_ORDER = (4, 2, 4)               # mu ratio, log2 mu, beta_{m+1,m}
BETA_PER_STEP = (3, 2, 3)           # beta and its reciprocal, shared by all rings


def flop_estimate(lmax: int, mmax: int, grid: RingGrid | int) -> FlopReport:
    """
    Operation tally of step 1 on a grid.

    Per (ring, m, l) the recurrence step and the accumulation dominate, so
    the total grows as n_rings * lmax**2. Staged beta values are counted
    once per (m, l) since every ring shares them.

    Args:
        lmax: Band limit
        mmax: Largest order (<= lmax)
        grid: Grid or its ring count

    Returns:
        FlopReport (unrated)

    Examples:
        >>> flop_estimate(0, 0, 2).total
        238
    """
    lmax, mmax = validate_band_limits(lmax, mmax)
    n_rings = grid if isinstance(grid, int) else grid.n_rings
    if n_rings < 1:
        raise ValueError(f"Grid must have at least one ring, got {n_rings}")

    orders = mmax + 1
    terms = sum(lmax - m + 1 for m in range(orders))
    steps = sum(max(lmax - m - 1, 0) for m in range(orders))

    counts = [0, 0, 0]
    for unit, repeat in (
        (RECURRENCE_STEP, n_rings * steps),
        (ACCUMULATION, n_rings * terms),
        (SEED_PER_RING_ORDER, n_rings * orders),
        (LOG_PER_RING, n_rings),
        (PER_ORDER, orders),
        (BETA_PER_STEP, steps),
    ):
        for i in range(3):
            counts[i] += unit[i] * repeat

    muls, adds, special = counts
    return FlopReport(lmax=lmax, mmax=mmax, n_rings=n_rings, adds=adds, muls=muls, special_ops=special)
