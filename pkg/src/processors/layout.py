"""
In-process simulation of the distributed two-step synthesis.

Step 1 runs per virtual process over its orders M_i on every ring; an
all-to-all block exchange turns the m-distributed slabs into ring-distributed
ones; step 2 runs per process over its rings R_i.
"""
import logging
import math
from typing import List

import numpy as np

from .ringfft import FftBackend, synthesize_rings
from .synthesis import compute_delta_orders
from ..models.alm_set import AlmSet
from ..models.block_params import BlockParams
from ..models.layout import DistributedDelta, ExchangeReport, LayoutPlan, Phase
from ..models.ring_grid import RingGrid
from ..models.sky_map import SkyMap
from ..utils.errors import DimensionMismatchError, PhaseError, TooManyProcsError

logger = logging.getLogger(__name__)


def _paired_orders(mmax: int, n_procs: int) -> List[List[int]]:
    """
    Snake assignment over complete round pairs, leftovers to the least loaded.

    Round j hands out orders jP..jP+P-1, forwards for even j and backwards
    for odd j, so every process gets one small and one large order per pair.
    """
    m_sets: List[List[int]] = [[] for _ in range(n_procs)]
    n_orders = mmax + 1
    full_rounds = 2 * (n_orders // (2 * n_procs))

    for j in range(full_rounds):
        for i in range(n_procs):
            m = j * n_procs + (i if j % 2 == 0 else n_procs - 1 - i)
            m_sets[i].append(m)

    # cost of order m is proportional to mmax - m + 1
    loads = [sum(mmax - m + 1 for m in ms) for ms in m_sets]
    for m in range(full_rounds * n_procs, n_orders):
        target = min(range(n_procs), key=lambda i: (loads[i], i))
        m_sets[target].append(m)
        loads[target] += mmax - m + 1

    return [sorted(ms) for ms in m_sets]


def _round_robin_orders(mmax: int, n_procs: int) -> List[List[int]]:
    return [list(range(i, mmax + 1, n_procs)) for i in range(n_procs)]


def plan_layout(grid: RingGrid, mmax: int, n_procs: int, strategy: str = "paired") -> LayoutPlan:
    """
    Partition orders and rings over n_procs virtual processes.

    Args:
        grid: Ring grid (validated, symmetric)
        mmax: Largest order
        n_procs: Number of virtual processes (>= 1)
        strategy: "paired" (balanced small/large order pairs) or "round_robin"

    Returns:
        LayoutPlan whose ring sets are contiguous bands of northern rings
        together with their mirrors

    Raises:
        ValueError: If n_procs < 1 or the strategy is unknown
        TooManyProcsError: If n_procs > mmax + 1 or n_procs > ceil(n_rings / 2)

    Examples:
        >>> from src.processors.grid import make_ecp_grid
        >>> plan_layout(make_ecp_grid(3), 3, 2).m_sets
        [[0, 3], [1, 2]]
    """
    if n_procs < 1:
        raise ValueError(f"n_procs must be >= 1, got {n_procs}")
    if n_procs > mmax + 1:
        raise TooManyProcsError(f"{n_procs} processes for only {mmax + 1} orders")
    if n_procs > math.ceil(grid.n_rings / 2):
        raise TooManyProcsError(f"{n_procs} processes for only {math.ceil(grid.n_rings / 2)} ring pairs")

    if strategy == "paired":
        m_sets = _paired_orders(mmax, n_procs)
    elif strategy == "round_robin":
        m_sets = _round_robin_orders(mmax, n_procs)
    else:
        raise ValueError(f"Unknown layout strategy '{strategy}'")

    north = grid.northern_rings()
    ring_sets = []
    for band in np.array_split(np.array(north, dtype=np.int64), n_procs):
        rings = set(int(r) for r in band)
        rings.update(grid.rings[r].pair_index for r in list(rings))
        ring_sets.append(sorted(rings))

    plan = LayoutPlan(
        n_procs=n_procs, mmax=mmax, n_rings=grid.n_rings,
        m_sets=m_sets, ring_sets=ring_sets, strategy=strategy,
    )
    logger.debug("Layout plan: P=%d strategy=%s order counts=%s",
                 n_procs, strategy, [len(ms) for ms in m_sets])
    return plan


def _check_plan(plan: LayoutPlan, mmax: int, grid: RingGrid) -> None:
    if plan.mmax != mmax or plan.n_rings != grid.n_rings:
        raise DimensionMismatchError(
            f"Plan covers mmax={plan.mmax}, {plan.n_rings} rings; "
            f"data has mmax={mmax}, {grid.n_rings} rings"
        )


def distributed_step1(alm: AlmSet, grid: RingGrid, plan: LayoutPlan,
                      params: BlockParams | None = None, workers: int = 1,
                      beta_sign: float = 1.0) -> DistributedDelta:
    """
    Step 1 per virtual process: Delta_m(r) for m in M_i on every ring.

    Entries are bitwise identical to the monolithic compute_delta.

    Raises:
        DimensionMismatchError: If the plan does not match alm/grid
    """
    _check_plan(plan, alm.mmax, grid)
    slabs = []
    for i, orders in enumerate(plan.m_sets):
        slabs.append(compute_delta_orders(alm, grid, orders, params, workers, beta_sign))
        logger.debug("Process %d: step 1 over %d orders", i, len(orders))
    return DistributedDelta(phase=Phase.M_DISTRIBUTED, slabs=slabs)


def redistribute(d: DistributedDelta, plan: LayoutPlan) -> DistributedDelta:
    """
    All-to-all block exchange from m-distributed to ring-distributed slabs.

    Process i sends process j the block {Delta_m(r): m in M_i, r in R_j}
    (|M_i| * |R_j| values).

    Raises:
        PhaseError: If d is already ring-distributed
    """
    if d.phase is not Phase.M_DISTRIBUTED:
        raise PhaseError(f"Cannot redistribute a delta in phase '{d.phase.value}'")

    received = []
    for rings in plan.ring_sets:
        slab = np.zeros((len(rings), plan.mmax + 1), dtype=np.complex128)
        for sent, orders in zip(d.slabs, plan.m_sets):
            slab[:, orders] = sent[rings, :]
        received.append(slab)

    result = DistributedDelta(phase=Phase.RING_DISTRIBUTED, slabs=received)
    logger.info("Redistributed %d values over %d processes", result.value_count(), plan.n_procs)
    return result


def distributed_step2(d: DistributedDelta, grid: RingGrid, plan: LayoutPlan,
                      backend: FftBackend = "numpy", workers: int = 1) -> SkyMap:
    """
    Step 2 per virtual process over its rings, gathered into one SkyMap.

    Raises:
        PhaseError: If d is not ring-distributed
    """
    if d.phase is not Phase.RING_DISTRIBUTED:
        raise PhaseError(f"Step 2 needs a ring-distributed delta, got '{d.phase.value}'")
    _check_plan(plan, plan.mmax, grid)

    values: List[np.ndarray] = [None] * grid.n_rings
    for slab, rings in zip(d.slabs, plan.ring_sets):
        samples = synthesize_rings(slab, [grid.rings[r] for r in rings], backend, workers)
        for r, ring_values in zip(rings, samples):
            values[r] = ring_values

    return SkyMap(grid=grid, values=values)


def exchange_report(plan: LayoutPlan, mmax: int, grid: RingGrid) -> ExchangeReport:
    """
    Value counts of the redistribution, 16 bytes per complex value.

    Examples:
        >>> from src.processors.grid import make_ecp_grid
        >>> grid = make_ecp_grid(7)
        >>> exchange_report(plan_layout(grid, 15, 2), 15, grid).total_values
        256
    """
    _check_plan(plan, mmax, grid)
    counts = np.array(
        [[len(orders) * len(rings) for rings in plan.ring_sets] for orders in plan.m_sets],
        dtype=np.int64,
    )
    return ExchangeReport(n_procs=plan.n_procs, counts=counts)
