"""Wall-clock benchmark of the distributed pipeline stages"""
import logging
import time
from typing import Iterable

import pandas as pd

from .flops import flop_estimate
from ..models.alm_set import AlmSet
from ..models.block_params import BlockParams
from ..processors.grid import make_ecp_grid
from ..processors.layout import (
    distributed_step1,
    distributed_step2,
    exchange_report,
    plan_layout,
    redistribute,
)

logger = logging.getLogger(__name__)

TIMING_COLUMNS = [
    'lmax', 'params', 'procs', 't_step1', 't_exchange', 't_step2',
    'total', 'gflops_estimate', 'exchanged_bytes',
]


def run_benchmark(lmax_list: Iterable[int], params: BlockParams | None = None, repeats: int = 3,
                  procs: int = 1, workers: int = 1, seed: int = 0,
                  backend: str = "numpy") -> pd.DataFrame:
    """
    Time step 1, the redistribution and step 2 on ECP grids.

    Each stage reports the minimum over `repeats` runs; total is the minimum
    of the per-run sums. gflops_estimate rates the step 1 operation tally
    against t_step1.

    Args:
        lmax_list: Band limits to run (lmax = mmax, grid ecp:lmax)
        params: Blocking parameters (defaults to BlockParams())
        repeats: Runs per size (>= 1)
        procs: Virtual processes
        workers: Worker threads inside each stage
        seed: Coefficient generator seed
        backend: FFT backend for step 2

    Returns:
        DataFrame with TIMING_COLUMNS, one row per lmax
    """
    if repeats < 1:
        raise ValueError(f"repeats must be >= 1, got {repeats}")
    params = params or BlockParams()

    rows = []
    for lmax in lmax_list:
        grid = make_ecp_grid(lmax)
        alm = AlmSet.random(lmax, lmax, seed=seed)
        plan = plan_layout(grid, lmax, procs)

        best = {'t_step1': float('inf'), 't_exchange': float('inf'),
                't_step2': float('inf'), 'total': float('inf')}
        for _ in range(repeats):
            t0 = time.perf_counter()
            m_slabs = distributed_step1(alm, grid, plan, params, workers)
            t1 = time.perf_counter()
            ring_slabs = redistribute(m_slabs, plan)
            t2 = time.perf_counter()
            distributed_step2(ring_slabs, grid, plan, backend, workers)
            t3 = time.perf_counter()

            best['t_step1'] = min(best['t_step1'], t1 - t0)
            best['t_exchange'] = min(best['t_exchange'], t2 - t1)
            best['t_step2'] = min(best['t_step2'], t3 - t2)
            best['total'] = min(best['total'], t3 - t0)

        flops = flop_estimate(lmax, lmax, grid)
        gflops = flops.rated(best['t_step1']).gflops if best['t_step1'] > 0 else None
        rows.append({
            'lmax': lmax,
            'params': params.label(),
            'procs': procs,
            **best,
            'gflops_estimate': gflops,
            'exchanged_bytes': exchange_report(plan, lmax, grid).total_bytes,
        })
        logger.info("Benchmark lmax=%d: step1=%.4fs exchange=%.4fs step2=%.4fs",
                    lmax, best['t_step1'], best['t_exchange'], best['t_step2'])

    return pd.DataFrame(rows, columns=TIMING_COLUMNS)
