"""
Step 1 of the synthesis: Delta_m(theta_r) = sum_l a_lm P_lm(cos theta_r).

The recurrence runs l-outer over a (orders x rings) state. Rings are split
into blocks of params.ring_block and handed to worker threads in tasks of
params.rings_per_task blocks; beta and a_lm values are staged in windows of
the configured segment lengths that every ring block consumes before the
next window is filled. Each (ring, m) sum is accumulated in increasing l, so
the output does not depend on blocking, worker count or segment lengths.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Sequence, Tuple

import numpy as np

from . import legendre
from ..models.alm_set import AlmSet
from ..models.block_params import BlockParams
from ..models.delta_matrix import DeltaMatrix
from ..models.ring_grid import RingGrid
from ..utils.errors import DimensionMismatchError

logger = logging.getLogger(__name__)


def delta_negative_m(delta_row_m):
    """
    Delta_{-m} for m > 0, the complex conjugate of Delta_m.

    Accepts a single value or an array of Delta_m values.

    Examples:
        >>> delta_negative_m(1 + 2j)
        (1-2j)
    """
    return np.conj(delta_row_m)


class _StagedWindows:
    """Shared beta and a_lm windows, refilled at segment boundaries"""

    def __init__(self, alm: AlmSet, m_values: np.ndarray, params: BlockParams, beta_sign: float):
        self.alm = alm
        self.m_values = m_values
        self.beta_len = params.beta_segment_len
        self.alm_len = params.alm_segment_len
        self.beta_sign = beta_sign
        self.beta_start = -1
        self.alm_start = -1
        self.beta_next = None
        self.inv_beta_cur = None
        self.coeff = None

    def chunks(self, lmax: int) -> List[Tuple[int, int]]:
        """[l0, l1) ranges that stay inside one beta window and one alm window"""
        bounds = set(range(0, lmax + 1, self.beta_len)) | set(range(0, lmax + 1, self.alm_len))
        bounds = sorted(bounds) + [lmax + 1]
        return list(zip(bounds[:-1], bounds[1:]))

    def stage(self, l0: int) -> None:
        if l0 % self.beta_len == 0:
            self._fill_beta(l0)
        if l0 % self.alm_len == 0:
            self._fill_alm(l0)

    def _fill_beta(self, l0: int) -> None:
        # row i holds beta_{l, m} and 1 / beta_{l-1, m} for l = l0 + i
        values, inverse = legendre.fill_beta_block(self.m_values, l0 - 1, self.beta_len + 1)
        self.beta_next = self.beta_sign * values[1:]
        self.inv_beta_cur = self.beta_sign * inverse[:-1]
        self.beta_start = l0
        logger.debug("Staged beta window l=%d..%d", l0, l0 + self.beta_len - 1)

    def _fill_alm(self, l0: int) -> None:
        lmax = self.alm.lmax
        window = np.zeros((self.alm_len, self.m_values.size), dtype=np.complex128)
        for j, m in enumerate(self.m_values):
            lo = max(l0, int(m))
            hi = min(l0 + self.alm_len, lmax + 1)
            if lo < hi:
                row = self.alm.row(int(m))
                window[lo - l0:hi - l0, j] = row[lo - m:hi - m]
        self.coeff = window
        self.alm_start = l0
        logger.debug("Staged a_lm window l=%d..%d", l0, l0 + self.alm_len - 1)


class _DeltaKernel:
    """
    Recurrence state and accumulators for a set of orders over a set of rings.

    With split_parity the sums are kept separately for even and odd l + m
    (accumulator planes 0 and 1).
    """

    def __init__(self, m_values: np.ndarray, x: np.ndarray, s: np.ndarray,
                 mu: legendre.MuTable, table: legendre.RescaleTable, split_parity: bool = False):
        self.m_values = m_values
        self.x = x
        self.table = table
        self.split_parity = split_parity

        n_m, n_cols = m_values.size, x.size
        self.p_cur = np.zeros((n_m, n_cols))
        self.p_prev = np.zeros((n_m, n_cols))
        self.scale_k = np.zeros((n_m, n_cols), dtype=np.int64)
        # seeds are computed per order over the full ring vector
        log2_s = np.log2(s)
        for j, m in enumerate(m_values):
            self.p_prev[j], self.p_cur[j], self.scale_k[j] = legendre.seed_values(int(m), x, s, mu, log2_s)

        planes = 2 if split_parity else 1
        self.acc_re = np.zeros((planes, n_m, n_cols))
        self.acc_im = np.zeros((planes, n_m, n_cols))

    def run(self, cols: slice, l0: int, l1: int, windows: _StagedWindows) -> None:
        """Advance columns `cols` through degrees l0..l1-1"""
        m_values = self.m_values
        x = self.x[cols]
        for l in range(l0, l1):
            n_step = int(np.searchsorted(m_values, l - 1, side='left'))
            n_lt = int(np.searchsorted(m_values, l, side='left'))

            if n_step:
                b = l - windows.beta_start
                beta_next = windows.beta_next[b, :n_step, None]
                inv_beta_cur = windows.inv_beta_cur[b, :n_step, None]
                p_cur, p_prev, k = legendre.advance(
                    self.p_cur[:n_step, cols], self.p_prev[:n_step, cols],
                    self.scale_k[:n_step, cols], x, beta_next, inv_beta_cur,
                )
                self.p_cur[:n_step, cols] = p_cur
                self.p_prev[:n_step, cols] = p_prev
                self.scale_k[:n_step, cols] = k

            a = windows.coeff[l - windows.alm_start]
            if n_lt:
                values = legendre.unscale_array(self.p_cur[:n_lt, cols], self.scale_k[:n_lt, cols], self.table)
                self._accumulate(l, slice(0, n_lt), cols, a[:n_lt], values)
            if n_lt < m_values.size and m_values[n_lt] == l:
                # P_mm sits in p_prev until the row starts stepping
                values = legendre.unscale_array(self.p_prev[n_lt:n_lt + 1, cols],
                                                self.scale_k[n_lt:n_lt + 1, cols], self.table)
                self._accumulate(l, slice(n_lt, n_lt + 1), cols, a[n_lt:n_lt + 1], values)

    def _accumulate(self, l: int, rows: slice, cols: slice, a: np.ndarray, values: np.ndarray) -> None:
        contrib_re = a.real[:, None] * values
        contrib_im = a.imag[:, None] * values
        if not self.split_parity:
            self.acc_re[0, rows, cols] += contrib_re
            self.acc_im[0, rows, cols] += contrib_im
            return

        odd = ((l + self.m_values[rows]) & 1).astype(bool)
        for plane, mask in ((0, ~odd), (1, odd)):
            if mask.any():
                target_re = self.acc_re[plane, rows, cols]
                target_im = self.acc_im[plane, rows, cols]
                target_re[mask] += contrib_re[mask]
                target_im[mask] += contrib_im[mask]

    def result(self, plane: int = 0) -> np.ndarray:
        """Accumulated sums as complex (n_m, n_cols)"""
        return self.acc_re[plane] + 1j * self.acc_im[plane]


def _ring_tasks(n_cols: int, params: BlockParams) -> List[List[slice]]:
    """Ring blocks grouped into worker tasks"""
    blocks = [slice(c, min(c + params.ring_block, n_cols)) for c in range(0, n_cols, params.ring_block)]
    per_task = params.rings_per_task
    return [blocks[i:i + per_task] for i in range(0, len(blocks), per_task)]


def _run_kernel(kernel: _DeltaKernel, windows: _StagedWindows, lmax: int,
                n_cols: int, params: BlockParams, workers: int) -> None:
    tasks = _ring_tasks(n_cols, params)

    def run_task(blocks: Sequence[slice], l0: int, l1: int) -> None:
        for cols in blocks:
            kernel.run(cols, l0, l1, windows)

    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for l0, l1 in windows.chunks(lmax):
            windows.stage(l0)
            if pool is None:
                for blocks in tasks:
                    run_task(blocks, l0, l1)
                continue
            # every block finishes this window before it is refilled
            futures = [pool.submit(run_task, blocks, l0, l1) for blocks in tasks]
            for future in futures:
                future.result()
    finally:
        if pool is not None:
            pool.shutdown(wait=True)


def compute_delta_orders(alm: AlmSet, grid: RingGrid, m_values: Sequence[int],
                         params: BlockParams | None = None, workers: int = 1,
                         beta_sign: float = 1.0) -> np.ndarray:
    """
    Delta_m(theta_r) for a subset of orders on every ring.

    Args:
        alm: Coefficients
        grid: Ring grid
        m_values: Orders to compute (each in 0..alm.mmax)
        params: Blocking parameters (defaults to BlockParams())
        workers: Worker threads for ring tasks
        beta_sign: Multiplier applied to every staged beta (1.0 except in
            mutation checks)

    Returns:
        complex128 array of shape (n_rings, len(m_values)), columns in the
        order given

    Raises:
        DimensionMismatchError: If an order lies outside 0..alm.mmax
    """
    params = params or BlockParams()
    requested = np.asarray(list(m_values), dtype=np.int64)
    if requested.size and (requested.min() < 0 or requested.max() > alm.mmax):
        raise DimensionMismatchError(
            f"Orders {requested.min()}..{requested.max()} outside coefficient range 0..{alm.mmax}"
        )
    if requested.size == 0:
        return np.zeros((grid.n_rings, 0), dtype=np.complex128)

    order = np.argsort(requested, kind='stable')
    m_sorted = requested[order]

    mu = legendre.compute_mu(alm.mmax)
    table = legendre.build_rescale_table()
    kernel = _DeltaKernel(m_sorted, grid.cos_theta, grid.sin_theta, mu, table)
    windows = _StagedWindows(alm, m_sorted, params, beta_sign)

    logger.debug("Step 1: %d orders x %d rings, %s, workers=%d",
                 m_sorted.size, grid.n_rings, params.label(), workers)
    _run_kernel(kernel, windows, alm.lmax, grid.n_rings, params, workers)

    out = np.empty((grid.n_rings, requested.size), dtype=np.complex128)
    out[:, order] = kernel.result().T
    return out


def compute_delta(alm: AlmSet, grid: RingGrid, params: BlockParams | None = None,
                  workers: int = 1, beta_sign: float = 1.0) -> DeltaMatrix:
    """
    Delta_m(theta_r) for every ring and 0 <= m <= mmax.

    Args:
        alm: Coefficients
        grid: Ring grid
        params: Blocking parameters; never change the output bits
        workers: Worker threads for ring tasks
        beta_sign: Multiplier for staged beta values (mutation checks only)

    Returns:
        DeltaMatrix of shape (n_rings, mmax + 1)

    Examples:
        >>> from src.processors.grid import make_ecp_grid
        >>> alm = AlmSet.from_dict(0, 0, {(0, 0): (4 * np.pi) ** 0.5})
        >>> compute_delta(alm, make_ecp_grid(0)).data[:, 0].real
        array([1., 1.])
    """
    data = compute_delta_orders(alm, grid, range(alm.mmax + 1), params, workers, beta_sign)
    logger.info("Step 1 complete: lmax=%d mmax=%d rings=%d", alm.lmax, alm.mmax, grid.n_rings)
    return DeltaMatrix(n_rings=grid.n_rings, mmax=alm.mmax, data=data)


def compute_delta_pair(alm: AlmSet, grid: RingGrid, params: BlockParams | None = None,
                       workers: int = 1, beta_sign: float = 1.0) -> DeltaMatrix:
    """
    compute_delta using equatorial symmetry.

    The recurrence runs on northern rings only, accumulating even (E) and
    odd (O) l + m terms separately; the mirror ring gets E - O.

    Returns:
        DeltaMatrix equal to compute_delta within rounding
    """
    params = params or BlockParams()
    north = np.array(grid.northern_rings(), dtype=np.int64)
    m_values = np.arange(alm.mmax + 1, dtype=np.int64)

    mu = legendre.compute_mu(alm.mmax)
    table = legendre.build_rescale_table()
    kernel = _DeltaKernel(m_values, grid.cos_theta[north], grid.sin_theta[north],
                          mu, table, split_parity=True)
    windows = _StagedWindows(alm, m_values, params, beta_sign)
    _run_kernel(kernel, windows, alm.lmax, north.size, params, workers)

    even = kernel.result(0).T
    odd = kernel.result(1).T
    data = np.empty((grid.n_rings, alm.mmax + 1), dtype=np.complex128)
    data[north] = even + odd
    pairs = np.array([grid.rings[r].pair_index for r in north], dtype=np.int64)
    mirrored = pairs != north
    data[pairs[mirrored]] = (even - odd)[mirrored]

    logger.info("Step 1 (paired) complete: %d northern rings of %d", north.size, grid.n_rings)
    return DeltaMatrix(n_rings=grid.n_rings, mmax=alm.mmax, data=data)
