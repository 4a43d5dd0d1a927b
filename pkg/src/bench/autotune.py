"""Exhaustive sweep over block parameters"""
import hashlib
import logging
import time
from itertools import product
from typing import Iterable, Sequence

from ..models.alm_set import AlmSet
from ..models.block_params import BlockParams
from ..models.reports import TuneEntry, TuneResult
from ..models.sky_map import SkyMap
from ..processors.grid import make_ecp_grid
from ..processors.ringfft import synthesize_map
from ..processors.synthesis import compute_delta

logger = logging.getLogger(__name__)

DEFAULT_SEGMENT_LENGTHS = (16, 64, 128, 256, 512)
DEFAULT_RING_BLOCKS = (16, 32, 64, 128, 256, 512)


def map_digest(sky_map: SkyMap) -> str:
    """SHA-256 over the little-endian samples of every ring"""
    digest = hashlib.sha256()
    for samples in sky_map.values:
        digest.update(samples.astype('<f8').tobytes())
    return digest.hexdigest()


def autotune(lmax: int | Iterable[int],
             segment_lengths: Sequence[int] = DEFAULT_SEGMENT_LENGTHS,
             ring_blocks: Sequence[int] = DEFAULT_RING_BLOCKS,
             repeats: int = 1, workers: int = 1, seed: int = 0,
             backend: str = "numpy") -> TuneResult:
    """
    Time the full synthesis for every (segment length, ring block) pair.

    Both beta and a_lm windows use the swept segment length. Each
    configuration's map is hashed so the result can confirm the parameters
    never change the output.

    Args:
        lmax: One band limit or several
        segment_lengths: Swept segment lengths
        ring_blocks: Swept ring block sizes
        repeats: Runs per configuration (minimum is kept)
        workers: Worker threads
        seed: Coefficient generator seed
        backend: FFT backend

    Returns:
        TuneResult over len(segment_lengths) * len(ring_blocks) configurations
        per band limit

    Raises:
        ValueError: If the sweep is empty
    """
    sizes = [lmax] if isinstance(lmax, int) else list(lmax)
    sweep = [
        BlockParams(ring_block=rb, beta_segment_len=seg, alm_segment_len=seg)
        for seg, rb in product(segment_lengths, ring_blocks)
    ]
    if not sweep or not sizes:
        raise ValueError("Autotune sweep cannot be empty")

    entries = []
    for size in sizes:
        grid = make_ecp_grid(size)
        alm = AlmSet.random(size, size, seed=seed)
        for params in sweep:
            seconds = float('inf')
            for _ in range(max(repeats, 1)):
                t0 = time.perf_counter()
                sky_map = synthesize_map(compute_delta(alm, grid, params, workers), grid, backend, workers)
                seconds = min(seconds, time.perf_counter() - t0)
            entries.append(TuneEntry(lmax=size, params=params, seconds=seconds, digest=map_digest(sky_map)))
            logger.debug("Tuned lmax=%d %s: %.4fs", size, params.label(), seconds)

    result = TuneResult(entries=entries)
    if not result.identical_output:
        logger.error("Block parameters changed the synthesized map")
    logger.info("Autotune winner: %s", result.best.label())
    return result
