"""Step 2 of the synthesis: per-ring Fourier sums of Delta_m"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, List, Literal

import numpy as np
import scipy.fft
from pydantic import BaseModel, Field, field_validator

from .synthesis import delta_negative_m
from ..models.delta_matrix import DeltaMatrix
from ..models.ring_grid import RingDescriptor, RingGrid
from ..models.sky_map import SkyMap
from ..utils.errors import DimensionMismatchError, NonRealOutputError

logger = logging.getLogger(__name__)

FftBackend = Literal["numpy", "scipy"]

IMAG_RESIDUE_TOLERANCE = 1e-11

# unnormalized backward transforms: s_j = sum_b bins[b] exp(+2 pi i b j / n)
_BACKENDS = {
    "numpy": lambda bins: np.fft.ifft(bins, norm="forward"),
    "scipy": lambda bins: scipy.fft.ifft(bins, norm="forward"),
}


class RingSpectrum(BaseModel):
    """Folded Fourier bins of one ring (length n_phi)"""

    bins: np.ndarray = Field(..., description="complex128 bins, b = 0..n_phi-1")

    model_config = {"arbitrary_types_allowed": True, "frozen": True}

    @field_validator('bins')
    @classmethod
    def non_empty(cls, v: np.ndarray) -> np.ndarray:
        if v.ndim != 1 or v.size == 0:
            raise ValueError("Ring spectrum needs at least one bin")
        return v

    @property
    def n_phi(self) -> int:
        return self.bins.size


def fold_modes(delta_row: np.ndarray, ring: RingDescriptor) -> RingSpectrum:
    """
    Wrap orders -mmax..mmax onto the n_phi Fourier bins of a ring.

    Bin (m mod n_phi) receives Delta_m exp(i m phi_0) for m >= 0 and bin
    (-m mod n_phi) receives conj(Delta_m) exp(-i m phi_0) for m >= 1.
    Congruent orders are co-added; bins without a contributing order stay 0.

    Args:
        delta_row: Delta_m for m = 0..mmax on this ring
        ring: Ring supplying n_phi and phi_0

    Returns:
        RingSpectrum of length ring.n_phi

    Examples:
        >>> ring = RingDescriptor.from_theta(1.0, 4)
        >>> fold_modes(np.array([0, 1]), ring).bins.real
        array([0., 1., 0., 1.])
    """
    delta_row = np.asarray(delta_row, dtype=np.complex128)
    n = ring.n_phi
    m = np.arange(delta_row.size)
    phase = np.exp(1j * m * ring.phi_0) if ring.phi_0 != 0.0 else np.ones(m.size, dtype=np.complex128)

    bins = np.zeros(n, dtype=np.complex128)
    np.add.at(bins, m % n, delta_row * phase)
    np.add.at(bins, (-m[1:]) % n, delta_negative_m(delta_row[1:]) * np.conj(phase[1:]))
    return RingSpectrum(bins=bins)


def synthesize_ring(spectrum: RingSpectrum, backend: FftBackend = "numpy") -> np.ndarray:
    """
    Real ring samples from folded bins.

    Args:
        spectrum: Spectrum from fold_modes
        backend: FFT implementation ("numpy" or "scipy")

    Returns:
        float64 array of n_phi samples

    Raises:
        NonRealOutputError: If max|Im| > 1e-11 (1 + max|Re|)

    Examples:
        >>> synthesize_ring(RingSpectrum(bins=np.array([0, 1, 0, 1], dtype=complex)))
        array([ 2.,  0., -2.,  0.])
    """
    if backend not in _BACKENDS:
        raise ValueError(f"Unknown FFT backend '{backend}', expected one of {sorted(_BACKENDS)}")

    samples = _BACKENDS[backend](spectrum.bins)
    residue = float(np.max(np.abs(samples.imag)))
    scale = float(np.max(np.abs(samples.real)))
    if residue > IMAG_RESIDUE_TOLERANCE * (1.0 + scale):
        raise NonRealOutputError(
            f"Ring synthesis left imaginary residue {residue:.3e} (max real {scale:.3e})"
        )
    return np.ascontiguousarray(samples.real)


def synthesize_rings(rows: np.ndarray, rings: Iterable[RingDescriptor],
                     backend: FftBackend = "numpy", workers: int = 1) -> List[np.ndarray]:
    """fold_modes + synthesize_ring for matching Delta rows and rings"""
    jobs = list(zip(rows, rings))

    def one(job) -> np.ndarray:
        row, ring = job
        return synthesize_ring(fold_modes(row, ring), backend)

    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, jobs))
    return [one(job) for job in jobs]


def synthesize_map(delta: DeltaMatrix, grid: RingGrid, backend: FftBackend = "numpy",
                   workers: int = 1) -> SkyMap:
    """
    Map samples on every ring of the grid.

    Args:
        delta: Step 1 output
        grid: Grid the delta was computed on
        backend: FFT implementation
        workers: Worker threads over rings

    Returns:
        SkyMap on grid

    Raises:
        DimensionMismatchError: If delta and grid disagree on the ring count
        NonRealOutputError: If a ring fails the residue check
    """
    if delta.n_rings != grid.n_rings:
        raise DimensionMismatchError(
            f"Delta has {delta.n_rings} rings, grid has {grid.n_rings}"
        )

    n_phi_min = int(grid.n_phi.min())
    if n_phi_min <= 2 * delta.mmax:
        logger.debug("Folding orders up to %d onto rings with n_phi >= %d", delta.mmax, n_phi_min)

    values = synthesize_rings(delta.data, grid.rings, backend, workers)
    logger.info("Step 2 complete: %d rings, %d pixels", grid.n_rings, grid.n_pix)
    return SkyMap(grid=grid, values=values)
