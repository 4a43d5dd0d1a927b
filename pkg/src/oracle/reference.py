"""
Reference Legendre values and brute-force synthesis.

Nothing here uses the rescale table or the blocked kernel: the recurrence
is evaluated in WideFloat arithmetic and the map by summing every (l, m)
term at every pixel.
"""
import logging
import math
from typing import Callable, Dict, Tuple

import numpy as np

from .wide_float import WideArray, WideFloat
from ..models.alm_set import AlmSet
from ..models.ring_grid import RingGrid
from ..models.sky_map import SkyMap
from ..utils.errors import TooLargeError, UnsupportedDegreeError

logger = logging.getLogger(__name__)

DIRECT_SYNTHESIS_MAX_LMAX = 64
CLOSED_FORM_MAX_L = 4

# d^m P_l / dx^m of the Legendre polynomials, l <= 4
_DERIVATIVES: Dict[Tuple[int, int], Callable[[float], float]] = {
    (0, 0): lambda x: 1.0,
    (1, 0): lambda x: x,
    (1, 1): lambda x: 1.0,
    (2, 0): lambda x: (3.0 * x * x - 1.0) / 2.0,
    (2, 1): lambda x: 3.0 * x,
    (2, 2): lambda x: 3.0,
    (3, 0): lambda x: (5.0 * x ** 3 - 3.0 * x) / 2.0,
    (3, 1): lambda x: (15.0 * x * x - 3.0) / 2.0,
    (3, 2): lambda x: 15.0 * x,
    (3, 3): lambda x: 15.0,
    (4, 0): lambda x: (35.0 * x ** 4 - 30.0 * x * x + 3.0) / 8.0,
    (4, 1): lambda x: (35.0 * x ** 3 - 15.0 * x) / 2.0,
    (4, 2): lambda x: (105.0 * x * x - 15.0) / 2.0,
    (4, 3): lambda x: 105.0 * x,
    (4, 4): lambda x: 105.0,
}


def _beta(l: int, m: int) -> float:
    return math.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))


def _check_indices(l: int, m: int) -> None:
    if not 0 <= m <= l:
        raise ValueError(f"Need 0 <= m <= l, got l={l}, m={m}")


def direct_plm(l: int, m: int, theta: float) -> WideFloat:
    """
    Normalized P_lm(cos theta) evaluated entirely in WideFloat arithmetic.

    Args:
        l: Degree
        m: Order (0 <= m <= l)
        theta: Colatitude in (0, pi)

    Returns:
        WideFloat value (no Condon-Shortley phase)

    Examples:
        >>> round(float(direct_plm(1, 1, math.pi / 2)), 12)
        0.345494149471
    """
    _check_indices(l, m)
    if not 0.0 < theta < math.pi:
        raise ValueError(f"theta must lie in (0, pi), got {theta}")

    x = WideFloat.of(math.cos(theta))
    s = WideFloat.of(math.sin(theta))

    mu = WideFloat.of(1.0 / math.sqrt(4.0 * math.pi))
    for k in range(1, m + 1):
        mu = mu * math.sqrt((2.0 * k + 1.0) / (2.0 * k))

    p_prev = mu
    for _ in range(m):
        p_prev = p_prev * s
    if l == m:
        return p_prev

    p_cur = _beta(m + 1, m) * x * p_prev
    for n in range(m + 1, l):
        p_next = _beta(n + 1, m) * (x * p_cur - p_prev / _beta(n, m))
        p_prev, p_cur = p_cur, p_next
    return p_cur


def _wide_column(m: int, lmax: int, x: np.ndarray, s: np.ndarray) -> np.ndarray:
    """P_lm for l = m..lmax on every (x, s), shape (lmax - m + 1, len(x))"""
    x_w = WideArray(x)
    s_w = WideArray(s)

    mu = 1.0 / math.sqrt(4.0 * math.pi)
    mu_w = WideArray(np.full(x.shape, mu))
    for k in range(1, m + 1):
        mu_w = mu_w * math.sqrt((2.0 * k + 1.0) / (2.0 * k))

    p_prev = mu_w
    for _ in range(m):
        p_prev = p_prev * s_w

    out = np.zeros((lmax - m + 1,) + x.shape)
    out[0] = p_prev.to_float()
    if lmax == m:
        return out

    p_cur = x_w * p_prev * _beta(m + 1, m)
    out[1] = p_cur.to_float()
    for n in range(m + 1, lmax):
        p_next = (x_w * p_cur - p_prev / _beta(n, m)) * _beta(n + 1, m)
        p_prev, p_cur = p_cur, p_next
        out[n + 1 - m] = p_cur.to_float()
    return out


def direct_plm_column(m: int, lmax: int, theta) -> np.ndarray:
    """
    P_lm for l = m..lmax at one or more colatitudes, via WideArray.

    Values below the double range come back as 0.0.

    Returns:
        float64 array of shape (lmax - m + 1,) + np.shape(theta)
    """
    _check_indices(lmax, m)
    theta = np.asarray(theta, dtype=np.float64)
    if np.any((theta <= 0.0) | (theta >= math.pi)):
        raise ValueError("theta must lie in (0, pi)")
    flat = theta.ravel()
    out = _wide_column(m, lmax, np.cos(flat), np.sin(flat))
    return out.reshape((lmax - m + 1,) + theta.shape)


def closed_form_plm(l: int, m: int, theta: float) -> float:
    """
    Analytic normalized P_lm for l <= 4.

    P_lm = sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!) sin^m(theta) d^m P_l/dx^m.

    Raises:
        UnsupportedDegreeError: If l > 4

    Examples:
        >>> round(closed_form_plm(1, 1, math.pi / 6), 7)
        0.1727471
    """
    if l > CLOSED_FORM_MAX_L:
        raise UnsupportedDegreeError(f"Closed forms are tabulated for l <= {CLOSED_FORM_MAX_L}, got {l}")
    _check_indices(l, m)

    x = math.cos(theta)
    s = math.sin(theta)
    norm = math.sqrt((2 * l + 1) / (4.0 * math.pi) * math.factorial(l - m) / math.factorial(l + m))
    return norm * s ** m * _DERIVATIVES[(l, m)](x)


def direct_synthesis(alm: AlmSet, grid: RingGrid) -> SkyMap:
    """
    Brute-force map: every pixel sums a_lm Y_lm over all (l, m), m >= 0 terms
    plus their conjugate m < 0 partners.

    Args:
        alm: Coefficients with lmax <= 64
        grid: Any valid grid

    Returns:
        SkyMap on grid

    Raises:
        TooLargeError: If alm.lmax > 64
    """
    if alm.lmax > DIRECT_SYNTHESIS_MAX_LMAX:
        raise TooLargeError(
            f"Direct synthesis is limited to lmax <= {DIRECT_SYNTHESIS_MAX_LMAX}, got {alm.lmax}"
        )

    columns = [_wide_column(m, alm.lmax, grid.cos_theta, grid.sin_theta) for m in range(alm.mmax + 1)]

    values = []
    for r, ring in enumerate(grid.rings):
        phi = ring.phi_0 + 2.0 * math.pi * np.arange(ring.n_phi) / ring.n_phi
        total = np.zeros(ring.n_phi, dtype=np.complex128)
        for m in range(alm.mmax + 1):
            positive = np.exp(1j * m * phi)
            for l in range(m, alm.lmax + 1):
                a = alm.get(l, m)
                p = columns[m][l - m, r]
                total += a * p * positive
                if m > 0:
                    total += np.conj(a) * p * np.conj(positive)
        values.append(total.real.copy())

    logger.debug("Direct synthesis: lmax=%d, %d pixels", alm.lmax, grid.n_pix)
    return SkyMap(grid=grid, values=values)
