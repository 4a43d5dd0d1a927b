"""Renormalized associated Legendre functions with dynamic-range rescaling.

Values are carried as (stored mantissa, scale_k) pairs, the true value being
stored * 2**(126 * scale_k). The mantissa pair of a recurrence is kept inside
[2**-126, 2**126] by exact power-of-two rescaling after every step.

scale_k has no lower bound. Below slot -10 it counts the exponent deficit of
a column that is still far under the double range; such a column contributes
exact zero until its growth carries it back into the table.
"""
import logging
import math
import sys
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator

from ..models.ring_grid import RingDescriptor
from ..utils.errors import DegenerateIndexError, ScaleOverflowError

logger = logging.getLogger(__name__)

SCALE_EXPONENT = 126
SCALE_HI = 2.0 ** SCALE_EXPONENT
SCALE_LO = 2.0 ** -SCALE_EXPONENT
K_MIN = -10
K_MAX = 10
TABLE_SIZE = K_MAX - K_MIN + 1


class RescaleTable(BaseModel):
    """
    Powers 2**(126 k) for k = -10..10, stored in slots 0..20.

    Slots that underflow double precision hold 0.0, slots that overflow hold
    the largest finite double; both are flagged in `clamped`.
    """

    entries: np.ndarray = Field(..., description="21 float64 scale factors")
    clamped: np.ndarray = Field(..., description="21 flags marking saturated slots")
    scale_hi: float = SCALE_HI
    scale_lo: float = SCALE_LO

    model_config = {"arbitrary_types_allowed": True, "frozen": True}

    @field_validator('entries', 'clamped')
    @classmethod
    def exactly_21(cls, v: np.ndarray) -> np.ndarray:
        if v.shape != (TABLE_SIZE,):
            raise ValueError(f"Rescale table must have {TABLE_SIZE} entries, got {v.shape}")
        return v

    def entry(self, k: int) -> float:
        return float(self.entries[k - K_MIN])

    def is_clamped(self, k: int) -> bool:
        return bool(self.clamped[k - K_MIN])


class MuTable(BaseModel):
    """mu_m starting-value factors for m = 0..mmax"""

    mu: np.ndarray = Field(..., description="float64 array of length mmax + 1")

    model_config = {"arbitrary_types_allowed": True, "frozen": True}

    @property
    def mmax(self) -> int:
        return self.mu.size - 1

    @cached_property
    def log2_mu(self) -> np.ndarray:
        return np.log2(self.mu)


class BetaSegment(BaseModel):
    """beta_{l m} for one m and l = l_start .. l_start + len - 1"""

    m: int = Field(..., ge=0)
    l_start: int = Field(..., ge=1)
    values: np.ndarray

    model_config = {"arbitrary_types_allowed": True, "frozen": True}

    @property
    def reciprocals(self) -> np.ndarray:
        return 1.0 / self.values


@dataclass(frozen=True)
class PlmState:
    """
    Recurrence state for one m, vectorized over any number of rings.

    p_cur holds P_{l_current, m} and p_prev P_{l_current - 1, m}, both scaled
    by 2**(126 * scale_k). Arrays share the shape of x.
    """
    m: int
    x: np.ndarray
    s: np.ndarray
    l_current: int
    p_cur: np.ndarray
    p_prev: np.ndarray
    scale_k: np.ndarray


def build_rescale_table() -> RescaleTable:
    """
    Build the 21-slot rescale table.

    Returns:
        RescaleTable with entries[k + 10] = 2**(126 k), 0.0 where that
        underflows and the largest finite double where it overflows

    Examples:
        >>> table = build_rescale_table()
        >>> table.entry(0), table.entry(-9)
        (1.0, 0.0)
    """
    entries = np.zeros(TABLE_SIZE, dtype=np.float64)
    clamped = np.zeros(TABLE_SIZE, dtype=bool)
    for k in range(K_MIN, K_MAX + 1):
        try:
            value = math.ldexp(1.0, SCALE_EXPONENT * k)
        except OverflowError:
            value = sys.float_info.max
            clamped[k - K_MIN] = True
        if value == 0.0:
            clamped[k - K_MIN] = True
        entries[k - K_MIN] = value

    entries.flags.writeable = False
    clamped.flags.writeable = False
    return RescaleTable(entries=entries, clamped=clamped)


def compute_mu(mmax: int) -> MuTable:
    """
    Starting-value factors mu_m = sqrt((2m+1)! / 4 pi) / (2**m m!).

    Computed by the ratio recurrence mu_m = mu_{m-1} sqrt((2m+1) / 2m),
    which stays finite for any practical mmax.

    Args:
        mmax: Largest order (>= 0)

    Returns:
        MuTable of length mmax + 1

    Examples:
        >>> compute_mu(2).mu
        array([0.28209479, 0.34549415, 0.3862742 ])
    """
    if mmax < 0:
        raise ValueError(f"mmax must be >= 0, got {mmax}")

    m = np.arange(1, mmax + 1, dtype=np.float64)
    ratios = np.sqrt((2.0 * m + 1.0) / (2.0 * m))
    factors = np.concatenate(([1.0 / math.sqrt(4.0 * math.pi)], ratios))
    mu = np.cumprod(factors)
    mu.flags.writeable = False
    return MuTable(mu=mu)


def beta(l: int, m: int) -> float:
    """
    Recurrence coefficient beta_{l m} = sqrt((4 l^2 - 1) / (l^2 - m^2)).

    Raises:
        DegenerateIndexError: If l <= m or m < 0

    Examples:
        >>> beta(1, 0)
        1.7320508075688772
    """
    if m < 0 or l <= m:
        raise DegenerateIndexError(f"beta needs l > m >= 0, got l={l}, m={m}")
    lf = float(l)
    mf = float(m)
    return math.sqrt((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf))


def fill_beta_segment(m: int, l_start: int, length: int) -> BetaSegment:
    """
    beta_{l m} for l = l_start .. l_start + length - 1.

    Raises:
        DegenerateIndexError: If l_start <= m
        ValueError: If length < 1
    """
    if length < 1:
        raise ValueError(f"Segment length must be >= 1, got {length}")
    if m < 0 or l_start <= m:
        raise DegenerateIndexError(f"Segment start l={l_start} must exceed m={m}")

    values, _ = fill_beta_block(np.array([m]), l_start, length)
    return BetaSegment(m=m, l_start=l_start, values=values[:, 0].copy())


def fill_beta_block(m_values: np.ndarray, l_start: int, length: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    beta and 1/beta for several orders over one l window.

    Entries with l <= m have no coefficient and are 0 in both arrays.

    Args:
        m_values: Orders, one column each
        l_start: First degree of the window
        length: Number of degrees

    Returns:
        (beta, inverse) arrays of shape (length, len(m_values))
    """
    l = np.arange(l_start, l_start + length, dtype=np.float64)[:, None]
    m = np.asarray(m_values, dtype=np.float64)[None, :]
    valid = l > m
    denominator = np.where(valid, l * l - m * m, 1.0)
    numerator = np.where(valid, 4.0 * l * l - 1.0, 0.0)
    values = np.sqrt(numerator / denominator)
    inverse = np.where(valid, 1.0 / np.where(valid, values, 1.0), 0.0)
    return values, inverse


def seed_values(m: int, x: np.ndarray, s: np.ndarray, mu: MuTable,
                log2_s: np.ndarray | None = None) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Scaled starting values (P_mm, P_{m+1,m}, scale_k) for one order.

    P_mm = mu_m s**m is formed by exponent splitting: with t = log2 P_mm,
    scale_k is t / 126 truncated toward zero, so the stored mantissa lies in
    (2**-126, 2**126). scale_k may lie below -10 (an exponent deficit); the
    mantissa is kept exact so the column can recover at higher l.

    log2_s may be passed in when many orders share the same rings.
    """
    x = np.asarray(x, dtype=np.float64)
    if log2_s is None:
        log2_s = np.log2(np.asarray(s, dtype=np.float64))

    u = m * log2_s
    t = u + mu.log2_mu[m]
    k = np.trunc(t / SCALE_EXPONENT).astype(np.int64)
    k = np.minimum(k, K_MAX)

    p_mm = mu.mu[m] * np.exp2(u - float(SCALE_EXPONENT) * k)
    p_m1 = beta(m + 1, m) * x * p_mm
    return p_mm, p_m1, k


def init_state(m: int, ring: RingDescriptor | Sequence[RingDescriptor], mu: MuTable,
               lmax: int | None = None) -> PlmState:
    """
    Initialize the recurrence for order m on one ring (or a list of rings).

    Args:
        m: Order (>= 0, <= mu.mmax)
        ring: Ring descriptor(s) supplying cos/sin theta
        mu: Precomputed mu table
        lmax: Band limit; when equal to m the state stays at l = m

    Returns:
        PlmState with p_prev = P_mm and p_cur = P_{m+1,m}
    """
    rings = [ring] if isinstance(ring, RingDescriptor) else list(ring)
    x = np.array([r.cos_theta for r in rings], dtype=np.float64)
    s = np.array([r.sin_theta for r in rings], dtype=np.float64)
    if isinstance(ring, RingDescriptor):
        x, s = x[0], s[0]
    return init_state_arrays(m, x, s, mu, lmax)


def init_state_arrays(m: int, x: np.ndarray, s: np.ndarray, mu: MuTable,
                      lmax: int | None = None) -> PlmState:
    """init_state for raw cos/sin arrays"""
    if m < 0 or m > mu.mmax:
        raise ValueError(f"Order m={m} outside mu table 0..{mu.mmax}")

    p_mm, p_m1, k = seed_values(m, x, s, mu)
    l_current = m if lmax == m else m + 1
    return PlmState(
        m=m, x=np.asarray(x, dtype=np.float64), s=np.asarray(s, dtype=np.float64),
        l_current=l_current, p_cur=p_m1, p_prev=p_mm, scale_k=k,
    )


def advance(p_cur: np.ndarray, p_prev: np.ndarray, scale_k: np.ndarray, x: np.ndarray,
            beta_next: np.ndarray, inv_beta_cur: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    One recurrence step plus the rescale check.

    P_{l+1} = beta_{l+1} (x P_l - P_{l-1} / beta_l), then both values are
    multiplied by 2**-126 (scale_k + 1) if either exceeds 2**126, or by
    2**126 (scale_k - 1) if the larger one is nonzero and below 2**-126.

    Returns:
        (new p_cur, new p_prev, new scale_k)

    Raises:
        ScaleOverflowError: If scale_k would exceed +10
    """
    p_next = beta_next * (x * p_cur - p_prev * inv_beta_cur)
    p_prev = p_cur

    biggest = np.maximum(np.abs(p_next), np.abs(p_prev))
    down = biggest > SCALE_HI
    up = (biggest < SCALE_LO) & (biggest > 0.0)
    factor = np.where(down, SCALE_LO, np.where(up, SCALE_HI, 1.0))
    p_next = p_next * factor
    p_prev = p_prev * factor
    scale_k = scale_k + down.astype(np.int64) - up.astype(np.int64)

    if np.any(scale_k > K_MAX):
        raise ScaleOverflowError("Legendre recurrence scale exceeded 2**1260")

    return p_next, p_prev, scale_k


def step(state: PlmState, beta_cur: float, beta_prev: float) -> PlmState:
    """
    Advance the state from l to l + 1.

    Args:
        state: Current state (l_current >= m + 1)
        beta_cur: beta_{l+1, m}
        beta_prev: beta_{l, m}

    Returns:
        New PlmState at l_current + 1

    Raises:
        ValueError: If the state was never advanced past l = m
        ScaleOverflowError: If scale_k would exceed +10
    """
    if state.l_current < state.m + 1:
        raise ValueError("State at l = m cannot be stepped (band limit reached)")

    p_cur, p_prev, k = advance(
        state.p_cur, state.p_prev, state.scale_k, state.x,
        beta_cur, 1.0 / beta_prev,
    )
    return replace(state, l_current=state.l_current + 1, p_cur=p_cur, p_prev=p_prev, scale_k=k)


def unscale(p_stored: float, scale_k: int, table: RescaleTable) -> float:
    """
    True value of a stored mantissa.

    Returns exact 0.0 for clamped-underflow slots and for any scale_k below
    -10 (an exponent deficit).

    Raises:
        ValueError: If scale_k is above 10
        ScaleOverflowError: If the product overflows double precision

    Examples:
        >>> unscale(1.0, 1, build_rescale_table())
        8.507059173023462e+37
    """
    if scale_k > K_MAX:
        raise ValueError(f"scale_k must be <= {K_MAX}, got {scale_k}")
    if scale_k < K_MIN:
        return 0.0

    entry = table.entry(scale_k)
    if entry == 0.0:
        return 0.0
    value = float(p_stored) * entry
    if p_stored != 0.0 and (table.is_clamped(scale_k) or not math.isfinite(value)):
        raise ScaleOverflowError(f"Unscaled value {p_stored!r} * 2**{SCALE_EXPONENT * scale_k} overflows")
    return value


def unscale_array(p_stored: np.ndarray, scale_k: np.ndarray, table: RescaleTable) -> np.ndarray:
    """Vectorized unscale for scale_k <= 0; a deficit below -10 reads the zero slot"""
    return p_stored * table.entries[np.maximum(scale_k, K_MIN) - K_MIN]


def plm_column(m: int, lmax: int, x: np.ndarray, s: np.ndarray,
               mu: MuTable | None = None, table: RescaleTable | None = None) -> np.ndarray:
    """
    Unscaled P_lm for l = m..lmax on every ring described by (x, s).

    Args:
        m: Order
        lmax: Last degree (>= m)
        x: cos theta per ring
        s: sin theta per ring
        mu: Optional precomputed mu table (covering m)
        table: Optional rescale table

    Returns:
        Array of shape (lmax - m + 1,) + x.shape
    """
    if lmax < m:
        raise ValueError(f"lmax ({lmax}) must be >= m ({m})")
    mu = mu if mu is not None and mu.mmax >= m else compute_mu(m)
    table = table or build_rescale_table()

    x = np.asarray(x, dtype=np.float64)
    state = init_state_arrays(m, x, np.asarray(s, dtype=np.float64), mu, lmax)
    out = np.zeros((lmax - m + 1,) + x.shape, dtype=np.float64)
    out[0] = unscale_array(state.p_prev, state.scale_k, table)
    if lmax == m:
        return out
    out[1] = unscale_array(state.p_cur, state.scale_k, table)

    for l in range(m + 2, lmax + 1):
        state = step(state, beta(l, m), beta(l - 1, m))
        out[l - m] = unscale_array(state.p_cur, state.scale_k, table)

    return out
