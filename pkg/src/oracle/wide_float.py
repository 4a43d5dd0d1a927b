"""Floating point numbers with an unbounded binary exponent.

A value is mantissa * 2**exponent with |mantissa| in [0.5, 1) (or exactly
zero with exponent 0). Each operation is one double-precision operation on
mantissas followed by renormalization, so results agree with plain float
arithmetic whenever the latter stays in range.
"""
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

Number = Union[int, float, "WideFloat"]


@dataclass(frozen=True, slots=True)
class WideFloat:
    mantissa: float
    exponent: int = 0

    def __post_init__(self):
        m, e = math.frexp(float(self.mantissa))
        object.__setattr__(self, 'mantissa', m)
        object.__setattr__(self, 'exponent', 0 if m == 0.0 else int(self.exponent) + e)

    @classmethod
    def of(cls, value: Number) -> 'WideFloat':
        return value if isinstance(value, WideFloat) else cls(float(value), 0)

    def is_zero(self) -> bool:
        return self.mantissa == 0.0

    def __float__(self) -> float:
        """Nearest double; 0.0 below the subnormal range, inf above the largest double"""
        if self.exponent < -1100:
            return math.copysign(0.0, self.mantissa)
        try:
            return math.ldexp(self.mantissa, self.exponent)
        except OverflowError:
            return math.copysign(math.inf, self.mantissa)

    def log2_abs(self) -> float:
        """log2 |value| (-inf for zero)"""
        if self.is_zero():
            return -math.inf
        return math.log2(abs(self.mantissa)) + self.exponent

    def __neg__(self) -> 'WideFloat':
        return WideFloat(-self.mantissa, self.exponent)

    def __abs__(self) -> 'WideFloat':
        return WideFloat(abs(self.mantissa), self.exponent)

    def __add__(self, other: Number) -> 'WideFloat':
        other = WideFloat.of(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.exponent >= other.exponent:
            big, small = self, other
        else:
            big, small = other, self
        mantissa = big.mantissa + math.ldexp(small.mantissa, small.exponent - big.exponent)
        return WideFloat(mantissa, big.exponent)

    __radd__ = __add__

    def __sub__(self, other: Number) -> 'WideFloat':
        return self + (-WideFloat.of(other))

    def __rsub__(self, other: Number) -> 'WideFloat':
        return WideFloat.of(other) - self

    def __mul__(self, other: Number) -> 'WideFloat':
        other = WideFloat.of(other)
        return WideFloat(self.mantissa * other.mantissa, self.exponent + other.exponent)

    __rmul__ = __mul__

    def __truediv__(self, other: Number) -> 'WideFloat':
        other = WideFloat.of(other)
        if other.is_zero():
            raise ZeroDivisionError("WideFloat division by zero")
        return WideFloat(self.mantissa / other.mantissa, self.exponent - other.exponent)

    def __rtruediv__(self, other: Number) -> 'WideFloat':
        return WideFloat.of(other) / self

    def sqrt(self) -> 'WideFloat':
        if self.mantissa < 0.0:
            raise ValueError("sqrt of a negative WideFloat")
        if self.is_zero():
            return self
        m, e = self.mantissa, self.exponent
        if e % 2:
            m, e = m * 2.0, e - 1
        return WideFloat(math.sqrt(m), e // 2)


class WideArray:
    """
    Vectorized WideFloat: float64 mantissas and int64 exponents.

    Used by the column oracles to evaluate many colatitudes at once.
    """

    __slots__ = ('mantissa', 'exponent')

    def __init__(self, mantissa, exponent=0):
        m, e = np.frexp(np.asarray(mantissa, dtype=np.float64))
        self.mantissa = m
        self.exponent = np.where(m == 0.0, 0, np.asarray(exponent, dtype=np.int64) + e.astype(np.int64))

    def to_float(self) -> np.ndarray:
        exponent = np.clip(self.exponent, -1100, 1100).astype(np.int32)
        return np.ldexp(self.mantissa, exponent)

    def __neg__(self) -> 'WideArray':
        return WideArray(-self.mantissa, self.exponent)

    def __add__(self, other: 'WideArray') -> 'WideArray':
        other = _as_wide_array(other)
        top = np.maximum(self.exponent, other.exponent)
        top = np.where(self.mantissa == 0.0, other.exponent,
                       np.where(other.mantissa == 0.0, self.exponent, top))
        lhs = np.ldexp(self.mantissa, np.clip(self.exponent - top, -1100, 0).astype(np.int32))
        rhs = np.ldexp(other.mantissa, np.clip(other.exponent - top, -1100, 0).astype(np.int32))
        return WideArray(lhs + rhs, top)

    def __sub__(self, other: 'WideArray') -> 'WideArray':
        return self + (-_as_wide_array(other))

    def __mul__(self, other) -> 'WideArray':
        other = _as_wide_array(other)
        return WideArray(self.mantissa * other.mantissa, self.exponent + other.exponent)

    __rmul__ = __mul__

    def __truediv__(self, other) -> 'WideArray':
        other = _as_wide_array(other)
        return WideArray(self.mantissa / other.mantissa, self.exponent - other.exponent)


def _as_wide_array(value) -> WideArray:
    return value if isinstance(value, WideArray) else WideArray(value)
