"""AlmSet model - harmonic coefficients a_lm in m-major order"""
from typing import Iterator, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator


def alm_size(lmax: int, mmax: int) -> int:
    """Number of stored coefficients for 0 <= m <= mmax, m <= l <= lmax"""
    return (mmax + 1) * (lmax + 1) - mmax * (mmax + 1) // 2


def m_offset(lmax: int, m: int) -> int:
    """Flat index of a_mm (first coefficient of row m)"""
    return m * (lmax + 1) - m * (m - 1) // 2


class AlmSet(BaseModel):
    """
    Complex coefficients a_lm of a band-limited field.

    Storage is one flat complex128 array holding, for each m in turn, the
    coefficients l = m..lmax (m-major jagged layout). When real_field is set
    the m = 0 coefficients must be real.
    """

    lmax: int = Field(..., ge=0)

    mmax: int = Field(..., ge=0)

    coeff: np.ndarray = Field(..., description="Flat m-major complex coefficients")

    real_field: bool = Field(default=True)

    model_config = {"arbitrary_types_allowed": True, "frozen": True}

    @field_validator('coeff', mode='before')
    @classmethod
    def as_complex_array(cls, v):
        """Store coefficients as a contiguous complex128 vector"""
        return np.ascontiguousarray(np.asarray(v, dtype=np.complex128).ravel())

    @model_validator(mode='after')
    def check_layout(self) -> 'AlmSet':
        """Coefficient count must cover exactly the (l, m) triangle"""
        if self.mmax > self.lmax:
            raise ValueError(f"mmax ({self.mmax}) exceeds lmax ({self.lmax})")

        expected = alm_size(self.lmax, self.mmax)
        if self.coeff.size != expected:
            raise ValueError(
                f"Expected {expected} coefficients for lmax={self.lmax}, "
                f"mmax={self.mmax}, got {self.coeff.size}"
            )

        if not np.all(np.isfinite(self.coeff)):
            raise ValueError("Coefficients must be finite")

        if self.real_field and np.any(self.row(0).imag != 0.0):
            raise ValueError("Real field requires Im(a_l0) = 0 for all l")

        return self

    @classmethod
    def zeros(cls, lmax: int, mmax: int | None = None, real_field: bool = True) -> 'AlmSet':
        mmax = lmax if mmax is None else mmax
        return cls(lmax=lmax, mmax=mmax, coeff=np.zeros(alm_size(lmax, mmax)), real_field=real_field)

    @classmethod
    def from_dict(cls, lmax: int, mmax: int, values: dict, real_field: bool = True) -> 'AlmSet':
        """Build from {(l, m): value}; unlisted coefficients are zero"""
        coeff = np.zeros(alm_size(lmax, mmax), dtype=np.complex128)
        for (l, m), value in values.items():
            if not (0 <= m <= mmax and m <= l <= lmax):
                raise ValueError(f"(l={l}, m={m}) is outside lmax={lmax}, mmax={mmax}")
            coeff[m_offset(lmax, m) + l - m] = value
        return cls(lmax=lmax, mmax=mmax, coeff=coeff, real_field=real_field)

    @classmethod
    def random(cls, lmax: int, mmax: int | None = None, seed: int = 0, amplitude: float = 1.0) -> 'AlmSet':
        """
        Gaussian real-field coefficients from a PCG64 generator.

        Coefficients are drawn in m-major order: one standard normal per
        m = 0 coefficient (scaled by amplitude), two per m > 0 coefficient
        (real then imaginary, scaled by amplitude / sqrt(2)).
        """
        mmax = lmax if mmax is None else mmax
        rng = np.random.Generator(np.random.PCG64(seed))
        coeff = np.zeros(alm_size(lmax, mmax), dtype=np.complex128)

        n0 = lmax + 1
        coeff[:n0] = amplitude * rng.standard_normal(n0)
        n_rest = coeff.size - n0
        if n_rest:
            draws = rng.standard_normal(2 * n_rest).reshape(n_rest, 2)
            scale = amplitude / np.sqrt(2.0)
            coeff[n0:] = scale * draws[:, 0] + 1j * (scale * draws[:, 1])
        return cls(lmax=lmax, mmax=mmax, coeff=coeff, real_field=True)

    def index(self, l: int, m: int) -> int:
        return m_offset(self.lmax, m) + l - m

    def get(self, l: int, m: int) -> complex:
        return complex(self.coeff[self.index(l, m)])

    def row(self, m: int) -> np.ndarray:
        """Coefficients a_lm for l = m..lmax (read-only view)"""
        start = m_offset(self.lmax, m)
        view = self.coeff[start:start + self.lmax - m + 1]
        view.flags.writeable = False
        return view

    def items(self) -> Iterator[Tuple[int, int, complex]]:
        """Yield (l, m, a_lm) in m-major order"""
        for m in range(self.mmax + 1):
            for offset, value in enumerate(self.row(m)):
                yield m + offset, m, complex(value)

    def scaled(self, alpha: complex) -> 'AlmSet':
        return AlmSet(lmax=self.lmax, mmax=self.mmax, coeff=alpha * self.coeff,
                      real_field=self.real_field and complex(alpha).imag == 0.0)

    def __add__(self, other: 'AlmSet') -> 'AlmSet':
        if (self.lmax, self.mmax) != (other.lmax, other.mmax):
            raise ValueError("Cannot add AlmSets with different band limits")
        return AlmSet(lmax=self.lmax, mmax=self.mmax, coeff=self.coeff + other.coeff,
                      real_field=self.real_field and other.real_field)
