"""DeltaMatrix model - per-ring, per-order partial sums"""
import numpy as np
from pydantic import BaseModel, Field, model_validator


class DeltaMatrix(BaseModel):
    """
    Delta_m(theta_r) for every ring r and 0 <= m <= mmax.

    Negative orders are not stored: Delta_{-m} is the conjugate of Delta_m.
    """

    n_rings: int = Field(..., gt=0)

    mmax: int = Field(..., ge=0)

    data: np.ndarray = Field(..., description="complex128 array of shape (n_rings, mmax + 1)")

    model_config = {"arbitrary_types_allowed": True, "frozen": True}

    @model_validator(mode='after')
    def check_shape(self) -> 'DeltaMatrix':
        if self.data.shape != (self.n_rings, self.mmax + 1):
            raise ValueError(
                f"Delta data shape {self.data.shape} does not match "
                f"({self.n_rings}, {self.mmax + 1})"
            )
        if self.data.dtype != np.complex128:
            raise ValueError(f"Delta data must be complex128, got {self.data.dtype}")
        if not np.all(np.isfinite(self.data)):
            raise ValueError("Delta values must be finite")
        return self

    def row(self, ring: int) -> np.ndarray:
        """Delta_m for one ring, m = 0..mmax"""
        return self.data[ring]

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.data))) if self.data.size else 0.0
