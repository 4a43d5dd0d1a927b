"""RingDescriptor and RingGrid models - iso-latitude pixelizations"""
import math
from functools import cached_property
from typing import List

import numpy as np
from pydantic import BaseModel, Field


class RingDescriptor(BaseModel):
    """
    One iso-latitude ring: a colatitude sampled uniformly in azimuth.

    cos_theta and sin_theta are stored explicitly so mirror rings can carry
    exactly negated cosines.
    """

    ring_index: int = Field(default=0, ge=0, description="Position in the grid")

    theta: float = Field(
        ...,
        ge=0.0,
        le=math.pi,
        description="Colatitude in radians"
    )

    cos_theta: float = Field(..., ge=-1.0, le=1.0)

    sin_theta: float = Field(..., le=1.0)

    n_phi: int = Field(..., gt=0, description="Samples on this ring")

    phi_0: float = Field(
        default=0.0,
        ge=0.0,
        lt=2.0 * math.pi,
        description="Azimuth of the first sample"
    )

    pair_index: int = Field(default=0, ge=0, description="Mirror ring across the equator")

    model_config = {
        "frozen": True,
        "json_schema_extra": {
            "example": {
                "ring_index": 0,
                "theta": 0.39269908169872414,
                "cos_theta": 0.9238795325112867,
                "sin_theta": 0.3826834323650898,
                "n_phi": 4,
                "phi_0": 0.0,
                "pair_index": 3
            }
        }
    }

    @classmethod
    def from_theta(cls, theta: float, n_phi: int, phi_0: float = 0.0, **kwargs) -> 'RingDescriptor':
        """Build a ring computing cos/sin from theta"""
        return cls(
            theta=theta,
            cos_theta=math.cos(theta),
            sin_theta=math.sin(theta),
            n_phi=n_phi,
            phi_0=phi_0,
            **kwargs
        )


class RingGrid(BaseModel):
    """
    Ordered set of rings, symmetric about the equator.

    Instances are built through the factories in processors.grid, which run
    the monotonicity, pole and symmetry checks; the model is immutable and
    can be shared across workers.
    """

    rings: List[RingDescriptor] = Field(..., min_length=1)

    lmax_hint: int = Field(default=0, ge=0, description="Band limit the grid is meant to sample")

    model_config = {"frozen": True}

    @property
    def n_rings(self) -> int:
        return len(self.rings)

    @property
    def n_pix(self) -> int:
        return sum(ring.n_phi for ring in self.rings)

    @cached_property
    def cos_theta(self) -> np.ndarray:
        return np.array([ring.cos_theta for ring in self.rings], dtype=np.float64)

    @cached_property
    def sin_theta(self) -> np.ndarray:
        return np.array([ring.sin_theta for ring in self.rings], dtype=np.float64)

    @cached_property
    def theta(self) -> np.ndarray:
        return np.array([ring.theta for ring in self.rings], dtype=np.float64)

    @cached_property
    def n_phi(self) -> np.ndarray:
        return np.array([ring.n_phi for ring in self.rings], dtype=np.int64)

    @cached_property
    def ring_offsets(self) -> np.ndarray:
        """Start of each ring in a flat pixel array (length n_rings + 1)"""
        return np.concatenate(([0], np.cumsum(self.n_phi)))

    def northern_rings(self) -> List[int]:
        """Indices of rings at or north of the equator (ring <= its pair)"""
        return [ring.ring_index for ring in self.rings if ring.ring_index <= ring.pair_index]
