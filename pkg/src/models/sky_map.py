"""SkyMap model - real samples on every ring of a grid"""
from typing import List

import numpy as np
from pydantic import BaseModel, Field, model_validator

from .ring_grid import RingGrid


class SkyMap(BaseModel):
    """Synthesized field: ring r holds n_phi(r) real samples"""

    grid: RingGrid

    values: List[np.ndarray] = Field(..., description="One float64 array per ring")

    model_config = {"arbitrary_types_allowed": True, "frozen": True}

    @model_validator(mode='after')
    def check_lengths(self) -> 'SkyMap':
        if len(self.values) != self.grid.n_rings:
            raise ValueError(
                f"Map has {len(self.values)} rings, grid has {self.grid.n_rings}"
            )
        for r, (samples, ring) in enumerate(zip(self.values, self.grid.rings)):
            if samples.shape != (ring.n_phi,):
                raise ValueError(f"Ring {r} has {samples.shape} samples, expected ({ring.n_phi},)")
            if not np.all(np.isfinite(samples)):
                raise ValueError(f"Ring {r} contains non-finite samples")
        return self

    def flat(self) -> np.ndarray:
        """All samples concatenated in ring order"""
        return np.concatenate(self.values) if self.values else np.zeros(0)

    def min_max(self) -> tuple[float, float]:
        flat = self.flat()
        return float(flat.min()), float(flat.max())
