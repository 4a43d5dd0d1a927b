"""Benchmark report models - operation counts and tuning results"""
from typing import Dict, List, Optional

import pandas as pd
from pydantic import BaseModel, Field

from .block_params import BlockParams

SPECIAL_OP_WEIGHT = 20


class FlopReport(BaseModel):
    """
    Operation tally for step 1.

    Divisions, square roots, logarithms and exponentials count 20 each;
    total = adds + muls + 20 * special_ops.
    """

    lmax: int = Field(..., ge=0)

    mmax: int = Field(..., ge=0)

    n_rings: int = Field(..., gt=0)

    adds: int = Field(..., ge=0)

    muls: int = Field(..., ge=0)

    special_ops: int = Field(..., ge=0, description="Raw count of div/sqrt/log/exp")

    seconds: Optional[float] = Field(default=None, gt=0, description="Wall time the tally is rated against")

    model_config = {
        "frozen": True,
        "json_schema_extra": {
            "example": {
                "lmax": 0,
                "mmax": 0,
                "n_rings": 2,
                "adds": 14,
                "muls": 24,
                "special_ops": 10,
                "seconds": None
            }
        }
    }

    @property
    def weighted_special(self) -> int:
        return SPECIAL_OP_WEIGHT * self.special_ops

    @property
    def total(self) -> int:
        return self.adds + self.muls + self.weighted_special

    @property
    def special_fraction(self) -> float:
        return self.weighted_special / self.total if self.total else 0.0

    @property
    def gflops(self) -> Optional[float]:
        if self.seconds is None:
            return None
        return self.total / self.seconds / 1e9

    def rated(self, seconds: float) -> 'FlopReport':
        """Same tally attached to a measured time"""
        return self.model_copy(update={"seconds": seconds})

    def to_dataframe(self) -> pd.DataFrame:
        return pd.DataFrame([{
            'lmax': self.lmax,
            'mmax': self.mmax,
            'n_rings': self.n_rings,
            'adds': self.adds,
            'muls': self.muls,
            'weighted_special': self.weighted_special,
            'total': self.total,
            'gflops': self.gflops,
        }])


class TuneEntry(BaseModel):
    """One timed configuration of a sweep"""

    lmax: int = Field(..., ge=0)
    params: BlockParams
    seconds: float = Field(..., ge=0)
    digest: str = Field(..., description="SHA-256 of the map bytes")


class TuneResult(BaseModel):
    """Sweep over BlockParams with the fastest configuration per band limit"""

    entries: List[TuneEntry] = Field(..., min_length=1)

    @property
    def best_by_lmax(self) -> Dict[int, BlockParams]:
        best: Dict[int, TuneEntry] = {}
        for entry in self.entries:
            current = best.get(entry.lmax)
            if current is None or entry.seconds < current.seconds:
                best[entry.lmax] = entry
        return {lmax: entry.params for lmax, entry in sorted(best.items())}

    @property
    def best(self) -> BlockParams:
        """Fastest configuration summed over all swept sizes"""
        totals: Dict[str, float] = {}
        params: Dict[str, BlockParams] = {}
        for entry in self.entries:
            key = entry.params.label()
            totals[key] = totals.get(key, 0.0) + entry.seconds
            params[key] = entry.params
        return params[min(totals, key=lambda k: (totals[k], list(params).index(k)))]

    @property
    def identical_output(self) -> bool:
        """Every configuration of a given size produced the same map bytes"""
        digests: Dict[int, set] = {}
        for entry in self.entries:
            digests.setdefault(entry.lmax, set()).add(entry.digest)
        return all(len(d) == 1 for d in digests.values())

    def to_dataframe(self) -> pd.DataFrame:
        rows = []
        for entry in self.entries:
            rows.append({
                'lmax': entry.lmax,
                'params': entry.params.label(),
                'ring_block': entry.params.ring_block,
                'beta_segment_len': entry.params.beta_segment_len,
                'alm_segment_len': entry.params.alm_segment_len,
                'seconds': entry.seconds,
                'digest': entry.digest[:16],
            })
        return pd.DataFrame(rows)


class VerifyReport(BaseModel):
    """Pipeline-versus-oracle comparison"""

    lmax: int = Field(..., ge=0)
    seed: int
    procs: int = Field(default=1, gt=0)
    max_rel_error: float = Field(..., ge=0)
    tolerance: float = Field(default=1e-12, gt=0)

    @property
    def passed(self) -> bool:
        return self.max_rel_error < self.tolerance

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"verify lmax={self.lmax} seed={self.seed} procs={self.procs} "
            f"max_rel_error={self.max_rel_error:.3e} tolerance={self.tolerance:.0e} {status}"
        )
