"""Layout models - virtual-process partitions and the exchanged delta slabs"""
from enum import Enum
from typing import List, Literal

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, model_validator

BYTES_PER_VALUE = 16


class Phase(str, Enum):
    """Which axis of Delta a DistributedDelta is split along"""
    M_DISTRIBUTED = "m_distributed"
    RING_DISTRIBUTED = "ring_distributed"


class LayoutPlan(BaseModel):
    """
    Assignment of orders (step 1) and rings (step 2) to P virtual processes.

    m_sets partition 0..mmax and ring_sets partition 0..n_rings-1; a ring and
    its equatorial mirror always share a process.
    """

    n_procs: int = Field(..., gt=0)

    mmax: int = Field(..., ge=0)

    n_rings: int = Field(..., gt=0)

    m_sets: List[List[int]] = Field(..., description="Orders owned by each process (M_i)")

    ring_sets: List[List[int]] = Field(..., description="Rings owned by each process (R_i)")

    strategy: Literal["paired", "round_robin"] = Field(default="paired")

    model_config = {
        "frozen": True,
        "json_schema_extra": {
            "example": {
                "n_procs": 2,
                "mmax": 3,
                "n_rings": 4,
                "m_sets": [[0, 3], [1, 2]],
                "ring_sets": [[0, 3], [1, 2]],
                "strategy": "paired"
            }
        }
    }

    @model_validator(mode='after')
    def check_partitions(self) -> 'LayoutPlan':
        if len(self.m_sets) != self.n_procs or len(self.ring_sets) != self.n_procs:
            raise ValueError(f"Plan needs exactly {self.n_procs} order sets and ring sets")

        orders = sorted(m for ms in self.m_sets for m in ms)
        if orders != list(range(self.mmax + 1)):
            raise ValueError("Order sets must partition 0..mmax")

        rings = sorted(r for rs in self.ring_sets for r in rs)
        if rings != list(range(self.n_rings)):
            raise ValueError("Ring sets must partition 0..n_rings-1")
        return self

    def step1_costs(self, lmax: int) -> List[int]:
        """Per-process recurrence length sum_{m in M_i} (lmax - m + 1)"""
        return [sum(lmax - m + 1 for m in ms) for ms in self.m_sets]

    def balance(self, lmax: int) -> float:
        """max/min step-1 cost over processes"""
        costs = self.step1_costs(lmax)
        return max(costs) / min(costs) if min(costs) > 0 else float('inf')


class DistributedDelta(BaseModel):
    """
    Delta values spread over virtual processes.

    m-distributed slab i has shape (n_rings, |M_i|), columns in M_i order;
    ring-distributed slab i has shape (|R_i|, mmax + 1), rows in R_i order.
    """

    phase: Phase

    slabs: List[np.ndarray]

    model_config = {"arbitrary_types_allowed": True, "frozen": True}

    def value_count(self) -> int:
        return int(sum(slab.size for slab in self.slabs))

    def gather(self, plan: LayoutPlan) -> np.ndarray:
        """Reassemble the full (n_rings, mmax + 1) Delta array"""
        full = np.zeros((plan.n_rings, plan.mmax + 1), dtype=np.complex128)
        if self.phase is Phase.M_DISTRIBUTED:
            for slab, orders in zip(self.slabs, plan.m_sets):
                full[:, orders] = slab
        else:
            for slab, rings in zip(self.slabs, plan.ring_sets):
                full[rings, :] = slab
        return full


class ExchangeReport(BaseModel):
    """Per-pair value counts of the m-to-ring redistribution"""

    n_procs: int = Field(..., gt=0)

    counts: np.ndarray = Field(..., description="counts[i, j] = values sent from process i to j")

    bytes_per_value: int = Field(default=BYTES_PER_VALUE, gt=0)

    model_config = {"arbitrary_types_allowed": True, "frozen": True}

    @property
    def total_values(self) -> int:
        return int(self.counts.sum())

    @property
    def total_bytes(self) -> int:
        return self.total_values * self.bytes_per_value

    @property
    def inter_process_values(self) -> int:
        """Values that leave their process (off-diagonal blocks)"""
        return self.total_values - int(np.trace(self.counts))

    @property
    def inter_process_bytes(self) -> int:
        return self.inter_process_values * self.bytes_per_value

    @property
    def load_balance(self) -> float:
        """max/mean of values received per process"""
        received = self.counts.sum(axis=0)
        mean = received.mean()
        return float(received.max() / mean) if mean > 0 else 1.0

    def to_dataframe(self) -> pd.DataFrame:
        """One row per (proc_i, proc_j) block"""
        rows = []
        for i in range(self.n_procs):
            for j in range(self.n_procs):
                values = int(self.counts[i, j])
                rows.append({
                    'proc_i': i,
                    'proc_j': j,
                    'values': values,
                    'bytes': values * self.bytes_per_value,
                })
        return pd.DataFrame(rows, columns=['proc_i', 'proc_j', 'values', 'bytes'])

    def summary(self) -> str:
        return (
            f"exchange procs={self.n_procs} values={self.total_values} "
            f"bytes={self.total_bytes} inter_process_bytes={self.inter_process_bytes} "
            f"balance={self.load_balance:.3f}"
        )

    def to_text(self) -> str:
        return self.to_dataframe().to_string(index=False) + "\n" + self.summary() + "\n"
