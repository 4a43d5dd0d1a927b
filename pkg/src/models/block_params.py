"""BlockParams model - staging and scheduling parameters for step 1"""
from pydantic import BaseModel, Field, model_validator


def _compatible(segment_len: int, ring_block: int) -> bool:
    return segment_len % ring_block == 0 or ring_block % segment_len == 0


class BlockParams(BaseModel):
    """
    Blocked execution parameters for the delta computation.

    ring_block is the number of rings advanced together (the thread-count
    analog); the segment lengths size the staged beta and a_lm windows
    shared by every ring block. None of these change numerical output.
    """

    ring_block: int = Field(
        default=64,
        gt=0,
        description="Rings processed as one worker block"
    )

    beta_segment_len: int = Field(
        default=256,
        gt=0,
        description="Length of each staged beta window (in l)"
    )

    alm_segment_len: int = Field(
        default=256,
        gt=0,
        description="Length of each staged a_lm window (in l)"
    )

    rings_per_task: int = Field(
        default=1,
        gt=0,
        description="Ring blocks handed to a worker per task"
    )

    model_config = {
        "frozen": True,
        "json_schema_extra": {
            "example": {
                "ring_block": 64,
                "beta_segment_len": 256,
                "alm_segment_len": 256,
                "rings_per_task": 1
            }
        }
    }

    @model_validator(mode='after')
    def check_segment_multiples(self) -> 'BlockParams':
        """Segments are filled in ring_block strides: one must divide the other"""
        for name in ('beta_segment_len', 'alm_segment_len'):
            if not _compatible(getattr(self, name), self.ring_block):
                raise ValueError(
                    f"{name}={getattr(self, name)} is not a multiple or divisor "
                    f"of ring_block={self.ring_block}"
                )
        return self

    @property
    def task_rings(self) -> int:
        """Rings covered by one worker task"""
        return self.ring_block * self.rings_per_task

    def label(self) -> str:
        """Compact text form used in reports (rb/beta/alm/rpt)"""
        return (
            f"rb={self.ring_block}/beta={self.beta_segment_len}"
            f"/alm={self.alm_segment_len}/rpt={self.rings_per_task}"
        )
