"""Runtime settings read from the environment (and an optional .env file)"""
import os
from typing import Literal

from dotenv import find_dotenv, load_dotenv
from pydantic import BaseModel, Field

from .models.block_params import BlockParams


class Settings(BaseModel):
    """
    Library-wide defaults.

    Every value can be overridden by an explicit argument or CLI flag;
    settings only fill in what the caller left out.
    """

    workers: int = Field(default=1, gt=0, description="Worker threads for ring tasks")
    ring_block: int = Field(default=64, gt=0)
    beta_segment_len: int = Field(default=256, gt=0)
    alm_segment_len: int = Field(default=256, gt=0)
    rings_per_task: int = Field(default=1, gt=0)
    fft_backend: Literal["numpy", "scipy"] = Field(default="numpy")
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = Field(default="WARNING")

    def block_params(self, ring_block: int | None = None, beta_segment_len: int | None = None,
                     alm_segment_len: int | None = None) -> BlockParams:
        """BlockParams from the configured defaults; explicit values win"""
        return BlockParams(
            ring_block=ring_block or self.ring_block,
            beta_segment_len=beta_segment_len or self.beta_segment_len,
            alm_segment_len=alm_segment_len or self.alm_segment_len,
            rings_per_task=self.rings_per_task,
        )


_ENV_NAMES = {
    "workers": "SHT_WORKERS",
    "ring_block": "SHT_RING_BLOCK",
    "beta_segment_len": "SHT_BETA_SEGMENT",
    "alm_segment_len": "SHT_ALM_SEGMENT",
    "rings_per_task": "SHT_RINGS_PER_TASK",
    "fft_backend": "SHT_FFT_BACKEND",
    "log_level": "SHT_LOG_LEVEL",
}


def load_settings(use_dotenv: bool = True) -> Settings:
    """
    Build Settings from SHT_* environment variables.

    Args:
        use_dotenv: Load a .env file from the working directory first

    Returns:
        Validated Settings (unset variables keep their defaults)

    Raises:
        ValidationError: If a variable holds an invalid value
    """
    if use_dotenv:
        load_dotenv(find_dotenv(usecwd=True))

    values = {}
    for field, env_name in _ENV_NAMES.items():
        raw = os.getenv(env_name)
        if raw is not None and raw.strip():
            values[field] = raw.strip().upper() if field == "log_level" else raw.strip()

    return Settings(**values)
