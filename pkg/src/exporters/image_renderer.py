"""Equirectangular rendering of a SkyMap to a binary PPM (P6) image"""
import logging
import math
from pathlib import Path
from typing import Tuple, Union

import numpy as np
from PIL import Image

from ..models.sky_map import SkyMap

logger = logging.getLogger(__name__)


def color_ramp(t: np.ndarray) -> np.ndarray:
    """
    Blue-white-red ramp on t in [0, 1].

    t < 0.5 -> (510 t, 510 t, 255); t >= 0.5 -> (255, 510 (1 - t), 510 (1 - t)),
    rounded to the nearest integer.

    Examples:
        >>> color_ramp(np.array([0.0, 0.5, 1.0])).tolist()
        [[0, 0, 255], [255, 255, 255], [255, 0, 0]]
    """
    t = np.clip(np.asarray(t, dtype=np.float64), 0.0, 1.0)
    low = t < 0.5
    rising = np.rint(510.0 * t)
    falling = np.rint(510.0 * (1.0 - t))
    red = np.where(low, rising, 255.0)
    green = np.where(low, rising, falling)
    blue = np.where(low, 255.0, falling)
    return np.stack([red, green, blue], axis=-1).astype(np.uint8)


def resample_equirect(sky_map: SkyMap, width: int, height: int) -> np.ndarray:
    """
    Values on a width x height longitude/colatitude raster.

    Rows take the ring nearest in theta to the row centre; columns
    interpolate linearly (and periodically) between ring samples.
    """
    grid = sky_map.grid
    row_theta = math.pi * (np.arange(height) + 0.5) / height
    nearest = np.argmin(np.abs(grid.theta[None, :] - row_theta[:, None]), axis=1)
    col_phi = 2.0 * math.pi * np.arange(width) / width

    raster = np.empty((height, width), dtype=np.float64)
    for row, r in enumerate(nearest):
        ring = grid.rings[r]
        samples = sky_map.values[r]
        position = ((col_phi - ring.phi_0) / (2.0 * math.pi) * ring.n_phi) % ring.n_phi
        left = np.floor(position).astype(np.int64) % ring.n_phi
        right = (left + 1) % ring.n_phi
        frac = position - np.floor(position)
        raster[row] = (1.0 - frac) * samples[left] + frac * samples[right]
    return raster


def render_map(sky_map: SkyMap, width: int | None = None) -> Tuple[Image.Image, float, float]:
    """
    Render a map with a linear min-to-max color scale.

    Args:
        sky_map: Map to render
        width: Image width (default: the largest n_phi); height is
            max(n_rings, width // 2)

    Returns:
        (RGB image, map minimum, map maximum)

    Raises:
        ValueError: If width < 1
    """
    grid = sky_map.grid
    width = int(grid.n_phi.max()) if width is None else width
    if width < 1:
        raise ValueError(f"Image width must be >= 1, got {width}")
    height = max(grid.n_rings, width // 2)

    vmin, vmax = sky_map.min_max()
    raster = resample_equirect(sky_map, width, height)
    if vmax > vmin:
        t = (raster - vmin) / (vmax - vmin)
    else:
        logger.warning("Map is constant (%r); rendering the ramp midpoint", vmin)
        t = np.full(raster.shape, 0.5)

    image = Image.fromarray(color_ramp(t))
    return image, vmin, vmax


def save_ppm(image: Image.Image, path: Union[str, Path]) -> None:
    """Write an RGB image as binary PPM (P6)"""
    image.save(path, format='PPM')
    logger.info("Wrote %dx%d image to %s", image.width, image.height, path)
