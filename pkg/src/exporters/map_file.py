"""Binary map files (MapFile): magic, grid text, little-endian float64 samples"""
import logging
from io import BytesIO
from pathlib import Path
from typing import Union

import numpy as np

from ..models.sky_map import SkyMap
from ..processors.grid import format_grid_text, parse_grid_text
from ..utils.errors import FileFormatError

logger = logging.getLogger(__name__)

MAGIC = b"SHTMAP1\n"
SAMPLE_DTYPE = np.dtype('<f8')


def map_to_bytes(sky_map: SkyMap) -> bytes:
    """Serialized MapFile contents"""
    parts = [MAGIC, format_grid_text(sky_map.grid).encode("ascii")]
    parts.extend(samples.astype(SAMPLE_DTYPE).tobytes() for samples in sky_map.values)
    return b"".join(parts)


def write_map_file(sky_map: SkyMap, path: Union[str, Path]) -> None:
    data = map_to_bytes(sky_map)
    Path(path).write_bytes(data)
    logger.info("Wrote map with %d pixels (%d bytes) to %s", sky_map.grid.n_pix, len(data), path)


def map_from_bytes(data: bytes) -> SkyMap:
    """
    Parse MapFile contents.

    Raises:
        FileFormatError: On a wrong magic, a malformed grid section or a
            sample count that does not match the grid
    """
    buffer = BytesIO(data)
    if buffer.read(len(MAGIC)) != MAGIC:
        raise FileFormatError("Not a map file (missing SHTMAP1 magic)")

    header = buffer.readline().decode("ascii", errors="replace")
    parts = header.split()
    if len(parts) != 2 or parts[0] != "nrings" or not parts[1].isdigit():
        raise FileFormatError(f"Expected 'nrings N' after the magic, got '{header.strip()}'")

    lines = [header]
    for _ in range(int(parts[1])):
        line = buffer.readline()
        if not line.endswith(b"\n"):
            raise FileFormatError("Map file grid section is truncated")
        lines.append(line.decode("ascii", errors="replace"))
    grid = parse_grid_text(lines)

    payload = buffer.read()
    if len(payload) != grid.n_pix * SAMPLE_DTYPE.itemsize:
        raise FileFormatError(
            f"Map file holds {len(payload)} sample bytes, grid needs {grid.n_pix * SAMPLE_DTYPE.itemsize}"
        )
    samples = np.frombuffer(payload, dtype=SAMPLE_DTYPE).astype(np.float64)
    offsets = grid.ring_offsets
    values = [samples[offsets[r]:offsets[r + 1]].copy() for r in range(grid.n_rings)]
    return SkyMap(grid=grid, values=values)


def read_map_file(path: Union[str, Path]) -> SkyMap:
    return map_from_bytes(Path(path).read_bytes())
