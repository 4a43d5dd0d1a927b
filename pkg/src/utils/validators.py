"""Validators for band limits, grid specs and command-line lists"""
import re
from pathlib import Path
from typing import List, Tuple, Union

from .errors import BandLimitError, FileFormatError


def validate_band_limits(lmax: int, mmax: int | None = None) -> Tuple[int, int]:
    """
    Check a (lmax, mmax) pair and fill in the default mmax.

    Args:
        lmax: Band limit, must be >= 0
        mmax: Maximum order; defaults to lmax

    Returns:
        Tuple (lmax, mmax)

    Raises:
        BandLimitError: If lmax < 0, mmax < 0 or mmax > lmax

    Examples:
        >>> validate_band_limits(8)
        (8, 8)
        >>> validate_band_limits(8, 4)
        (8, 4)
    """
    if mmax is None:
        mmax = lmax

    if lmax < 0:
        raise BandLimitError(f"lmax must be >= 0, got {lmax}")
    if mmax < 0:
        raise BandLimitError(f"mmax must be >= 0, got {mmax}")
    if mmax > lmax:
        raise BandLimitError(f"mmax ({mmax}) exceeds lmax ({lmax})")

    return lmax, mmax


def parse_grid_spec(spec: str) -> Union[int, Path]:
    """
    Parse a grid specification.

    Supports:
    - ecp:<lmax> (equidistant cylindrical grid for band limit lmax)
    - a path to a grid text file

    Args:
        spec: Grid specification string

    Returns:
        lmax as int for ecp grids, or a Path for grid files

    Raises:
        FileFormatError: If the spec is malformed

    Examples:
        >>> parse_grid_spec("ecp:8")
        8
        >>> parse_grid_spec("rings.txt")
        PosixPath('rings.txt')
    """
    spec = spec.strip()
    if not spec:
        raise FileFormatError("Grid spec cannot be empty")

    match = re.fullmatch(r'ecp:(\d+)', spec)
    if match:
        return int(match.group(1))

    if spec.startswith('ecp:'):
        raise FileFormatError(
            f"Cannot parse grid spec: '{spec}'. Expected ecp:<lmax> with lmax >= 0"
        )

    return Path(spec)


def parse_int_list(text: str) -> List[int]:
    """
    Parse a comma separated list of positive integers.

    Args:
        text: e.g. "256,512" or "16, 64"

    Returns:
        List of ints in the given order

    Raises:
        ValueError: If an entry is not a positive integer or the list is empty

    Examples:
        >>> parse_int_list("256,512")
        [256, 512]
    """
    items = [part.strip() for part in text.split(',') if part.strip()]
    if not items:
        raise ValueError("List cannot be empty")

    values = []
    for item in items:
        if not item.isdigit() or int(item) <= 0:
            raise ValueError(f"Expected a positive integer, got '{item}'")
        values.append(int(item))

    return values
