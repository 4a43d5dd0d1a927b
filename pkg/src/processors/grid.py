"""Grid factories, validation and the grid text form"""
import logging
import math
from typing import Iterable, List, TextIO

from ..models.ring_grid import RingDescriptor, RingGrid
from ..utils.errors import (
    AsymmetricGridError,
    FileFormatError,
    InconsistentRingError,
    NonMonotoneThetaError,
    PolarRingError,
)

logger = logging.getLogger(__name__)

MIRROR_TOLERANCE = 1e-12
UNIT_CIRCLE_TOLERANCE = 1e-15
ANGLE_TOLERANCE = 1e-12


def make_ecp_grid(lmax: int) -> RingGrid:
    """
    Equidistant-colatitude grid for band limit lmax, poles excluded.

    2(lmax+1) rings at theta_t = pi (t + 0.5) / n_rings, each with 2 lmax + 2
    samples starting at phi = 0. Southern rings reuse the northern sine and
    the negated northern cosine so the mirror relation holds exactly.

    Args:
        lmax: Band limit (>= 0)

    Returns:
        RingGrid with 4 (lmax+1)^2 pixels

    Raises:
        ValueError: If lmax < 0

    Examples:
        >>> grid = make_ecp_grid(1)
        >>> grid.n_rings, grid.rings[0].n_phi
        (4, 4)
    """
    if lmax < 0:
        raise ValueError(f"lmax must be >= 0, got {lmax}")

    n_rings = 2 * (lmax + 1)
    n_phi = 2 * lmax + 2
    half = n_rings // 2

    rings: List[RingDescriptor] = [None] * n_rings
    for t in range(half):
        theta = math.pi * (t + 0.5) / n_rings
        cos_t = math.cos(theta)
        sin_t = math.sin(theta)
        south = n_rings - 1 - t
        rings[t] = RingDescriptor(
            ring_index=t, theta=theta, cos_theta=cos_t, sin_theta=sin_t,
            n_phi=n_phi, phi_0=0.0, pair_index=south,
        )
        rings[south] = RingDescriptor(
            ring_index=south, theta=math.pi * (south + 0.5) / n_rings,
            cos_theta=-cos_t, sin_theta=sin_t,
            n_phi=n_phi, phi_0=0.0, pair_index=t,
        )

    return RingGrid(rings=rings, lmax_hint=lmax)


def make_custom_grid(rings: Iterable[RingDescriptor], lmax_hint: int = 0) -> RingGrid:
    """
    Validate an arbitrary ring list and build a RingGrid.

    Ring indices are renumbered in list order and pair indices are
    recomputed by matching theta with pi - theta within 1e-12.

    Args:
        rings: Rings ordered by increasing theta
        lmax_hint: Band limit the grid is meant to sample

    Returns:
        Validated RingGrid

    Raises:
        ValueError: If the list is empty
        PolarRingError: If a ring has sin_theta <= 0
        InconsistentRingError: If cos_theta, sin_theta and theta disagree
        NonMonotoneThetaError: If theta is not strictly increasing
        AsymmetricGridError: If a ring has no mirror partner
    """
    rings = list(rings)
    if not rings:
        raise ValueError("Ring list cannot be empty")

    for i, ring in enumerate(rings):
        if ring.sin_theta <= 0.0:
            raise PolarRingError(f"Ring {i} at theta={ring.theta!r} has sin_theta <= 0")
        if abs(ring.cos_theta ** 2 + ring.sin_theta ** 2 - 1.0) > UNIT_CIRCLE_TOLERANCE:
            raise InconsistentRingError(
                f"Ring {i} has cos_theta**2 + sin_theta**2 = "
                f"{ring.cos_theta ** 2 + ring.sin_theta ** 2!r}, not 1"
            )
        if (abs(ring.cos_theta - math.cos(ring.theta)) > ANGLE_TOLERANCE
                or abs(ring.sin_theta - math.sin(ring.theta)) > ANGLE_TOLERANCE):
            raise InconsistentRingError(
                f"Ring {i} cos_theta={ring.cos_theta!r}, sin_theta={ring.sin_theta!r} "
                f"do not match theta={ring.theta!r}"
            )

    for i in range(1, len(rings)):
        if not rings[i].theta > rings[i - 1].theta:
            raise NonMonotoneThetaError(
                f"Ring {i} theta={rings[i].theta!r} does not exceed "
                f"ring {i - 1} theta={rings[i - 1].theta!r}"
            )

    # theta is sorted, so the mirror of ring i is found from the other end
    n = len(rings)
    pairs = []
    for i, ring in enumerate(rings):
        j = n - 1 - i
        if abs(ring.theta + rings[j].theta - math.pi) >= MIRROR_TOLERANCE:
            raise AsymmetricGridError(
                f"Ring {i} at theta={ring.theta!r} has no mirror at pi - theta"
            )
        pairs.append(j)

    validated = [
        ring.model_copy(update={"ring_index": i, "pair_index": pairs[i]})
        for i, ring in enumerate(rings)
    ]
    logger.debug("Validated custom grid with %d rings", n)
    return RingGrid(rings=validated, lmax_hint=lmax_hint)


def total_pixels(grid: RingGrid) -> int:
    """Number of samples over all rings"""
    return grid.n_pix


def format_grid_text(grid: RingGrid) -> str:
    """
    Grid text form: header "nrings N" then one "theta n_phi phi_0" line per ring.

    Floats use the shortest round-trip representation so parsing the text
    gives back identical values.
    """
    lines = [f"nrings {grid.n_rings}"]
    for ring in grid.rings:
        lines.append(f"{ring.theta!r} {ring.n_phi} {ring.phi_0!r}")
    return "\n".join(lines) + "\n"


def parse_grid_text(lines: Iterable[str], lmax_hint: int = 0) -> RingGrid:
    """
    Parse the grid text form.

    Mirror rings with theta exactly pi - theta_north get the negated
    northern cosine, matching make_ecp_grid.

    Raises:
        FileFormatError: If the header or a ring line is malformed
    """
    iterator = iter(lines)
    header = _next_content_line(iterator)
    if header is None:
        raise FileFormatError("Grid text is empty")
    parts = header.split()
    if len(parts) != 2 or parts[0] != "nrings" or not parts[1].isdigit():
        raise FileFormatError(f"Expected 'nrings N' header, got '{header}'")

    n_rings = int(parts[1])
    raw = []
    for i in range(n_rings):
        line = _next_content_line(iterator)
        if line is None:
            raise FileFormatError(f"Grid text ended after {i} of {n_rings} rings")
        fields = line.split()
        try:
            theta, n_phi, phi_0 = float(fields[0]), int(fields[1]), float(fields[2])
        except (IndexError, ValueError):
            raise FileFormatError(f"Cannot parse ring line {i}: '{line}'")
        if len(fields) != 3:
            raise FileFormatError(f"Ring line {i} must have 3 fields: '{line}'")
        raw.append((theta, n_phi, phi_0))

    rings = []
    for i, (theta, n_phi, phi_0) in enumerate(raw):
        j = n_rings - 1 - i
        if j < i and abs(theta + raw[j][0] - math.pi) < MIRROR_TOLERANCE:
            north = rings[j]
            rings.append(RingDescriptor(
                theta=theta, cos_theta=-north.cos_theta, sin_theta=north.sin_theta,
                n_phi=n_phi, phi_0=phi_0,
            ))
        else:
            rings.append(RingDescriptor.from_theta(theta, n_phi, phi_0))

    return make_custom_grid(rings, lmax_hint=lmax_hint)


def read_grid_file(handle: TextIO, lmax_hint: int = 0) -> RingGrid:
    """Read a grid text file"""
    return parse_grid_text(handle, lmax_hint=lmax_hint)


def _next_content_line(iterator) -> str | None:
    for line in iterator:
        stripped = line.strip()
        if stripped and not stripped.startswith('#'):
            return stripped
    return None
