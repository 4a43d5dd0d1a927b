"""Text coefficient files (AlmFile)

Layout:
    # shtalm 1
    lmax <L>
    mmax <M>
    real_field <0|1>
    <l> <m> <re> <im>      one record per coefficient, m-major

Floats use the shortest round-trip representation; other '#' lines are
comments; coefficients without a record are zero.
"""
import logging
from io import StringIO
from pathlib import Path
from typing import Iterable, TextIO, Union

import numpy as np
import pandas as pd

from ..models.alm_set import AlmSet, alm_size
from ..utils.errors import FileFormatError
from ..utils.validators import validate_band_limits

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
MAGIC = "# shtalm"
_HEADER_KEYS = ("lmax", "mmax", "real_field")


def format_alm_text(alm: AlmSet) -> str:
    """Serialize every coefficient of alm"""
    lines = [
        f"{MAGIC} {FORMAT_VERSION}",
        f"lmax {alm.lmax}",
        f"mmax {alm.mmax}",
        f"real_field {int(alm.real_field)}",
    ]
    for l, m, value in alm.items():
        lines.append(f"{l} {m} {float(value.real)!r} {float(value.imag)!r}")
    return "\n".join(lines) + "\n"


def write_alm_file(alm: AlmSet, path: Union[str, Path]) -> None:
    Path(path).write_text(format_alm_text(alm), encoding="utf-8")
    logger.info("Wrote %d coefficients to %s", alm.coeff.size, path)


def parse_alm_text(lines: Iterable[str]) -> AlmSet:
    """
    Parse the AlmFile text form.

    Raises:
        FileFormatError: On a bad header, malformed or duplicate records,
            indices outside the band limits, or imaginary m = 0 values in a
            real-field file
        BandLimitError: If mmax exceeds lmax
    """
    iterator = iter(lines)
    first = next(iterator, "").strip()
    parts = first.split()
    if len(parts) != 3 or f"{parts[0]} {parts[1]}" != MAGIC:
        raise FileFormatError(f"Expected '{MAGIC} {FORMAT_VERSION}' header, got '{first}'")
    if parts[2] != str(FORMAT_VERSION):
        raise FileFormatError(f"Unsupported alm format version {parts[2]}")

    header = {}
    for key in _HEADER_KEYS:
        line = _next_content_line(iterator)
        fields = line.split() if line is not None else []
        if len(fields) != 2 or fields[0] != key or not fields[1].isdigit():
            raise FileFormatError(f"Expected '{key} <int>' header line, got '{line}'")
        header[key] = int(fields[1])

    lmax, mmax = validate_band_limits(header["lmax"], header["mmax"])
    if header["real_field"] not in (0, 1):
        raise FileFormatError(f"real_field must be 0 or 1, got {header['real_field']}")
    real_field = bool(header["real_field"])

    body = "".join(line if line.endswith("\n") else line + "\n" for line in iterator)
    records = _read_records(body)

    l = records['l'].to_numpy()
    m = records['m'].to_numpy()
    bad = (m < 0) | (m > mmax) | (l < m) | (l > lmax)
    if bad.any():
        i = int(np.argmax(bad))
        raise FileFormatError(f"Record (l={l[i]}, m={m[i]}) is outside lmax={lmax}, mmax={mmax}")

    index = m * (lmax + 1) - m * (m - 1) // 2 + (l - m)
    if np.unique(index).size != index.size:
        raise FileFormatError("Alm file lists a coefficient more than once")

    values = records['re'].to_numpy() + 1j * records['im'].to_numpy()
    if real_field and np.any((m == 0) & (records['im'].to_numpy() != 0.0)):
        raise FileFormatError("Real-field alm file has a nonzero imaginary m = 0 coefficient")

    coeff = np.zeros(alm_size(lmax, mmax), dtype=np.complex128)
    coeff[index] = values
    return AlmSet(lmax=lmax, mmax=mmax, coeff=coeff, real_field=real_field)


def read_alm_file(source: Union[str, Path, TextIO]) -> AlmSet:
    """Read an AlmFile from a path or an open text handle"""
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as handle:
            return parse_alm_text(handle)
    return parse_alm_text(source)


def _read_records(body: str) -> pd.DataFrame:
    columns = ['l', 'm', 're', 'im']
    content = [line for line in body.splitlines() if line.strip() and not line.lstrip().startswith('#')]
    if not content:
        return pd.DataFrame({c: pd.Series(dtype='int64' if c in ('l', 'm') else 'float64') for c in columns})
    try:
        records = pd.read_csv(
            StringIO(body), sep=r'\s+', header=None, names=columns, comment='#',
            dtype={'l': 'int64', 'm': 'int64', 're': 'float64', 'im': 'float64'},
            float_precision='round_trip',
        )
    except (ValueError, pd.errors.ParserError) as e:
        raise FileFormatError(f"Malformed alm record: {e}")
    if records.isna().any().any():
        raise FileFormatError("Alm records must have 4 fields: l m re im")
    return records


def _next_content_line(iterator) -> str | None:
    for line in iterator:
        stripped = line.strip()
        if stripped and not stripped.startswith('#'):
            return stripped
    return None
