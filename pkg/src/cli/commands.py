"""
Command implementations.

Each command takes plain arguments, writes its output files and prints a
short report to `stream`; app.py only parses flags and maps errors to exit
codes.
"""
import logging
import sys
from pathlib import Path
from typing import Sequence, TextIO, Tuple, Union

import numpy as np
import pandas as pd

from ..bench.autotune import DEFAULT_RING_BLOCKS, DEFAULT_SEGMENT_LENGTHS, autotune
from ..bench.timing import run_benchmark
from ..exporters.alm_file import read_alm_file, write_alm_file
from ..exporters.image_renderer import render_map, save_ppm
from ..exporters.map_file import read_map_file, write_map_file
from ..exporters.report_exporter import export_report_to_csv, export_report_to_excel
from ..models.alm_set import AlmSet
from ..models.block_params import BlockParams
from ..models.layout import ExchangeReport
from ..models.reports import TuneResult, VerifyReport
from ..models.ring_grid import RingGrid
from ..models.sky_map import SkyMap
from ..oracle.reference import direct_synthesis
from ..processors.grid import make_ecp_grid, read_grid_file
from ..processors.layout import (
    distributed_step1,
    distributed_step2,
    exchange_report,
    plan_layout,
    redistribute,
)
from ..processors.ringfft import FftBackend
from ..utils.errors import TooLargeError
from ..utils.validators import parse_grid_spec, validate_band_limits

logger = logging.getLogger(__name__)

VERIFY_MAX_LMAX = 32
VERIFY_TOLERANCE = 1e-12

PathLike = Union[str, Path]


def load_grid(grid_spec: str, default_lmax: int) -> RingGrid:
    """Grid from 'ecp:<lmax>' or a grid text file; empty spec means ecp:<default_lmax>"""
    parsed = parse_grid_spec(grid_spec) if grid_spec else default_lmax
    if isinstance(parsed, int):
        return make_ecp_grid(parsed)
    with open(parsed, encoding="utf-8") as handle:
        return read_grid_file(handle, lmax_hint=default_lmax)


def run_pipeline(alm: AlmSet, grid: RingGrid, procs: int = 1, params: BlockParams | None = None,
                 workers: int = 1, backend: str = "numpy",
                 beta_sign: float = 1.0) -> Tuple[SkyMap, ExchangeReport]:
    """Step 1, redistribution and step 2 over `procs` virtual processes"""
    plan = plan_layout(grid, alm.mmax, procs)
    m_slabs = distributed_step1(alm, grid, plan, params, workers, beta_sign)
    ring_slabs = redistribute(m_slabs, plan)
    sky_map = distributed_step2(ring_slabs, grid, plan, backend, workers)
    return sky_map, exchange_report(plan, alm.mmax, grid)


def cmd_gen_alm(lmax: int, mmax: int | None = None, seed: int = 0, amplitude: float = 1.0,
                out: PathLike | None = None, stream: TextIO = sys.stdout) -> AlmSet:
    """
    Random real-field coefficients (PCG64, see AlmSet.random).

    Raises:
        BandLimitError: If mmax > lmax or either is negative
    """
    lmax, mmax = validate_band_limits(lmax, mmax)
    alm = AlmSet.random(lmax, mmax, seed=seed, amplitude=amplitude)
    if out is not None:
        write_alm_file(alm, out)
    print(f"gen-alm lmax={lmax} mmax={mmax} seed={seed} records={alm.coeff.size}", file=stream)
    return alm


def cmd_synth(alm_path: PathLike, grid_spec: str, out: PathLike, procs: int = 1,
              params: BlockParams | None = None, workers: int = 1, backend: str = "numpy",
              stream: TextIO = sys.stdout) -> SkyMap:
    """
    Synthesize a map from an alm file and write it as a MapFile.

    The exchange report summary is printed to `stream`.
    """
    alm = read_alm_file(alm_path)
    grid = load_grid(grid_spec, alm.lmax)
    sky_map, report = run_pipeline(alm, grid, procs, params, workers, backend)
    write_map_file(sky_map, out)
    print(report.summary(), file=stream)
    return sky_map


def cmd_verify(lmax: int, seed: int = 0, procs: int = 1, params: BlockParams | None = None,
               workers: int = 1, beta_sign: float = 1.0, stream: TextIO = sys.stdout) -> VerifyReport:
    """
    Compare the pipeline with brute-force synthesis on ecp:<lmax>.

    The error is max |pipeline - oracle| / max |oracle| over all pixels;
    the check passes below 1e-12. beta_sign = -1 corrupts every staged beta
    to confirm the comparison catches it.

    Raises:
        TooLargeError: If lmax > 32
    """
    if lmax > VERIFY_MAX_LMAX:
        raise TooLargeError(f"verify is limited to lmax <= {VERIFY_MAX_LMAX}, got {lmax}")
    lmax, mmax = validate_band_limits(lmax)

    alm = AlmSet.random(lmax, mmax, seed=seed)
    grid = make_ecp_grid(lmax)
    sky_map, _ = run_pipeline(alm, grid, procs, params, workers, beta_sign=beta_sign)
    reference = direct_synthesis(alm, grid)

    diff = np.max(np.abs(sky_map.flat() - reference.flat()))
    scale = np.max(np.abs(reference.flat()))
    error = float(diff / scale) if scale > 0 else float(diff)

    report = VerifyReport(lmax=lmax, seed=seed, procs=procs, max_rel_error=error, tolerance=VERIFY_TOLERANCE)
    print(report.summary(), file=stream)
    return report


def cmd_render(map_path: PathLike, out: PathLike, width: int | None = None,
               stream: TextIO = sys.stdout) -> Tuple[float, float]:
    """Render a MapFile to PPM; prints min/max (flagging a constant map)"""
    sky_map = read_map_file(map_path)
    image, vmin, vmax = render_map(sky_map, width)
    save_ppm(image, out)
    note = " degenerate" if vmax == vmin else ""
    print(f"render min={vmin!r} max={vmax!r}{note}", file=stream)
    return vmin, vmax


def cmd_bench(lmax_list: Sequence[int], out: PathLike, params: BlockParams | None = None,
              repeats: int = 3, procs: int = 1, workers: int = 1, seed: int = 0,
              xlsx: PathLike | None = None, stream: TextIO = sys.stdout,
              backend: FftBackend = "numpy") -> pd.DataFrame:
    """Timing table as CSV (and optionally a formatted workbook)"""
    table = run_benchmark(lmax_list, params, repeats, procs, workers, seed, backend)
    export_report_to_csv(table, out)
    if xlsx is not None:
        Path(xlsx).write_bytes(export_report_to_excel(table).getvalue())
    print(table.to_string(index=False), file=stream)
    return table


def cmd_autotune(lmax_list: Sequence[int], out: PathLike,
                 segment_lengths: Sequence[int] = DEFAULT_SEGMENT_LENGTHS,
                 ring_blocks: Sequence[int] = DEFAULT_RING_BLOCKS,
                 repeats: int = 1, workers: int = 1, seed: int = 0,
                 xlsx: PathLike | None = None, stream: TextIO = sys.stdout,
                 backend: FftBackend = "numpy") -> TuneResult:
    """Sweep BlockParams, write the full table, print the winner"""
    result = autotune(lmax_list, segment_lengths, ring_blocks, repeats, workers, seed, backend)
    table = result.to_dataframe()
    export_report_to_csv(table, out)
    if xlsx is not None:
        Path(xlsx).write_bytes(export_report_to_excel(table, sheet_name='Autotune').getvalue())

    for lmax, best in result.best_by_lmax.items():
        print(f"autotune lmax={lmax} best={best.label()}", file=stream)
    print(f"autotune best={result.best.label()} configurations={len(result.entries)} "
          f"identical_output={result.identical_output}", file=stream)
    return result
