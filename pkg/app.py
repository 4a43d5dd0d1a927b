"""
alm2map - spherical-harmonic synthesis on iso-latitude ring grids

Command-line entry point:
gen-alm -> synth -> render, plus verify / bench / autotune.
"""
import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from src.cli.commands import (
    cmd_autotune,
    cmd_bench,
    cmd_gen_alm,
    cmd_render,
    cmd_synth,
    cmd_verify,
)
from src.config import Settings, load_settings
from src.utils.errors import ShtError
from src.utils.validators import parse_int_list

logger = logging.getLogger("app")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_ERROR = 2


def _int_list(text: str) -> List[int]:
    try:
        return parse_int_list(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def _add_block_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--workers', type=int, help='Worker threads (default: SHT_WORKERS)')
    parser.add_argument('--ring-block', type=int, help='Rings per block (default: SHT_RING_BLOCK)')
    parser.add_argument('--beta-seg', type=int, help='Staged beta window length (default: SHT_BETA_SEGMENT)')
    parser.add_argument('--alm-seg', type=int, help='Staged a_lm window length (default: SHT_ALM_SEGMENT)')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='alm2map',
        description='Synthesize real sky maps from spherical-harmonic coefficients',
    )
    parser.add_argument('--log-level', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
                        help='Logging level (default: SHT_LOG_LEVEL)')
    sub = parser.add_subparsers(dest='command', required=True)

    gen = sub.add_parser('gen-alm', help='Write random real-field coefficients')
    gen.add_argument('--lmax', type=int, required=True)
    gen.add_argument('--mmax', type=int)
    gen.add_argument('--seed', type=int, default=0)
    gen.add_argument('--amplitude', type=float, default=1.0)
    gen.add_argument('--out', required=True, help='Output alm file')

    synth = sub.add_parser('synth', help='Synthesize a map from an alm file')
    synth.add_argument('alm', help='Input alm file')
    synth.add_argument('--grid', default='', help="'ecp:<lmax>' or a grid file (default: ecp:<file lmax>)")
    synth.add_argument('--procs', type=int, default=1, help='Virtual processes')
    synth.add_argument('--backend', choices=['numpy', 'scipy'], help='FFT backend (default: SHT_FFT_BACKEND)')
    synth.add_argument('--out', required=True, help='Output map file')
    _add_block_flags(synth)

    verify = sub.add_parser('verify', help='Compare the pipeline with brute-force synthesis')
    verify.add_argument('--lmax', type=int, default=8)
    verify.add_argument('--seed', type=int, default=0)
    verify.add_argument('--procs', type=int, default=1)
    verify.add_argument('--beta-sign', type=float, default=1.0, help=argparse.SUPPRESS)
    _add_block_flags(verify)

    render = sub.add_parser('render', help='Render a map file to a PPM image')
    render.add_argument('map', help='Input map file')
    render.add_argument('--out', required=True, help='Output .ppm file')
    render.add_argument('--width', type=int, help='Image width (default: largest ring)')

    bench = sub.add_parser('bench', help='Time the pipeline stages')
    bench.add_argument('--lmax', type=_int_list, default=[64, 128], help='Comma separated band limits')
    bench.add_argument('--repeats', type=int, default=3)
    bench.add_argument('--procs', type=int, default=1)
    bench.add_argument('--seed', type=int, default=0)
    bench.add_argument('--out', required=True, help='Output CSV')
    bench.add_argument('--xlsx', help='Optional formatted Excel report')
    bench.add_argument('--backend', choices=['numpy', 'scipy'], help='FFT backend (default: SHT_FFT_BACKEND)')
    _add_block_flags(bench)

    tune = sub.add_parser('autotune', help='Sweep segment lengths and ring blocks')
    tune.add_argument('--lmax', type=_int_list, default=[64], help='Comma separated band limits')
    tune.add_argument('--segments', type=_int_list, help='Segment lengths to sweep')
    tune.add_argument('--ring-blocks', type=_int_list, help='Ring blocks to sweep')
    tune.add_argument('--repeats', type=int, default=1)
    tune.add_argument('--seed', type=int, default=0)
    tune.add_argument('--workers', type=int, help='Worker threads (default: SHT_WORKERS)')
    tune.add_argument('--out', required=True, help='Output CSV')
    tune.add_argument('--xlsx', help='Optional formatted Excel report')
    tune.add_argument('--backend', choices=['numpy', 'scipy'], help='FFT backend (default: SHT_FFT_BACKEND)')

    return parser


def run_command(args: argparse.Namespace, settings: Settings) -> int:
    workers = getattr(args, 'workers', None) or settings.workers
    backend = getattr(args, 'backend', None) or settings.fft_backend

    if args.command == 'gen-alm':
        cmd_gen_alm(args.lmax, args.mmax, args.seed, args.amplitude, args.out, stream=sys.stdout)
    elif args.command == 'synth':
        params = settings.block_params(args.ring_block, args.beta_seg, args.alm_seg)
        cmd_synth(args.alm, args.grid, args.out, args.procs, params, workers, backend, stream=sys.stdout)
    elif args.command == 'verify':
        params = settings.block_params(args.ring_block, args.beta_seg, args.alm_seg)
        report = cmd_verify(args.lmax, args.seed, args.procs, params, workers, args.beta_sign,
                            stream=sys.stdout)
        return EXIT_OK if report.passed else EXIT_FAILURE
    elif args.command == 'render':
        cmd_render(args.map, args.out, args.width, stream=sys.stdout)
    elif args.command == 'bench':
        params = settings.block_params(args.ring_block, args.beta_seg, args.alm_seg)
        cmd_bench(args.lmax, args.out, params, args.repeats, args.procs, workers, args.seed,
                  args.xlsx, stream=sys.stdout, backend=backend)
    elif args.command == 'autotune':
        sweep = {}
        if args.segments:
            sweep['segment_lengths'] = args.segments
        if args.ring_blocks:
            sweep['ring_blocks'] = args.ring_blocks
        result = cmd_autotune(args.lmax, args.out, repeats=args.repeats, workers=workers,
                              seed=args.seed, xlsx=args.xlsx, stream=sys.stdout, backend=backend, **sweep)
        return EXIT_OK if result.identical_output else EXIT_FAILURE
    return EXIT_OK


def error_line(error: BaseException) -> str:
    """One-line machine-parsable error description"""
    module = getattr(error, 'module', None) or ('config' if isinstance(error, ValidationError) else 'cli')
    message = " ".join(str(error).split())
    return f"error module={module} type={type(error).__name__} message={message}"


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    try:
        settings = load_settings()
    except ValidationError as e:
        print(error_line(e), file=sys.stderr)
        return EXIT_ERROR

    logging.basicConfig(
        level=args.log_level or settings.log_level,
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
    )

    try:
        return run_command(args, settings)
    except (ShtError, ValidationError, OSError) as e:
        print(error_line(e), file=sys.stderr)
        return EXIT_ERROR
    except Exception as e:
        logger.exception("Unexpected failure")
        print(error_line(e), file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
