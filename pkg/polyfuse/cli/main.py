import argparse
import logging
import os
import sys

from polyfuse.cli.bench import RESOLUTIONS, benchmark
from polyfuse.cli.calibration import load_calibration
from polyfuse.cli.config import PipelineConfig, parse_fill_depth
from polyfuse.cli.pipeline import REPORT_NAME, run_pipeline, unwrap_mapping
from polyfuse.cli.synth_io import write_synth_frame
from polyfuse.core import PolyfuseException, StatusCode, StatusType, bail, ensure
from polyfuse.fusion import LookupMode
from polyfuse.imaging import read_image, to_uint8, write_image
from polyfuse.panoramic import unwrap_image
from polyfuse.polarization import DemosaicMode
from polyfuse.synth import SceneSpec, demo_scene, render_scene
from polyfuse.version import version

logger = logging.getLogger(__name__)

LOG_ENV = "POLYFUSE_LOG"
LOG_LEVELS = {
    "error": logging.ERROR,
    "warn": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}

EXIT_OK = 0
EXIT_CODES = {
    StatusType.VALIDATION: 2,
    StatusType.PROCESSING: 3,
    StatusType.IO: 4,
}
EXIT_UNEXPECTED = 3


def get_parser():
    parser = argparse.ArgumentParser(prog='polyfuse', add_help=True,
                                     description='Multimodal stereo / polarization / PAL fusion')
    parser.add_argument('-v', "--verbose", action='count', default=0,
                        help='More logging (-v info, -vv debug); overrides ' + LOG_ENV)
    parser.add_argument("--version", action='version', version='%(prog)s ' + version)
    sub = parser.add_subparsers(dest='command', metavar='command')
    sub.required = True

    run = sub.add_parser('run', help='Run the pipeline described by a config file')
    run.add_argument("--config", required=True, help='Pipeline config (JSON)')
    run.add_argument("--delta", type=float, help='DoLP threshold for water hazards')
    run.add_argument("--demosaic", choices=[m.name.lower() for m in DemosaicMode])
    run.add_argument("--lookup", choices=[m.name.lower() for m in LookupMode])
    run.add_argument("--jobs", type=int, help='Frames processed concurrently')
    run.add_argument("--fill-depth", dest='fill_depth', metavar='median:k',
                     help='Fill depth holes with a k x k median of valid neighbours')

    bench = sub.add_parser('bench', help='Measure pipeline throughput on synthetic frames')
    bench.add_argument("--resolution", choices=list(RESOLUTIONS), default="320x240")
    bench.add_argument("--frames", type=int, default=10)
    bench.add_argument("--config", help='Pipeline config whose parameters are benchmarked')
    bench.add_argument("--json", action='store_true', default=False,
                       help='Print the report as JSON')

    synth = sub.add_parser('synth', help='Render a synthetic frame set with ground truth')
    synth.add_argument("--scene", help='Scene description (JSON); the demo street by default')
    synth.add_argument("--out", required=True, help='Output directory')
    synth.add_argument("--seed", type=int, default=0, help='Seed of the demo scene')

    unwrap = sub.add_parser('unwrap', help='Unwrap one PAL annular image')
    unwrap.add_argument("--calib", required=True, help='Calibration with a PAL model')
    unwrap.add_argument("--in", dest='input', required=True, help='Annular PNG')
    unwrap.add_argument("--out", required=True, help='Panorama PNG')
    unwrap.add_argument("--width", type=int, help='Panorama width (default 2*pi*r_mid)')
    unwrap.add_argument("--table", help='PALW remap table to load, or to create if missing')
    return parser


def setup_logging(verbose: int = 0):
    name = os.environ.get(LOG_ENV, "warn").strip().lower()
    level = LOG_LEVELS.get(name)
    if level is None:
        level = logging.WARNING
        print("unknown {}={}, using warn".format(LOG_ENV, name), file=sys.stderr)
    if verbose:
        level = min(level, logging.INFO if verbose == 1 else logging.DEBUG)
    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s')


def do_run(args):
    config = PipelineConfig.from_json(args.config)
    config = config.with_overrides(
        delta=args.delta,
        demosaic=DemosaicMode.parse(args.demosaic) if args.demosaic else None,
        lookup=LookupMode.parse(args.lookup) if args.lookup else None,
        fill_depth=parse_fill_depth(args.fill_depth),
        jobs=args.jobs,
    )
    reports = run_pipeline(config)
    artifacts = sum(len(r.artifacts) for r in reports)
    print("{} frame(s), {} artifact(s), report in {}".format(
        len(reports), artifacts, config.output_dir / REPORT_NAME))


def do_bench(args):
    config = PipelineConfig.from_json(args.config) if args.config else None
    report = benchmark(config, args.frames, args.resolution)
    print(report.to_json() if args.json else report.format())


def do_synth(args):
    spec = SceneSpec.from_json(args.scene) if args.scene else demo_scene(seed=args.seed)
    render = render_scene(spec)
    config = write_synth_frame(render, spec, args.out)
    print("wrote frame set, run it with: polyfuse run --config {}".format(config))


def do_unwrap(args):
    calib = load_calibration(args.calib)
    if calib.pal is None:
        bail(StatusCode.INVALID_CONFIG, "calibration {} has no PAL model", args.calib)
    ensure(args.width is None or args.width > 0, StatusCode.INVALID_PARAMETER,
           "--width must be positive")
    mapping = unwrap_mapping(calib, args.width, args.table)
    panorama = unwrap_image(read_image(args.input), mapping)
    write_image(args.out, to_uint8(panorama))
    print("{}x{} panorama written to {}".format(mapping.out_width, mapping.out_height, args.out))


COMMANDS = {
    'run': do_run,
    'bench': do_bench,
    'synth': do_synth,
    'unwrap': do_unwrap,
}


def exit_code(err: PolyfuseException) -> int:
    return EXIT_CODES.get(err.status.status_type(), EXIT_UNEXPECTED)


def main(argv=None):
    parser = get_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose)
    try:
        COMMANDS[args.command](args)
    except PolyfuseException as err:
        print("error: {}".format(err), file=sys.stderr)
        return exit_code(err)
    except Exception as err:
        logger.debug("[cli] unexpected failure", exc_info=True)
        print("error: {}: {}".format(type(err).__name__, err), file=sys.stderr)
        return EXIT_UNEXPECTED
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
