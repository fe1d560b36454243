"""Command-line interface: ``track``, ``eval``, ``synth`` and ``bench``.

Exit codes: 0 on success, 1 on a usage error (or failed benchmark),
2 on a data or format error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

from affine_tracker import __version__
from affine_tracker.config import load_config
from affine_tracker.core.models import BoxState, DistanceKind, TrackerConfig
from affine_tracker.core.tracker import AffineSubspaceTracker
from affine_tracker.errors import TrackerError
from affine_tracker.evaluation.metrics import DEFAULT_THRESHOLD, evaluate, precision_curve
from affine_tracker.evaluation.synthetic import TRAJECTORIES, SyntheticSpec, generate_synthetic
from affine_tracker.harness.loader import load_all_scenarios
from affine_tracker.harness.reporter import generate_aggregate, generate_json, generate_markdown
from affine_tracker.harness.runner import ScenarioRunner
from affine_tracker.io.pgm import load_frames, write_overlays
from affine_tracker.io.records import (
    load_ground_truth,
    load_records,
    save_bag_snapshot,
    save_records,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors as exit code 1."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


# ------------------------------------------------------------------
# Argument types
# ------------------------------------------------------------------

def _float_list(count: int, name: str):
    def parse(text: str) -> tuple[float, ...]:
        parts = text.split(",")
        if len(parts) != count:
            raise argparse.ArgumentTypeError(f"{name} needs {count} comma-separated numbers")
        try:
            return tuple(float(p) for p in parts)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be numeric, got {text!r}") from None
    return parse


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


# ------------------------------------------------------------------
# Parser
# ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="affine-tracker", description="Affine subspace object tracker")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "-v", "--verbose", action="count", default=0,
        help="Log progress (-v) or per-frame detail (-vv) to stderr",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    track = sub.add_parser("track", help="Track an object through a directory of PGM frames")
    track.add_argument("--frames", required=True, help="Directory of .pgm frames")
    track.add_argument("--init", required=True, type=_float_list(4, "--init"),
                       metavar="X,Y,W,H", help="Initial box (top-left corner and size)")
    track.add_argument("--out", required=True, help="Result CSV path")
    track.add_argument("--config", default=None, help="YAML tracker config file")
    track.add_argument("--particles", type=_positive_int, default=None)
    track.add_argument("--history", type=_positive_int, default=None, metavar="P")
    track.add_argument("--subdim", type=_positive_int, default=None, metavar="N")
    track.add_argument("--bag-size", type=_positive_int, default=None, metavar="K")
    track.add_argument("--update-every", type=_positive_int, default=None, metavar="W")
    track.add_argument("--alpha", type=float, default=None)
    track.add_argument("--sigma", type=float, default=None)
    track.add_argument("--motion-std", type=_float_list(3, "--motion-std"), default=None,
                       metavar="SX,SY,SS")
    track.add_argument("--scale-range", type=_float_list(2, "--scale-range"), default=None,
                       metavar="MIN,MAX")
    track.add_argument("--seed", type=_seed, default=None)
    track.add_argument("--distance", choices=[k.value for k in DistanceKind], default=None)
    track.add_argument("--kl-sigma2", type=float, default=None)
    track.add_argument("--overlay", default=None, metavar="DIR",
                       help="Write frames with the estimate outlined")
    track.add_argument("--bag-dump", default=None, metavar="DIR",
                       help="Write the final bag models as matrix files")

    ev = sub.add_parser("eval", help="Compare a result CSV with ground truth")
    ev.add_argument("--records", required=True)
    ev.add_argument("--truth", required=True)
    ev.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    ev.add_argument("--curve", action="store_true",
                    help="Also print precision at thresholds 0..50")

    synth = sub.add_parser("synth", help="Generate a synthetic sequence with ground truth")
    synth.add_argument("--out", required=True)
    synth.add_argument("--length", required=True, type=_positive_int)
    synth.add_argument("--seed", required=True, type=_seed)
    synth.add_argument("--width", type=_positive_int, default=320)
    synth.add_argument("--height", type=_positive_int, default=240)
    synth.add_argument("--object-size", type=_float_list(2, "--object-size"),
                       default=(40.0, 40.0), metavar="W,H")
    synth.add_argument("--start", type=_float_list(2, "--start"),
                       default=(40.0, 100.0), metavar="X,Y")
    synth.add_argument("--trajectory", choices=TRAJECTORIES, default="linear")
    synth.add_argument("--velocity", type=_float_list(2, "--velocity"),
                       default=(1.0, 0.25), metavar="VX,VY")
    synth.add_argument("--amplitude", type=float, default=30.0)
    synth.add_argument("--illumination", type=float, default=0.0)
    synth.add_argument("--occluder", action="store_true")
    synth.add_argument("--noise-std", type=float, default=0.0)

    bench = sub.add_parser("bench", help="Run YAML benchmark scenarios")
    bench.add_argument("--scenarios", default="scenarios", metavar="DIR")
    bench.add_argument("--report", default=None, metavar="DIR",
                       help="Write per-scenario Markdown and JSON reports")
    return parser


# ------------------------------------------------------------------
# Commands
# ------------------------------------------------------------------

def _tracker_config(args: argparse.Namespace) -> TrackerConfig:
    config = load_config(args.config) if args.config else TrackerConfig()
    motion = config.motion
    if args.particles is not None:
        motion = dataclasses.replace(motion, n_particles=args.particles)
    if args.motion_std is not None:
        sx, sy, ss = args.motion_std
        motion = dataclasses.replace(motion, std_x=sx, std_y=sy, std_s=ss)
    if args.scale_range is not None:
        motion = dataclasses.replace(motion, s_min=args.scale_range[0], s_max=args.scale_range[1])
    config = config.with_overrides(
        history_length=args.history,
        subspace_dim=args.subdim,
        bag_size=args.bag_size,
        update_period=args.update_every,
        alpha=args.alpha,
        sigma=args.sigma,
        seed=args.seed,
        distance=DistanceKind(args.distance) if args.distance else None,
        kl_sigma2=args.kl_sigma2,
        motion=motion,
    )
    config.validate()
    return config


def _cmd_track(args: argparse.Namespace) -> int:
    config = _tracker_config(args)
    frames = load_frames(args.frames)
    x, y, w, h = args.init
    tracker = AffineSubspaceTracker(config)
    records = tracker.run(frames, BoxState.from_box(x, y, w, h))
    save_records(args.out, records)
    if args.overlay:
        write_overlays(args.overlay, frames, [r.state for r in records])
    if args.bag_dump and tracker.last_state is not None:
        save_bag_snapshot(args.bag_dump, tracker.last_state.bag)
    return EXIT_OK


def _cmd_eval(args: argparse.Namespace) -> int:
    records = load_records(args.records)
    truth = load_ground_truth(args.truth)
    report = evaluate(records, truth, args.threshold)
    print(f"mean_cle={report.mean_cle:.6f} precision={report.precision:.6f}")
    if args.curve:
        for threshold, precision in precision_curve(records, truth):
            print(f"{threshold:g} {precision:.6f}")
    return EXIT_OK


def _cmd_synth(args: argparse.Namespace) -> int:
    spec = SyntheticSpec(
        length=args.length,
        frame_w=args.width,
        frame_h=args.height,
        object_w=int(args.object_size[0]),
        object_h=int(args.object_size[1]),
        trajectory=args.trajectory,
        start_x=args.start[0],
        start_y=args.start[1],
        velocity_x=args.velocity[0],
        velocity_y=args.velocity[1],
        amplitude=args.amplitude,
        illumination=args.illumination,
        occluder=args.occluder,
        noise_std=args.noise_std,
        seed=args.seed,
    )
    generate_synthetic(spec, args.out)
    return EXIT_OK


def _cmd_bench(args: argparse.Namespace) -> int:
    scenarios = load_all_scenarios(args.scenarios)
    runner = ScenarioRunner()
    reports = [runner.run(s) for s in scenarios]
    if args.report:
        out = Path(args.report)
        out.mkdir(parents=True, exist_ok=True)
        for r in reports:
            stem = r.scenario_name.replace(" ", "_")
            (out / f"{stem}.md").write_text(generate_markdown(r), encoding="utf-8")
            (out / f"{stem}.json").write_text(
                json.dumps(generate_json(r), indent=2), encoding="utf-8"
            )
    print(generate_aggregate(reports))
    return EXIT_OK if all(r.passed for r in reports) else EXIT_USAGE


_COMMANDS = {
    "track": _cmd_track,
    "eval": _cmd_eval,
    "synth": _cmd_synth,
    "bench": _cmd_bench,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)

    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")

    try:
        return _COMMANDS[args.command](args)
    except (TrackerError, OSError, ValueError) as exc:
        logger.debug("Command failed", exc_info=True)
        print(f"affine-tracker {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA
