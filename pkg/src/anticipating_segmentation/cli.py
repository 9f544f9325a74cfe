import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from anticipating_segmentation.modules import config
from anticipating_segmentation.modules.data_models import Preset, SimConfig
from anticipating_segmentation.modules.errors import ConfigError, SimulationError
from anticipating_segmentation.modules.harness import run_simulation
from anticipating_segmentation.modules.plotting import emit_plots
from anticipating_segmentation.modules.processing import write_outputs
from anticipating_segmentation.modules.validation import format_config, load_config

logger = logging.getLogger("anticipating_segmentation")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anticipating-segmentation",
        description="Event segmentation by anticipating synchronization (ball-on-ramps simulator)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run the closed-loop simulation and write traces")
    sim.add_argument("--config", default=None, help="key=value config file (defaults if omitted)")
    sim.add_argument("--preset", choices=config.PRESETS, default=None,
                     help="controller input; overrides the config file")
    sim.add_argument("--out", required=True, help="output directory")
    sim.add_argument("--no-plots", action="store_true", help="skip SVG figures")
    sim.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    return parser


def simulate(args: argparse.Namespace) -> int:
    cfg = load_config(args.config) if args.config else SimConfig()
    if args.preset is not None:
        cfg = cfg.model_copy(update={"preset": Preset(args.preset)})
    logger.debug("effective configuration:\n%s", format_config(cfg))

    result = run_simulation(cfg)
    write_outputs(result, args.out)

    if not args.no_plots:
        other = Preset.NO_ANTICIPATION if Preset(cfg.preset) is Preset.FULL else Preset.FULL
        companion = run_simulation(cfg.model_copy(update={"preset": other})) if cfg.n_steps else None
        emit_plots(result, args.out, companion=companion)

    print(f"{len(result.trace)} steps, {len(result.events)} event(s) -> {Path(args.out)}")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "simulate":
            return simulate(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SimulationError as exc:
        print(f"simulation failed: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except OSError as exc:
        print(f"cannot write outputs: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    parser.error(f"unknown command {args.command}")
    return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
