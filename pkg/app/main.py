import argparse
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from app.commands import asympt, count, sample, selfcheck, terms
from app.config import apply_settings, load_settings, settings
from app.exceptions import LambdaToolError, NumericFailure
from app.schemas import RunConfig
from app.services.export import FORMATS, RecordWriter, meta_record
from app.services.size_model import parse_spec_text, preset_spec

logger = logging.getLogger("app")

COMMAND_MODULES = (count, asympt, sample, terms, selfcheck)
GLOBAL_OPTIONS = {"preset", "spec", "format", "output", "cache_dir", "config", "max_n", "max_attempts",
                  "time_budget", "no_meta", "log_level", "handler", "command"}


def common_options() -> argparse.ArgumentParser:
    """Options every subcommand accepts"""
    common = argparse.ArgumentParser(add_help=False)
    source = common.add_mutually_exclusive_group()
    source.add_argument("--preset", help="natural, less-natural or binary")
    source.add_argument("--spec", help="size model weights a,b,c,d")
    common.add_argument("--format", choices=FORMATS, default="json", help="record format")
    common.add_argument("--output", type=Path, help="write records to this file")
    common.add_argument("--cache-dir", type=Path, help="directory of cached count tables")
    common.add_argument("--config", type=Path, help="file of key = value settings")
    common.add_argument("--max-n", type=int, help="largest size the counting tables may reach")
    common.add_argument("--max-attempts", type=int, help="sampler attempts per term")
    common.add_argument("--time-budget", type=float, help="seconds per sampled term")
    common.add_argument("--no-meta", action="store_true", help="omit the leading meta record")
    common.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=settings.app_name,
        description="Counting, asymptotics and uniform sampling of lambda terms in De Bruijn notation",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    parents = [common_options()]
    for module in COMMAND_MODULES:
        module.register(subparsers, parents)
    return parser


def build_config(args: argparse.Namespace) -> RunConfig:
    resolved = apply_settings(
        load_settings(
            args.config,
            cache_dir=args.cache_dir,
            max_n=args.max_n,
            max_attempts=args.max_attempts,
            time_budget=args.time_budget,
            log_level=args.log_level,
        )
    )
    if args.spec is not None:
        spec = parse_spec_text(args.spec)
    else:
        spec = preset_spec(args.preset or resolved.default_preset)
    options = {key: value for key, value in vars(args).items() if key not in GLOBAL_OPTIONS}
    return RunConfig(
        spec=spec,
        command=args.command,
        options={key: str(value) if isinstance(value, Path) else value for key, value in options.items()},
        output_format=args.format,
        output_path=args.output,
        cache_dir=resolved.cache_dir,
        max_n=resolved.max_n,
        enumerate_max_n=resolved.enumerate_max_n,
        max_attempts=resolved.max_attempts,
        time_budget=resolved.time_budget,
        no_meta=args.no_meta,
    )


def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def run(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    config = build_config(args)
    configure_logging(settings.log_level)
    logger.debug("running %s with spec %s", config.command, config.spec.label)
    with RecordWriter(config.output_format, output_path=config.output_path) as writer:
        if not config.no_meta:
            writer.write_meta(meta_record(config.command, config.spec.label, config.options))
        return args.handler(args, config, writer)


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point; maps the error hierarchy to exit codes"""
    try:
        return run(argv)
    except LambdaToolError as exc:
        print(f"error: {exc.error_type}: {exc.message}", file=sys.stderr)
        return exc.exit_code
    except ValidationError as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except ArithmeticError as exc:
        logger.debug("arithmetic failure", exc_info=True)
        print(f"error: {NumericFailure.__name__}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return NumericFailure.exit_code
    except BrokenPipeError:
        # the reader went away; keep the interpreter from complaining on exit
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return 0


if __name__ == "__main__":
    sys.exit(main())
