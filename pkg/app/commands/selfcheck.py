import argparse

from app.exceptions import SelfCheckFailure
from app.schemas import PRESETS, RunConfig
from app.services.export import RecordWriter
from app.services.selfcheck import SelfCheck
from app.services.size_model import preset_spec

DEFAULT_ORACLE_N = 12


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("selfcheck", parents=parents, help="cross-validate the toolkit")
    parser.add_argument("--seed", type=int, default=2017, help="seed of the sampler uniformity check")
    parser.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    parser.set_defaults(handler=selfcheck)


def selfcheck(args, config: RunConfig, writer: RecordWriter) -> int:
    """Run every check on all presets; --max-n bounds the exhaustive comparisons"""
    max_n = args.max_n if args.max_n is not None else DEFAULT_ORACLE_N
    specs = {name: preset_spec(name) for name in PRESETS}
    results = SelfCheck(specs, max_n=max_n, seed=args.seed, inject_fault=args.inject_fault).run()
    for result in results:
        writer.write(result.model_dump(), text=f"{'PASS' if result.passed else 'FAIL'} {result.name} {result.detail}")
    failed = [result.name for result in results if not result.passed]
    if failed:
        writer.close()
        raise SelfCheckFailure(f"{len(failed)} check(s) failed: {', '.join(failed)}", failed=failed)
    return 0
