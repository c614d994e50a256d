import logging

from app.commands import RENDER_STYLES, render
from app.config import settings
from app.exceptions import DomainError
from app.schemas import RunConfig, SampleReport
from app.services.asymptotics import leaf_statistics
from app.services.export import RecordWriter
from app.services.sampler import (
    batch_seeds,
    build_tables,
    fresh_seed,
    sample_batch,
    sample_batch_stats,
    sample_term,
    size_window,
)

logger = logging.getLogger(__name__)


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("sample", parents=parents, help="uniform random terms (Boltzmann sampler)")
    parser.add_argument("--m", type=int, default=0, help="openness level of the sampled terms")
    parser.add_argument("--size", type=int, help="target size, combined with --epsilon")
    parser.add_argument("--epsilon", type=float, help="relative half-width of the size window")
    parser.add_argument("--min", type=int, dest="n_min", help="smallest accepted size")
    parser.add_argument("--max", type=int, dest="n_max", help="largest accepted size")
    parser.add_argument("--seed", type=int, help="batch seed (random when omitted)")
    parser.add_argument("--count", type=int, default=1, help="number of terms")
    parser.add_argument("--N", type=int, dest="level", help="superclass level of the sampler")
    parser.add_argument("--workers", type=int, default=1, help="worker processes for batches")
    parser.add_argument("--render", choices=RENDER_STYLES, default="debruijn", help="term notation")
    parser.add_argument("--stats", action="store_true", help="emit batch statistics instead of terms")
    parser.set_defaults(handler=sample)


def _window(args):
    if args.size is not None:
        epsilon = settings.sampler_epsilon if args.epsilon is None else args.epsilon
        return size_window(args.size, epsilon)
    if args.n_min is None or args.n_max is None:
        raise DomainError("give --size (with optional --epsilon) or both --min and --max")
    return args.n_min, args.n_max


def _record(report: SampleReport, style: str) -> dict:
    return {
        "size": report.size,
        "attempts": report.attempts,
        "seed": report.rng_seed,
        "rejections": report.rejections,
        "term": render(report.term, style),
    }


def sample(args, config: RunConfig, writer: RecordWriter) -> int:
    """Stream sampled terms, or one statistics record with --stats"""
    window = _window(args)
    if args.count < 1:
        raise DomainError(f"count must be at least 1, got {args.count}")
    tables = build_tables(config.spec, args.level)
    seed = fresh_seed() if args.seed is None else args.seed

    if args.stats:
        stats = sample_batch_stats(tables, args.m, window, args.count, seed, args.workers, config.max_attempts)
        expected = leaf_statistics(config.spec)
        record = stats.model_dump()
        record["expected_variables_per_size"] = expected.mean_per_size
        record["expected_variables_per_node"] = expected.leaf_probability_per_node
        record["expected_variance_per_size"] = expected.variance_per_size
        record["seed"] = seed
        writer.write(record)
        return 0

    if args.workers > 1:
        reports = sample_batch(
            tables, args.m, window, args.count, seed, args.workers, config.max_attempts, config.time_budget
        )
        for report in reports:
            record = _record(report, args.render)
            writer.write(record, text=record["term"])
        return 0

    for sub_seed in batch_seeds(seed, args.count):
        report = sample_term(tables, args.m, window, sub_seed, config.max_attempts, config.time_budget)
        record = _record(report, args.render)
        writer.write(record, text=record["term"])
    return 0
