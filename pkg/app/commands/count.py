import logging
from typing import List, Optional, Tuple

from app.schemas import CountRecord, RunConfig, SizeSpec
from app.services import counting
from app.services.cache import CountCache
from app.services.counting import Family, get_table
from app.services.export import RecordWriter

logger = logging.getLogger(__name__)


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("count", parents=parents, help="exact counts of a term family")
    parser.add_argument("--m", type=int, default=0, help="openness level (0 = closed)")
    parser.add_argument("--n", type=int, help="single size")
    parser.add_argument("--n-min", type=int, help="first size of a range")
    parser.add_argument("--n-max", type=int, help="last size of a range")
    family = parser.add_mutually_exclusive_group()
    family.add_argument("--unrestricted", action="store_true", help="all terms, free indices allowed")
    family.add_argument("--not-open", action="store_true", help="terms that are not m-open")
    family.add_argument("--q", type=int, help="exactly q abstractions")
    family.add_argument("--upto-q", type=int, help="at most q abstractions")
    family.add_argument("--normal-form", action="store_true", help="class of the cubic normal-form system")
    family.add_argument("--beta-normal", action="store_true", help="beta-normal forms")
    family.add_argument("--max-succ", type=int, metavar="H", help="every index at most H")
    family.add_argument("--superclass", type=int, metavar="N", help="superclass L_(m,N)")
    parser.set_defaults(handler=count)


def _sizes(args) -> range:
    if args.n is not None:
        return range(args.n, args.n + 1)
    n_min = 0 if args.n_min is None else args.n_min
    n_max = n_min if args.n_max is None else args.n_max
    return range(n_min, n_max + 1)


def _family(args) -> Tuple[str, dict, List[Tuple[Family, Optional[int]]]]:
    """Record family name, record parameters and the tables the counts come from"""
    if args.unrestricted:
        return "unrestricted", {}, [(Family.UNRESTRICTED, None)]
    if args.not_open:
        return "not-m-open", {}, [(Family.UNRESTRICTED, None), (Family.M_OPEN, None)]
    if args.q is not None:
        return "q-abstractions", {"q": args.q}, [(Family.Q_ABSTRACTIONS, None)]
    if args.upto_q is not None:
        return "at-most-q", {"q": args.upto_q}, [(Family.Q_ABSTRACTIONS, None)]
    if args.normal_form:
        return "normal-form", {}, [(Family.NORMAL_FORM, None)]
    if args.beta_normal:
        return "beta-normal", {}, [(Family.BETA_NORMAL, None)]
    if args.max_succ is not None:
        return "bounded-h", {"h": args.max_succ}, [(Family.BOUNDED_H, args.max_succ)]
    if args.superclass is not None:
        return "superclass", {"N": args.superclass}, [(Family.SUPERCLASS, args.superclass)]
    return "m-open", {}, [(Family.M_OPEN, None)]


def _value(spec: SizeSpec, family: str, args, n: int, cap: int) -> int:
    m = args.m
    if family == "unrestricted":
        return counting.count_unrestricted(spec, n, cap)
    if family == "not-m-open":
        return counting.count_not_m_open(spec, m, n, cap)
    if family == "q-abstractions":
        return counting.count_q_abstractions(spec, m, args.q, n, cap)
    if family == "at-most-q":
        return counting.count_at_most_q(spec, m, args.upto_q, n, cap)
    if family == "normal-form":
        return counting.count_normal_form(spec, m, n, cap)
    if family == "beta-normal":
        return counting.count_beta_normal_form(spec, m, n, cap)
    if family == "bounded-h":
        return counting.count_bounded_successors(spec, m, args.max_succ, n, cap)
    if family == "superclass":
        return counting.count_superclass(spec, args.superclass, m, n, cap)
    return counting.count_m_open(spec, m, n, cap)


def count(args, config: RunConfig, writer: RecordWriter) -> int:
    """Emit one record per requested size"""
    family, params, sources = _family(args)
    cache = CountCache(config.cache_dir) if config.cache_dir is not None else None
    tables = [get_table(config.spec, source, param) for source, param in sources]
    if cache is not None:
        for table in tables:
            if not table.rows and not getattr(table, "top", None):
                cache.load(table)

    m = None if family == "unrestricted" else args.m
    for n in _sizes(args):
        value = _value(config.spec, family, args, n, config.max_n)
        record = CountRecord(family=family, m=m, n=n, count=str(value), params=params)
        writer.write(record.model_dump(), text=record.count)

    if cache is not None:
        for table in tables:
            cache.save(table)
    return 0
