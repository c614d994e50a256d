from app.config import settings
from app.schemas import RunConfig
from app.services import asymptotics
from app.services.export import RecordWriter
from app.services.sampler import branch_probabilities, build_tables

SERIES = ("rho-h", "closed-proportion", "constant", "branch-probabilities")


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("asympt", parents=parents, help="singularities and asymptotic constants")
    parser.add_argument("--m", type=int, default=0, help="openness level for constants")
    parser.add_argument("--N", type=int, dest="level", help="superclass level of the constant estimate")
    parser.add_argument("--n", type=int, help="also evaluate the estimate at this size")
    parser.add_argument("--q", type=int, help="also report the fixed-q constants")
    parser.add_argument("--series", choices=SERIES, help="emit a data series instead of the summary")
    parser.add_argument("--h-max", type=int, default=60, help="last h of the rho-h series")
    parser.add_argument("--N-max", type=int, dest="level_max", default=100, help="last N of the N series")
    parser.set_defaults(handler=asympt)


def asympt(args, config: RunConfig, writer: RecordWriter) -> int:
    """Summary record of rho, rho_tilde and the leading constant, or a data series"""
    spec = config.spec
    if args.series is not None:
        _series(args, config, writer)
        return 0

    level = settings.constant_level if args.level is None else args.level
    data = asymptotics.dominant_singularity(spec)
    normal = asymptotics.normal_form_singularity(spec)
    leaves = asymptotics.leaf_statistics(spec)
    record = {
        "spec": spec.label,
        "rho": data.rho,
        "inverse_rho": 1 / data.rho,
        "a_inf": data.a_inf,
        "b_inf": data.b_inf,
        "rho_tilde": normal.rho_tilde,
        "ratio": normal.ratio,
        "m": args.m,
        "N": level,
        "C_estimate": asymptotics.leading_constant_estimate(spec, args.m, level),
        "C_inf": data.b_inf / (2 * asymptotics.SQRT_PI),
        "variables_mean_per_size": leaves.mean_per_size,
        "variables_variance_per_size": leaves.variance_per_size,
        "leaf_probability_per_node": leaves.leaf_probability_per_node,
    }
    if args.n is not None:
        constants = asymptotics.m_open_constants(spec, args.m, level)
        record["n"] = args.n
        record["log_estimate"] = asymptotics.asymptotic_log_count(constants, args.n)
        record["estimate"] = asymptotics.asymptotic_count(constants, args.n)
    if args.q is not None:
        q_constants = asymptotics.q_abstraction_constants(spec, args.m, args.q)
        record["q"] = args.q
        record["xi"] = q_constants.sigma
        record["q_constant"] = asymptotics.q_abstraction_constant(spec, args.m, args.q)
        record["q_period"] = q_constants.period
        if args.n is not None:
            record["q_estimate"] = asymptotics.asymptotic_count(q_constants, args.n)
    writer.write(record)
    return 0


def _series(args, config: RunConfig, writer: RecordWriter) -> None:
    spec = config.spec
    rho = asymptotics.dominant_singularity(spec).rho
    if args.series == "rho-h":
        for h in range(1, args.h_max + 1):
            rho_h = asymptotics.bounded_h_singularity(spec, h)
            writer.write({"h": h, "rho_h": rho_h, "gap": rho_h - rho})
    elif args.series == "closed-proportion":
        reference = max(200, args.level_max)
        for level in range(1, args.level_max + 1):
            writer.write(
                {
                    "N": level,
                    "b_N0": asymptotics.superclass_constants(spec, level).b[0],
                    "closed_proportion": asymptotics.closed_proportion(spec, level, reference),
                }
            )
    elif args.series == "constant":
        for level in range(max(args.m, 1), args.level_max + 1):
            writer.write({"N": level, "m": args.m, "C": asymptotics.leading_constant_estimate(spec, args.m, level)})
    else:
        level = settings.sampler_level if args.level is None else args.level
        writer.write_frame(branch_probabilities(build_tables(spec, level)))
