from pathlib import Path

from app.commands import RENDER_STYLES, render
from app.exceptions import DomainError
from app.schemas import RunConfig
from app.services.blc import decode_blc, encode_blc, read_packed, write_packed
from app.services.enumeration import FILTERS, clear_cache, enumerate_superclass, enumerate_terms
from app.services.export import RecordWriter
from app.services.size_model import term_size
from app.services.terms import (
    in_normal_form_grammar,
    is_normal_form,
    openness,
    parse_term,
    render_dot,
    render_term,
    term_metrics,
)


def register(subparsers, parents) -> None:
    listing = subparsers.add_parser("enumerate", parents=parents, help="every term of one size")
    listing.add_argument("--m", type=int, default=0, help="openness level")
    listing.add_argument("--n", type=int, required=True, help="size")
    listing.add_argument("--filter", choices=FILTERS, default="all", help="term class")
    listing.add_argument("--q", type=int, help="abstractions for the q-abstractions filter")
    listing.add_argument("--h", type=int, help="index bound for the bounded-h filter")
    listing.add_argument("--superclass", type=int, metavar="N", help="enumerate L_(m,N) instead")
    listing.add_argument("--render", choices=RENDER_STYLES, default="debruijn", help="term notation")
    listing.set_defaults(handler=enumerate_command)

    encode = subparsers.add_parser("encode", parents=parents, help="term to binary lambda calculus")
    encode.add_argument("term", help="term in De Bruijn or successor notation")
    encode.add_argument("--packed", type=Path, help="also write the packed binary file here")
    encode.set_defaults(handler=encode_command)

    decode = subparsers.add_parser("decode", parents=parents, help="binary lambda calculus to term")
    decode.add_argument("bits", nargs="?", help="bit string of 0 and 1")
    decode.add_argument("--packed", type=Path, help="read a packed binary file instead")
    decode.set_defaults(handler=decode_command)

    stats = subparsers.add_parser("stats", parents=parents, help="size and structure of one term")
    stats.add_argument("term", help="term in De Bruijn or successor notation")
    stats.add_argument("--dot", action="store_true", help="emit the Graphviz tree instead")
    stats.set_defaults(handler=stats_command)


def enumerate_command(args, config: RunConfig, writer: RecordWriter) -> int:
    """Stream the terms, one record each"""
    if args.superclass is not None:
        terms = enumerate_superclass(config.spec, args.superclass, args.m, args.n, config.enumerate_max_n)
    else:
        terms = enumerate_terms(config.spec, args.m, args.n, args.filter, args.q, args.h, config.enumerate_max_n)
    for term in terms:
        text = render(term, args.render)
        writer.write({"term": text}, text=text)
    clear_cache()
    return 0


def encode_command(args, config: RunConfig, writer: RecordWriter) -> int:
    term = parse_term(args.term)
    bits = encode_blc(term)
    record = {"term": render_term(term), "bits": bits, "length": len(bits)}
    if args.packed is not None:
        _, size = write_packed(args.packed, term)
        record["packed"] = str(args.packed)
        record["packed_bytes"] = size
    writer.write(record, text=bits)
    return 0


def decode_command(args, config: RunConfig, writer: RecordWriter) -> int:
    if args.packed is not None:
        term = read_packed(args.packed)
    elif args.bits is not None:
        term = decode_blc(args.bits.strip())
    else:
        raise DomainError("give a bit string or --packed")
    text = render_term(term)
    writer.write(
        {
            "term": text,
            "successors": render_term(term, "successors"),
            "length": len(encode_blc(term)),
            "size": term_size(config.spec, term),
        },
        text=text,
    )
    return 0


def stats_command(args, config: RunConfig, writer: RecordWriter) -> int:
    term = parse_term(args.term)
    if args.dot:
        dot = render_dot(term)
        writer.write({"dot": dot}, text=dot)
        return 0
    record = {
        "term": render_term(term),
        "size": term_size(config.spec, term),
        "openness": openness(term),
        "closed": openness(term) == 0,
        "normal_form": is_normal_form(term),
        "normal_form_grammar": in_normal_form_grammar(term),
        "blc_length": len(encode_blc(term)),
    }
    record.update(term_metrics(term).model_dump())
    writer.write(record)
    return 0
