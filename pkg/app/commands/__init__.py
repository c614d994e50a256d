"""Subcommand handlers; every module exposes register(subparsers, parents)"""
from app.models import Term
from app.services.blc import encode_blc
from app.services.terms import render_dot, render_term

RENDER_STYLES = ("debruijn", "successors", "blc", "dot")


def render(term: Term, style: str) -> str:
    if style == "debruijn":
        return render_term(term, "integers")
    if style == "successors":
        return render_term(term, "successors")
    if style == "blc":
        return encode_blc(term)
    return render_dot(term)
