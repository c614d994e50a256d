from typing import List, Sequence

from pydantic import ValidationError

from app.exceptions import SpecValidationError, UnknownPreset
from app.models import Abs, Term, Var
from app.schemas import PRESETS, SizeSpec


def validate_spec(a: int, b: int, c: int, d: int) -> SizeSpec:
    """
    Build a SizeSpec from four weights

    Raises the SpecValidationError subclass naming the violated clause
    (NegativeWeight, ZeroSum, ZeroSuccessorOrAbstraction, GcdViolation).
    """
    try:
        return SizeSpec(a=a, b=b, c=c, d=d)
    except ValidationError as exc:
        for error in exc.errors():
            cause = error.get("ctx", {}).get("error")
            if isinstance(cause, SpecValidationError):
                raise cause from exc
        raise SpecValidationError(str(exc)) from exc


def preset_spec(name: str) -> SizeSpec:
    if name not in PRESETS:
        raise UnknownPreset(f"unknown preset '{name}', expected one of {', '.join(PRESETS)}", preset=name)
    return validate_spec(*PRESETS[name])


def parse_spec_text(text: str) -> SizeSpec:
    """Parse the `a,b,c,d` command-line form"""
    parts = [part.strip() for part in text.split(",")]
    if len(parts) != 4:
        raise SpecValidationError(f"expected four comma-separated weights, got '{text}'")
    try:
        weights: Sequence[int] = [int(part) for part in parts]
    except ValueError as exc:
        raise SpecValidationError(f"weights must be decimal integers, got '{text}'") from exc
    return validate_spec(*weights)


def term_size(spec: SizeSpec, term: Term) -> int:
    size = 0
    stack: List[Term] = [term]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            size += spec.a + spec.b * node.s
        elif isinstance(node, Abs):
            size += spec.c
            stack.append(node.body)
        else:
            size += spec.d
            stack.append(node.left)
            stack.append(node.right)
    return size
