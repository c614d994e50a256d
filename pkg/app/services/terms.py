import logging
from typing import List, Optional, Tuple, Union

from app.exceptions import IndexZero, TermSyntaxError
from app.models import Abs, App, Term, Var
from app.schemas import TermMetrics

logger = logging.getLogger(__name__)

LAMBDA_SYMBOLS = ("\\", "λ")
STYLES = ("integers", "successors")


# Parsing
def _tokenize(text: str) -> List[Tuple[str, object, int]]:
    tokens: List[Tuple[str, object, int]] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in LAMBDA_SYMBOLS:
            tokens.append(("lambda", None, i))
            i += 1
        elif ch in "()":
            tokens.append((ch, None, i))
            i += 1
        elif ch.isdigit():
            start = i
            while i < len(text) and text[i].isdigit():
                i += 1
            digits = text[start:i]
            if digits == "0":
                tokens.append(("var", 0, start))
            elif int(digits) < 1:
                raise IndexZero("De Bruijn index must be at least 1", start)
            else:
                tokens.append(("var", int(digits) - 1, start))
        elif ch == "S":
            start = i
            while i < len(text) and text[i] == "S":
                i += 1
            if i >= len(text) or text[i] != "0":
                raise TermSyntaxError("successor string must end in 0", i)
            tokens.append(("var", i - start, start))
            i += 1
        else:
            raise TermSyntaxError(f"unexpected character {ch!r}", i)
    return tokens


class _Frame:
    __slots__ = ("kind", "acc", "position")

    def __init__(self, kind: str, position: int):
        self.kind = kind
        self.acc: Optional[Term] = None
        self.position = position

    def deliver(self, term: Term) -> None:
        self.acc = term if self.acc is None else App(self.acc, term)


def _close_lambdas(stack: List[_Frame], position: int) -> None:
    while stack[-1].kind == "lambda":
        frame = stack.pop()
        if frame.acc is None:
            raise TermSyntaxError("abstraction without a body", position)
        stack[-1].deliver(Abs(frame.acc))


def parse_term(text: str) -> Term:
    """
    Parse the surface syntax

    `\\` or `λ` opens an abstraction whose body extends as far right as possible,
    juxtaposition is left-associative application, a variable is a decimal index >= 1
    or the successor form S...S0 (a bare `0` is index 1).
    """
    stack: List[_Frame] = [_Frame("root", 0)]
    for kind, payload, position in _tokenize(text):
        if kind == "lambda":
            stack.append(_Frame("lambda", position))
        elif kind == "(":
            stack.append(_Frame("paren", position))
        elif kind == ")":
            _close_lambdas(stack, position)
            frame = stack[-1]
            if frame.kind != "paren":
                raise TermSyntaxError("unbalanced ')'", position)
            if frame.acc is None:
                raise TermSyntaxError("empty parentheses", position)
            stack.pop()
            stack[-1].deliver(frame.acc)
        else:
            stack[-1].deliver(Var(payload))  # type: ignore[arg-type]
    _close_lambdas(stack, len(text))
    if stack[-1].kind == "paren":
        raise TermSyntaxError("unclosed '('", stack[-1].position)
    if stack[-1].acc is None:
        raise TermSyntaxError("empty term", len(text))
    return stack[-1].acc


# Rendering
def _render_integers(term: Term) -> str:
    out: List[str] = []
    stack: List[Union[str, Tuple[Term, bool]]] = [(term, True)]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
            continue
        node, tail = item
        if isinstance(node, Var):
            out.append(str(node.index))
        elif isinstance(node, Abs):
            stack.append((node.body, tail))
            stack.append("λ")
        else:
            parts: List[Union[str, Tuple[Term, bool]]] = []
            if isinstance(node.left, Abs):
                parts += ["(", (node.left, True), ")"]
            else:
                parts.append((node.left, False))
            parts.append(" ")
            if isinstance(node.right, App) or (isinstance(node.right, Abs) and not tail):
                parts += ["(", (node.right, True), ")"]
            else:
                parts.append((node.right, tail))
            stack.extend(reversed(parts))
    return "".join(out)


def _render_successors(term: Term) -> str:
    out: List[str] = []
    stack: List[Union[str, Term]] = [term]
    while stack:
        node = stack.pop()
        if isinstance(node, str):
            out.append(node)
        elif isinstance(node, Var):
            out.append("S" * node.s + "0")
        elif isinstance(node, Abs):
            stack.append(node.body)
            stack.append("λ")
        else:
            parts: List[Union[str, Term]] = ["("]
            for operand, sep in ((node.left, " "), (node.right, ")")):
                if isinstance(operand, Abs) or (isinstance(operand, Var) and operand.s > 0):
                    parts += ["(", operand, ")"]
                else:
                    parts.append(operand)
                parts.append(sep)
            stack.extend(reversed(parts))
    return "".join(out)


def render_term(term: Term, style: str = "integers") -> str:
    if style == "integers":
        return _render_integers(term)
    if style == "successors":
        return _render_successors(term)
    raise ValueError(f"unknown render style '{style}', expected one of {STYLES}")


def render_dot(term: Term, name: str = "term") -> str:
    """Graphviz description of the term tree, variables labelled with their index"""
    lines = [f"digraph {name} {{", "  node [shape=circle, fontsize=10];"]
    counter = 0
    stack: List[Tuple[Term, Optional[int]]] = [(term, None)]
    while stack:
        node, parent = stack.pop()
        ident = counter
        counter += 1
        if isinstance(node, Var):
            label = str(node.index)
        elif isinstance(node, Abs):
            label = "λ"
            stack.append((node.body, ident))
        else:
            label = "@"
            stack.append((node.right, ident))
            stack.append((node.left, ident))
        lines.append(f'  n{ident} [label="{label}"];')
        if parent is not None:
            lines.append(f"  n{parent} -> n{ident};")
    lines.append("}")
    return "\n".join(lines)


# Predicates and metrics
def openness(term: Term) -> int:
    """Least m such that m leading abstractions close the term (0 iff closed)"""
    result = 0
    stack: List[Tuple[Term, int]] = [(term, 0)]
    while stack:
        node, depth = stack.pop()
        if isinstance(node, Var):
            result = max(result, node.index - depth)
        elif isinstance(node, Abs):
            stack.append((node.body, depth + 1))
        else:
            stack.append((node.left, depth))
            stack.append((node.right, depth))
    return result


def is_normal_form(term: Term) -> bool:
    """True iff no subterm is an application of an abstraction"""
    stack: List[Term] = [term]
    while stack:
        node = stack.pop()
        if isinstance(node, Abs):
            stack.append(node.body)
        elif isinstance(node, App):
            if isinstance(node.left, Abs):
                return False
            stack.append(node.left)
            stack.append(node.right)
    return True


def in_normal_form_grammar(term: Term) -> bool:
    """
    Membership in the class counted by count_normal_form

    An application's left operand must be a variable or an application; an application
    standing as a left operand is itself unconstrained.
    """
    stack: List[Tuple[Term, bool]] = [(term, True)]
    while stack:
        node, constrained = stack.pop()
        if isinstance(node, Abs):
            stack.append((node.body, True))
        elif isinstance(node, App):
            if constrained and isinstance(node.left, Abs):
                return False
            stack.append((node.left, not (constrained and isinstance(node.left, App))))
            stack.append((node.right, True))
    return True


def term_metrics(term: Term) -> TermMetrics:
    metrics = TermMetrics()
    stack: List[Tuple[Term, int]] = [(term, 1)]
    while stack:
        node, level = stack.pop()
        metrics.depth = max(metrics.depth, level)
        if isinstance(node, Var):
            metrics.variables += 1
            metrics.successors += node.s
        elif isinstance(node, Abs):
            metrics.abstractions += 1
            stack.append((node.body, level + 1))
        else:
            metrics.applications += 1
            stack.append((node.left, level + 1))
            stack.append((node.right, level + 1))
    return metrics
