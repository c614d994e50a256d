"""De Bruijn term trees.

Terms are immutable. Every traversal in the services walks an explicit stack, so trees
produced by the sampler (depth in the hundreds of thousands) never hit the recursion limit.
The generated ``__eq__``/``__hash__``/``__repr__`` are recursive and meant for small terms.
"""
from dataclasses import dataclass
from typing import Iterable, List, Tuple, Union


@dataclass(frozen=True, slots=True)
class Var:
    """Variable with ``s`` successors, i.e. De Bruijn index ``s + 1``"""

    s: int

    @property
    def index(self) -> int:
        return self.s + 1


@dataclass(frozen=True, slots=True)
class Abs:
    body: "Term"


@dataclass(frozen=True, slots=True)
class App:
    left: "Term"
    right: "Term"


Term = Union[Var, Abs, App]

# Preorder tokens: ("var", s) | ("abs", None) | ("app", None)
Token = Tuple[str, object]

VAR = "var"
ABS = "abs"
APP = "app"


def build_from_preorder(tokens: Iterable[Token]) -> Term:
    """Assemble a term from a complete preorder token sequence"""
    stack: List[Term] = []
    for kind, payload in reversed(list(tokens)):
        if kind == VAR:
            stack.append(Var(payload))  # type: ignore[arg-type]
        elif kind == ABS:
            stack.append(Abs(stack.pop()))
        else:
            left = stack.pop()
            right = stack.pop()
            stack.append(App(left, right))
    if len(stack) != 1:
        raise ValueError("token sequence does not describe exactly one term")
    return stack[0]


def iter_preorder(term: Term) -> Iterable[Token]:
    stack: List[Term] = [term]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            yield VAR, node.s
        elif isinstance(node, Abs):
            yield ABS, None
            stack.append(node.body)
        else:
            yield APP, None
            stack.append(node.right)
            stack.append(node.left)
