import pytest

from app.exceptions import IndexZero, TermSyntaxError
from app.models import Abs, App, Var
from app.services.terms import (
    in_normal_form_grammar,
    is_normal_form,
    openness,
    parse_term,
    render_dot,
    render_term,
    term_metrics,
)

TWO_ONE = Abs(Abs(App(Var(1), Var(0))))


def test_parse_integers():
    assert parse_term("\\\\2 1") == TWO_ONE
    assert parse_term("λλ2 1") == TWO_ONE
    assert parse_term("1") == Var(0)


def test_parse_successors():
    assert parse_term("\\\\((S0) 0)") == TWO_ONE
    assert parse_term("SS0") == Var(2)


def test_application_is_left_associative():
    assert parse_term("1 2 3") == App(App(Var(0), Var(1)), Var(2))
    assert parse_term("1 (2 3)") == App(Var(0), App(Var(1), Var(2)))


def test_abstraction_extends_right():
    assert parse_term("(\\1) \\1 1") == App(Abs(Var(0)), Abs(App(Var(0), Var(0))))


@pytest.mark.parametrize("text", ["", "(1", "1)", "()", "\\", "S", "1 x"])
def test_parse_errors(text):
    with pytest.raises(TermSyntaxError):
        parse_term(text)


def test_index_zero():
    with pytest.raises(IndexZero):
        parse_term("\\00")


def test_render():
    assert render_term(Abs(Var(0))) == "λ1"
    assert render_term(App(Var(0), Var(0))) == "1 1"
    assert render_term(TWO_ONE, "successors") == "λλ((S0) 0)"
    with pytest.raises(ValueError):
        render_term(Var(0), "roman")


@pytest.mark.parametrize(
    "text",
    ["λ1", "(λ1) λ1", "λλ2 1", "1 (2 3)", "(λ1 1) (λ1 1)", "λ(λ1) 1", "1 (λ1) 2"],
)
def test_render_parses_back(text):
    term = parse_term(text)
    assert parse_term(render_term(term)) == term
    assert parse_term(render_term(term, "successors")) == term


def test_render_dot():
    dot = render_dot(Abs(Var(0)))
    assert dot.startswith("digraph term {")
    assert 'n0 [label="λ"]' in dot
    assert 'n1 [label="1"]' in dot
    assert "n0 -> n1;" in dot


def test_openness():
    assert openness(Abs(Var(0))) == 0
    assert openness(Var(1)) == 2
    assert openness(App(Var(0), Var(0))) == 1
    assert openness(Abs(App(Var(3), Var(0)))) == 3


def test_is_normal_form():
    assert not is_normal_form(Abs(App(Abs(Var(0)), Var(0))))
    assert is_normal_form(Abs(Abs(App(Var(1), Var(0)))))
    assert not is_normal_form(App(Abs(Var(0)), Abs(Var(0))))


def test_normal_form_grammar_is_wider():
    # ((λ1)(λ1))(λ1) has a redex below a left operand
    term = App(App(Abs(Var(0)), Abs(Var(0))), Abs(Var(0)))
    assert in_normal_form_grammar(term)
    assert not is_normal_form(term)
    assert not in_normal_form_grammar(App(Abs(Var(0)), Abs(Var(0))))


def test_term_metrics():
    metrics = term_metrics(TWO_ONE)
    assert (metrics.abstractions, metrics.applications, metrics.variables) == (2, 1, 2)
    assert (metrics.successors, metrics.depth) == (1, 4)
    assert term_metrics(Var(0)).model_dump() == {
        "abstractions": 0, "applications": 0, "variables": 1, "successors": 0, "depth": 1,
    }
    assert term_metrics(Abs(Var(0))).depth == 2


def test_deep_terms_do_not_recurse():
    term = Var(0)
    for _ in range(100_000):
        term = App(Abs(term), Var(0))
    assert openness(term) == 1
    assert term_metrics(term).depth == 200_001
    assert len(render_term(term)) > 100_000
