import pytest

from app.exceptions import (
    GcdViolation,
    NegativeWeight,
    SpecValidationError,
    UnknownPreset,
    ZeroSuccessorOrAbstraction,
    ZeroSum,
)
from app.models import Abs, App, Var
from app.services.size_model import parse_spec_text, preset_spec, term_size, validate_spec


@pytest.mark.parametrize(
    "weights",
    [(1, 1, 1, 1), (0, 1, 1, 2), (2, 1, 2, 2), (1, 3, 2, 0)],
)
def test_valid_specs(weights):
    assert validate_spec(*weights).weights == weights


@pytest.mark.parametrize(
    "weights, error",
    [
        ((0, 2, 2, 2), GcdViolation),
        ((-1, 1, 1, 1), NegativeWeight),
        ((0, 1, 1, 0), ZeroSum),
        ((1, 0, 1, 1), ZeroSuccessorOrAbstraction),
        ((1, 1, 0, 1), ZeroSuccessorOrAbstraction),
    ],
)
def test_invalid_specs(weights, error):
    with pytest.raises(error):
        validate_spec(*weights)


def test_presets():
    assert preset_spec("natural").weights == (1, 1, 1, 1)
    assert preset_spec("less-natural").weights == (0, 1, 1, 2)
    assert preset_spec("binary").weights == (2, 1, 2, 2)
    assert preset_spec("binary").preset_name == "binary"


def test_unknown_preset():
    with pytest.raises(UnknownPreset):
        preset_spec("foo")


def test_parse_spec_text():
    assert parse_spec_text(" 2, 1,2 ,2").label == "2,1,2,2"
    with pytest.raises(SpecValidationError):
        parse_spec_text("1,1,1")
    with pytest.raises(SpecValidationError):
        parse_spec_text("1,x,1,1")


def test_term_size(natural, binary):
    term = Abs(Abs(App(Var(1), Var(0))))
    assert term_size(natural, term) == 6
    assert term_size(binary, Abs(Var(0))) == 4
    for spec in (natural, binary):
        assert term_size(spec, Var(0)) == spec.a


def test_term_size_deep_term(natural):
    term = Var(0)
    for _ in range(200_000):
        term = Abs(term)
    assert term_size(natural, term) == 200_001


def test_stabilization_level(natural, less_natural):
    assert natural.stabilization_level(0) == 0
    assert natural.stabilization_level(4) == 4
    assert less_natural.stabilization_level(4) == 5
