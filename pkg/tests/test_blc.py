import pytest

from app.exceptions import BadPrefix, TrailingBits, Truncated
from app.models import Abs, App, Var
from app.services.blc import decode_blc, encode_blc, pack_bits, read_packed, unpack_bits, write_packed
from app.services.enumeration import enumerate_terms
from app.services.size_model import term_size

TWO_ONE = Abs(Abs(App(Var(1), Var(0))))


def test_encode():
    assert encode_blc(Abs(Var(0))) == "0010"
    assert encode_blc(TWO_ONE) == "00000111010"
    assert encode_blc(Var(0)) == "10"


def test_decode():
    assert decode_blc("0010") == Abs(Var(0))
    assert decode_blc("00000111010") == TWO_ONE


@pytest.mark.parametrize(
    "bits, error",
    [("00", Truncated), ("0", Truncated), ("11", Truncated), ("00100", TrailingBits), ("0012", BadPrefix)],
)
def test_decode_errors(bits, error):
    with pytest.raises(error):
        decode_blc(bits)


def test_length_is_binary_size(binary):
    for n in range(4, 13):
        for term in enumerate_terms(binary, 2, n):
            bits = encode_blc(term)
            assert len(bits) == term_size(binary, term) == n
            assert decode_blc(bits) == term


def test_pack_bits():
    data = pack_bits("0010")
    assert data == b"bits=4\n\x20"
    assert unpack_bits(data) == "0010"
    assert unpack_bits(pack_bits("")) == ""


def test_unpack_errors():
    with pytest.raises(BadPrefix):
        unpack_bits(b"\x20")
    with pytest.raises(Truncated):
        unpack_bits(b"bits=12\n\x20")
    with pytest.raises(TrailingBits):
        unpack_bits(b"bits=4\n\x21")
    with pytest.raises(TrailingBits):
        unpack_bits(b"bits=4\n\x20\x00")


def test_packed_file(tmp_path):
    path = tmp_path / "term.blc"
    length, size = write_packed(path, TWO_ONE)
    assert (length, size) == (11, len(b"bits=11\n") + 2)
    assert read_packed(path) == TWO_ONE
