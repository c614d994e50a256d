"""Binary lambda calculus codec: 00 = abstraction, 01 = application, 1^n 0 = index n"""
from pathlib import Path
from typing import List, Tuple

from app.exceptions import BadPrefix, Truncated, TrailingBits
from app.models import ABS, APP, VAR, Term, Token, build_from_preorder, iter_preorder

HEADER_PREFIX = "bits="


def encode_blc(term: Term) -> str:
    parts: List[str] = []
    for kind, payload in iter_preorder(term):
        if kind == ABS:
            parts.append("00")
        elif kind == APP:
            parts.append("01")
        else:
            parts.append("1" * (payload + 1) + "0")  # type: ignore[operator]
    return "".join(parts)


def decode_blc(bits: str) -> Term:
    bad = next((i for i, ch in enumerate(bits) if ch not in "01"), None)
    if bad is not None:
        raise BadPrefix(f"invalid symbol {bits[bad]!r} at position {bad}", position=bad)
    tokens: List[Token] = []
    pending = 1  # subterms still to read
    i = 0
    while pending:
        if i >= len(bits):
            raise Truncated(f"input ends after {len(bits)} bits with {pending} subterm(s) missing")
        if bits[i] == "0":
            if i + 1 >= len(bits):
                raise Truncated(f"input ends inside a constructor prefix at position {i}")
            if bits[i + 1] == "0":
                tokens.append((ABS, None))
            else:
                tokens.append((APP, None))
                pending += 1
            i += 2
        else:
            start = i
            while i < len(bits) and bits[i] == "1":
                i += 1
            if i >= len(bits):
                raise Truncated(f"variable starting at position {start} is not terminated")
            tokens.append((VAR, i - start - 1))
            i += 1
            pending -= 1
    if i != len(bits):
        raise TrailingBits(f"{len(bits) - i} bit(s) after the end of the term", position=i)
    return build_from_preorder(tokens)


def pack_bits(bits: str) -> bytes:
    """Header line with the bit length, then big-endian bytes zero-padded at the end"""
    padded = bits + "0" * (-len(bits) % 8)
    body = int(padded, 2).to_bytes(len(padded) // 8, "big") if padded else b""
    return f"{HEADER_PREFIX}{len(bits)}\n".encode("ascii") + body


def unpack_bits(data: bytes) -> str:
    header, sep, body = data.partition(b"\n")
    text = header.decode("ascii", errors="replace")
    if not sep or not text.startswith(HEADER_PREFIX):
        raise BadPrefix("packed file is missing its 'bits=<length>' header")
    try:
        length = int(text[len(HEADER_PREFIX):])
    except ValueError as exc:
        raise BadPrefix(f"malformed header {text!r}") from exc
    if length > len(body) * 8:
        raise Truncated(f"header announces {length} bits, file holds {len(body) * 8}")
    if not body:
        return ""
    bits = bin(int.from_bytes(body, "big"))[2:].zfill(len(body) * 8)
    if bits[length:].strip("0"):
        raise TrailingBits("nonzero padding after the announced bit length")
    if len(body) > (length + 7) // 8:
        raise TrailingBits("extra bytes after the announced bit length")
    return bits[:length]


def write_packed(path: Path, term: Term) -> Tuple[int, int]:
    bits = encode_blc(term)
    data = pack_bits(bits)
    path.write_bytes(data)
    return len(bits), len(data)


def read_packed(path: Path) -> Term:
    return decode_blc(unpack_bits(path.read_bytes()))
