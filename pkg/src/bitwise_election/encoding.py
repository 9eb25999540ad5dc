"""Self-delimiting identifier encoding and the word order it induces.

Words are plain ``str`` objects over the letters ``'0'`` and ``'1'``; the
empty string is the empty word.  An identifier ``n`` with binary digits
``b`` is encoded as ``'1' * len(b) + '0' + b``, so that comparing two
encodings letter by letter agrees with comparing the integers.
"""

from __future__ import annotations

from enum import IntEnum

__all__ = [
    "Order",
    "encode_alpha",
    "decode_alpha",
    "is_well_formed",
    "lex_compare",
    "common_prefix_length",
    "is_prefix",
    "is_proper_prefix",
    "encoded_length",
]


class Order(IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def _check_word(w: str) -> None:
    if not isinstance(w, str) or w.strip("01"):
        raise ValueError(f"not a binary word: {w!r}")


def encode_alpha(ident: int) -> str:
    """Return ``1^k 0 b`` where ``b`` is the binary form of ``ident`` and ``k = |b|``.

    >>> encode_alpha(23)
    '11111010111'
    """
    if isinstance(ident, bool) or not isinstance(ident, int):
        raise TypeError(f"identifier must be an int, got {type(ident).__name__}")
    if ident < 1:
        raise ValueError(f"identifier must be >= 1, got {ident}")
    b = format(ident, "b")
    return "1" * len(b) + "0" + b


def encoded_length(ident: int) -> int:
    """Length of ``encode_alpha(ident)`` without building the word."""
    if ident < 1:
        raise ValueError(f"identifier must be >= 1, got {ident}")
    return 2 * ident.bit_length() + 1


def is_well_formed(w: str) -> bool:
    """True iff ``w`` is the encoding of some identifier."""
    if not isinstance(w, str):
        return False
    k = w.find("0")
    if k < 1 or len(w) != 2 * k + 1:
        return False
    if w[:k].strip("1"):
        return False
    body = w[k + 1:]
    return body[0] == "1" and not body.strip("01")


def decode_alpha(w: str) -> int:
    if not is_well_formed(w):
        raise ValueError(f"not a well-formed identifier encoding: {w!r}")
    k = w.index("0")
    return int(w[k + 1:], 2)


def common_prefix_length(a: str, b: str) -> int:
    if b.startswith(a):
        return len(a)
    if a.startswith(b):
        return len(b)
    n = min(len(a), len(b))
    i = 0
    while i < n and a[i] == b[i]:
        i += 1
    return i


def is_prefix(a: str, b: str) -> bool:
    return b.startswith(a)


def is_proper_prefix(a: str, b: str) -> bool:
    return len(a) < len(b) and b.startswith(a)


def lex_compare(a: str, b: str) -> Order:
    """Compare two words by their first differing letter.

    A proper prefix sorts before its extensions, and the empty word sorts
    before everything else.
    """
    _check_word(a)
    _check_word(b)
    i = common_prefix_length(a, b)
    if i == len(a) and i == len(b):
        return Order.EQUAL
    if i == len(a):
        return Order.LESS
    if i == len(b):
        return Order.GREATER
    return Order.LESS if a[i] < b[i] else Order.GREATER
