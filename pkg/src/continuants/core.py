"""Exact continuant and finite continued-fraction arithmetic.

Sequences of partial quotients are plain tuples of positive ints. Values are
Python ints (arbitrary precision) and :class:`fractions.Fraction`.

The continuant of the empty sequence is 1. For ``u = (u_1, ..., u_n)``::

    K_{-1} = 0,  K_0 = 1,  K_j = u_j * K_{j-1} + K_{j-2}

and ``[u_1, ..., u_n] = <u_2, ..., u_n> / <u_1, ..., u_n>``.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InvalidSequenceError, InvalidTransformError, OutOfRangeError

PartialQuotients = tuple[int, ...]


def as_sequence(u: Iterable[int]) -> PartialQuotients:
    """Validate ``u`` and return it as a tuple of ints, each >= 1."""
    seq = tuple(u)
    for i, x in enumerate(seq):
        if isinstance(x, bool) or not isinstance(x, int):
            raise InvalidSequenceError(f"element {i} is not an integer: {x!r}")
        if x < 1:
            raise InvalidSequenceError(f"element {i} is {x}, partial quotients must be >= 1")
    return seq


def _continuant_pair(u: Sequence[int]) -> tuple[int, int]:
    # returns (<u^->, <u>) without validation
    prev, cur = 0, 1
    for x in u:
        prev, cur = cur, x * cur + prev
    return prev, cur


def continuant(u: Iterable[int]) -> int:
    """Return the continuant <u> exactly. The empty sequence has continuant 1.

    >>> continuant((2, 1, 3, 1, 1, 2))
    64
    """
    return _continuant_pair(as_sequence(u))[1]


def prefix_continuants(u: Iterable[int]) -> list[int]:
    """Continuants of the prefixes of ``u`` of length 0, 1, ..., n."""
    out = [1]
    prev, cur = 0, 1
    for x in as_sequence(u):
        prev, cur = cur, x * cur + prev
        out.append(cur)
    return out


def continuant_det(u: Iterable[int]) -> int:
    """Evaluate <u> as the tridiagonal determinant with diagonal ``u``.

    The superdiagonal is all 1 and the subdiagonal all -1. The determinant is
    expanded along the last row, one leading principal minor at a time, so
    this is an independent route to the same number as :func:`continuant`.
    """
    seq = as_sequence(u)
    if not seq:
        raise InvalidSequenceError("the determinant form needs at least one element")
    n = len(seq)
    # D[k] = det of the leading k x k block; expanding the k-th row gives
    # D[k] = u_k * D[k-1] - (sub)(super) * D[k-2] with sub = -1, super = 1.
    sub, sup = -1, 1
    minors = [1, seq[0]]
    for k in range(2, n + 1):
        minors.append(seq[k - 1] * minors[k - 1] - sub * sup * minors[k - 2])
    return minors[n]


def tridiagonal_matrix(u: Sequence[int]) -> list[list[int]]:
    """The explicit n x n matrix whose determinant is <u>."""
    seq = as_sequence(u)
    n = len(seq)
    rows = [[0] * n for _ in range(n)]
    for i, x in enumerate(seq):
        rows[i][i] = x
        if i + 1 < n:
            rows[i][i + 1] = 1
            rows[i + 1][i] = -1
    return rows


def cf_value(u: Iterable[int]) -> Fraction:
    """Value of the finite continued fraction [0; u_1, ..., u_n] as a reduced Fraction."""
    seq = as_sequence(u)
    if not seq:
        raise InvalidSequenceError("the empty sequence has no continued-fraction value")
    numerator = _continuant_pair(seq[1:])[1]
    denominator = _continuant_pair(seq)[1]
    return Fraction(numerator, denominator)


def cf_expand(f: Fraction) -> PartialQuotients:
    """Canonical expansion of ``0 < f < 1``; the last element is always >= 2."""
    f = Fraction(f)
    c, d = f.numerator, f.denominator
    if c <= 0 or c >= d:
        raise OutOfRangeError(f"expected 0 < c/d < 1, got {f}")
    out = []
    while c:
        q, r = divmod(d, c)
        out.append(q)
        d, c = c, r
    return tuple(out)


def is_canonical(u: Sequence[int]) -> bool:
    """True when ``u`` is the canonical expansion of its value."""
    return len(u) == 0 or u[-1] >= 2 or tuple(u) == (1,)


def reverse(u: Iterable[int]) -> PartialQuotients:
    """Return the elements of ``u`` in reverse order."""
    return tuple(reversed(as_sequence(u)))


def normalize_leading_one(u: Iterable[int]) -> PartialQuotients:
    """Rewrite ``(1, x, u_3, ..., u_n)`` as ``(x + 1, u_3, ..., u_n)``.

    Both sides have the same continuant: <1, u_2 - 1, u_3, ...> = <u_2, u_3, ...>
    with ``u_2 = x + 1 >= 2``.
    """
    seq = as_sequence(u)
    if len(seq) < 2:
        raise InvalidTransformError("need at least two elements to drop a leading 1")
    if seq[0] != 1:
        raise InvalidTransformError(f"sequence must start with 1, got {seq[0]}")
    return (seq[1] + 1,) + seq[2:]


def neighbor_determinant(u: Sequence[int]) -> int:
    """Return <u><u_^-> - <u_><u^->, which is always +1 or -1 for len(u) >= 2."""
    seq = as_sequence(u)
    if len(seq) < 2:
        raise InvalidSequenceError("the neighbour identity needs at least two elements")
    whole = continuant(seq)
    inner = continuant(seq[1:-1])
    tail = continuant(seq[1:])
    head = continuant(seq[:-1])
    return whole * inner - tail * head
