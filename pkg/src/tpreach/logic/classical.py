"""Classical clock comparisons desugared into integer/fractional atoms."""

from __future__ import annotations

from fractions import Fraction

from tpreach.logic.ast import (
    Cmp,
    Formula,
    LogicError,
    Not,
    Term,
    conj,
    disj,
    fvar,
    int_const,
    ivar,
    offset,
    rat_const,
)
from tpreach.logic.dnf import to_nnf


def _iterm(clock: str | None, k: int = 0) -> Term:
    return int_const(k) if clock is None else offset(ivar(clock), k)


def _fterm(clock: str | None) -> Term:
    return rat_const(0) if clock is None else fvar(clock)


def _le_diff(x: str | None, y: str | None, k: int) -> Formula:
    """x - y <= k as (⌊x⌋-⌊y⌋ <= k ∧ {x} <= {y}) ∨ ⌊x⌋-⌊y⌋ <= k-1.

    Either side may be None, standing for the constant 0.
    """
    return disj(
        [
            conj([Cmp(_iterm(x), "<=", _iterm(y, k)), Cmp(_fterm(x), "<=", _fterm(y))]),
            Cmp(_iterm(x), "<=", _iterm(y, k - 1)),
        ]
    )


def desugar_classical(x: str, y: str | None, rel: str, k) -> Formula:
    """Integer+fractional equivalent of the classical constraint x - y rel k.

    y None means the non-diagonal comparison x rel k.  The non-<= relations
    are derived from the <= case by symmetry and negation.
    """
    k = Fraction(k)
    if k.denominator != 1:
        raise LogicError(f"classical constraints need integer constants, got {k}")
    k = int(k)
    if rel == "<=":
        return _le_diff(x, y, k)
    if rel == ">=":
        return _le_diff(y, x, -k)
    if rel == "<":
        return to_nnf(Not(_le_diff(y, x, -k)))
    if rel == ">":
        return to_nnf(Not(_le_diff(x, y, k)))
    if rel == "=":
        return conj([_le_diff(x, y, k), _le_diff(y, x, -k)])
    raise LogicError(f"unknown relation {rel!r}")


def floor_fract_diff(
    x_int: int, x_frac: Fraction, y_int: int, y_frac: Fraction
) -> tuple[int, Fraction]:
    """Integer and fractional part of x - y from the parts of x and y (x >= y)."""
    borrow = 1 if x_frac < y_frac else 0
    return x_int - y_int - borrow, x_frac - y_frac + borrow
