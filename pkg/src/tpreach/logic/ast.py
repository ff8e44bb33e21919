"""Core term/formula AST for the two-sorted linear arithmetic fragments.

Terms are built from sorted variables, constants, binary sums and negation.
Clock constraints use the naming convention ``x.int`` / ``x.frac`` for the
integer and fractional part of a clock ``x``; primed copies append ``'`` to
the clock name (``x'.int``).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

INT = "int"
RAT = "rat"


class LogicError(Exception):
    pass


class SortError(LogicError):
    pass


class UnboundVariableError(LogicError):
    pass


@dataclass(frozen=True)
class Var:
    name: str
    sort: str

    def __repr__(self):
        return f"{self.name}:{self.sort}"


@dataclass(frozen=True)
class Const:
    value: Fraction
    sort: str

    def __repr__(self):
        return str(self.value)


@dataclass(frozen=True)
class Add:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Neg:
    arg: "Term"


Term = Union[Var, Const, Add, Neg]


@dataclass(frozen=True)
class Cmp:
    """Order atom ``left op right`` with op in {<, <=, =, >=, >}."""

    left: Term
    op: str
    right: Term


@dataclass(frozen=True)
class ModEq:
    """Modular atom ``left ≡_m right + residue`` (right None stands for 0)."""

    left: Term
    right: Term | None
    modulus: int
    residue: int

    def __post_init__(self):
        if self.modulus < 1:
            raise LogicError(f"modulus must be >= 1, got {self.modulus}")
        object.__setattr__(self, "residue", self.residue % self.modulus)


@dataclass(frozen=True)
class BoolConst:
    value: bool


@dataclass(frozen=True)
class And:
    parts: tuple["Formula", ...]


@dataclass(frozen=True)
class Or:
    parts: tuple["Formula", ...]


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class Exists:
    var: Var
    body: "Formula"


Formula = Union[Cmp, ModEq, BoolConst, And, Or, Not, Exists]

TRUE = BoolConst(True)
FALSE = BoolConst(False)

CMP_OPS = ("<", "<=", "=", ">=", ">")


def int_const(k) -> Const:
    return Const(Fraction(k), INT)


def rat_const(q) -> Const:
    return Const(Fraction(q), RAT)


def ivar(clock: str) -> Var:
    """Integer-part variable of a clock."""
    return Var(clock + ".int", INT)


def fvar(clock: str) -> Var:
    """Fractional-part variable of a clock."""
    return Var(clock + ".frac", RAT)


def term_sort(t: Term) -> str:
    if isinstance(t, (Var, Const)):
        return t.sort
    if isinstance(t, Add):
        ls, rs = term_sort(t.left), term_sort(t.right)
        if ls != rs:
            raise SortError(f"mixed-sort sum: {t}")
        return ls
    if isinstance(t, Neg):
        return term_sort(t.arg)
    raise LogicError(f"not a term: {t!r}")


def add(t: Term, u: Term) -> Term:
    return Add(t, u)


def offset(t: Term, k, sort: str | None = None) -> Term:
    """t + k with constant folding for k == 0."""
    k = Fraction(k)
    if k == 0:
        return t
    return Add(t, Const(k, sort or term_sort(t)))


def conj(parts: Iterable[Formula]) -> Formula:
    """And with flattening and trivial constant folding."""
    out = []
    for p in parts:
        if isinstance(p, BoolConst):
            if not p.value:
                return FALSE
            continue
        if isinstance(p, And):
            out.extend(p.parts)
        else:
            out.append(p)
    if not out:
        return TRUE
    if len(out) == 1:
        return out[0]
    return And(tuple(out))


def disj(parts: Iterable[Formula]) -> Formula:
    """Or with flattening and trivial constant folding."""
    out = []
    for p in parts:
        if isinstance(p, BoolConst):
            if p.value:
                return TRUE
            continue
        if isinstance(p, Or):
            out.extend(p.parts)
        else:
            out.append(p)
    if not out:
        return FALSE
    if len(out) == 1:
        return out[0]
    return Or(tuple(out))


def term_vars(t: Term) -> set[Var]:
    if isinstance(t, Var):
        return {t}
    if isinstance(t, Const):
        return set()
    if isinstance(t, Add):
        return term_vars(t.left) | term_vars(t.right)
    if isinstance(t, Neg):
        return term_vars(t.arg)
    raise LogicError(f"not a term: {t!r}")


def free_vars(f: Formula) -> set[Var]:
    if isinstance(f, Cmp):
        return term_vars(f.left) | term_vars(f.right)
    if isinstance(f, ModEq):
        vs = term_vars(f.left)
        if f.right is not None:
            vs |= term_vars(f.right)
        return vs
    if isinstance(f, BoolConst):
        return set()
    if isinstance(f, (And, Or)):
        out: set[Var] = set()
        for p in f.parts:
            out |= free_vars(p)
        return out
    if isinstance(f, Not):
        return free_vars(f.arg)
    if isinstance(f, Exists):
        return free_vars(f.body) - {f.var}
    raise LogicError(f"not a formula: {f!r}")


def is_quantifier_free(f: Formula) -> bool:
    if isinstance(f, (Cmp, ModEq, BoolConst)):
        return True
    if isinstance(f, (And, Or)):
        return all(is_quantifier_free(p) for p in f.parts)
    if isinstance(f, Not):
        return is_quantifier_free(f.arg)
    return False


def eval_term(t: Term, valuation: Mapping[str, object]) -> Fraction:
    if isinstance(t, Var):
        if t.name not in valuation:
            raise UnboundVariableError(f"unbound variable: {t.name}")
        v = Fraction(valuation[t.name])
        if t.sort == INT and v.denominator != 1:
            raise SortError(f"integer variable {t.name} bound to non-integer {v}")
        return v
    if isinstance(t, Const):
        return t.value
    if isinstance(t, Add):
        return eval_term(t.left, valuation) + eval_term(t.right, valuation)
    if isinstance(t, Neg):
        return -eval_term(t.arg, valuation)
    raise LogicError(f"not a term: {t!r}")


def _cmp(a: Fraction, op: str, b: Fraction) -> bool:
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == "=":
        return a == b
    if op == ">=":
        return a >= b
    if op == ">":
        return a > b
    raise LogicError(f"unknown comparison op {op!r}")


def eval_qf(f: Formula, valuation: Mapping[str, object]) -> bool:
    """Evaluate a quantifier-free formula under an exact valuation."""
    if isinstance(f, Cmp):
        if term_sort(f.left) != term_sort(f.right):
            raise SortError(f"mixed-sort comparison: {f}")
        return _cmp(eval_term(f.left, valuation), f.op, eval_term(f.right, valuation))
    if isinstance(f, ModEq):
        lhs = eval_term(f.left, valuation)
        rhs = Fraction(0) if f.right is None else eval_term(f.right, valuation)
        if lhs.denominator != 1 or rhs.denominator != 1:
            raise SortError(f"modular atom over non-integers: {f}")
        return (int(lhs) - int(rhs) - f.residue) % f.modulus == 0
    if isinstance(f, BoolConst):
        return f.value
    if isinstance(f, And):
        return all(eval_qf(p, valuation) for p in f.parts)
    if isinstance(f, Or):
        return any(eval_qf(p, valuation) for p in f.parts)
    if isinstance(f, Not):
        return not eval_qf(f.arg, valuation)
    if isinstance(f, Exists):
        raise LogicError("eval_qf applied to a quantified formula")
    raise LogicError(f"not a formula: {f!r}")


def _subst_term(t: Term, binding: Mapping[Var, Term]) -> Term:
    if isinstance(t, Var):
        if t in binding:
            repl = binding[t]
            if term_sort(repl) != t.sort:
                raise SortError(f"substituting {t.sort} variable {t.name} by {repl!r}")
            return repl
        return t
    if isinstance(t, Const):
        return t
    if isinstance(t, Add):
        return Add(_subst_term(t.left, binding), _subst_term(t.right, binding))
    if isinstance(t, Neg):
        return Neg(_subst_term(t.arg, binding))
    raise LogicError(f"not a term: {t!r}")


def _fresh_name(base: str, taken: set[str]) -> str:
    for i in itertools.count(1):
        cand = f"{base}#{i}"
        if cand not in taken:
            return cand
    raise AssertionError


def substitute(f: Formula, binding: Mapping[Var, Term]) -> Formula:
    """Simultaneous capture-avoiding substitution."""
    if not binding:
        return f
    if isinstance(f, Cmp):
        return Cmp(_subst_term(f.left, binding), f.op, _subst_term(f.right, binding))
    if isinstance(f, ModEq):
        right = None if f.right is None else _subst_term(f.right, binding)
        return ModEq(_subst_term(f.left, binding), right, f.modulus, f.residue)
    if isinstance(f, BoolConst):
        return f
    if isinstance(f, And):
        return conj(substitute(p, binding) for p in f.parts)
    if isinstance(f, Or):
        return disj(substitute(p, binding) for p in f.parts)
    if isinstance(f, Not):
        return Not(substitute(f.arg, binding))
    if isinstance(f, Exists):
        binding = {v: t for v, t in binding.items() if v != f.var}
        if not binding:
            return f
        clashing = {n for t in binding.values() for n in (w.name for w in term_vars(t))}
        var, body = f.var, f.body
        if var.name in clashing:
            taken = clashing | {w.name for w in free_vars(body)}
            fresh = Var(_fresh_name(var.name, taken), var.sort)
            body = substitute(body, {var: fresh})
            var = fresh
        return Exists(var, substitute(body, binding))
    raise LogicError(f"not a formula: {f!r}")


def linearize(t: Term) -> tuple[dict[Var, int], Fraction]:
    """Decompose a +/- term into integer variable coefficients and a constant."""
    coeffs: dict[Var, int] = {}
    const = Fraction(0)

    def walk(u: Term, sign: int):
        nonlocal const
        if isinstance(u, Var):
            coeffs[u] = coeffs.get(u, 0) + sign
        elif isinstance(u, Const):
            const += sign * u.value
        elif isinstance(u, Add):
            walk(u.left, sign)
            walk(u.right, sign)
        elif isinstance(u, Neg):
            walk(u.arg, -sign)
        else:
            raise LogicError(f"not a term: {u!r}")

    walk(t, 1)
    return {v: c for v, c in coeffs.items() if c != 0}, const


def term_of_linear(coeffs: Mapping[Var, int], const: Fraction, sort: str) -> Term:
    """Rebuild a term from a linear decomposition (unit coefficients only)."""
    parts: list[Term] = []
    for v, c in sorted(coeffs.items(), key=lambda kv: kv[0].name):
        if abs(c) != 1:
            raise LogicError(f"non-unit coefficient {c} for {v}")
        parts.append(v if c == 1 else Neg(v))
    if const != 0 or not parts:
        parts.append(Const(const, sort))
    out = parts[0]
    for p in parts[1:]:
        out = Add(out, p)
    return out
