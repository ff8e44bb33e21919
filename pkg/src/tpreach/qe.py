"""Quantifier elimination for the clock-constraint logic.

Integer sort: naturals with order, +k offsets and modular congruences;
a conjunction with target variable y is normalized into bound/congruence
rows ``x_i + a_i <= y <= x_i + b_i``, ``y ≡_m x_i + c_i`` (the pseudo-row
x0 = 0 models absolute bounds, and the domain contributes the implicit
lower bound y >= 0).  A satisfying y, if any, can be taken of the form
``x_j + a_j + d`` with d < lcm of the moduli, which yields the
quantifier-free disjunction over candidates; with no explicit lower
bounds this degenerates into testing d in {0..m-1} against the upper
bounds and congruences alone.

Rational sort: the dense order on the unit interval with least element 0;
elimination pairs lower against upper bounds, a pair being strict iff
either contributing bound is strict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from tpreach.logic.ast import (
    FALSE,
    INT,
    RAT,
    TRUE,
    And,
    BoolConst,
    Cmp,
    Const,
    Exists,
    Formula,
    LogicError,
    ModEq,
    Not,
    Or,
    Term,
    Var,
    conj,
    disj,
    eval_qf,
    free_vars,
    int_const,
    linearize,
    offset,
    rat_const,
    term_of_linear,
)
from tpreach.logic.dnf import dnf_disjuncts


class QeError(LogicError):
    pass


# ---------------------------------------------------------------------------
# Integer sort


@dataclass(frozen=True)
class IntConjSystem:
    """Bounds and congruences on a target natural-number variable."""

    y: Var
    lowers: tuple[tuple[Var | None, int], ...]
    uppers: tuple[tuple[Var | None, int], ...]
    mods: tuple[tuple[Var | None, int, int], ...]  # (x, residue, modulus)


def _int_side(coeffs: dict[Var, int], const: Fraction, lit) -> tuple[Var | None, int]:
    """A fragment side: at most one variable with coefficient +1, plus an int."""
    if const.denominator != 1:
        raise QeError(f"non-integer constant in integer literal {lit!r}")
    if not coeffs:
        return None, int(const)
    if len(coeffs) == 1:
        (x, c), = coeffs.items()
        if c == 1:
            return x, int(const)
    raise QeError(f"literal not of supported shape: {lit!r}")


def normalize_int_conj(literals, y: Var) -> IntConjSystem:
    """Transcribe integer literals mentioning y into an IntConjSystem."""
    lowers: list[tuple[Var | None, int]] = []
    uppers: list[tuple[Var | None, int]] = []
    mods: list[tuple[Var | None, int, int]] = []
    for lit in literals:
        if isinstance(lit, Cmp):
            lc, lk = linearize(lit.left)
            rc, rk = linearize(lit.right)
            diff = dict(lc)
            for v, c in rc.items():
                diff[v] = diff.get(v, 0) - c
            diff = {v: c for v, c in diff.items() if c != 0}
            k = lk - rk
            cy = diff.pop(y, 0)
            if cy == 0:
                raise QeError(f"literal does not constrain {y.name}: {lit!r}")
            if abs(cy) != 1:
                raise QeError(f"literal not of supported shape: {lit!r}")
            # cy*y + diff + k  op  0
            op = lit.op
            if cy == -1:
                op = {"<": ">", "<=": ">=", "=": "=", ">=": "<=", ">": "<"}[op]
                diff = {v: -c for v, c in diff.items()}
                k = -k
            # y op -(diff) - k
            x, c = _int_side({v: -c for v, c in diff.items()}, -k, lit)
            if op in ("<", "<="):
                uppers.append((x, c - 1 if op == "<" else c))
            elif op in (">", ">="):
                lowers.append((x, c + 1 if op == ">" else c))
            else:
                lowers.append((x, c))
                uppers.append((x, c))
        elif isinstance(lit, ModEq):
            lc, lk = linearize(lit.left)
            rc, rk = (linearize(lit.right) if lit.right is not None else ({}, Fraction(0)))
            diff = dict(lc)
            for v, c in rc.items():
                diff[v] = diff.get(v, 0) - c
            diff = {v: c for v, c in diff.items() if c != 0}
            k = lk - rk - lit.residue
            cy = diff.pop(y, 0)
            if cy == 0:
                raise QeError(f"literal does not constrain {y.name}: {lit!r}")
            if abs(cy) != 1:
                raise QeError(f"literal not of supported shape: {lit!r}")
            if cy == -1:
                diff = {v: -c for v, c in diff.items()}
                k = -k
            # y ≡_m -(diff) - k
            x, c = _int_side({v: -c for v, c in diff.items()}, -k, lit)
            mods.append((x, c % lit.modulus, lit.modulus))
        else:
            raise QeError(f"literal not of supported shape: {lit!r}")
    return IntConjSystem(y, tuple(lowers), tuple(uppers), tuple(mods))


def _int_term(x: Var | None, k: int) -> Term:
    return int_const(k) if x is None else offset(Var(x.name, INT), k)


def _le_atom(xl: Var | None, kl: int, xr: Var | None, kr: int) -> Formula:
    if xl == xr:
        return TRUE if kl <= kr else FALSE
    if xl is None and kl - kr <= 0:
        return TRUE  # constant <= variable + offset holds over the naturals
    return Cmp(_int_term(xl, kl), "<=", _int_term(xr, kr))


def _mod_atom(xl: Var | None, kl: int, xr: Var | None, kr: int, m: int) -> Formula:
    if xl == xr:
        return TRUE if (kl - kr) % m == 0 else FALSE
    if xr is None:
        return ModEq(_int_term(xl, 0), None, m, (kr - kl) % m)
    if xl is None:
        return ModEq(_int_term(xr, 0), None, m, (kl - kr) % m)
    return ModEq(_int_term(xl, kl), Var(xr.name, INT), m, kr % m)


def qe_int_conj(sys: IntConjSystem) -> Formula:
    """Quantifier-free equivalent of ∃y over the naturals."""
    m = 1
    for _, _, mi in sys.mods:
        m = m * mi // math.gcd(m, mi)
    # The domain bound y >= 0 is the x0-row with offset 0; it both yields
    # candidate witnesses and must be respected by the other candidates.
    lowers = list(sys.lowers) + [(None, 0)]
    disjuncts = []
    for delta in range(m):
        for xj, aj in lowers:
            cand = aj + delta
            parts = []
            for xi, ai in lowers:
                parts.append(_le_atom(xi, ai, xj, cand))
            for xi, bi in sys.uppers:
                parts.append(_le_atom(xj, cand, xi, bi))
            for xi, gi, mi in sys.mods:
                parts.append(_mod_atom(xj, cand, xi, gi, mi))
            disjuncts.append(conj(parts))
    return disj(disjuncts)


# ---------------------------------------------------------------------------
# Rational sort (unit interval with 0)


def _rat_fold(a: Term, op: str, b: Term) -> Formula:
    """Comparison over unit-interval values with domain-aware folding."""
    if isinstance(a, Const) and isinstance(b, Const):
        return BoolConst(eval_qf(Cmp(a, op, b), {}))
    if isinstance(b, Const):
        if b.value >= 1:
            return TRUE if op in ("<", "<=") else FALSE
        if b.value < 0:
            return FALSE if op in ("<", "<=", "=") else TRUE
        if b.value == 0 and op == "<":
            return FALSE
    if isinstance(a, Const):
        if a.value >= 1:
            return FALSE if op in ("<", "<=", "=") else TRUE
        if a.value < 0:
            return TRUE if op in ("<", "<=") else FALSE
        if a.value == 0 and op in ("<=",):
            return TRUE
    if a == b:
        return TRUE if op in ("<=", "=", ">=") else FALSE
    return Cmp(a, op, b)


def _rat_var_or_const(t: Term, lit) -> Term:
    if isinstance(t, Var) or isinstance(t, Const):
        return t
    raise QeError(f"rational literal outside the order fragment: {lit!r}")


def qe_rat_conj(literals, y: Var) -> Formula:
    """Eliminate ∃y from order literals over the unit interval."""
    literals = list(literals)
    # Equalities pin y and are handled by substitution first.
    for i, lit in enumerate(literals):
        if isinstance(lit, Cmp) and lit.op == "=":
            a = _rat_var_or_const(lit.left, lit)
            b = _rat_var_or_const(lit.right, lit)
            if a == y or b == y:
                t = b if a == y else a
                if t == y:
                    return qe_rat_conj(literals[:i] + literals[i + 1:], y)
                rest = []
                for other in literals[:i] + literals[i + 1:]:
                    if not isinstance(other, Cmp):
                        raise QeError(f"rational literal outside the order fragment: {other!r}")
                    oa = _rat_var_or_const(other.left, other)
                    ob = _rat_var_or_const(other.right, other)
                    rest.append(_rat_fold(t if oa == y else oa, other.op, t if ob == y else ob))
                return conj(rest)
    lowers: list[tuple[Term, bool]] = [(rat_const(0), False)]
    uppers: list[tuple[Term, bool]] = [(rat_const(1), True)]
    for lit in literals:
        if not isinstance(lit, Cmp):
            raise QeError(f"rational literal outside the order fragment: {lit!r}")
        a = _rat_var_or_const(lit.left, lit)
        b = _rat_var_or_const(lit.right, lit)
        if a == y and b == y:
            if lit.op in ("<", ">"):
                return FALSE
            continue
        if a == y:
            if lit.op in ("<", "<="):
                uppers.append((b, lit.op == "<"))
            else:
                lowers.append((b, lit.op == ">"))
        elif b == y:
            if lit.op in ("<", "<="):
                lowers.append((a, lit.op == "<"))
            else:
                uppers.append((a, lit.op == ">"))
        else:
            raise QeError(f"literal does not constrain {y.name}: {lit!r}")
    pairs = []
    for lo, s1 in lowers:
        for up, s2 in uppers:
            pairs.append(_rat_fold(lo, "<" if (s1 or s2) else "<=", up))
    return conj(pairs)


# ---------------------------------------------------------------------------
# Hybrid elimination


def _mentions(lit: Formula, y: Var) -> bool:
    if y not in free_vars(lit):
        return False
    # The variable may still cancel, e.g. y <= y + 3.
    if isinstance(lit, Cmp):
        lc, _ = linearize(lit.left)
        rc, _ = linearize(lit.right)
        return lc.get(y, 0) - rc.get(y, 0) != 0
    if isinstance(lit, ModEq):
        lc, _ = linearize(lit.left)
        rc, _ = linearize(lit.right) if lit.right is not None else ({}, None)
        return lc.get(y, 0) - rc.get(y, 0) != 0
    return True


def _eliminate_one(y: Var, body: Formula) -> Formula:
    out = []
    for literals in dnf_disjuncts(body):
        targeted = [l for l in literals if _mentions(l, y)]
        shelf = [l for l in literals if not _mentions(l, y)]
        if not targeted:
            out.append(conj(shelf))
            continue
        if y.sort == INT:
            eliminated = qe_int_conj(normalize_int_conj(targeted, y))
        else:
            eliminated = qe_rat_conj(targeted, y)
        out.append(conj([eliminated] + shelf))
    return disj(out)


def qe_hybrid(f: Formula) -> Formula:
    """Eliminate every quantifier, innermost first, re-normalizing to DNF."""
    if isinstance(f, (Cmp, ModEq, BoolConst)):
        return f
    if isinstance(f, And):
        return conj(qe_hybrid(p) for p in f.parts)
    if isinstance(f, Or):
        return disj(qe_hybrid(p) for p in f.parts)
    if isinstance(f, Not):
        return Not(qe_hybrid(f.arg))
    if isinstance(f, Exists):
        return _eliminate_one(f.var, qe_hybrid(f.body))
    raise QeError(f"not a formula: {f!r}")


def qe_sat(f: Formula) -> bool:
    """Satisfiability of a clock-fragment formula by full elimination."""
    g = qe_hybrid(f)
    for v in sorted(free_vars(g), key=lambda v: v.name):
        g = _eliminate_one(v, g)
    return eval_qf(g, {})


# ---------------------------------------------------------------------------
# Fourier-Motzkin over unit-interval difference constraints


def fm_eliminate_rat(atoms, var: Var) -> list[Formula]:
    """Eliminate a unit-interval variable from difference-form order atoms.

    Atoms are comparisons whose sides are +/- combinations of rational
    variables and constants with unit coefficients.  The eliminated
    variable contributes the implicit domain bounds 0 <= v < 1.
    """
    residual: list[Formula] = []
    lowers: list[tuple[dict, Fraction, bool]] = [({}, Fraction(0), False)]
    uppers: list[tuple[dict, Fraction, bool]] = [({}, Fraction(1), True)]
    for atom in atoms:
        if isinstance(atom, BoolConst):
            residual.append(atom)
            continue
        if not isinstance(atom, Cmp):
            raise QeError(f"not an order atom: {atom!r}")
        lc, lk = linearize(atom.left)
        rc, rk = linearize(atom.right)
        diff = dict(lc)
        for v, c in rc.items():
            diff[v] = diff.get(v, 0) - c
        diff = {v: c for v, c in diff.items() if c != 0}
        k = lk - rk
        cv = diff.pop(var, 0)
        if cv == 0:
            residual.append(atom)
            continue
        if abs(cv) != 1:
            raise QeError(f"non-unit coefficient for {var.name} in {atom!r}")
        rest = {v: -c * cv for v, c in diff.items()}
        bound = (-k) * cv
        op = atom.op
        if cv == -1:
            op = {"<": ">", "<=": ">=", "=": "=", ">=": "<=", ">": "<"}[op]
        # now: var op rest + bound
        if op in ("<", "<="):
            uppers.append((rest, bound, op == "<"))
        elif op in (">", ">="):
            lowers.append((rest, bound, op == ">"))
        else:
            uppers.append((rest, bound, False))
            lowers.append((rest, bound, False))
    for lcoef, lk, ls in lowers:
        for ucoef, uk, us in uppers:
            if lcoef == ucoef:
                ok = (lk < uk) if (ls or us) else (lk <= uk)
                if not ok:
                    return [FALSE]
                continue
            lhs = term_of_linear(lcoef, lk, RAT)
            rhs = term_of_linear(ucoef, uk, RAT)
            residual.append(_rat_fold(lhs, "<" if (ls or us) else "<=", rhs))
    return residual
