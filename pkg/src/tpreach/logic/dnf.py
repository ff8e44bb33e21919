"""Negation normal form and disjunctive normal form for quantifier-free formulas.

Negations are resolved at the atoms: order atoms flip their relation
(over the integer sort this stays within the non-strict fragment after
normalization), modular atoms expand into the complementary residues,
and negated equalities split into the two strict sides.
"""

from __future__ import annotations

from tpreach.logic.ast import (
    FALSE,
    TRUE,
    And,
    BoolConst,
    Cmp,
    Exists,
    Formula,
    LogicError,
    ModEq,
    Not,
    Or,
    conj,
    disj,
)

_FLIP = {"<": ">=", "<=": ">", "=": None, ">=": "<", ">": "<="}


def negate_atom(atom: Formula) -> Formula:
    """Negation of an atom, resolved back into atoms."""
    if isinstance(atom, BoolConst):
        return FALSE if atom.value else TRUE
    if isinstance(atom, Cmp):
        if atom.op == "=":
            return Or((Cmp(atom.left, "<", atom.right), Cmp(atom.left, ">", atom.right)))
        return Cmp(atom.left, _FLIP[atom.op], atom.right)
    if isinstance(atom, ModEq):
        others = [
            ModEq(atom.left, atom.right, atom.modulus, r)
            for r in range(atom.modulus)
            if r != atom.residue
        ]
        return disj(others)
    raise LogicError(f"cannot negate non-atom {atom!r}")


def to_nnf(f: Formula, positive: bool = True) -> Formula:
    if isinstance(f, (Cmp, ModEq, BoolConst)):
        return f if positive else negate_atom(f)
    if isinstance(f, Not):
        return to_nnf(f.arg, not positive)
    if isinstance(f, And):
        parts = (to_nnf(p, positive) for p in f.parts)
        return conj(parts) if positive else disj(parts)
    if isinstance(f, Or):
        parts = (to_nnf(p, positive) for p in f.parts)
        return disj(parts) if positive else conj(parts)
    if isinstance(f, Exists):
        raise LogicError("to_nnf expects a quantifier-free formula")
    raise LogicError(f"not a formula: {f!r}")


def dnf_disjuncts(f: Formula) -> list[tuple[Formula, ...]]:
    """DNF as a list of conjunctions of atoms; [] encodes false, [()] true."""
    f = to_nnf(f)

    def walk(g: Formula) -> list[tuple[Formula, ...]]:
        if isinstance(g, BoolConst):
            return [()] if g.value else []
        if isinstance(g, (Cmp, ModEq)):
            return [(g,)]
        if isinstance(g, Or):
            out: list[tuple[Formula, ...]] = []
            for p in g.parts:
                out.extend(walk(p))
            return out
        if isinstance(g, And):
            acc: list[tuple[Formula, ...]] = [()]
            for p in g.parts:
                branches = walk(p)
                acc = [a + b for a in acc for b in branches]
                if not acc:
                    return []
            return acc
        raise LogicError(f"unexpected formula in NNF: {g!r}")

    seen = set()
    result = []
    for d in walk(f):
        if d not in seen:
            seen.add(d)
            result.append(d)
    return result


def to_dnf(f: Formula) -> Formula:
    """Logically equivalent disjunction of conjunctions of atoms."""
    return disj(conj(d) for d in dnf_disjuncts(f))
