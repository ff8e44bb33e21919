"""Shared helpers for the lowering passes."""

from __future__ import annotations

import math
from fractions import Fraction

from tpreach.logic import (
    And,
    BoolConst,
    Cmp,
    Formula,
    INT,
    ModEq,
    Not,
    Or,
    Var,
    conj,
    disj,
    free_vars,
    linearize,
)
from tpreach.tpda.parse import normalize_modulus
from tpreach.tpda.spec import Pop, Push, Test, TpdaError, TpdaSpec


class PassError(TpdaError):
    pass


def fresh_name(base: str, taken) -> str:
    if base not in taken:
        return base
    i = 1
    while f"{base}{i}" in taken:
        i += 1
    return f"{base}{i}"


def atom_mentions(atom: Formula, clocks: set[str]) -> bool:
    for v in free_vars(atom):
        name = v.name
        base = name[:-4] if name.endswith(".int") else name[:-5]
        if base in clocks:
            return True
    return False


def split_conjunction(f: Formula) -> list[Formula]:
    """Atoms of a conjunction; rejects other connectives."""
    if isinstance(f, BoolConst):
        return [] if f.value else [f]
    if isinstance(f, (Cmp, ModEq)):
        return [f]
    if isinstance(f, And):
        out = []
        for p in f.parts:
            out.extend(split_conjunction(p))
        return out
    raise PassError(f"expected a conjunction of atoms, got {f!r}")


def recompute_limits(spec: TpdaSpec) -> TpdaSpec:
    """Refresh max_const / modulus from the constraints and re-normalize
    every modular atom to the new shared modulus."""
    mods = {spec.modulus, 1}
    consts = {0}

    def scan(f: Formula):
        if isinstance(f, ModEq):
            mods.add(f.modulus)
        elif isinstance(f, Cmp):
            _, lk = linearize(f.left)
            _, rk = linearize(f.right)
            k = lk - rk
            if k.denominator == 1:
                consts.add(abs(int(k)))
        elif isinstance(f, (And, Or)):
            for p in f.parts:
                scan(p)
        elif isinstance(f, Not):
            scan(f.arg)

    for rule in spec.rules:
        op = rule.op
        if isinstance(op, (Test, Push, Pop)):
            scan(op.constraint)
    modulus = math.lcm(*sorted(mods))
    max_const = max(consts | {spec.max_const})

    def norm(rule):
        op = rule.op
        if isinstance(op, Test):
            op = Test(normalize_modulus(op.constraint, modulus))
        elif isinstance(op, Push):
            op = Push(op.symbol, normalize_modulus(op.constraint, modulus))
        elif isinstance(op, Pop):
            op = Pop(op.symbol, normalize_modulus(op.constraint, modulus))
        return rule.__class__(rule.source, op, rule.target)

    return TpdaSpec(
        sigma=spec.sigma,
        gamma=spec.gamma,
        locations=spec.locations,
        clocks=spec.clocks,
        stack_clocks=spec.stack_clocks,
        max_const=max_const,
        modulus=modulus,
        rules=tuple(norm(r) for r in spec.rules),
        fractional=spec.fractional,
        synthesized=spec.synthesized,
    )


def close_reachable(seeds, expand):
    """Worklist closure: expand(loc) yields rules out of loc; returns
    (locations in discovery order, rules)."""
    seen = []
    seen_set = set()
    rules = []
    work = list(seeds)
    for s in work:
        if s not in seen_set:
            seen_set.add(s)
            seen.append(s)
    idx = 0
    while idx < len(seen):
        loc = seen[idx]
        idx += 1
        for rule in expand(loc):
            rules.append(rule)
            if rule.target not in seen_set:
                seen_set.add(rule.target)
                seen.append(rule.target)
    return seen, rules
