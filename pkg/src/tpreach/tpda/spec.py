"""TPDA syntax: rules, specs, well-formedness checks.

Locations and stack symbols are arbitrary hashable values; user-facing
specs use strings, while the lowering passes produce structured tuples
tracked in provenance maps.  The distinguished global clock ``x0`` is
never reset and measures total elapsed time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable

from tpreach.logic import (
    Formula,
    INT,
    RAT,
    Var,
    free_vars,
    is_quantifier_free,
)

X0 = "x0"


class TpdaError(Exception):
    pass


@dataclass(frozen=True)
class Elapse:
    # Fractional-mode restrictions on the delay: `noncross` forbids pushing
    # any global clock past 0 (landing exactly on 0 stays allowed), `strict`
    # additionally forbids landing on 0.
    noncross: bool = False
    strict: bool = False


@dataclass(frozen=True)
class Input:
    letter: str | None  # None is epsilon


@dataclass(frozen=True)
class Test:
    constraint: Formula


@dataclass(frozen=True)
class Reset:
    clocks: frozenset[str]


@dataclass(frozen=True)
class Push:
    symbol: Hashable
    constraint: Formula


@dataclass(frozen=True)
class Pop:
    symbol: Hashable
    constraint: Formula


Op = Elapse | Input | Test | Reset | Push | Pop


@dataclass(frozen=True)
class Rule:
    source: Hashable
    op: Op
    target: Hashable


@dataclass(frozen=True)
class TpdaSpec:
    sigma: tuple[str, ...]
    gamma: tuple[Hashable, ...]
    locations: tuple[Hashable, ...]
    clocks: tuple[str, ...]
    stack_clocks: tuple[str, ...]
    max_const: int
    modulus: int
    rules: tuple[Rule, ...]
    fractional: bool = False
    # Locations synthesized by passes; steps out of them cost no budget.
    synthesized: frozenset = field(default_factory=frozenset)

    def rules_from(self, loc) -> list[Rule]:
        return [r for r in self.rules if r.source == loc]


def iter_atoms(f: Formula):
    """All atoms of a quantifier-free formula."""
    from tpreach.logic import And, BoolConst, Cmp, ModEq, Not, Or

    if isinstance(f, (Cmp, ModEq)):
        yield f
    elif isinstance(f, BoolConst):
        return
    elif isinstance(f, (And, Or)):
        for p in f.parts:
            yield from iter_atoms(p)
    elif isinstance(f, Not):
        yield from iter_atoms(f.arg)
    else:
        raise TpdaError(f"not a quantifier-free formula: {f!r}")


def constraint_clocks(f: Formula) -> set[str]:
    """Clock names mentioned through their .int/.frac part variables."""
    out = set()
    for v in free_vars(f):
        if v.name.endswith(".int"):
            out.add(v.name[:-4])
        elif v.name.endswith(".frac"):
            out.add(v.name[:-5])
        else:
            out.add(v.name)
    return out


def clock_valuation_dict(clocks, values) -> dict:
    """Exact int/frac part bindings for a tuple of nonnegative clock values."""
    out = {}
    for c, v in zip(clocks, values):
        out[c + ".int"] = int(v)
        out[c + ".frac"] = v - int(v)
    return out


def _check_constraint(f: Formula, allowed: set[str], where: str, out: list[str]):
    if not is_quantifier_free(f):
        out.append(f"quantified-constraint: {where}")
        return
    for v in free_vars(f):
        name = v.name
        if name.endswith(".int"):
            base, sort = name[:-4], INT
        elif name.endswith(".frac"):
            base, sort = name[:-5], RAT
        else:
            out.append(f"non-clock-variable {name}: {where}")
            continue
        if v.sort != sort:
            out.append(f"bad-sort {name}: {where}")
        if base not in allowed:
            out.append(f"unknown-clock {base}: {where}")


def validate_spec(spec: TpdaSpec) -> list[str]:
    """All well-formedness violations, empty when the spec is well-formed."""
    out: list[str] = []
    locs = set(spec.locations)
    if X0 not in spec.clocks:
        out.append("missing-x0")
    globals_ = set(spec.clocks)
    stack = set(spec.stack_clocks)
    if globals_ & stack:
        out.append("clock-name-clash")
    for i, rule in enumerate(spec.rules):
        where = f"rule[{i}] {rule.source}->{rule.target}"
        if rule.source not in locs or rule.target not in locs:
            out.append(f"unknown-location: {where}")
        op = rule.op
        if isinstance(op, Input):
            if op.letter is not None and op.letter not in spec.sigma:
                out.append(f"unknown-letter {op.letter}: {where}")
        elif isinstance(op, Test):
            _check_constraint(op.constraint, globals_, where, out)
        elif isinstance(op, Reset):
            if X0 in op.clocks:
                out.append(f"x0-reset: {where}")
            if not op.clocks <= globals_:
                out.append(f"unknown-clock-reset: {where}")
        elif isinstance(op, (Push, Pop)):
            if op.symbol not in spec.gamma:
                out.append(f"unknown-symbol {op.symbol!r}: {where}")
            _check_constraint(op.constraint, globals_ | stack, where, out)
            for atom in iter_atoms(op.constraint):
                names = constraint_clocks(atom)
                if names and not (names & stack):
                    out.append(f"stack-constraint-without-stack-var: {where}")
                    break
        elif isinstance(op, Elapse):
            if (op.noncross or op.strict) and not spec.fractional:
                out.append(f"noncross-elapse-outside-fractional: {where}")
        else:
            out.append(f"unknown-op: {where}")
    return out
