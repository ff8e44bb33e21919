"""Pop-integer-free lowering: pop constraints keep only modular and
fractional atoms.

Integer atoms in pop constraints are first rephrased through the value
identity floor(u) - floor(v) = floor(u-v) + [frac(v) > frac(u)] into
classical (value-level) comparisons plus pop-time fractional atoms.
Classical comparisons between two stack copies are constant between push
and pop and move to a push-time test on the underlying globals (the
stack symbol records which variant was guessed).  Classical comparisons
against pop-time globals become the harvested constraint set C: one
fresh global clock per constraint is reset when the underlying clock is
(guessed to be) reset for the last time before the push, the control
tracks pending guesses and active constraints, and the pop replaces the
classical part by a test on the fresh clocks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from tpreach.logic import (
    Cmp,
    Formula,
    INT,
    ModEq,
    TRUE,
    conj,
    desugar_classical,
    free_vars,
    linearize,
)
from tpreach.logic.sexpr import format_formula
from tpreach.passes.common import PassError, recompute_limits, split_conjunction
from tpreach.passes.push_copy import COPY_PREFIX
from tpreach.tpda.spec import (
    Elapse,
    Input,
    Pop,
    Push,
    Reset,
    Rule,
    Test,
    TpdaSpec,
)

_FLIP = {"<": ">", "<=": ">=", "=": "=", ">=": "<=", ">": "<"}


@dataclass(frozen=True)
class ClassicalPopConstraint:
    """y - z_x op k at pop time; y None stands for the constant 0."""

    y: str | None
    x: str  # the global clock whose copy is compared
    op: str  # one of < <= >= >
    k: int

    @property
    def lower(self) -> bool:
        return self.op in (">", ">=")


@dataclass(frozen=True)
class PopIntegerFreeResult:
    spec: TpdaSpec
    base_spec: TpdaSpec
    constraints: tuple[ClassicalPopConstraint, ...]
    fresh_clocks: tuple[str, ...]  # aligned with constraints

    def initial_locations(self, base):
        clocks = self.base_spec.clocks
        for size in range(len(clocks) + 1):
            for t in itertools.combinations(clocks, size):
                yield (base, frozenset(t), frozenset(), frozenset())

    def final_locations(self, base):
        n = len(self.constraints)
        lowers = [i for i in range(n) if self.constraints[i].lower]
        uppers = [i for i in range(n) if not self.constraints[i].lower]
        for pm in _subsets(lowers):
            for pp in _subsets(uppers):
                yield (base, frozenset(), pm, pp)


def _subsets(items):
    items = list(items)
    for size in range(len(items) + 1):
        for combo in itertools.combinations(items, size):
            yield frozenset(combo)


def _clock_of(term, copies: set[str]):
    """(clock name, is_copy, offset) of an integer term var + const."""
    coeffs, const = linearize(term)
    if len(coeffs) > 1 or any(c != 1 for c in coeffs.values()):
        raise PassError(f"integer pop atom outside the fragment: {term!r}")
    if not coeffs:
        return None, False, const
    (v,) = coeffs
    name = v.name[:-4]
    return name, name in copies, const


def _classicalize(op: str, k: int):
    """floor(w) op k as an exact classical bound on the value w."""
    if op == "<=":
        return [("<", k + 1)]
    if op == "<":
        return [("<", k)]
    if op == ">=":
        return [(">=", k)]
    if op == ">":
        return [(">=", k + 1)]
    if op == "=":
        return [(">=", k), ("<", k + 1)]
    raise PassError(f"unknown op {op!r}")


def _rewrite_pop_atom(atom, copies: set[str]):
    """Alternatives for one pop atom: (classical constraints on pop globals
    vs copies, push-time classical pairs, fractional atoms kept at pop).

    Returns a list of (list[ClassicalPopConstraint], list[(u, v, op, k)],
    list[Formula]) choices; exactly one choice holds in any run.
    """
    if isinstance(atom, ModEq):
        return None  # kept verbatim in the non-classical part
    if not isinstance(atom, Cmp):
        raise PassError(f"not an atom: {atom!r}")
    anyvar = next(iter(free_vars(atom)), None)
    if anyvar is None or anyvar.sort != INT:
        return None  # fractional atoms stay
    lu, lcopy, lk = _clock_of(atom.left, copies)
    ru, rcopy, rk = _clock_of(atom.right, copies)
    if lk.denominator != 1 or rk.denominator != 1:
        raise PassError(f"non-integer offset in {atom!r}")
    k = int(rk - lk)
    op = atom.op
    # normalize: floor(L) - floor(R) op k with L the left clock
    if lu is None:
        lu, lcopy, ru, rcopy = ru, rcopy, lu, lcopy
        op = _FLIP[op]
        k = -k
    out = []
    if ru is None:
        # floor(u) op k, u a copy (pure-global atoms never reach pops)
        if not lcopy:
            raise PassError(f"pure-global integer atom in a pop constraint: {atom!r}")
        x = lu[len(COPY_PREFIX):]
        alts = [
            [ClassicalPopConstraint(None, x, _FLIP[o], -kk) for o, kk in _classicalize(op, k)]
        ]
        return [(alt, [], []) for alt in alts]
    # diagonal: floor(L) - floor(R) op k = floor(L-R) + [frac R > frac L] op k
    from tpreach.logic import fvar

    choices = []
    for borrow, cond in (
        (1, Cmp(fvar(ru), ">", fvar(lu))),
        (0, Cmp(fvar(ru), "<=", fvar(lu))),
    ):
        classicals = _classicalize(op, k - borrow)
        if lcopy and rcopy:
            xl = lu[len(COPY_PREFIX):]
            xr = ru[len(COPY_PREFIX):]
            push_pairs = [(xl, xr, o, kk) for o, kk in classicals]
            choices.append(([], push_pairs, [cond]))
        elif not lcopy and rcopy:
            x = ru[len(COPY_PREFIX):]
            cs = [ClassicalPopConstraint(lu, x, o, kk) for o, kk in classicals]
            choices.append((cs, [], [cond]))
        elif lcopy and not rcopy:
            # z_x - y op k  <=>  y - z_x flip(op) -k
            x = lu[len(COPY_PREFIX):]
            cs = [ClassicalPopConstraint(ru, x, _FLIP[o], -kk) for (o, kk) in classicals]
            choices.append((cs, [], [cond]))
        else:
            raise PassError(f"pure-global integer atom in a pop constraint: {atom!r}")
    return choices


def _pop_variants(constraint: Formula, copies: set[str]):
    """All case-split variants of a pop constraint.

    Each variant: (classicals, push_test_formula, frac_part_formula).
    """
    atoms = split_conjunction(constraint)
    per_atom = []
    for atom in atoms:
        choices = _rewrite_pop_atom(atom, copies)
        if choices is None:
            per_atom.append([([], [], [atom])])
        else:
            per_atom.append(choices)
    variants = []
    for combo in itertools.product(*per_atom):
        classicals: list[ClassicalPopConstraint] = []
        push_pairs: list = []
        frac: list[Formula] = []
        for cs, pp, fr in combo:
            classicals.extend(cs)
            push_pairs.extend(pp)
            frac.extend(fr)
        push_test = conj(
            desugar_classical(u, v, o, kk) for (u, v, o, kk) in sorted(set(push_pairs))
        )
        variants.append((tuple(sorted(set(classicals), key=repr)), push_test, conj(frac)))
    # merge identical variants
    seen = {}
    for v in variants:
        key = (v[0], format_formula(v[1]), format_formula(v[2]))
        seen.setdefault(key, v)
    return list(seen.values())


def pass_b(spec: TpdaSpec) -> PopIntegerFreeResult:
    """Remove integer atoms from pop constraints (Appendix-A.6 shape)."""
    copies = {z for z in spec.stack_clocks if z.startswith(COPY_PREFIX)}
    if set(spec.stack_clocks) != copies:
        raise PassError("pop-integer-free lowering needs a push-copy spec")
    for rule in spec.rules:
        if isinstance(rule.op, Push):
            for atom in split_conjunction(rule.op.constraint):
                if not isinstance(atom, Cmp) or atom.op != "=":
                    raise PassError("pushes must be plain copies")

    # Phase 1: rewrite pop rules into variants, harvest C.
    pop_rules = [r for r in spec.rules if isinstance(r.op, Pop)]
    variants_by_rule: dict = {}
    symbol_tests: dict = {}  # symbol -> ordered list of push_test formulas
    cset: list[ClassicalPopConstraint] = []
    cindex: dict = {}

    def cid(c: ClassicalPopConstraint) -> int:
        if c not in cindex:
            cindex[c] = len(cset)
            cset.append(c)
        return cindex[c]

    for rule in pop_rules:
        vs = _pop_variants(rule.op.constraint, copies)
        variants_by_rule[rule] = vs
        tests = symbol_tests.setdefault(rule.op.symbol, [])
        for classicals, push_test, _ in vs:
            for c in classicals:
                cid(c)
            if push_test not in tests:
                tests.append(push_test)
    for rule in spec.rules:
        if isinstance(rule.op, Push) and rule.op.symbol not in symbol_tests:
            symbol_tests[rule.op.symbol] = [TRUE]

    constraints = tuple(cset)
    fresh = tuple(f"c!{i}" for i in range(len(constraints)))
    lower_of: dict = {}
    upper_of: dict = {}
    for i, c in enumerate(constraints):
        (lower_of if c.lower else upper_of).setdefault(c.x, []).append(i)

    clocks = spec.clocks + fresh
    base_clocks = spec.clocks
    all_t = list(_subsets(base_clocks))
    lowers_all = [i for i in range(len(constraints)) if constraints[i].lower]
    uppers_all = [i for i in range(len(constraints)) if not constraints[i].lower]
    phi_pairs = [
        (pm, pp) for pm in _subsets(lowers_all) for pp in _subsets(uppers_all)
    ]

    def psi_tilde(classical_ids) -> Formula:
        parts = []
        for i in sorted(classical_ids):
            c = constraints[i]
            if c.y is None:
                parts.append(desugar_classical(fresh[i], None, _FLIP[c.op], -c.k))
            else:
                parts.append(desugar_classical(c.y, fresh[i], c.op, c.k))
        return conj(parts)

    rules: list[Rule] = []
    locations: list = []
    synthesized = set()
    gamma: list = []

    def loc(base, t, pm, pp):
        l = (base, t, pm, pp)
        return l

    for base in spec.locations:
        for t in all_t:
            for pm, pp in phi_pairs:
                locations.append(loc(base, t, pm, pp))
                if base in spec.synthesized:
                    synthesized.add(loc(base, t, pm, pp))

    for sym, tests in symbol_tests.items():
        for vi in range(len(tests)):
            for pm, pp in phi_pairs:
                gamma.append(((sym, vi), pm, pp))

    for rule in spec.rules:
        op = rule.op
        if isinstance(op, (Elapse, Input, Test)):
            for t in all_t:
                for pm, pp in phi_pairs:
                    rules.append(
                        Rule(loc(rule.source, t, pm, pp), op, loc(rule.target, t, pm, pp))
                    )
        elif isinstance(op, Reset):
            y = op.clocks
            for t in all_t:
                if y & t:
                    continue
                for pm, pp in phi_pairs:
                    for u_size in range(len(y) + 1):
                        for u in itertools.combinations(sorted(y), u_size):
                            u = frozenset(u)
                            cand_lo = frozenset(
                                i for x in u for i in lower_of.get(x, [])
                            ) - pm
                            cand_up = frozenset(
                                i for x in u for i in upper_of.get(x, [])
                            ) - pp
                            for psi_m in _subsets(cand_lo):
                                for psi_p in _subsets(cand_up):
                                    phi_plus_y = {
                                        i for i in pp if constraints[i].x in y
                                    }
                                    extra = {
                                        fresh[i]
                                        for i in (psi_m | psi_p | phi_plus_y)
                                    }
                                    rules.append(
                                        Rule(
                                            loc(rule.source, t, pm, pp),
                                            Reset(y | frozenset(extra)),
                                            loc(
                                                rule.target,
                                                t | u,
                                                pm | psi_m,
                                                pp | psi_p,
                                            ),
                                        )
                                    )
        elif isinstance(op, Push):
            tests = symbol_tests[op.symbol]
            t_full = frozenset(base_clocks)
            for pm, pp in phi_pairs:
                for vi, push_test in enumerate(tests):
                    for t_next in all_t:
                        src = loc(rule.source, t_full, pm, pp)
                        tgt = loc(rule.target, t_next, pm, pp)
                        newsym = ((op.symbol, vi), pm, pp)
                        if push_test == TRUE:
                            rules.append(Rule(src, Push(newsym, op.constraint), tgt))
                        else:
                            mid = ("B.push", rule.source, op.symbol, vi, t_next, pm, pp)
                            if mid not in synthesized:
                                locations.append(mid)
                                synthesized.add(mid)
                            rules.append(Rule(src, Test(push_test), mid))
                            rules.append(Rule(mid, Push(newsym, op.constraint), tgt))
        elif isinstance(op, Pop):
            tests = symbol_tests[op.symbol]
            for classicals, push_test, frac in variants_by_rule[rule]:
                vi = tests.index(push_test)
                ids = frozenset(cid(c) for c in classicals)
                s_m = frozenset(i for i in ids if constraints[i].lower)
                s_p = ids - s_m
                test_f = psi_tilde(ids)
                for t in all_t:
                    for pm, pp in phi_pairs:
                        src = loc(rule.source, t, s_m, s_p)
                        tgt = loc(rule.target, t, pm, pp)
                        newsym = ((op.symbol, vi), pm, pp)
                        if test_f == TRUE:
                            rules.append(Rule(src, Pop(newsym, frac), tgt))
                        else:
                            mid = ("B.pop", rule.source, op.symbol, vi, ids, t, pm, pp)
                            if mid not in synthesized:
                                locations.append(mid)
                                synthesized.add(mid)
                            rules.append(Rule(src, Test(test_f), mid))
                            rules.append(Rule(mid, Pop(newsym, frac), tgt))
        else:
            raise PassError(f"unknown op {op!r}")

    out = TpdaSpec(
        sigma=spec.sigma,
        gamma=tuple(gamma),
        locations=tuple(locations),
        clocks=clocks,
        stack_clocks=spec.stack_clocks,
        max_const=spec.max_const,
        modulus=spec.modulus,
        rules=tuple(rules),
        fractional=False,
        synthesized=frozenset(synthesized),
    )
    return PopIntegerFreeResult(
        spec=recompute_limits(out),
        base_spec=spec,
        constraints=constraints,
        fresh_clocks=fresh,
    )
