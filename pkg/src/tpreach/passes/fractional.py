"""Fractional lowering: integer clock parts move into the control as a
unary abstraction, integer boundary crossings become tick letters.

Per clock the control tracks exact values 0..B (B the max constant) and,
above B, the residue mod M; this refinement of the M-unary equivalence
keeps the +1 successor well-defined.  A time elapse is simulated by a
gadget looping over boundary-stopping segments: strict segments change
no integer part, wrap segments land the current maximum fractional
block exactly on 0 and increment its clocks one by one, emitting tick_x
for clocks promised never to be reset again.  Pops resolve modular
constraints from the pushed abstraction and the integer time between
push and pop, recovered from the never-reset clock and the z0 copy.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from tpreach.logic import (
    And,
    BoolConst,
    Cmp,
    FALSE,
    Formula,
    INT,
    ModEq,
    Not,
    Or,
    RAT,
    TRUE,
    conj,
    disj,
    free_vars,
    fvar,
    int_const,
    ivar,
    linearize,
    rat_const,
)
from tpreach.passes.common import PassError, close_reachable
from tpreach.passes.push_copy import COPY_PREFIX, copy_clock
from tpreach.tpda.spec import (
    X0,
    Elapse,
    Input,
    Pop,
    Push,
    Reset,
    Rule,
    Test,
    TpdaSpec,
)

TICK_PREFIX = "tick!"


def tick_letter(clock: str) -> str:
    return TICK_PREFIX + clock


# -- unary classes -----------------------------------------------------------


def cls_of(value: int, b: int, m: int):
    return ("e", value) if value <= b else ("h", value % m)


def cls_inc(c, b: int, m: int):
    if c[0] == "e":
        return ("e", c[1] + 1) if c[1] + 1 <= b else ("h", (c[1] + 1) % m)
    return ("h", (c[1] + 1) % m)


def cls_mod(c, m: int) -> int:
    return c[1] % m


def all_classes(b: int, m: int):
    return [("e", v) for v in range(b + 1)] + [("h", r) for r in range(m)]


def cls_formula(c, int_term, b: int, m: int) -> Formula:
    """Membership of floor(x) in the class, over the given integer term."""
    if c[0] == "e":
        return conj([Cmp(int_term, ">=", int_const(c[1])), Cmp(int_term, "<=", int_const(c[1]))])
    return conj(
        [Cmp(int_term, ">=", int_const(b + 1)), ModEq(int_term, None, m, c[1])]
    )


def _resolve_int_atom(atom, lam: dict, b: int, m: int) -> Formula:
    """A non-diagonal integer/modular atom resolved to true/false."""
    if isinstance(atom, Cmp):
        lc, lk = linearize(atom.left)
        rc, rk = linearize(atom.right)
    else:
        lc, lk = linearize(atom.left)
        rc, rk = (linearize(atom.right) if atom.right is not None else ({}, Fraction(0)))
    coeffs: dict = {}
    for v, c in lc.items():
        coeffs[v] = coeffs.get(v, 0) + c
    for v, c in rc.items():
        coeffs[v] = coeffs.get(v, 0) - c
    coeffs = {v: c for v, c in coeffs.items() if c != 0}
    k = rk - lk
    if not coeffs:
        if isinstance(atom, Cmp):
            return BoolConst({"<": 0 < k, "<=": 0 <= k, "=": 0 == k, ">=": 0 >= k, ">": 0 > k}[atom.op])
        return BoolConst((-int(k) - atom.residue) % atom.modulus == 0)
    if len(coeffs) != 1 or list(coeffs.values()) != [1]:
        raise PassError(f"diagonal integer atom reached the fractional pass: {atom!r}")
    (var,) = coeffs
    cls = lam[var.name[:-4]]
    if isinstance(atom, ModEq):
        mm = atom.modulus
        if m % mm != 0:
            raise PassError(f"modulus {mm} not normalized to {m}")
        want = (int(k) + atom.residue) % mm
        return BoolConst(cls_mod(cls, m) % mm == want)
    kk = k
    if kk.denominator != 1:
        raise PassError(f"non-integer bound {atom!r}")
    kk = int(kk)
    if cls[0] == "e":
        val = cls[1]
        return BoolConst({"<": val < kk, "<=": val <= kk, "=": val == kk, ">=": val >= kk, ">": val > kk}[atom.op])
    if kk > b:
        raise PassError(f"constant {kk} above the tracked bound {b}")
    # value >= b+1 > kk
    return BoolConst(atom.op in (">", ">="))


def resolve_test(f: Formula, lam: dict, b: int, m: int) -> Formula:
    if isinstance(f, (Cmp, ModEq)):
        anyvar = next(iter(free_vars(f)), None)
        if anyvar is not None and anyvar.sort == RAT:
            return f
        return _resolve_int_atom(f, lam, b, m)
    if isinstance(f, And):
        return conj(resolve_test(p, lam, b, m) for p in f.parts)
    if isinstance(f, Or):
        return disj(resolve_test(p, lam, b, m) for p in f.parts)
    if isinstance(f, Not):
        return Not(resolve_test(f.arg, lam, b, m))
    return f


def _resolve_pop_with_delta(f: Formula, values: dict, m: int) -> Formula:
    """Resolve modular pop atoms given integer values mod m per clock name."""
    if isinstance(f, ModEq):
        mm = f.modulus
        if m % mm != 0:
            raise PassError(f"modulus {mm} not normalized to {m}")
        lc, lk = linearize(f.left)
        rc, rk = linearize(f.right) if f.right is not None else ({}, Fraction(0))
        total = lk - rk - f.residue
        for v, c in lc.items():
            total += c * values[v.name[:-4]]
        for v, c in rc.items():
            total -= c * values[v.name[:-4]]
        return BoolConst(int(total) % mm == 0)
    if isinstance(f, Cmp):
        anyvar = next(iter(free_vars(f)), None)
        if anyvar is None or anyvar.sort == RAT:
            return f
        raise PassError(f"integer pop atom reached the fractional pass: {f!r}")
    if isinstance(f, And):
        return conj(_resolve_pop_with_delta(p, values, m) for p in f.parts)
    if isinstance(f, Or):
        return disj(_resolve_pop_with_delta(p, values, m) for p in f.parts)
    if isinstance(f, Not):
        return Not(_resolve_pop_with_delta(f.arg, values, m))
    return f


@dataclass(frozen=True)
class FractionalResult:
    spec: TpdaSpec
    base_spec: TpdaSpec
    max_exact: int
    modulus: int

    def lambda_of(self, int_values) -> tuple:
        return tuple(
            cls_of(int(v), self.max_exact, self.modulus) for v in int_values
        )

    def classes(self):
        return all_classes(self.max_exact, self.modulus)

    def location(self, base, lam, y1):
        return (base, lam, frozenset(y1))

    def lambda_formula(self, lam, int_terms) -> Formula:
        return conj(
            cls_formula(c, t, self.max_exact, self.modulus)
            for c, t in zip(lam, int_terms)
        )


def pass_c(spec: TpdaSpec, seeds=None) -> FractionalResult:
    """Fractional lowering; `seeds` restricts construction to the part
    reachable from the given (base, lambda, Y1) triples."""
    if spec.fractional:
        raise PassError("input is already fractional")
    clocks = spec.clocks
    b, m = spec.max_const, spec.modulus
    has_stack = bool(spec.stack_clocks)
    if has_stack:
        copies = {z for z in spec.stack_clocks if z.startswith(COPY_PREFIX)}
        if set(spec.stack_clocks) != copies:
            raise PassError("fractional lowering needs a push-copy spec")
        zd = copy_clock("xp" if "xp" in clocks else X0)
        if zd not in spec.stack_clocks:
            raise PassError("missing elapsed-time copy clock")
    lam_space = list(itertools.product(all_classes(b, m), repeat=len(clocks)))
    clock_index = {c: i for i, c in enumerate(clocks)}

    if seeds is None:
        seeds = [
            (base, lam, frozenset(y1))
            for base in spec.locations
            for lam in lam_space
            for size in range(len(clocks) + 1)
            for y1 in itertools.combinations(clocks, size)
        ]
    else:
        seeds = [(base, tuple(lam), frozenset(y1)) for base, lam, y1 in seeds]

    rules_from: dict = {}
    for idx, rule in enumerate(spec.rules):
        rules_from.setdefault(rule.source, []).append((idx, rule))

    frac_copy = conj(
        Cmp(fvar(copy_clock(x)), "=", fvar(x)) for x in clocks
    ) if has_stack else TRUE

    def pop_variants(constraint, lam_pop, lam_push):
        """Resolved pop constraint: cases over the partial-unit borrow."""
        resolved = {}
        for borrow in (0, 1):
            delta = (
                cls_mod(lam_pop[clock_index[X0]], m)
                - cls_mod(lam_push[clock_index[X0]], m)
                - borrow
            ) % m
            values = {}
            for x in clocks:
                values[x] = cls_mod(lam_pop[clock_index[x]], m)
                values[copy_clock(x)] = (
                    cls_mod(lam_push[clock_index[x]], m) + delta
                ) % m
            resolved[borrow] = _resolve_pop_with_delta(constraint, values, m)
        if resolved[0] == resolved[1]:
            return resolved[0]  # borrow-independent
        return disj(
            [
                conj([Cmp(fvar(zd), "<=", fvar(X0)), resolved[0]]),
                conj([Cmp(fvar(zd), ">", fvar(X0)), resolved[1]]),
            ]
        )

    markers = ("C.e1", "C.ew", "C.ew2", "C.e2")

    def expand(loc):
        kind = loc[0] if isinstance(loc, tuple) and loc and loc[0] in markers else None
        out = []
        if kind is None:
            base, lam, y1 = loc
            lam_map = {x: lam[i] for i, x in enumerate(clocks)}
            for ridx, rule in rules_from.get(base, ()):
                op = rule.op
                if isinstance(op, Input):
                    out.append(Rule(loc, op, (rule.target, lam, y1)))
                elif isinstance(op, Test):
                    resolved = resolve_test(op.constraint, lam_map, b, m)
                    if resolved != FALSE:
                        out.append(Rule(loc, Test(resolved), (rule.target, lam, y1)))
                elif isinstance(op, Reset):
                    if op.clocks & y1:
                        continue
                    new_lam = tuple(
                        ("e", 0) if clocks[i] in op.clocks else lam[i]
                        for i in range(len(clocks))
                    )
                    for size in range(len(op.clocks) + 1):
                        for y2 in itertools.combinations(sorted(op.clocks), size):
                            out.append(
                                Rule(loc, op, (rule.target, new_lam, y1 | frozenset(y2)))
                            )
                elif isinstance(op, Elapse):
                    out.append(Rule(loc, Input(None), ("C.e1", ridx, lam, y1)))
                elif isinstance(op, Push):
                    out.append(
                        Rule(loc, Push((op.symbol, lam), frac_copy), (rule.target, lam, y1))
                    )
                elif isinstance(op, Pop):
                    for lam_push in lam_space:
                        resolved = pop_variants(op.constraint, lam, lam_push)
                        if resolved == FALSE:
                            continue
                        out.append(
                            Rule(loc, Pop((op.symbol, lam_push), resolved), (rule.target, lam, y1))
                        )
                else:
                    raise PassError(f"unknown op {op!r}")
            return out
        if kind == "C.e1":
            _, ridx, lam, y1 = loc
            out.append(Rule(loc, Elapse(noncross=True, strict=True), ("C.e2", ridx, lam, y1, frozenset())))
            for size in range(1, len(clocks) + 1):
                for w in itertools.combinations(clocks, size):
                    w = frozenset(w)
                    w0 = min(w)
                    pre = conj(
                        [Cmp(fvar(x), "=", fvar(w0)) for x in sorted(w) if x != w0]
                        + [Cmp(fvar(y), "<", fvar(w0)) for y in clocks if y not in w]
                    )
                    out.append(Rule(loc, Test(pre), ("C.ew", ridx, lam, y1, w)))
            return out
        if kind == "C.ew":
            _, ridx, lam, y1, w = loc
            out.append(Rule(loc, Elapse(noncross=True), ("C.ew2", ridx, lam, y1, w)))
            return out
        if kind == "C.ew2":
            _, ridx, lam, y1, w = loc
            post = conj(Cmp(fvar(x), "=", rat_const(0)) for x in sorted(w))
            out.append(Rule(loc, Test(post), ("C.e2", ridx, lam, y1, w)))
            return out
        if kind == "C.e2":
            _, ridx, lam, y1, pending = loc
            if pending:
                x = min(pending)
                letter = tick_letter(x) if x in y1 else None
                new_lam = tuple(
                    cls_inc(lam[i], b, m) if clocks[i] == x else lam[i]
                    for i in range(len(clocks))
                )
                out.append(
                    Rule(loc, Input(letter), ("C.e2", ridx, new_lam, y1, pending - {x}))
                )
            else:
                rule = spec.rules[ridx]
                out.append(Rule(loc, Input(None), ("C.e1", ridx, lam, y1)))
                out.append(Rule(loc, Input(None), (rule.target, lam, y1)))
            return out
        raise PassError(f"cannot expand location {loc!r}")

    locations, rules = close_reachable(seeds, expand)
    synthesized = set()
    gamma = []
    gamma_seen = set()
    for rule in rules:
        if isinstance(rule.op, (Push, Pop)) and rule.op.symbol not in gamma_seen:
            gamma_seen.add(rule.op.symbol)
            gamma.append(rule.op.symbol)
    for loc in locations:
        if isinstance(loc, tuple) and loc and loc[0] in ("C.e1", "C.ew", "C.ew2", "C.e2"):
            synthesized.add(loc)
        elif isinstance(loc, tuple) and len(loc) == 3 and loc[0] in spec.synthesized:
            synthesized.add(loc)

    sigma = spec.sigma + tuple(tick_letter(x) for x in clocks)
    out_spec = TpdaSpec(
        sigma=sigma,
        gamma=tuple(gamma),
        locations=tuple(locations),
        clocks=clocks,
        stack_clocks=spec.stack_clocks,
        max_const=spec.max_const,
        modulus=spec.modulus,
        rules=tuple(rules),
        fractional=True,
        synthesized=frozenset(synthesized),
    )
    return FractionalResult(
        spec=out_spec, base_spec=spec, max_exact=b, modulus=m
    )
