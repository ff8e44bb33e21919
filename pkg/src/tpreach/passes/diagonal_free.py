"""Removal of diagonal integer/modular test atoms before the fractional
lowering, in the classic style of diagonal-constraint elimination for
timed automata: the value difference u - v of two global clocks only
changes at resets, so its floor-level facts are tracked as control bits.

Tracked bits: floor(u - v) <= K and floor(u - v) ≡_m r.  A diagonal atom
floor(u) - floor(v) rel k resolves through
floor(u) - floor(v) = floor(u - v) + [frac(v) > frac(u)]
into bit lookups guarded by runtime fractional comparisons; resets update
the affected bits through guessed test/reset chains whose guards are
non-diagonal.
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
    TRUE,
    conj,
    disj,
    eval_qf,
    free_vars,
    fvar,
    int_const,
    ivar,
    linearize,
    offset,
    rat_const,
)
from tpreach.passes.common import PassError, recompute_limits
from tpreach.tpda.spec import (
    Elapse,
    Input,
    Pop,
    Push,
    Reset,
    Rule,
    Test,
    TpdaSpec,
    clock_valuation_dict,
)


@dataclass(frozen=True)
class LeBit:
    u: str
    v: str
    k: int  # floor(u - v) <= k


@dataclass(frozen=True)
class ModBit:
    u: str
    v: str
    r: int
    m: int  # floor(u - v) ≡_m r


Bit = LeBit | ModBit


def bit_truth_formula(bit: Bit) -> Formula:
    """The bit's meaning over .int/.frac variables of a valuation."""
    borrow_yes = Cmp(fvar(bit.u), "<", fvar(bit.v))
    borrow_no = Cmp(fvar(bit.u), ">=", fvar(bit.v))
    if isinstance(bit, LeBit):
        # floor(u-v) = floor u - floor v - [frac u < frac v]
        return disj(
            [
                conj([borrow_yes, Cmp(ivar(bit.u), "<=", offset(ivar(bit.v), bit.k + 1))]),
                conj([borrow_no, Cmp(ivar(bit.u), "<=", offset(ivar(bit.v), bit.k))]),
            ]
        )
    return disj(
        [
            conj([borrow_yes, ModEq(ivar(bit.u), ivar(bit.v), bit.m, (bit.r + 1) % bit.m)]),
            conj([borrow_no, ModEq(ivar(bit.u), ivar(bit.v), bit.m, bit.r % bit.m)]),
        ]
    )


def bit_after_reset(bit: Bit, resets: frozenset) -> Formula | None:
    """New bit value as a formula over pre-reset values; None = unchanged."""
    u_r, v_r = bit.u in resets, bit.v in resets
    if not u_r and not v_r:
        return None
    if isinstance(bit, LeBit):
        if u_r and v_r:
            return BoolConst(0 <= bit.k)
        if u_r:  # difference becomes -v: floor(-v) <= k  iff  floor(v) >= -k - [frac v > 0]
            return disj(
                [
                    conj([Cmp(fvar(bit.v), "=", rat_const(0)), Cmp(ivar(bit.v), ">=", int_const(-bit.k))]),
                    conj([Cmp(fvar(bit.v), ">", rat_const(0)), Cmp(ivar(bit.v), ">=", int_const(-bit.k - 1))]),
                ]
            )
        return Cmp(ivar(bit.u), "<=", int_const(bit.k))  # difference becomes u
    if u_r and v_r:
        return BoolConst(bit.r % bit.m == 0)
    if u_r:
        return disj(
            [
                conj([Cmp(fvar(bit.v), "=", rat_const(0)), ModEq(ivar(bit.v), None, bit.m, (-bit.r) % bit.m)]),
                conj([Cmp(fvar(bit.v), ">", rat_const(0)), ModEq(ivar(bit.v), None, bit.m, (-bit.r - 1) % bit.m)]),
            ]
        )
    return ModEq(ivar(bit.u), None, bit.m, bit.r % bit.m)


def _diag_pair(f) -> tuple[str, str, int] | None:
    """(u, v, k) of an integer atom meaning floor(u) - floor(v) ~ k."""
    if isinstance(f, Cmp):
        lc, lk = linearize(f.left)
        rc, rk = linearize(f.right)
    elif isinstance(f, ModEq):
        lc, lk = linearize(f.left)
        rc, rk = linearize(f.right) if f.right is not None else ({}, Fraction(0))
        rk = rk + f.residue
    else:
        return None
    coeffs: dict = {}
    for v, c in lc.items():
        coeffs[v] = coeffs.get(v, 0) + c
    for v, c in rc.items():
        coeffs[v] = coeffs.get(v, 0) - c
    coeffs = {v: c for v, c in coeffs.items() if c != 0}
    if len(coeffs) != 2 or sorted(coeffs.values()) != [-1, 1]:
        return None
    if any(v.sort != INT for v in coeffs):
        return None
    pos = next(v for v in coeffs if coeffs[v] == 1)
    neg = next(v for v in coeffs if coeffs[v] == -1)
    k = rk - lk
    if k.denominator != 1:
        raise PassError(f"non-integer constant in {f!r}")
    return pos.name[:-4], neg.name[:-4], int(k)


def _resolve_atom(f, bit_value) -> Formula:
    """A diagonal test atom resolved through the bits (None if not diagonal).

    bit_value(bit) returns the current boolean of a tracked bit.
    """
    pair = _diag_pair(f)
    if pair is None:
        return None
    u, v, k = pair

    def le_floor(kk: int) -> Formula:
        return BoolConst(bit_value(LeBit(u, v, kk)))

    def floor_rel(op: str, kk: int) -> Formula:
        if op == "<=":
            return le_floor(kk)
        if op == "<":
            return le_floor(kk - 1)
        if op == ">=":
            return Not(le_floor(kk - 1))
        if op == ">":
            return Not(le_floor(kk))
        return conj([le_floor(kk), Not(le_floor(kk - 1))])

    borrow_yes = Cmp(fvar(v), ">", fvar(u))
    borrow_no = Cmp(fvar(v), "<=", fvar(u))
    if isinstance(f, Cmp):
        return disj(
            [
                conj([borrow_yes, floor_rel(f.op, k - 1)]),
                conj([borrow_no, floor_rel(f.op, k)]),
            ]
        )
    m = f.modulus
    return disj(
        [
            conj([borrow_yes, BoolConst(bit_value(ModBit(u, v, (k - 1) % m, m)))]),
            conj([borrow_no, BoolConst(bit_value(ModBit(u, v, k % m, m)))]),
        ]
    )


def _harvest(f: Formula, bits: dict):
    pair = _diag_pair(f) if isinstance(f, (Cmp, ModEq)) else None
    if pair is not None:
        u, v, k = pair
        if isinstance(f, Cmp):
            for kk in ({"<=": (k, k - 1), "<": (k - 1, k - 2), ">=": (k - 1, k - 2),
                        ">": (k, k - 1), "=": (k, k - 1, k - 2)}[f.op]):
                bits.setdefault(LeBit(u, v, kk), len(bits))
        else:
            m = f.modulus
            bits.setdefault(ModBit(u, v, k % m, m), len(bits))
            bits.setdefault(ModBit(u, v, (k - 1) % m, m), len(bits))
        return
    if isinstance(f, (And, Or)):
        for p in f.parts:
            _harvest(p, bits)
    elif isinstance(f, Not):
        _harvest(f.arg, bits)


def _rewrite_test(f: Formula, bit_value) -> Formula:
    if isinstance(f, (Cmp, ModEq)):
        resolved = _resolve_atom(f, bit_value)
        return f if resolved is None else resolved
    if isinstance(f, And):
        return conj(_rewrite_test(p, bit_value) for p in f.parts)
    if isinstance(f, Or):
        return disj(_rewrite_test(p, bit_value) for p in f.parts)
    if isinstance(f, Not):
        return Not(_rewrite_test(f.arg, bit_value))
    return f


@dataclass(frozen=True)
class DiagonalFreeResult:
    spec: TpdaSpec
    base_spec: TpdaSpec
    bits: tuple[Bit, ...]

    def bits_of(self, values) -> tuple[bool, ...]:
        """Bit vector determined by a clock valuation."""
        env = clock_valuation_dict(self.base_spec.clocks, values)
        return tuple(eval_qf(bit_truth_formula(b), env) for b in self.bits)

    def location(self, base, values):
        return (base, self.bits_of(values))

    def consistency_formula(self, bitvec, int_of, frac_of) -> Formula:
        """Bits match a valuation given by variable builders per clock."""
        parts = []
        for bit, val in zip(self.bits, bitvec):
            f = bit_truth_formula(bit)
            f = _rename_parts(f, int_of, frac_of)
            parts.append(f if val else Not(f))
        return conj(parts)


def _rename_parts(f: Formula, int_of, frac_of) -> Formula:
    from tpreach.logic import substitute

    binding = {}
    for var in free_vars(f):
        if var.name.endswith(".int"):
            binding[var] = int_of(var.name[:-4])
        else:
            binding[var] = frac_of(var.name[:-5])
    return substitute(f, binding)


def pass_c0(spec: TpdaSpec) -> DiagonalFreeResult:
    """Track diagonal integer/modular test facts in the control."""
    bits: dict = {}
    for rule in spec.rules:
        if isinstance(rule.op, Test):
            _harvest(rule.op.constraint, bits)
    bit_list = tuple(bits)
    n = len(bit_list)

    rules: list[Rule] = []
    locations: list = []
    synthesized = set()
    for base in spec.locations:
        for combo in itertools.product((False, True), repeat=n):
            locations.append((base, combo))
            if base in spec.synthesized:
                synthesized.add((base, combo))

    for ridx, rule in enumerate(spec.rules):
        op = rule.op
        for combo in itertools.product((False, True), repeat=n):
            src = (rule.source, combo)
            if isinstance(op, Test):

                def bit_value(b, combo=combo):
                    if b not in bits:
                        raise PassError(f"unharvested bit {b}")
                    return combo[bits[b]]

                rewritten = _rewrite_test(op.constraint, bit_value)
                rules.append(Rule(src, Test(rewritten), (rule.target, combo)))
            elif isinstance(op, Reset):
                updates = [
                    (i, bit_after_reset(bit_list[i], op.clocks)) for i in range(n)
                ]
                changing = [(i, f) for i, f in updates if f is not None]
                if not changing:
                    rules.append(Rule(src, op, (rule.target, combo)))
                    continue
                for values in itertools.product((False, True), repeat=len(changing)):
                    guard = conj(
                        f if val else Not(f)
                        for (i, f), val in zip(changing, values)
                    )
                    new_combo = list(combo)
                    for ((i, _), val) in zip(changing, values):
                        new_combo[i] = val
                    mid = ("c0.reset", ridx, combo, values)
                    if mid not in synthesized:
                        locations.append(mid)
                        synthesized.add(mid)
                    rules.append(Rule(src, Test(guard), mid))
                    rules.append(Rule(mid, op, (rule.target, tuple(new_combo))))
            else:
                rules.append(Rule(src, op, (rule.target, combo)))

    out = TpdaSpec(
        sigma=spec.sigma,
        gamma=spec.gamma,
        locations=tuple(locations),
        clocks=spec.clocks,
        stack_clocks=spec.stack_clocks,
        max_const=spec.max_const,
        modulus=spec.modulus,
        rules=tuple(rules),
        fractional=False,
        synthesized=frozenset(spec.synthesized | synthesized),
    )
    return DiagonalFreeResult(
        spec=recompute_limits(out), base_spec=spec, bits=bit_list
    )
