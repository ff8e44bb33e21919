"""Push-copy lowering: pushes only copy global clocks into stack clocks.

For every pair of an original push and pop constraint, the combined
"push held at push time, pop holds now" condition is rephrased over
pop-time values: a fresh global clock reset right before every push
plays the z0 role, so its copy on the stack measures the elapsed time
d between push and pop; push-time values are pop-time values shifted
back by d.  Shifted atoms reduce to cyclic comparisons of fractional
parts and offset integer comparisons, the original (shifted) stack
clocks are existentially eliminated, and each DNF disjunct of the
result is minted as its own stack symbol whose pop rule checks it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from tpreach.logic import (
    And,
    BoolConst,
    Cmp,
    Const,
    Exists,
    FALSE,
    Formula,
    INT,
    ModEq,
    Not,
    Or,
    RAT,
    TRUE,
    Var,
    conj,
    disj,
    free_vars,
    fvar,
    int_const,
    ivar,
    linearize,
    offset,
    substitute,
)
from tpreach.logic.dnf import dnf_disjuncts
from tpreach.logic.sexpr import format_formula
from tpreach.qe import qe_hybrid, qe_sat
from tpreach.passes.common import (
    PassError,
    atom_mentions,
    fresh_name,
    recompute_limits,
    split_conjunction,
)
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

COPY_PREFIX = "z!"
_BOUND_PREFIX = "w!"


@dataclass(frozen=True)
class PushCopyResult:
    spec: TpdaSpec
    xp: str  # fresh global clock reset right before every push (z0 role)
    push_constraints: tuple[Formula, ...]
    pop_constraints: tuple[Formula, ...]
    # (push index, pop index) -> conjunctive pop-condition disjuncts
    xi: dict


def copy_clock(x: str) -> str:
    return COPY_PREFIX + x


def copy_constraint(clocks) -> Formula:
    """The copying push constraint: every stack clock equals its global."""
    parts = []
    for x in clocks:
        parts.append(Cmp(ivar(copy_clock(x)), "=", ivar(x)))
        parts.append(Cmp(fvar(copy_clock(x)), "=", fvar(x)))
    return conj(parts)


# -- atom rewriting under the shift x = x' - d ------------------------------


def _indicator_cases(u: str, zd: str):
    """[{u} < {zd}] together with its two conditions."""
    yield 1, Cmp(fvar(u), "<", fvar(zd))
    yield 0, Cmp(fvar(u), ">=", fvar(zd))


def _shifted_frac_pair(u: str, v: str, op: str, zd: str) -> Formula:
    """{u - zd} op {v - zd} expressed over pop-time fractional values."""
    out = []
    for cu, condu in _indicator_cases(u, zd):
        for cv, condv in _indicator_cases(v, zd):
            # {u@push} = {u} - {zd} + cu, same for v; compare with offsets.
            shift = cu - cv
            if shift == 0:
                atom: Formula = Cmp(fvar(u), op, fvar(v))
            elif shift == 1:  # lhs + 1 op rhs over [0,1)
                atom = TRUE if op in (">", ">=") else FALSE
            else:  # lhs op rhs + 1
                atom = TRUE if op in ("<", "<=") else FALSE
            out.append(conj([condu, condv, atom]))
    return disj(out)


def _shifted_frac_zero(u: str, op: str, zd: str) -> Formula:
    """{u - zd} op 0 over pop-time values: {u - zd} = 0 iff {u} = {zd}."""
    eq = Cmp(fvar(u), "=", fvar(zd))
    if op in ("=", "<="):
        return eq
    if op == "<":
        return FALSE
    if op == ">=":
        return TRUE
    if op == ">":
        return Not(eq)
    raise PassError(f"unknown op {op!r}")


def _shifted_int_atom(atom, rep, zd: str) -> Formula:
    """An integer-sort atom of the push constraint, shifted by -zd.

    Uses floor(a - b) = floor(a) - floor(b) - [frac(a) < frac(b)]: every
    indicator case turns into offset comparisons among pop-time values.
    """
    if isinstance(atom, Cmp):
        lc, lk = linearize(atom.left)
        rc, rk = linearize(atom.right)
        coeffs: dict = {}
        for v, c in lc.items():
            coeffs[v] = coeffs.get(v, 0) + c
        for v, c in rc.items():
            coeffs[v] = coeffs.get(v, 0) - c
        coeffs = {v: c for v, c in coeffs.items() if c != 0}
        k = rk - lk  # atom is sum(coeffs) op k
        op = atom.op
        vars_ = sorted(coeffs, key=lambda v: v.name)
        if len(vars_) == 1 and coeffs[vars_[0]] == 1:
            u = rep[vars_[0].name[:-4]]
            # floor(u@push) op k  ->  floor(u) - floor(zd) - [a] op k
            out = []
            for cu, condu in _indicator_cases(u, zd):
                out.append(
                    conj([condu, Cmp(ivar(u), op, offset(ivar(zd), int(k) + cu))])
                )
            return disj(out)
        if len(vars_) == 2 and sorted(coeffs.values()) == [-1, 1]:
            pos = next(v for v in vars_ if coeffs[v] == 1)
            neg = next(v for v in vars_ if coeffs[v] == -1)
            u, v = rep[pos.name[:-4]], rep[neg.name[:-4]]
            out = []
            for cu, condu in _indicator_cases(u, zd):
                for cv, condv in _indicator_cases(v, zd):
                    out.append(
                        conj(
                            [
                                condu,
                                condv,
                                Cmp(ivar(u), op, offset(ivar(v), int(k) + cu - cv)),
                            ]
                        )
                    )
            return disj(out)
        raise PassError(f"push atom outside the clock fragment: {atom!r}")
    if isinstance(atom, ModEq):
        lc, lk = linearize(atom.left)
        rc, rk = linearize(atom.right) if atom.right is not None else ({}, Fraction(0))
        coeffs: dict = {}
        for v, c in lc.items():
            coeffs[v] = coeffs.get(v, 0) + c
        for v, c in rc.items():
            coeffs[v] = coeffs.get(v, 0) - c
        coeffs = {v: c for v, c in coeffs.items() if c != 0}
        k = rk - lk + atom.residue  # sum(coeffs) ≡_m k
        m = atom.modulus
        vars_ = sorted(coeffs, key=lambda v: v.name)
        if len(vars_) == 1 and coeffs[vars_[0]] == 1:
            u = rep[vars_[0].name[:-4]]
            out = []
            for cu, condu in _indicator_cases(u, zd):
                out.append(
                    conj([condu, ModEq(ivar(u), ivar(zd), m, (int(k) + cu) % m)])
                )
            return disj(out)
        if len(vars_) == 2 and sorted(coeffs.values()) == [-1, 1]:
            pos = next(v for v in vars_ if coeffs[v] == 1)
            neg = next(v for v in vars_ if coeffs[v] == -1)
            u, v = rep[pos.name[:-4]], rep[neg.name[:-4]]
            out = []
            for cu, condu in _indicator_cases(u, zd):
                for cv, condv in _indicator_cases(v, zd):
                    out.append(
                        conj([condu, condv, ModEq(ivar(u), ivar(v), m, (int(k) + cu - cv) % m)])
                    )
            return disj(out)
        raise PassError(f"push atom outside the clock fragment: {atom!r}")
    raise PassError(f"not an atom: {atom!r}")


def _shifted_rat_atom(atom: Cmp, rep, zd: str) -> Formula:
    sides = []
    for t in (atom.left, atom.right):
        c, k = linearize(t)
        if not c and k == 0:
            sides.append(None)  # the constant 0
        elif len(c) == 1 and list(c.values()) == [1] and k == 0:
            sides.append(rep[next(iter(c)).name[:-5]])
        else:
            raise PassError(f"push atom outside the clock fragment: {atom!r}")
    l, r = sides
    if l is None and r is None:
        return BoolConst(atom.op in ("<=", "=", ">="))  # 0 op 0
    if r is None:
        return _shifted_frac_zero(l, atom.op, zd)
    if l is None:
        flip = {"<": ">", "<=": ">=", "=": "=", ">=": "<=", ">": "<"}[atom.op]
        return _shifted_frac_zero(r, flip, zd)
    return _shifted_frac_pair(l, r, atom.op, zd)


def rewrite_push_constraint(f: Formula, rep, zd: str) -> Formula:
    """The push constraint re-expressed over pop-time (shifted) values."""
    if isinstance(f, BoolConst):
        return f
    if isinstance(f, And):
        return conj(rewrite_push_constraint(p, rep, zd) for p in f.parts)
    if isinstance(f, Or):
        return disj(rewrite_push_constraint(p, rep, zd) for p in f.parts)
    if isinstance(f, Not):
        return Not(rewrite_push_constraint(f.arg, rep, zd))
    if isinstance(f, Cmp):
        some_var = next(iter(free_vars(f)), None)
        if some_var is None:
            return f
        if some_var.sort == RAT:
            return _shifted_rat_atom(f, rep, zd)
        return _shifted_int_atom(f, rep, zd)
    if isinstance(f, ModEq):
        return _shifted_int_atom(f, rep, zd)
    raise PassError(f"not a formula: {f!r}")


# -- xi computation ----------------------------------------------------------


def _xi_disjuncts(psi_push, psi_pop, globals_, stack_clocks, xp) -> list[Formula]:
    """Conjunctive disjuncts of the eliminated pop condition."""
    from tpreach.logic import desugar_classical

    rep = {x: copy_clock(x) for x in globals_}
    for z in stack_clocks:
        rep[z] = _BOUND_PREFIX + z
    zd = copy_clock(xp)
    shifted_push = rewrite_push_constraint(psi_push, rep, zd)
    pop_binding = {}
    for z in stack_clocks:
        pop_binding[ivar(z)] = ivar(_BOUND_PREFIX + z)
        pop_binding[fvar(z)] = fvar(_BOUND_PREFIX + z)
    pop_now = substitute(psi_pop, pop_binding)
    # Push-time stack values w - d must be nonnegative clock values.
    nonneg = [
        desugar_classical(_BOUND_PREFIX + z, zd, ">=", 0) for z in stack_clocks
    ]
    body = conj([shifted_push, pop_now] + nonneg)
    for z in stack_clocks:
        body = Exists(ivar(_BOUND_PREFIX + z), Exists(fvar(_BOUND_PREFIX + z), body))
    eliminated = qe_hybrid(body)
    cands = []
    seen = set()
    for lits in dnf_disjuncts(eliminated):
        key = frozenset(lits)
        if key in seen:
            continue
        seen.add(key)
        if qe_sat(conj(lits)):
            cands.append(key)
    # drop disjuncts syntactically subsumed by a weaker one
    kept = []
    for key in cands:
        if any(other < key for other in cands):
            continue
        kept.append(key)
    return [conj(sorted(key, key=format_formula)) for key in kept]


def pass_a(spec: TpdaSpec) -> PushCopyResult:
    """Lower to push-copy form (Lemma 4.2 shape): reachability unchanged."""
    if spec.fractional:
        raise PassError("push-copy lowering applies to dense-time specs")
    push_constraints: list[Formula] = []
    pop_constraints: list[Formula] = []
    push_idx: dict = {}
    pop_idx: dict = {}
    push_syms: dict = {}  # symbol -> set of push constraint indices
    pop_syms: dict = {}
    for rule in spec.rules:
        if isinstance(rule.op, Push):
            if rule.op.constraint not in push_idx:
                push_idx[rule.op.constraint] = len(push_constraints)
                push_constraints.append(rule.op.constraint)
            push_syms.setdefault(rule.op.symbol, set()).add(push_idx[rule.op.constraint])
        elif isinstance(rule.op, Pop):
            if rule.op.constraint not in pop_idx:
                pop_idx[rule.op.constraint] = len(pop_constraints)
                pop_constraints.append(rule.op.constraint)
            pop_syms.setdefault(rule.op.symbol, set()).add(pop_idx[rule.op.constraint])

    xp = fresh_name("xp", set(spec.clocks) | set(spec.stack_clocks))
    clocks = spec.clocks + (xp,)
    stack_clocks = tuple(copy_clock(x) for x in clocks)
    copy_set = set(stack_clocks)
    psi_copy = copy_constraint(clocks)

    xi: dict = {}
    for pi, ppush in enumerate(push_constraints):
        for qi, ppop in enumerate(pop_constraints):
            xi[(pi, qi)] = _xi_disjuncts(
                ppush, ppop, spec.clocks, spec.stack_clocks, xp
            )

    rules: list[Rule] = []
    locations = list(spec.locations)
    synthesized = set(spec.synthesized)
    gamma: list = []

    def add_loc(loc):
        if loc not in locations:
            locations.append(loc)
            synthesized.add(loc)

    for ridx, rule in enumerate(spec.rules):
        op = rule.op
        if isinstance(op, (Elapse, Input, Test, Reset)):
            rules.append(rule)
            continue
        if isinstance(op, Push):
            pi = push_idx[op.constraint]
            prep = ("A.push", ridx)
            add_loc(prep)
            rules.append(Rule(rule.source, Reset(frozenset({xp})), prep))
            for qi in sorted(pop_syms.get(op.symbol, ())):
                for j in range(len(xi[(pi, qi)])):
                    sym = (op.symbol, pi, qi, j)
                    if sym not in gamma:
                        gamma.append(sym)
                    rules.append(Rule(prep, Push(sym, psi_copy), rule.target))
            continue
        if isinstance(op, Pop):
            qi = pop_idx[op.constraint]
            for pi in sorted(push_syms.get(op.symbol, ())):
                for j, d in enumerate(xi[(pi, qi)]):
                    sym = (op.symbol, pi, qi, j)
                    if sym not in gamma:
                        gamma.append(sym)
                    atoms = split_conjunction(d)
                    stack_atoms = [a for a in atoms if atom_mentions(a, copy_set)]
                    global_atoms = [a for a in atoms if not atom_mentions(a, copy_set)]
                    if global_atoms:
                        mid = ("A.pop", ridx, pi, j)
                        add_loc(mid)
                        rules.append(Rule(rule.source, Test(conj(global_atoms)), mid))
                        rules.append(Rule(mid, Pop(sym, conj(stack_atoms)), rule.target))
                    else:
                        rules.append(Rule(rule.source, Pop(sym, conj(stack_atoms)), rule.target))
            continue
        raise PassError(f"unknown op {op!r}")

    out = TpdaSpec(
        sigma=spec.sigma,
        gamma=tuple(gamma),
        locations=tuple(locations),
        clocks=clocks,
        stack_clocks=stack_clocks,
        max_const=spec.max_const,
        modulus=spec.modulus,
        rules=tuple(rules),
        fractional=False,
        synthesized=frozenset(synthesized),
    )
    return PushCopyResult(
        spec=recompute_limits(out),
        xp=xp,
        push_constraints=tuple(push_constraints),
        pop_constraints=tuple(pop_constraints),
        xi=xi,
    )
