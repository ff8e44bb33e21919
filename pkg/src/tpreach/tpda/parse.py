"""TPDA text format (s-expressions) and load-time normalization.

Beyond the generic formula syntax, constraints accept clock-atom
shorthands: ``(int<= x k)`` (and int< / int= / int>= / int>),
``(diag<= x y k)`` family, ``(mod= x m k)``, ``(diag-mod= x y m k)``,
``(frac0 x)``, ``(frac-le x y)``, ``(frac-lt x y)``, ``(frac-eq x y)``,
and classical sugar ``(classic<= x y k)`` / ``(classic<= x k)`` (all
relation variants), desugared at load.  Loading adds the never-reset
clock ``x0`` when absent and normalizes every modular atom to the
single spec-wide modulus (the lcm of all declared and used moduli).
"""

from __future__ import annotations

import math
from fractions import Fraction

from tpreach.logic import (
    And,
    BoolConst,
    Cmp,
    Formula,
    ModEq,
    Not,
    Or,
    conj,
    desugar_classical,
    disj,
    fvar,
    int_const,
    ivar,
    linearize,
    offset,
    rat_const,
)
from tpreach.logic.sexpr import ParseError, formula_from_sexpr, parse_sexpr
from tpreach.tpda.spec import (
    X0,
    Elapse,
    Input,
    Pop,
    Push,
    Reset,
    Rule,
    Test,
    TpdaError,
    TpdaSpec,
    validate_spec,
)

_INT_REL = {"int<=": "<=", "int<": "<", "int=": "=", "int>=": ">=", "int>": ">"}
_DIAG_REL = {"diag<=": "<=", "diag<": "<", "diag=": "=", "diag>=": ">=", "diag>": ">"}
_CLASSIC_REL = {
    "classic<=": "<=",
    "classic<": "<",
    "classic=": "=",
    "classic>=": ">=",
    "classic>": ">",
}


def constraint_from_sexpr(e) -> Formula:
    if isinstance(e, str):
        return formula_from_sexpr(e)
    if not e:
        raise ParseError("empty constraint")
    head = e[0]
    if head in _INT_REL and len(e) == 3:
        return Cmp(ivar(e[1]), _INT_REL[head], int_const(int(e[2])))
    if head in _DIAG_REL and len(e) == 4:
        return Cmp(ivar(e[1]), _DIAG_REL[head], offset(ivar(e[2]), int(e[3])))
    if head == "mod=" and len(e) == 4:
        m = int(e[2])
        return ModEq(ivar(e[1]), None, m, int(e[3]))
    if head == "diag-mod=" and len(e) == 5:
        m = int(e[3])
        return ModEq(ivar(e[1]), ivar(e[2]), m, int(e[4]))
    if head == "frac0" and len(e) == 2:
        return Cmp(fvar(e[1]), "=", rat_const(0))
    if head == "frac-le" and len(e) == 3:
        return Cmp(fvar(e[1]), "<=", fvar(e[2]))
    if head == "frac-lt" and len(e) == 3:
        return Cmp(fvar(e[1]), "<", fvar(e[2]))
    if head == "frac-eq" and len(e) == 3:
        return Cmp(fvar(e[1]), "=", fvar(e[2]))
    if head in _CLASSIC_REL:
        if len(e) == 4:
            return desugar_classical(e[1], e[2], _CLASSIC_REL[head], int(e[3]))
        if len(e) == 3:
            return desugar_classical(e[1], None, _CLASSIC_REL[head], int(e[2]))
        raise ParseError(f"bad classical atom {e!r}")
    if head == "and":
        return conj(constraint_from_sexpr(p) for p in e[1:])
    if head == "or":
        return disj(constraint_from_sexpr(p) for p in e[1:])
    if head == "not" and len(e) == 2:
        return Not(constraint_from_sexpr(e[1]))
    return formula_from_sexpr(e)


def parse_constraint(text: str) -> Formula:
    return constraint_from_sexpr(parse_sexpr(text))


def _rule_from_sexpr(e) -> Rule:
    if not (isinstance(e, list) and len(e) == 4 and e[0] == "rule"):
        raise ParseError(f"bad rule {e!r}")
    _, source, op_e, target = e
    if op_e == "elapse":
        op = Elapse()
    elif op_e == "eps":
        op = Input(None)
    elif isinstance(op_e, list) and op_e:
        head = op_e[0]
        if head == "input":
            op = Input(op_e[1] if len(op_e) > 1 else None)
        elif head == "test" and len(op_e) == 2:
            op = Test(constraint_from_sexpr(op_e[1]))
        elif head == "reset":
            op = Reset(frozenset(op_e[1:]))
        elif head == "push" and len(op_e) == 3:
            op = Push(op_e[1], constraint_from_sexpr(op_e[2]))
        elif head == "pop" and len(op_e) == 3:
            op = Pop(op_e[1], constraint_from_sexpr(op_e[2]))
        elif head == "elapse":
            op = Elapse(noncross="noncross" in op_e[1:])
        else:
            raise ParseError(f"bad rule op {op_e!r}")
    else:
        raise ParseError(f"bad rule op {op_e!r}")
    return Rule(source, op, target)


def _walk_constraints(spec_rules):
    for rule in spec_rules:
        op = rule.op
        if isinstance(op, (Test, Push, Pop)):
            yield op.constraint


def _formula_moduli_and_consts(f: Formula, mods: set[int], consts: set[int]):
    if isinstance(f, ModEq):
        mods.add(f.modulus)
        return
    if isinstance(f, Cmp):
        _, lk = linearize(f.left)
        _, rk = linearize(f.right)
        k = lk - rk
        if k.denominator == 1:
            consts.add(abs(int(k)))
        return
    if isinstance(f, (And, Or)):
        for p in f.parts:
            _formula_moduli_and_consts(p, mods, consts)
    elif isinstance(f, Not):
        _formula_moduli_and_consts(f.arg, mods, consts)


def normalize_modulus(f: Formula, modulus: int) -> Formula:
    """Rewrite every modular atom to the shared modulus (residue expansion)."""
    if isinstance(f, ModEq):
        if f.modulus == modulus:
            return f
        return disj(
            ModEq(f.left, f.right, modulus, j)
            for j in range(f.residue % f.modulus, modulus, f.modulus)
        )
    if isinstance(f, And):
        return conj(normalize_modulus(p, modulus) for p in f.parts)
    if isinstance(f, Or):
        return disj(normalize_modulus(p, modulus) for p in f.parts)
    if isinstance(f, Not):
        return Not(normalize_modulus(f.arg, modulus))
    return f


def parse_tpda(text: str) -> TpdaSpec:
    e = parse_sexpr(text)
    if not (isinstance(e, list) and e and e[0] == "tpda"):
        raise ParseError("expected (tpda ...)")
    sigma: list[str] = []
    gamma: list[str] = []
    locations: list[str] = []
    clocks: list[str] = []
    stack_clocks: list[str] = []
    max_const = 0
    modulus = 1
    fractional = False
    rules: list[Rule] = []
    for item in e[1:]:
        if not isinstance(item, list) or not item:
            raise ParseError(f"bad section {item!r}")
        head = item[0]
        if head == "input":
            sigma.extend(item[1:])
        elif head == "stack":
            gamma.extend(item[1:])
        elif head == "locations":
            locations.extend(item[1:])
        elif head == "clocks":
            clocks.extend(item[1:])
        elif head == "stack-clocks":
            stack_clocks.extend(item[1:])
        elif head == "max-constant":
            max_const = int(item[1])
        elif head == "modulus":
            modulus = int(item[1])
        elif head == "fractional":
            fractional = True
        elif head == "rule":
            rules.append(_rule_from_sexpr(item))
        else:
            raise ParseError(f"unknown section {head!r}")
    if X0 not in clocks:
        clocks.insert(0, X0)

    mods: set[int] = {modulus}
    consts: set[int] = {max_const}
    for c in _walk_constraints(rules):
        _formula_moduli_and_consts(c, mods, consts)
    modulus = math.lcm(*sorted(mods)) if mods else 1
    max_const = max(consts)

    def norm_rule(rule: Rule) -> Rule:
        op = rule.op
        if isinstance(op, Test):
            op = Test(normalize_modulus(op.constraint, modulus))
        elif isinstance(op, Push):
            op = Push(op.symbol, normalize_modulus(op.constraint, modulus))
        elif isinstance(op, Pop):
            op = Pop(op.symbol, normalize_modulus(op.constraint, modulus))
        return Rule(rule.source, op, rule.target)

    return TpdaSpec(
        sigma=tuple(sigma),
        gamma=tuple(gamma),
        locations=tuple(locations),
        clocks=tuple(clocks),
        stack_clocks=tuple(stack_clocks),
        max_const=max_const,
        modulus=modulus,
        rules=tuple(norm_rule(r) for r in rules),
        fractional=fractional,
    )


def load_tpda(text: str) -> TpdaSpec:
    """Parse and validate; raises TpdaError listing all violations."""
    spec = parse_tpda(text)
    violations = validate_spec(spec)
    if violations:
        raise TpdaError("; ".join(violations))
    return spec


def _name(x) -> str:
    return x if isinstance(x, str) else repr(x)


def format_tpda(spec: TpdaSpec, names: dict | None = None) -> str:
    """Canonical text rendering; structured locations/symbols via `names`."""
    from tpreach.logic.sexpr import format_formula

    names = names or {}

    def nm(x):
        return names.get(x, _name(x))

    lines = ["(tpda"]
    lines.append("  (input " + " ".join(spec.sigma) + ")")
    lines.append("  (stack " + " ".join(nm(g) for g in spec.gamma) + ")")
    lines.append("  (locations " + " ".join(nm(l) for l in spec.locations) + ")")
    lines.append("  (clocks " + " ".join(spec.clocks) + ")")
    lines.append("  (stack-clocks " + " ".join(spec.stack_clocks) + ")")
    lines.append(f"  (max-constant {spec.max_const})")
    lines.append(f"  (modulus {spec.modulus})")
    if spec.fractional:
        lines.append("  (fractional)")
    for rule in spec.rules:
        op = rule.op
        if isinstance(op, Elapse):
            op_s = "(elapse noncross)" if op.noncross else "elapse"
        elif isinstance(op, Input):
            op_s = "eps" if op.letter is None else f"(input {op.letter})"
        elif isinstance(op, Test):
            op_s = f"(test {format_formula(op.constraint)})"
        elif isinstance(op, Reset):
            op_s = "(reset " + " ".join(sorted(op.clocks)) + ")"
        elif isinstance(op, Push):
            op_s = f"(push {nm(op.symbol)} {format_formula(op.constraint)})"
        elif isinstance(op, Pop):
            op_s = f"(pop {nm(op.symbol)} {format_formula(op.constraint)})"
        else:
            raise TpdaError(f"unknown op {op!r}")
        lines.append(f"  (rule {nm(rule.source)} {op_s} {nm(rule.target)})")
    lines.append(")")
    return "\n".join(lines) + "\n"
