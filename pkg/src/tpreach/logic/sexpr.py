"""S-expression surface syntax for formulas and terms.

Grammar: ``(and f ...)``, ``(or f ...)``, ``(not f)``, ``(exists (v int|rat) f)``,
``true``, ``false``, atoms ``(<= t t)`` ``(< t t)`` ``(= t t)`` ``(>= t t)``
``(> t t)`` ``(mod= t t m k)``; terms ``(+ t t)``, ``(- t)``, ``(- t t)``,
``(int x)``, ``(frac x)``, ``(var name int|rat)``, integer literals and
rational literals written ``p/q``.
"""

from __future__ import annotations

from fractions import Fraction

from tpreach.logic.ast import (
    FALSE,
    INT,
    RAT,
    TRUE,
    Add,
    And,
    BoolConst,
    Cmp,
    Const,
    Exists,
    Formula,
    LogicError,
    ModEq,
    Neg,
    Not,
    Or,
    Term,
    Var,
    conj,
    disj,
)


class ParseError(LogicError):
    pass


def tokenize(text: str) -> list[str]:
    out: list[str] = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c in "()":
            out.append(c)
            i += 1
        elif c.isspace():
            i += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "();":
                j += 1
            out.append(text[i:j])
            i = j
    return out


def parse_sexpr(text: str):
    """Parse one s-expression into nested lists of strings."""
    tokens = tokenize(text)
    pos = 0

    def parse():
        nonlocal pos
        if pos >= len(tokens):
            raise ParseError("unexpected end of input")
        tok = tokens[pos]
        pos += 1
        if tok == "(":
            items = []
            while pos < len(tokens) and tokens[pos] != ")":
                items.append(parse())
            if pos >= len(tokens):
                raise ParseError("missing closing parenthesis")
            pos += 1
            return items
        if tok == ")":
            raise ParseError("unexpected ')'")
        return tok

    expr = parse()
    if pos != len(tokens):
        raise ParseError(f"trailing input: {tokens[pos:]!r}")
    return expr


def parse_all_sexprs(text: str) -> list:
    """Parse a sequence of s-expressions."""
    tokens = tokenize(text)
    pos = 0

    def parse():
        nonlocal pos
        tok = tokens[pos]
        pos += 1
        if tok == "(":
            items = []
            while pos < len(tokens) and tokens[pos] != ")":
                items.append(parse())
            if pos >= len(tokens):
                raise ParseError("missing closing parenthesis")
            pos += 1
            return items
        if tok == ")":
            raise ParseError("unexpected ')'")
        return tok

    out = []
    while pos < len(tokens):
        out.append(parse())
    return out


def _is_number(tok: str) -> bool:
    body = tok[1:] if tok[:1] == "-" else tok
    return body.replace("/", "", 1).isdigit() and body != ""


def term_from_sexpr(e, env: dict[str, str] | None = None) -> Term:
    env = env or {}
    if isinstance(e, str):
        if _is_number(e):
            q = Fraction(e)
            return Const(q, INT if q.denominator == 1 else RAT)
        if e in env:
            return Var(e, env[e])
        raise ParseError(f"unbound variable {e!r}; use (int x), (frac x) or (var x sort)")
    if not e:
        raise ParseError("empty term")
    head = e[0]
    if head == "int" and len(e) == 2:
        return Var(f"{e[1]}.int", INT)
    if head == "frac" and len(e) == 2:
        return Var(f"{e[1]}.frac", RAT)
    if head == "var" and len(e) == 3:
        if e[2] not in (INT, RAT):
            raise ParseError(f"unknown sort {e[2]!r}")
        return Var(e[1], e[2])
    if head == "+" and len(e) >= 3:
        t = term_from_sexpr(e[1], env)
        for sub in e[2:]:
            t = Add(t, term_from_sexpr(sub, env))
        return t
    if head == "-" and len(e) == 2:
        return Neg(term_from_sexpr(e[1], env))
    if head == "-" and len(e) == 3:
        return Add(term_from_sexpr(e[1], env), Neg(term_from_sexpr(e[2], env)))
    raise ParseError(f"bad term {e!r}")


_OPS = {"<", "<=", "=", ">=", ">"}


def _term_sort_or_none(t: Term):
    if isinstance(t, Var):
        return t.sort
    if isinstance(t, Const):
        return None  # constants adapt to the other side
    if isinstance(t, Add):
        return _term_sort_or_none(t.left) or _term_sort_or_none(t.right)
    if isinstance(t, Neg):
        return _term_sort_or_none(t.arg)
    return None


def _coerce_consts(t: Term, sort: str) -> Term:
    if isinstance(t, Const):
        return Const(t.value, sort)
    if isinstance(t, Add):
        return Add(_coerce_consts(t.left, sort), _coerce_consts(t.right, sort))
    if isinstance(t, Neg):
        return Neg(_coerce_consts(t.arg, sort))
    return t


def _unify_sides(left: Term, right: Term) -> tuple[Term, Term]:
    sort = _term_sort_or_none(left) or _term_sort_or_none(right)
    if sort is None:
        return left, right
    return _coerce_consts(left, sort), _coerce_consts(right, sort)


def formula_from_sexpr(e, env: dict[str, str] | None = None) -> Formula:
    env = env or {}
    if isinstance(e, str):
        if e == "true":
            return TRUE
        if e == "false":
            return FALSE
        raise ParseError(f"bad formula {e!r}")
    if not e:
        raise ParseError("empty formula")
    head = e[0]
    if head == "and":
        return conj(formula_from_sexpr(p, env) for p in e[1:])
    if head == "or":
        return disj(formula_from_sexpr(p, env) for p in e[1:])
    if head == "not" and len(e) == 2:
        return Not(formula_from_sexpr(e[1], env))
    if head == "exists" and len(e) == 3:
        decl = e[1]
        if not (isinstance(decl, list) and len(decl) == 2 and decl[1] in (INT, RAT)):
            raise ParseError(f"bad binder {decl!r}")
        name, sort = decl
        inner = dict(env)
        inner[name] = sort
        return Exists(Var(name, sort), formula_from_sexpr(e[2], inner))
    if head in _OPS and len(e) == 3:
        left, right = _unify_sides(term_from_sexpr(e[1], env), term_from_sexpr(e[2], env))
        return Cmp(left, head, right)
    if head == "mod=" and len(e) == 5:
        left = term_from_sexpr(e[1], env)
        right = term_from_sexpr(e[2], env)
        if isinstance(right, Const) and right.value == 0:
            right = None
        return ModEq(left, right, int(e[3]), int(e[4]))
    raise ParseError(f"bad formula {e!r}")


def parse_formula(text: str) -> Formula:
    return formula_from_sexpr(parse_sexpr(text))


def term_to_sexpr(t: Term) -> str:
    if isinstance(t, Var):
        if t.name.endswith(".int") and t.sort == INT:
            return f"(int {t.name[:-4]})"
        if t.name.endswith(".frac") and t.sort == RAT:
            return f"(frac {t.name[:-5]})"
        return f"(var {t.name} {t.sort})"
    if isinstance(t, Const):
        return str(t.value)
    if isinstance(t, Add):
        return f"(+ {term_to_sexpr(t.left)} {term_to_sexpr(t.right)})"
    if isinstance(t, Neg):
        return f"(- {term_to_sexpr(t.arg)})"
    raise LogicError(f"not a term: {t!r}")


def format_formula(f: Formula) -> str:
    if isinstance(f, BoolConst):
        return "true" if f.value else "false"
    if isinstance(f, Cmp):
        return f"({f.op} {term_to_sexpr(f.left)} {term_to_sexpr(f.right)})"
    if isinstance(f, ModEq):
        rhs = "0" if f.right is None else term_to_sexpr(f.right)
        return f"(mod= {term_to_sexpr(f.left)} {rhs} {f.modulus} {f.residue})"
    if isinstance(f, And):
        return "(and " + " ".join(format_formula(p) for p in f.parts) + ")"
    if isinstance(f, Or):
        return "(or " + " ".join(format_formula(p) for p in f.parts) + ")"
    if isinstance(f, Not):
        return f"(not {format_formula(f.arg)})"
    if isinstance(f, Exists):
        return f"(exists ({f.var.name} {f.var.sort}) {format_formula(f.body)})"
    raise LogicError(f"not a formula: {f!r}")
