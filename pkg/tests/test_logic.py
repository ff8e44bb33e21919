"""Formula AST: evaluation, DNF, substitution, classical desugaring."""

import random
from fractions import Fraction

import pytest

from tpreach.logic import (
    INT,
    RAT,
    Add,
    And,
    Cmp,
    Exists,
    ModEq,
    Neg,
    Not,
    Or,
    SortError,
    UnboundVariableError,
    Var,
    conj,
    desugar_classical,
    disj,
    dnf_disjuncts,
    eval_qf,
    floor_fract_diff,
    format_formula,
    free_vars,
    fvar,
    int_const,
    ivar,
    parse_formula,
    rat_const,
    substitute,
    to_dnf,
)

a = Var("a", INT)
b = Var("b", INT)


def test_eval_order_atom():
    assert eval_qf(Cmp(ivar("x"), "<=", int_const(3)), {"x.int": 2})


def test_eval_frac_reflexive():
    f = Cmp(fvar("x"), "<=", fvar("y"))
    assert eval_qf(f, {"x.frac": Fraction(1, 2), "y.frac": Fraction(1, 2)})


def test_eval_mod_diagonal():
    # (5 - 2 - 1) mod 2 == 0
    f = ModEq(ivar("x"), ivar("y"), 2, 1)
    assert eval_qf(f, {"x.int": 5, "y.int": 2})
    assert not eval_qf(f, {"x.int": 5, "y.int": 3})


def test_eval_errors():
    with pytest.raises(UnboundVariableError):
        eval_qf(Cmp(a, "<=", int_const(0)), {})
    with pytest.raises(SortError):
        eval_qf(Cmp(a, "<=", int_const(0)), {"a": Fraction(1, 2)})
    with pytest.raises(SortError):
        eval_qf(Cmp(a, "<=", rat_const(0)), {"a": 1})


def test_dnf_distribution():
    p = Cmp(a, "<=", int_const(1))
    q = Cmp(a, "=", int_const(2))
    r = Cmp(b, ">=", int_const(3))
    f = And((p, Or((q, r))))
    assert dnf_disjuncts(f) == [(p, q), (p, r)]


def test_dnf_order_negation():
    f = Not(Cmp(ivar("x"), "<=", int_const(2)))
    assert to_dnf(f) == Cmp(ivar("x"), ">", int_const(2))


def test_dnf_mod_negation_residues():
    f = Not(ModEq(ivar("x"), None, 3, 0))
    assert to_dnf(f) == Or(
        (ModEq(ivar("x"), None, 3, 1), ModEq(ivar("x"), None, 3, 2))
    )


def test_dnf_preserves_semantics_randomized():
    rng = random.Random(7)
    vars_ = [a, b]
    atoms = [
        Cmp(a, "<=", int_const(2)),
        Cmp(a, "<", b),
        Cmp(b, ">=", Add(a, int_const(1))),
        ModEq(a, b, 3, 1),
        ModEq(b, None, 2, 0),
    ]

    def rand_formula(depth):
        if depth == 0:
            return rng.choice(atoms)
        k = rng.random()
        if k < 0.4:
            return And(tuple(rand_formula(depth - 1) for _ in range(2)))
        if k < 0.8:
            return Or(tuple(rand_formula(depth - 1) for _ in range(2)))
        return Not(rand_formula(depth - 1))

    for _ in range(300):
        f = rand_formula(rng.randint(1, 3))
        g = to_dnf(f)
        for _ in range(5):
            v = {"a": rng.randint(0, 6), "b": rng.randint(0, 6)}
            assert eval_qf(f, v) == eval_qf(g, v)


def test_substitute_plain():
    z = Var("z", INT)
    f = Cmp(a, "<=", b)
    assert substitute(f, {a: z}) == Cmp(z, "<=", b)


def test_substitute_capture_avoiding():
    x = Var("x", INT)
    y = Var("y", INT)
    f = Exists(x, Cmp(x, "<=", y))
    g = substitute(f, {y: x})
    assert isinstance(g, Exists)
    assert g.var != x
    assert g.body == Cmp(g.var, "<=", x)
    assert free_vars(g) == {x}


def test_substitute_into_mod():
    f = ModEq(ivar("x"), None, 2, 0)
    g = substitute(f, {ivar("x"): Add(ivar("y"), int_const(3))})
    assert g == ModEq(Add(ivar("y"), int_const(3)), None, 2, 0)
    assert eval_qf(g, {"y.int": 1}) and not eval_qf(g, {"y.int": 2})


def test_substitute_eval_composition():
    rng = random.Random(3)
    f = And((Cmp(a, "<=", Add(b, int_const(2))), ModEq(a, b, 3, 1)))
    for _ in range(100):
        k = rng.randint(0, 9)
        g = substitute(f, {a: Add(b, int_const(k))})
        for bv in range(6):
            assert eval_qf(g, {"b": bv}) == eval_qf(f, {"a": bv + k, "b": bv})


def _classical_truth(xv, yv, rel, k):
    diff = xv - (yv if yv is not None else 0)
    return {"<": diff < k, "<=": diff <= k, ">=": diff >= k, ">": diff > k, "=": diff == k}[rel]


def _parts(v):
    return int(v), v - int(v)


def test_desugar_classical_paper_shape():
    f = desugar_classical("x", "y", "<=", 2)
    # (⌊x⌋-⌊y⌋ <= 2 ∧ {x} <= {y}) ∨ ⌊x⌋-⌊y⌋ <= 1, with x=2.5, y=1.7
    xi, xf = _parts(Fraction(5, 2))
    yi, yf = _parts(Fraction(17, 10))
    v = {"x.int": xi, "x.frac": xf, "y.int": yi, "y.frac": yf}
    assert eval_qf(f, v)
    assert isinstance(f, Or)


def test_desugar_classical_nondiag_zero():
    f = desugar_classical("x", None, "<=", 0)
    for num in range(0, 17):
        x = Fraction(num, 4)
        xi, xf = _parts(x)
        got = eval_qf(f, {"x.int": xi, "x.frac": xf})
        assert got == (x <= 0), x


def test_desugar_classical_grid_equivalence():
    # all relations, diagonal and non-diagonal, denominator 8, values <= 2k+4
    for rel in ["<", "<=", "=", ">=", ">"]:
        for k in [-2, -1, 0, 1, 2]:
            hi = 2 * abs(k) + 4
            fd = desugar_classical("x", "y", rel, k)
            fn = desugar_classical("x", None, rel, k)
            for xn in range(0, hi * 8 + 1, 3):
                x = Fraction(xn, 8)
                xi, xf = _parts(x)
                assert eval_qf(fn, {"x.int": xi, "x.frac": xf}) == _classical_truth(
                    x, None, rel, k
                ), (rel, k, x)
                for yn in range(0, hi * 8 + 1, 5):
                    y = Fraction(yn, 8)
                    yi, yf = _parts(y)
                    v = {"x.int": xi, "x.frac": xf, "y.int": yi, "y.frac": yf}
                    assert eval_qf(fd, v) == _classical_truth(x, y, rel, k), (rel, k, x, y)


def test_floor_fract_diff_examples():
    assert floor_fract_diff(2, Fraction(1, 2), 1, Fraction(7, 10)) == (0, Fraction(4, 5))
    assert floor_fract_diff(3, Fraction(1, 5), 1, Fraction(1, 5)) == (2, Fraction(0))


def test_floor_fract_diff_randomized_exact():
    rng = random.Random(11)
    for _ in range(1000):
        xd = rng.randint(1, 12)
        yd = rng.randint(1, 12)
        x = Fraction(rng.randint(0, 200), xd)
        y = Fraction(rng.randint(0, 200), yd)
        if x < y:
            x, y = y, x
        xi, xf = int(x), x - int(x)
        yi, yf = int(y), y - int(y)
        di, df = floor_fract_diff(xi, xf, yi, yf)
        assert di + df == x - y
        assert di == int(x - y) and 0 <= df < 1


def test_sexpr_round_trip():
    f = parse_formula("(and (<= (int x) 2) (not (= (frac x) 0)) (mod= (int x) (int y) 2 1))")
    g = parse_formula(format_formula(f))
    assert f == g


def test_sexpr_exists_and_rationals():
    f = parse_formula("(exists (d rat) (and (<= (frac x) d) (< d 3/4)))")
    assert isinstance(f, Exists)
    assert f.var == Var("d", RAT)
    g = parse_formula(format_formula(f))
    assert f == g
