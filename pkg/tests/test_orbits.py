"""Orbit algebra: K relation, classification, characteristic constraints, joins."""

import itertools
from fractions import Fraction

import pytest

from tpreach.logic import eval_qf
from tpreach.orbits import (
    CyclicOrbit,
    KEq,
    OrbitError,
    ZeroOrderOrbit,
    characteristic_formula_zero,
    characteristic_k_constraint,
    cyc_sub,
    diagonal_orbits,
    enumerate_cyclic_orbits,
    enumerate_zero_orbits,
    eval_k,
    exact_formula_zero,
    join_orbits,
    k_relation,
    k_relation_le,
    orbit_of_cyclic,
    orbit_of_zero,
    orbit_satisfies,
    project_cyclic,
    representative_cyclic,
    representative_zero,
    zero_orbit_successors,
)
from tpreach.logic import Var, RAT

F = Fraction


def frac_tuples(n, denom=8):
    vals = [F(k, denom) for k in range(denom)]
    return itertools.product(vals, repeat=n)


def test_k_paper_sentences():
    assert k_relation(F(2, 10), F(3, 10), F(7, 10))
    assert k_relation(F(7, 10), F(2, 10), F(3, 10))
    assert not k_relation(F(3, 10), F(2, 10), F(7, 10))


def test_k_le():
    assert k_relation_le(F(1, 2), F(1, 2), F(3, 4))
    assert not k_relation_le(F(1, 2), F(1, 4), F(1, 2))


def test_k_range_check():
    with pytest.raises(OrbitError):
        k_relation(F(3, 2), F(0), F(1, 2))


def test_k_axioms_sampled():
    pts = [F(k, 8) for k in range(8)]
    for a, b, c in itertools.product(pts, repeat=3):
        if k_relation(a, b, c):
            assert k_relation(b, c, a)  # cyclicity
            assert not k_relation(a, c, b)  # asymmetry
        if len({a, b, c}) == 3:
            assert k_relation(a, b, c) or k_relation(a, c, b)  # totality


def test_orbit_of_cyclic_paper_examples():
    o1 = orbit_of_cyclic((F(2, 10), F(3, 10), F(7, 10)))
    o2 = orbit_of_cyclic((F(7, 10), F(2, 10), F(3, 10)))
    o3 = orbit_of_cyclic((F(8, 10), F(2, 10), F(3, 10)))
    o4 = orbit_of_cyclic((F(2, 10), F(3, 10), F(3, 10)))
    assert o1 == o2 == o3
    assert o4 != o1


def test_singleton_orbit_unique():
    orbits = {orbit_of_cyclic((v,)) for v in [F(0), F(1, 4), F(7, 8)]}
    assert len(orbits) == 1


def test_enumerate_cyclic_counts():
    assert len(enumerate_cyclic_orbits(1)) == 1
    assert len(enumerate_cyclic_orbits(2)) == 2
    assert len(enumerate_cyclic_orbits(3)) == 6


def test_enumerate_cyclic_matches_brute_force():
    for n in (1, 2, 3):
        seen = {orbit_of_cyclic(t) for t in frac_tuples(n)}
        assert seen == set(enumerate_cyclic_orbits(n))


def test_representative_round_trip():
    for n in (1, 2, 3, 4):
        for o in enumerate_cyclic_orbits(n):
            assert orbit_of_cyclic(representative_cyclic(o)) == o


def test_characteristic_k_constraint_classifies():
    for n in (1, 2, 3):
        for o in enumerate_cyclic_orbits(n):
            phi = characteristic_k_constraint(o)
            for t in frac_tuples(n):
                assert eval_k(phi, t) == (orbit_of_cyclic(t) == o), (o, t)


def test_characteristic_k_constraint_examples():
    o_eq = orbit_of_cyclic((F(1, 4), F(1, 4)))
    assert characteristic_k_constraint(o_eq) == KEq(0, 1)
    o_3 = orbit_of_cyclic((F(2, 10), F(3, 10), F(7, 10)))
    phi = characteristic_k_constraint(o_3)
    assert eval_k(phi, (F(2, 10), F(3, 10), F(7, 10)))
    assert not eval_k(phi, (F(3, 10), F(2, 10), F(7, 10)))


def test_project_cyclic():
    o = orbit_of_cyclic((F(1, 4), F(1, 2), F(1, 4), F(3, 4)))
    assert project_cyclic(o, (0, 2)) == orbit_of_cyclic((F(1, 4), F(1, 4)))
    assert project_cyclic(o, (1, 3)) == orbit_of_cyclic((F(1, 2), F(3, 4)))


def test_diagonal_orbits():
    diags = diagonal_orbits(2)
    assert len(diags) == 2
    for o in diags:
        rep = representative_cyclic(o)
        assert rep[:2] == rep[2:]


def test_orbit_satisfies_invariance():
    o = orbit_of_cyclic((F(1, 8), F(5, 8)))
    phi = characteristic_k_constraint(o)
    assert orbit_satisfies(o, phi)


def test_join_orbits_matches_brute_force():
    denom = 6
    vals = [F(k, denom) for k in range(denom)]
    for na, nb, nc in [(1, 1, 1), (2, 1, 1), (1, 1, 2), (1, 2, 1)]:
        brute: dict = {}
        for t in itertools.product(vals, repeat=na + nb + nc):
            a, b, c = t[:na], t[na:na + nb], t[na + nb:]
            o12 = orbit_of_cyclic(a + b)
            o23 = orbit_of_cyclic(b + c)
            brute.setdefault((o12, o23), set()).add(orbit_of_cyclic(a + c))
        shared1 = tuple(range(na, na + nb))
        shared2 = tuple(range(nb))
        for (o12, o23), expect in brute.items():
            got = join_orbits(o12, shared1, o23, shared2)
            assert got == expect, (o12, o23)
        # incompatible pairs yield the empty set
        for o12 in enumerate_cyclic_orbits(na + nb):
            for o23 in enumerate_cyclic_orbits(nb + nc):
                if (o12, o23) not in brute:
                    assert join_orbits(o12, shared1, o23, shared2) == frozenset()


def test_zero_orbit_counts():
    assert len(enumerate_zero_orbits(1)) == 2
    assert len(enumerate_zero_orbits(2)) == 6


def test_zero_orbit_brute_force():
    for n in (1, 2):
        seen = {orbit_of_zero(t) for t in frac_tuples(n)}
        assert seen == set(enumerate_zero_orbits(n))


def test_zero_characteristic_formula_shape():
    o = orbit_of_zero((F(0), F(1, 2)))
    x1, x2 = Var("x1", RAT), Var("x2", RAT)
    f = characteristic_formula_zero(o, [x1, x2])
    assert eval_qf(f, {"x1": F(0), "x2": F(1, 2)})
    assert eval_qf(f, {"x1": F(0), "x2": F(3, 4)})
    assert not eval_qf(f, {"x1": F(1, 4), "x2": F(1, 2)})


def test_exact_zero_formula_classifies():
    names = ["x1", "x2"]
    variables = [Var(n, RAT) for n in names]
    for o in enumerate_zero_orbits(2):
        f = exact_formula_zero(o, variables)
        for t in frac_tuples(2):
            v = dict(zip(names, t))
            assert eval_qf(f, v) == (orbit_of_zero(t) == o), (o, t)


def test_zero_orbit_successors_match_brute():
    denom = 8
    for n in (1, 2):
        derived: dict = {}
        for o in enumerate_zero_orbits(n):
            derived[o] = {(succ, frozenset(block)) for succ, block in zero_orbit_successors(o)}
        seen: dict = {o: set() for o in enumerate_zero_orbits(n)}
        for t in frac_tuples(n, denom):
            o = orbit_of_zero(t)
            room = min(1 - v for v in t)
            for k in range(int(room * denom) + 1):
                d = F(k, denom)
                shifted = tuple(v + d - (1 if v + d == 1 else 0) for v in t)
                wrapped = frozenset(i for i, v in enumerate(t) if v + d == 1)
                seen[o].add((orbit_of_zero(shifted), wrapped))
        for o in enumerate_zero_orbits(n):
            assert seen[o] <= derived[o], o
            # every derived successor is realized by some grid point
            missing = derived[o] - seen[o]
            assert not missing, (o, missing)


def test_cyc_sub():
    assert cyc_sub(F(1, 4), F(3, 4)) == F(1, 2)
    assert cyc_sub(F(3, 4), F(1, 4)) == F(1, 2)
    assert cyc_sub(F(1, 2), F(1, 2)) == F(0)
