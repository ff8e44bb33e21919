"""Diagonal removal and fractional lowering against the grid oracle."""

import itertools
from fractions import Fraction

import pytest

from specs import PALINDROME, TA_DIAG, TA_MOD
from tpreach.logic import INT, free_vars
from tpreach.passes import pass_a, pass_b, pass_c, pass_c0
from tpreach.passes.fractional import TICK_PREFIX, tick_letter
from tpreach.tpda import Bounds, Elapse, Pop, Push, Test, grid_explore, replay, validate_spec

F = Fraction

BOUNDS = Bounds(denom=2, max_steps=8, max_stack=2, max_time=F(3))


def _parts(v):
    return int(v), v - int(v)


def c_triples_reconstructed(res_c, base_init, mu, bounds, base_finals):
    """Fractional-stage triples mapped back to dense-time triples."""
    spec = res_c.spec
    clocks = spec.clocks
    lam0 = res_c.lambda_of(int(v) for v in mu)
    fracs0 = tuple(v - int(v) for v in mu)
    ticks = [tick_letter(x) for x in clocks]
    tick_pos = {t: spec.sigma.index(t) for t in ticks}
    base_sigma_pos = {a: spec.sigma.index(a) for a in res_c.base_spec.sigma}
    out = set()
    for size in range(len(clocks) + 1):
        for y in itertools.combinations(clocks, size):
            y = frozenset(y)
            start = res_c.location(base_init, lam0, y)
            got = grid_explore(spec, start, fracs0, bounds)
            for loc, pi, vals in got.triples:
                if not (isinstance(loc, tuple) and len(loc) == 3):
                    continue
                base, lamf, y1 = loc
                if base not in base_finals or y1 != frozenset(clocks):
                    continue
                ints = []
                ok = True
                for i, x in enumerate(clocks):
                    g = pi[tick_pos[ticks[i]]]
                    iv = g + (int(mu[i]) if x in y else 0)
                    ints.append(iv)
                nu = tuple(F(iv) + fv for iv, fv in zip(ints, vals))
                base_pi = tuple(pi[base_sigma_pos[a]] for a in res_c.base_spec.sigma)
                out.add((base, base_pi, nu))
    return out


@pytest.mark.parametrize("mu_int", [0, 1])
def test_pass_c_stack_free_mod(mu_int):
    res0 = pass_c0(TA_MOD)
    res_c = pass_c(res0.spec)
    assert validate_spec(res_c.spec) == []
    mu = tuple(F(mu_int) for _ in TA_MOD.clocks)
    start0 = res0.location("l", mu)
    before = {
        (loc[0], pi, vals)
        for loc, pi, vals in grid_explore(res0.spec, start0, mu, BOUNDS).triples
        if isinstance(loc, tuple) and loc[0] in ("l", "r")
    }
    after = c_triples_reconstructed(res_c, start0, mu, BOUNDS, {"l", "r"})
    after = {(base[0], pi, nu) for base, pi, nu in after}
    assert before == after, (sorted(before - after)[:5], sorted(after - before)[:5])


def test_pass_c_stack_free_diag():
    res0 = pass_c0(TA_DIAG)
    res_c = pass_c(res0.spec)
    mu = (F(0), F(3, 2), F(1, 2))  # x0, x, y
    start0 = res0.location("l", mu)
    before = {
        (loc[0], pi, vals)
        for loc, pi, vals in grid_explore(res0.spec, start0, mu, BOUNDS).triples
        if isinstance(loc, tuple) and loc[0] in ("l", "r")
    }
    after = c_triples_reconstructed(res_c, start0, mu, BOUNDS, {"l", "r"})
    after = {(base[0], pi, nu) for base, pi, nu in after}
    assert before == after, (sorted(before - after)[:5], sorted(after - before)[:5])


def test_pass_c_palindrome_pipeline():
    res_a = pass_a(PALINDROME)
    res_b = pass_b(res_a.spec)
    res0 = pass_c0(res_b.spec)
    spec0 = res0.spec
    clocks = spec0.clocks
    mu = tuple(F(0) for _ in clocks)
    bounds = Bounds(denom=2, max_steps=8, max_stack=1, max_time=F(2))
    start_bases = [
        res0.location(loc, mu)
        for loc in res_b.initial_locations("l")
    ]
    final_bases = set()
    for r in ("l", "r"):
        for loc in res_b.final_locations(r):
            final_bases.add(res0.location(loc, mu))  # bits empty for palindrome
    before = set()
    for sb in start_bases:
        for loc, pi, vals in grid_explore(spec0, sb, mu, bounds).triples:
            if loc in final_bases:
                before.add((loc, pi, vals))
    res_c = pass_c(
        spec0,
        seeds=[
            (sb, tuple(("e", 0) for _ in clocks), y1)
            for sb in start_bases
            for y1 in _powerset(clocks)
        ],
    )
    after = set()
    for sb in start_bases:
        got = c_triples_reconstructed(res_c, sb, mu, bounds, final_bases)
        after |= got
    assert before == after, (sorted(before - after)[:4], sorted(after - before)[:4])


def _powerset(items):
    items = list(items)
    for size in range(len(items) + 1):
        for combo in itertools.combinations(items, size):
            yield frozenset(combo)


def test_pass_c_output_has_no_integer_atoms():
    res0 = pass_c0(TA_MOD)
    res_c = pass_c(res0.spec)
    for rule in res_c.spec.rules:
        op = rule.op
        if isinstance(op, (Test, Push, Pop)):
            assert all(v.sort != INT for v in free_vars(op.constraint)), rule


def test_tick_soundness_instrumented_replay():
    res0 = pass_c0(TA_MOD)
    clocks = res0.spec.clocks
    lam0 = tuple(("e", 0) for _ in clocks)
    res_c = pass_c(res0.spec, seeds=[(("l", ()), lam0, frozenset(clocks))])
    spec = res_c.spec
    start = (("l", ()), lam0, frozenset(clocks))
    zero = tuple(F(0) for _ in clocks)
    got = grid_explore(spec, start, zero, Bounds(2, 6, 1, F(3)))
    checked = 0
    for (loc, pi, vals), run in got.runs.items():
        trace = replay(spec, start, zero, run)
        crossings = {x: 0 for x in clocks}
        for cfg, (rule, witness) in zip(trace, run):
            if isinstance(rule.op, Elapse) and witness:
                for x, v in zip(clocks, cfg.values):
                    if v + witness >= 1:
                        crossings[x] += 1
        for i, x in enumerate(clocks):
            t = tick_letter(x)
            assert pi[spec.sigma.index(t)] == crossings[x], (loc, pi, run)
        checked += 1
    assert checked > 3
