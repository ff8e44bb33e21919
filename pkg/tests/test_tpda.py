"""TPDA semantics, grid oracle, format, validation."""

from fractions import Fraction

import pytest

from specs import PALINDROME, TA_CHAIN
from tpreach.logic import Cmp, fvar, rat_const
from tpreach.tpda import (
    Bounds,
    Configuration,
    Elapse,
    Input,
    Pop,
    Push,
    Reset,
    Rule,
    Test,
    TpdaError,
    format_tpda,
    grid_explore,
    load_tpda,
    parse_tpda,
    replay,
    step,
    untimed_sample,
    validate_spec,
)

F = Fraction


def _zero(spec):
    return tuple(F(0) for _ in spec.clocks)


def test_step_elapse_adds_everywhere():
    spec = PALINDROME
    rule = Rule("l", Elapse(), "l")
    cfg = Configuration("l", (F(1, 2),), ((("a"), (F(1, 4),)),))
    out = step(spec, cfg, rule, F(1))
    assert out.values == (F(3, 2),)
    assert out.stack == (("a", (F(5, 4),)),)


def test_step_push_and_pop_palindrome():
    spec = PALINDROME
    push_rule = next(
        r for r in spec.rules if isinstance(r.op, Push) and r.op.symbol == "a"
    )
    cfg = Configuration("la", (F(0),), ())
    out = step(spec, cfg, push_rule, (F(0),))
    assert out is not None and out.stack == (("a", (F(0),)),)
    assert step(spec, cfg, push_rule, (F(1, 2),)) is None  # {z}=0 fails

    pop_rule = next(r for r in spec.rules if isinstance(r.op, Pop) and r.op.symbol == "a")
    cfg2 = Configuration("ra", (F(1),), (("a", (F(1),)),))
    out2 = step(spec, cfg2, pop_rule)
    assert out2 is not None and out2.stack == ()


def test_step_time_additivity():
    spec = PALINDROME
    rule = Rule("l", Elapse(), "l")
    cfg = Configuration("l", (F(1, 3),), (("a", (F(0),)),))
    once = step(spec, step(spec, cfg, rule, F(1, 2)), rule, F(1, 4))
    at_once = step(spec, cfg, rule, F(3, 4))
    assert once == at_once


def test_step_reset_idempotent():
    spec = load_tpda(
        "(tpda (input) (stack) (locations l) (clocks x) (stack-clocks)"
        " (max-constant 0) (modulus 1) (rule l (reset x) l))"
    )
    rule = spec.rules[0]
    cfg = Configuration("l", (F(2), F(1, 2)), ())
    once = step(spec, cfg, rule)
    twice = step(spec, once, rule)
    assert once == twice


def test_grid_explore_palindrome_finds_aa():
    res = grid_explore(PALINDROME, "l", _zero(PALINDROME), Bounds(2, 8, 2, F(2)))
    hits = [t for t in res.triples if t[0] == "r" and t[1] == (2, 0)]
    assert hits, "word aa with integral matching distance must be reachable"


def test_grid_explore_empty_run_triple():
    res = grid_explore(PALINDROME, "l", _zero(PALINDROME), Bounds(2, 2, 1, F(1)))
    assert ("l", (0, 0), _zero(PALINDROME)) in res.triples


def test_grid_explore_single_clock_ta():
    spec = load_tpda(
        "(tpda (input) (stack) (locations l r) (clocks x) (stack-clocks)"
        " (max-constant 0) (modulus 1)"
        " (rule l elapse l) (rule l (test (frac0 x)) r))"
    )
    res = grid_explore(spec, "l", (F(0), F(0)), Bounds(2, 6, 1, F(2)))
    got = {vals for loc, pi, vals in res.triples if loc == "r"}
    assert got == {(F(k), F(k)) for k in range(3)}  # x0 and x advance together


def test_grid_explore_monotone_in_bounds():
    spec = PALINDROME
    small = grid_explore(spec, "l", _zero(spec), Bounds(2, 6, 2, F(1)))
    big = grid_explore(spec, "l", _zero(spec), Bounds(2, 8, 3, F(2)))
    assert small.triples <= big.triples


def test_grid_explore_runs_replay():
    spec = PALINDROME
    res = grid_explore(spec, "l", _zero(spec), Bounds(2, 8, 2, F(2)))
    for triple, run in list(res.runs.items())[:50]:
        loc, pi, vals = triple
        trace = replay(spec, "l", _zero(spec), run)
        final = trace[-1]
        assert final.location == loc and final.values == vals and final.stack == ()


def test_untimed_sample_palindrome():
    words = untimed_sample(PALINDROME, "l", "r", 4, Bounds(1, 10, 2, F(1)))
    assert "" in words and "aa" in words and "abba" in words
    assert "ab" not in words


def test_untimed_sample_chain():
    words = untimed_sample(TA_CHAIN, "l", "r", 2, Bounds(1, 4, 1, F(0)))
    assert words == {"ab"}


def test_validate_x0_reset():
    spec = load_tpda(
        "(tpda (input) (stack) (locations l) (clocks x) (stack-clocks)"
        " (max-constant 0) (modulus 1) (rule l (reset x) l))"
    )
    bad = spec.__class__(**{**spec.__dict__, "rules": (Rule("l", Reset(frozenset({"x0"})), "l"),)})
    assert any("x0-reset" in v for v in validate_spec(bad))


def test_validate_stack_constraint_needs_stack_var():
    spec = parse_tpda(
        "(tpda (input) (stack A) (locations l) (clocks x y) (stack-clocks z)"
        " (max-constant 0) (modulus 1)"
        " (rule l (push A (frac-le x y)) l))"
    )
    assert any("stack-constraint-without-stack-var" in v for v in validate_spec(spec))


def test_validate_palindrome_clean():
    assert validate_spec(PALINDROME) == []


def test_parse_format_round_trip():
    text = format_tpda(PALINDROME)
    again = parse_tpda(text)
    assert again == PALINDROME


def test_modulus_normalized_to_lcm():
    spec = load_tpda(
        "(tpda (input) (stack) (locations l r) (clocks x) (stack-clocks)"
        " (max-constant 0) (modulus 2)"
        " (rule l (test (and (mod= x 2 1) (mod= x 3 0))) r))"
    )
    assert spec.modulus == 6
    test_rule = spec.rules[0]
    from tpreach.logic import free_vars, eval_qf

    c = test_rule.op.constraint
    for k in range(24):
        assert eval_qf(c, {"x.int": k, "x.frac": F(0)}) == (k % 2 == 1 and k % 3 == 0)


def test_load_rejects_invalid():
    with pytest.raises(TpdaError):
        load_tpda(
            "(tpda (input) (stack) (locations l) (clocks) (stack-clocks)"
            " (max-constant 0) (modulus 1) (rule l (reset x0) l))"
        )
