"""Grid-delay explicit-state oracle: a sound under-approximation of the
dense-time reachability relation, used as ground truth in pass tests.

Delays and push witnesses are drawn from a fixed-denominator grid (push
witnesses additionally echo the current global clock values).  Exploration
is breadth-first with Pareto pruning on (steps, elapsed time); steps out
of pass-synthesized locations cost no step budget, so budgets compare
1:1 across pipeline stages.  Fractional specs use wrapped time elapse
over the unit interval.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable

from tpreach.logic import eval_qf
from tpreach.tpda.spec import (
    Elapse,
    Input,
    Pop,
    Push,
    Reset,
    Rule,
    Test,
    TpdaError,
    TpdaSpec,
    clock_valuation_dict,
)


@dataclass(frozen=True)
class Configuration:
    location: Hashable
    values: tuple[Fraction, ...]  # aligned with spec.clocks
    stack: tuple[tuple[Hashable, tuple[Fraction, ...]], ...]


@dataclass(frozen=True)
class Bounds:
    denom: int = 2
    max_steps: int = 8
    max_stack: int = 4
    max_time: Fraction = Fraction(4)
    value_cap: Fraction | None = None  # push witness cap, default max_const + 1
    max_nodes: int | None = None


@dataclass
class GridResult:
    sigma: tuple[str, ...]
    triples: set = field(default_factory=set)  # (loc, pi_or_word, final_values)
    runs: dict = field(default_factory=dict)  # triple -> list[(rule, witness)]
    exhausted: dict = field(default_factory=dict)
    states_explored: int = 0

    def by_location(self, loc) -> set:
        return {(pi, vals) for (l, pi, vals) in self.triples if l == loc}


def _wrap(v: Fraction) -> Fraction:
    return v - int(v)


def step(spec: TpdaSpec, config: Configuration, rule: Rule, witness=None):
    """One small-step transition; None when the rule is not enabled."""
    if rule.source != config.location:
        return None
    op = rule.op
    vals = config.values
    if isinstance(op, Elapse):
        d = Fraction(witness)
        if d < 0:
            return None
        if spec.fractional:
            if op.noncross and any(v + d > 1 for v in vals):
                return None
            if op.strict and d > 0 and any(v + d >= 1 for v in vals):
                return None
            new_vals = tuple(_wrap(v + d) for v in vals)
            new_stack = tuple(
                (sym, tuple(_wrap(v + d) for v in zvals)) for sym, zvals in config.stack
            )
        else:
            new_vals = tuple(v + d for v in vals)
            new_stack = tuple(
                (sym, tuple(v + d for v in zvals)) for sym, zvals in config.stack
            )
        return Configuration(rule.target, new_vals, new_stack)
    if isinstance(op, Input):
        return Configuration(rule.target, vals, config.stack)
    if isinstance(op, Test):
        env = clock_valuation_dict(spec.clocks, vals)
        if eval_qf(op.constraint, env):
            return Configuration(rule.target, vals, config.stack)
        return None
    if isinstance(op, Reset):
        new_vals = tuple(
            Fraction(0) if c in op.clocks else v for c, v in zip(spec.clocks, vals)
        )
        return Configuration(rule.target, new_vals, config.stack)
    if isinstance(op, Push):
        zvals = tuple(Fraction(v) for v in witness)
        env = clock_valuation_dict(spec.clocks, vals)
        env.update(clock_valuation_dict(spec.stack_clocks, zvals))
        if eval_qf(op.constraint, env):
            return Configuration(rule.target, vals, config.stack + ((op.symbol, zvals),))
        return None
    if isinstance(op, Pop):
        if not config.stack:
            return None
        sym, zvals = config.stack[-1]
        if sym != op.symbol:
            return None
        env = clock_valuation_dict(spec.clocks, vals)
        env.update(clock_valuation_dict(spec.stack_clocks, zvals))
        if eval_qf(op.constraint, env):
            return Configuration(rule.target, vals, config.stack[:-1])
        return None
    raise TpdaError(f"unknown op {op!r}")


def _delay_witnesses(spec, bounds, vals, remaining, noncross, strict, exhausted):
    d = bounds.denom
    remaining = max(remaining, Fraction(0))
    if remaining < Fraction(1, d):
        exhausted["time"] = exhausted.get("time", 0) + 1
    if spec.fractional:
        if noncross:
            room = min((1 - v for v in vals), default=Fraction(1))
            hi = min(room, remaining)
        else:
            # wrapped elapse: delays beyond one period repeat configurations
            hi = min(Fraction(d - 1, d), remaining)
    else:
        hi = remaining
    steps = int(hi * d)  # floor for nonnegative hi
    out = [Fraction(k, d) for k in range(steps + 1)]
    if spec.fractional and noncross and not strict:
        room = min((1 - v for v in vals), default=Fraction(1))
        if room <= remaining and room not in out:
            out.append(room)  # land exactly on the wrap boundary
    if strict:
        room = min((1 - v for v in vals), default=Fraction(1))
        out = [w for w in out if w == 0 or w < room]
    return out


def _push_witnesses(spec, bounds, vals, constraint, exhausted):
    d = bounds.denom
    if spec.fractional:
        grid = [Fraction(k, d) for k in range(d)]
    else:
        cap = bounds.value_cap if bounds.value_cap is not None else Fraction(spec.max_const + 1)
        grid = [Fraction(k, d) for k in range(int(cap * d) + 1)]
    candidates = sorted(set(grid) | set(vals))
    env_globals = clock_valuation_dict(spec.clocks, vals)
    out = []
    for combo in itertools.product(candidates, repeat=len(spec.stack_clocks)):
        env = dict(env_globals)
        env.update(clock_valuation_dict(spec.stack_clocks, combo))
        if eval_qf(constraint, env):
            out.append(combo)
    return out


def grid_explore(
    spec: TpdaSpec,
    init_loc,
    init_vals,
    bounds: Bounds,
    track_words: bool = False,
) -> GridResult:
    """Bounded closure of `step` over grid witnesses from one start."""
    init_vals = tuple(Fraction(v) for v in init_vals)
    if len(init_vals) != len(spec.clocks):
        raise TpdaError("initial valuation arity mismatch")
    result = GridResult(sigma=spec.sigma)
    rules_from: dict = {}
    for rule in spec.rules:
        rules_from.setdefault(rule.source, []).append(rule)

    init_pi: tuple = () if track_words else (0,) * len(spec.sigma)
    letter_index = {a: i for i, a in enumerate(spec.sigma)}
    start = Configuration(init_loc, init_vals, ())
    # state -> list of Pareto-minimal (cost, elapsed) visits
    visited: dict = {}
    parents: dict = {}

    def dominated(state, cost, time):
        for c, t in visited.get(state, ()):
            if c <= cost and t <= time:
                return True
        return False

    def record_visit(state, cost, time):
        lst = visited.setdefault(state, [])
        lst[:] = [(c, t) for c, t in lst if not (cost <= c and time <= t)]
        lst.append((cost, time))

    def record_triple(config, pi, key):
        if config.stack:
            return
        triple = (config.location, pi, config.values)
        if triple not in result.triples:
            result.triples.add(triple)
            run = []
            k = key
            while k in parents:
                k, rule, witness = parents[k]
                run.append((rule, witness))
            run.reverse()
            result.runs[triple] = run

    queue = deque()
    start_key = (start, init_pi, 0, Fraction(0))
    record_visit((start, init_pi), 0, Fraction(0))
    queue.append(start_key)
    record_triple(start, init_pi, start_key)

    while queue:
        config, pi, cost, time = queue.popleft()
        result.states_explored += 1
        if bounds.max_nodes is not None and result.states_explored > bounds.max_nodes:
            result.exhausted["nodes"] = result.exhausted.get("nodes", 0) + 1
            break
        for rule in rules_from.get(config.location, ()):
            rule_cost = 0 if rule.source in spec.synthesized else 1
            if cost + rule_cost > bounds.max_steps:
                result.exhausted["steps"] = result.exhausted.get("steps", 0) + 1
                continue
            op = rule.op
            if isinstance(op, Elapse):
                witnesses = _delay_witnesses(
                    spec, bounds, config.values, bounds.max_time - time,
                    op.noncross, op.strict, result.exhausted,
                )
            elif isinstance(op, Push):
                if len(config.stack) >= bounds.max_stack:
                    result.exhausted["stack"] = result.exhausted.get("stack", 0) + 1
                    continue
                witnesses = _push_witnesses(
                    spec, bounds, config.values, op.constraint, result.exhausted
                )
            else:
                witnesses = [None]
            for witness in witnesses:
                nxt = step(spec, config, rule, witness)
                if nxt is None:
                    continue
                new_pi = pi
                if isinstance(op, Input) and op.letter is not None:
                    if track_words:
                        new_pi = pi + (op.letter,)
                    else:
                        idx = letter_index[op.letter]
                        new_pi = pi[:idx] + (pi[idx] + 1,) + pi[idx + 1:]
                new_time = time + (Fraction(witness) if isinstance(op, Elapse) else 0)
                new_cost = cost + rule_cost
                state = (nxt, new_pi)
                if dominated(state, new_cost, new_time):
                    continue
                record_visit(state, new_cost, new_time)
                key = (nxt, new_pi, new_cost, new_time)
                parents[key] = ((config, pi, cost, time), rule, witness)
                record_triple(nxt, new_pi, key)
                queue.append(key)
    return result


def replay(spec: TpdaSpec, init_loc, init_vals, run):
    """Re-execute a stored witness run; returns the visited configurations."""
    config = Configuration(init_loc, tuple(Fraction(v) for v in init_vals), ())
    trace = [config]
    for rule, witness in run:
        nxt = step(spec, config, rule, witness)
        if nxt is None:
            raise TpdaError(f"stored run does not replay at {rule}")
        config = nxt
        trace.append(config)
    return trace


def untimed_sample(spec: TpdaSpec, source, target, max_len: int, bounds: Bounds):
    """Words (length-filtered) of runs from (source, 0) to (target, 0)."""
    zero = tuple(Fraction(0) for _ in spec.clocks)
    res = grid_explore(spec, source, zero, bounds, track_words=True)
    out = set()
    for loc, word, vals in res.triples:
        if loc == target and vals == zero and len(word) <= max_len:
            out.add("".join(word))
    return out
