"""Shared test helpers: grids, brute-force existence checks, fast evaluation."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from tpreach.logic import (
    INT,
    RAT,
    Cmp,
    ModEq,
    Var,
    conj,
    eval_qf,
    int_const,
    offset,
    rat_const,
)


def int_grid(names, lo=0, hi=32):
    """All valuations of the given integer variables over lo..hi."""
    names = list(names)
    for combo in itertools.product(range(lo, hi + 1), repeat=len(names)):
        yield dict(zip(names, combo))


def rat_grid(names, denom=8):
    """All valuations of the given unit-interval variables with denominator denom."""
    names = list(names)
    vals = [Fraction(k, denom) for k in range(denom)]
    for combo in itertools.product(vals, repeat=len(names)):
        yield dict(zip(names, combo))


def brute_exists_int(literals, y, valuation, y_max):
    """Search y in 0..y_max satisfying all literals under the valuation."""
    f = conj(literals)
    for cand in range(y_max + 1):
        v = dict(valuation)
        v[y.name] = cand
        if eval_qf(f, v):
            return True
    return False


def brute_exists_rat(literals, y, valuation, denom=8):
    # Witness search at denominator 2*denom: order constraints over the dense
    # interval with denominator-denom parameters have midpoint witnesses.
    f = conj(literals)
    for k in range(2 * denom):
        v = dict(valuation)
        v[y.name] = Fraction(k, 2 * denom)
        if eval_qf(f, v):
            return True
    return False


def random_int_conj(rng: random.Random, y: Var, xs, max_const=8, max_mod=4, n_lits=None):
    """Random conjunction of integer clock-fragment literals mentioning y."""
    lits = []
    n = n_lits if n_lits is not None else rng.randint(1, 4)
    for _ in range(n):
        kind = rng.random()
        x = rng.choice(list(xs) + [None])
        k = rng.randint(-max_const, max_const)
        xt = int_const(0) if x is None else Var(x.name, INT)
        if kind < 0.6:
            op = rng.choice(["<", "<=", "=", ">=", ">"])
            if x is None:
                lits.append(Cmp(y, op, int_const(max(k, 0))))
            elif rng.random() < 0.5:
                lits.append(Cmp(y, op, offset(xt, k)))
            else:
                lits.append(Cmp(offset(xt, k), op, y))
        else:
            m = rng.randint(1, max_mod)
            lits.append(ModEq(y, None if x is None else xt, m, rng.randint(0, m - 1)))
    return lits


def random_rat_conj(rng: random.Random, y: Var, xs, n_lits=None):
    """Random conjunction of unit-interval order literals mentioning y."""
    lits = []
    n = n_lits if n_lits is not None else rng.randint(1, 4)
    for _ in range(n):
        x = rng.choice(list(xs) + [None])
        side = rat_const(0) if x is None else Var(x.name, RAT)
        op = rng.choice(["<", "<=", "=", ">=", ">"])
        if rng.random() < 0.5:
            lits.append(Cmp(y, op, side))
        else:
            lits.append(Cmp(side, op, y))
    return lits
