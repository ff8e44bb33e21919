"""Orbit algebra for cyclic order atoms and for the ordered unit interval.

A cyclic orbit is a set partition of tuple positions together with a
cyclic arrangement of the blocks (canonical rotation: the block holding
the smallest index first).  A zero orbit is a weak order of positions
(blocks listed in ascending value order) plus a flag marking whether the
least block sits at 0.  Joins amalgamate two orbits over a shared part,
enumerating every consistent placement of the remaining points; this is
the engine behind grammar transitivity and push/pop productions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from tpreach.logic import Cmp, Formula, Var, conj, fvar, rat_const


class OrbitError(Exception):
    pass


def k_relation(a: Fraction, b: Fraction, c: Fraction) -> bool:
    """Ternary cyclic order: going clockwise from a we meet b before c."""
    for v in (a, b, c):
        if not (0 <= v < 1):
            raise OrbitError(f"value outside the unit interval: {v}")
    return (a < b < c) or (b < c < a) or (c < a < b)


def k_relation_le(a: Fraction, b: Fraction, c: Fraction) -> bool:
    return k_relation(a, b, c) or a == b or b == c


def cyc_sub(a: Fraction, b: Fraction) -> Fraction:
    """Cyclic difference {a - b} on the unit interval."""
    d = a - b
    return d - int(d) if d >= 0 else d - int(d) + (1 if d != int(d) else 0)


def cyc_add(a: Fraction, b: Fraction) -> Fraction:
    s = a + b
    return s - int(s)


# ---------------------------------------------------------------------------
# K-constraints (quantifier-free formulas over register positions)


@dataclass(frozen=True)
class KAtom:
    a: int
    b: int
    c: int


@dataclass(frozen=True)
class KEq:
    a: int
    b: int


@dataclass(frozen=True)
class KBool:
    value: bool


@dataclass(frozen=True)
class KAnd:
    parts: tuple


@dataclass(frozen=True)
class KOr:
    parts: tuple


@dataclass(frozen=True)
class KNot:
    arg: object


KConstraint = KAtom | KEq | KBool | KAnd | KOr | KNot

K_TRUE = KBool(True)


def k_and(parts) -> KConstraint:
    parts = tuple(p for p in parts if p != K_TRUE)
    if any(p == KBool(False) for p in parts):
        return KBool(False)
    if not parts:
        return K_TRUE
    return parts[0] if len(parts) == 1 else KAnd(parts)


def k_or(parts) -> KConstraint:
    parts = tuple(p for p in parts if p != KBool(False))
    if any(p == K_TRUE for p in parts):
        return K_TRUE
    if not parts:
        return KBool(False)
    return parts[0] if len(parts) == 1 else KOr(parts)


def eval_k(f: KConstraint, values) -> bool:
    if isinstance(f, KAtom):
        return k_relation(values[f.a], values[f.b], values[f.c])
    if isinstance(f, KEq):
        return values[f.a] == values[f.b]
    if isinstance(f, KBool):
        return f.value
    if isinstance(f, KAnd):
        return all(eval_k(p, values) for p in f.parts)
    if isinstance(f, KOr):
        return any(eval_k(p, values) for p in f.parts)
    if isinstance(f, KNot):
        return not eval_k(f.arg, values)
    raise OrbitError(f"not a K-constraint: {f!r}")


def shift_k(f: KConstraint, offset: int, which=None) -> KConstraint:
    """Re-index register positions (those in `which`, or all) by +offset."""

    def mv(i: int) -> int:
        return i + offset if which is None or i in which else i

    if isinstance(f, KAtom):
        return KAtom(mv(f.a), mv(f.b), mv(f.c))
    if isinstance(f, KEq):
        return KEq(mv(f.a), mv(f.b))
    if isinstance(f, KBool):
        return f
    if isinstance(f, KAnd):
        return KAnd(tuple(shift_k(p, offset, which) for p in f.parts))
    if isinstance(f, KOr):
        return KOr(tuple(shift_k(p, offset, which) for p in f.parts))
    if isinstance(f, KNot):
        return KNot(shift_k(f.arg, offset, which))
    raise OrbitError(f"not a K-constraint: {f!r}")


# ---------------------------------------------------------------------------
# Cyclic orbits


@dataclass(frozen=True)
class CyclicOrbit:
    size: int
    blocks: tuple[tuple[int, ...], ...]  # cyclic block order, canonical rotation

    def __post_init__(self):
        if self.blocks:
            lead = min(min(b) for b in self.blocks)
            if min(self.blocks[0]) != lead:
                raise OrbitError("block sequence not in canonical rotation")


def _canonical_rotation(blocks: list[tuple[int, ...]]) -> tuple[tuple[int, ...], ...]:
    if not blocks:
        return ()
    lead = min(min(b) for b in blocks)
    for i, b in enumerate(blocks):
        if min(b) == lead:
            return tuple(blocks[i:] + blocks[:i])
    raise AssertionError


def orbit_of_cyclic(values) -> CyclicOrbit:
    values = tuple(values)
    for v in values:
        if not (0 <= v < 1):
            raise OrbitError(f"value outside the unit interval: {v}")
    groups: dict = {}
    for i, v in enumerate(values):
        groups.setdefault(v, []).append(i)
    blocks = [tuple(groups[v]) for v in sorted(groups)]
    return CyclicOrbit(len(values), _canonical_rotation(blocks))


def representative_cyclic(o: CyclicOrbit) -> tuple[Fraction, ...]:
    """Fixed representative: listed blocks at i/#blocks around the circle."""
    k = len(o.blocks)
    vals: list[Fraction] = [Fraction(0)] * o.size
    for i, block in enumerate(o.blocks):
        for idx in block:
            vals[idx] = Fraction(i, k)
    return tuple(vals)


def _set_partitions(items: tuple[int, ...]):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [part[i] + (first,)] + part[i + 1:]
        yield [(first,)] + part


@lru_cache(maxsize=None)
def enumerate_cyclic_orbits(n: int) -> tuple[CyclicOrbit, ...]:
    """All cyclic orbits of n-tuples, canonical and duplicate-free."""
    out = []
    for part in _set_partitions(tuple(range(n))):
        blocks = [tuple(sorted(b)) for b in part]
        blocks.sort(key=min)
        if not blocks:
            out.append(CyclicOrbit(0, ()))
            continue
        head, tail = blocks[0], blocks[1:]
        for perm in itertools.permutations(tail):
            out.append(CyclicOrbit(n, (head,) + perm))
    return tuple(sorted(out, key=lambda o: o.blocks))


def characteristic_k_constraint(o: CyclicOrbit) -> KConstraint:
    """K-constraint satisfied exactly by the members of the orbit."""
    parts: list[KConstraint] = []
    reps = [b[0] for b in o.blocks]
    for block in o.blocks:
        for other in block[1:]:
            parts.append(KEq(block[0], other))
    for i, j in itertools.combinations(range(len(reps)), 2):
        parts.append(KNot(KEq(reps[i], reps[j])))
    for i, j, l in itertools.combinations(range(len(reps)), 3):
        parts.append(KAtom(reps[i], reps[j], reps[l]))
    return k_and(parts)


def project_cyclic(o: CyclicOrbit, keep: tuple[int, ...]) -> CyclicOrbit:
    """Orbit of the subtuple at positions `keep` (in the given order)."""
    pos = {idx: new for new, idx in enumerate(keep)}
    blocks = []
    for block in o.blocks:
        sub = tuple(sorted(pos[i] for i in block if i in pos))
        if sub:
            blocks.append(sub)
    return CyclicOrbit(len(keep), _canonical_rotation(blocks))


def diagonal_orbits(k: int) -> tuple[CyclicOrbit, ...]:
    """Orbits of pairs (u, u): positions i and k+i glued, for all k-orbits."""
    out = []
    for o in enumerate_cyclic_orbits(k):
        blocks = tuple(tuple(sorted(b + tuple(i + k for i in b))) for b in o.blocks)
        out.append(CyclicOrbit(2 * k, blocks))
    return tuple(out)


def orbit_satisfies(o: CyclicOrbit, f: KConstraint) -> bool:
    """Orbit-level satisfaction, decided on the fixed representative."""
    return eval_k(f, representative_cyclic(o))


# ---------------------------------------------------------------------------
# Joins (amalgamation over a shared sub-tuple)


def _arc_embeddings(a_blocks: list, c_blocks: list):
    """Interleave a-blocks (order-fixed) into c-blocks (order-fixed): each
    a-block either merges with one c-block or lands strictly between.
    Yields the arc contents as a list of (c_block_or_None, merged_a_or_None).
    """
    if not a_blocks:
        yield [(c, None) for c in c_blocks]
        return
    if not c_blocks:
        yield [(None, a) for a in a_blocks]
        return
    a0, arest = a_blocks[0], a_blocks[1:]
    # a0 strictly before the first c-block
    for tail in _arc_embeddings(arest, c_blocks):
        yield [(None, a0)] + tail
    # a0 merged with the first c-block
    for tail in _arc_embeddings(arest, c_blocks[1:]):
        yield [(c_blocks[0], a0)] + tail
    # a0 placed after the first c-block
    for tail in _arc_embeddings(a_blocks, c_blocks[1:]):
        yield [(c_blocks[0], None)] + tail


def join_orbits(
    o1: CyclicOrbit,
    shared1: tuple[int, ...],
    o2: CyclicOrbit,
    shared2: tuple[int, ...],
) -> frozenset[CyclicOrbit]:
    """All orbits of (free1, free2) tuples arising from gluing o1 and o2
    along their shared parts (position i of shared1 equals position i of
    shared2).  The shared part must be nonempty.
    """
    if len(shared1) != len(shared2) or not shared1:
        raise OrbitError("joins need equal nonempty shared parts")
    if project_cyclic(o1, shared1) != project_cyclic(o2, shared2):
        return frozenset()
    free1 = tuple(i for i in range(o1.size) if i not in set(shared1))
    free2 = tuple(i for i in range(o2.size) if i not in set(shared2))
    # Result indexing: free1 positions first, then free2.
    out_of_1 = {idx: pos for pos, idx in enumerate(free1)}
    out_of_2 = {idx: len(free1) + pos for pos, idx in enumerate(free2)}
    shared_pos_1 = {idx: pos for pos, idx in enumerate(shared1)}
    shared_pos_2 = {idx: pos for pos, idx in enumerate(shared2)}

    # Anchor blocks of o2 are those containing shared points; pure-free2
    # blocks fall in arcs after their preceding anchor.
    anchors2: list[tuple[tuple[int, ...], list]] = []  # (shared-pos set, free2 ids)
    arcs2: list[list[tuple[int, ...]]] = []
    pre_arc2: list[tuple[int, ...]] = []  # free2 blocks before the first anchor
    for block in o2.blocks:
        sh = tuple(sorted(shared_pos_2[i] for i in block if i in shared_pos_2))
        fr = [out_of_2[i] for i in block if i in out_of_2]
        if sh:
            anchors2.append((sh, fr))
            arcs2.append([])
        elif anchors2:
            arcs2[-1].append(tuple(fr))
        else:
            pre_arc2.append(tuple(fr))
    if anchors2:
        arcs2[-1].extend(pre_arc2)  # blocks before the first anchor wrap around
    else:
        raise OrbitError("shared part absent from second orbit")

    # Same for o1: where do its free blocks sit relative to shared anchors.
    anchors1: list[tuple[tuple[int, ...], list]] = []
    arcs1: list[list[tuple[int, ...]]] = []
    pre_arc1: list[tuple[int, ...]] = []
    for block in o1.blocks:
        sh = tuple(sorted(shared_pos_1[i] for i in block if i in shared_pos_1))
        fr = [out_of_1[i] for i in block if i in out_of_1]
        if sh:
            anchors1.append((sh, fr))
            arcs1.append([])
        elif anchors1:
            arcs1[-1].append(tuple(fr))
        else:
            pre_arc1.append(tuple(fr))
    arcs1[-1].extend(pre_arc1)

    # Align anchor order: both are rotations of the same shared-part cycle.
    key2 = [a[0] for a in anchors2]
    key1 = [a[0] for a in anchors1]
    n_anchor = len(key2)
    rot = None
    for r in range(n_anchor):
        if key1[r:] + key1[:r] == key2:
            rot = r
            break
    if rot is None:
        return frozenset()
    anchors1 = anchors1[rot:] + anchors1[:rot]
    arcs1 = arcs1[rot:] + arcs1[:rot]

    results: set[CyclicOrbit] = set()
    per_arc_choices = []
    for arc1, arc2 in zip(arcs1, arcs2):
        per_arc_choices.append(list(_arc_embeddings(arc1, arc2)))
    for combo in itertools.product(*per_arc_choices):
        blocks: list[tuple[int, ...]] = []
        for (sh, fr2), (_, fr1), arc in zip(anchors2, anchors1, combo):
            blocks.append(tuple(sorted(fr1 + fr2)))
            for c_block, a_block in arc:
                merged = tuple(sorted((c_block or ()) + (a_block or ())))
                blocks.append(merged)
        blocks = [b for b in blocks if b]
        n = len(free1) + len(free2)
        if not blocks:
            results.add(CyclicOrbit(n, ()))
            continue
        lead = min(min(b) for b in blocks)
        for i, b in enumerate(blocks):
            if min(b) == lead:
                blocks = blocks[i:] + blocks[:i]
                break
        results.add(CyclicOrbit(n, tuple(blocks)))
    return frozenset(results)


# ---------------------------------------------------------------------------
# Orbits of the ordered unit interval with least element 0


@dataclass(frozen=True)
class ZeroOrderOrbit:
    size: int
    blocks: tuple[tuple[int, ...], ...]  # ascending value order
    zero_first: bool  # least block equals 0


def orbit_of_zero(values) -> ZeroOrderOrbit:
    values = tuple(values)
    for v in values:
        if not (0 <= v < 1):
            raise OrbitError(f"value outside the unit interval: {v}")
    groups: dict = {}
    for i, v in enumerate(values):
        groups.setdefault(v, []).append(i)
    ordered = sorted(groups)
    blocks = tuple(tuple(groups[v]) for v in ordered)
    return ZeroOrderOrbit(len(values), blocks, bool(ordered) and ordered[0] == 0)


@lru_cache(maxsize=None)
def enumerate_zero_orbits(n: int) -> tuple[ZeroOrderOrbit, ...]:
    if n == 0:
        return (ZeroOrderOrbit(0, (), False),)
    out = []
    for part in _set_partitions(tuple(range(n))):
        blocks = [tuple(sorted(b)) for b in part]
        for perm in itertools.permutations(blocks):
            for flag in (True, False):
                out.append(ZeroOrderOrbit(n, tuple(perm), flag))
    return tuple(sorted(set(out), key=lambda o: (o.blocks, o.zero_first)))


def representative_zero(o: ZeroOrderOrbit) -> tuple[Fraction, ...]:
    k = len(o.blocks)
    vals: list[Fraction] = [Fraction(0)] * o.size
    for i, block in enumerate(o.blocks):
        v = Fraction(i, k) if o.zero_first else Fraction(i + 1, k + 1)
        for idx in block:
            vals[idx] = v
    return tuple(vals)


def characteristic_formula_zero(o: ZeroOrderOrbit, variables) -> Formula:
    """The orbit's characteristic formula: zero pins plus all <= pairs
    holding of a representative (order and equality type)."""
    variables = list(variables)
    if len(variables) != o.size:
        raise OrbitError("variable count does not match orbit arity")
    rep = representative_zero(o)
    parts = []
    for i in range(o.size):
        if rep[i] == 0:
            parts.append(Cmp(variables[i], "=", rat_const(0)))
    for i in range(o.size):
        for j in range(o.size):
            if i != j and rep[i] <= rep[j]:
                parts.append(Cmp(variables[i], "<=", variables[j]))
    return conj(parts)


def exact_formula_zero(o: ZeroOrderOrbit, variables) -> Formula:
    """Formula satisfied exactly by orbit members (adds the strict and
    nonzero facts that the characteristic formula leaves implicit)."""
    variables = list(variables)
    rep = representative_zero(o)
    parts = []
    for i in range(o.size):
        parts.append(Cmp(variables[i], "=" if rep[i] == 0 else ">", rat_const(0)))
    for i in range(o.size):
        for j in range(o.size):
            if i < j and rep[i] == rep[j]:
                parts.append(Cmp(variables[i], "=", variables[j]))
        for j in range(o.size):
            if i != j and rep[i] < rep[j]:
                parts.append(Cmp(variables[i], "<", variables[j]))
    return conj(parts)


def zero_orbit_successors(o: ZeroOrderOrbit):
    """Boundary-stopping elapse successors: pairs (next orbit, wrapped block).

    'stay' is the zero delay; 'drift' moves every value up without any
    reaching 1; 'wrap' is the delay landing the largest block exactly on 0.
    """
    if o.size == 0:
        return [(o, ())]
    out = [(o, ())]
    drift = ZeroOrderOrbit(o.size, o.blocks, False)
    if drift != o:
        out.append((drift, ()))
    top = o.blocks[-1]
    if len(o.blocks) == 1:
        wrapped = ZeroOrderOrbit(o.size, o.blocks, True)
    else:
        wrapped = ZeroOrderOrbit(o.size, (top,) + o.blocks[:-1], True)
    out.append((wrapped, top))
    return out
