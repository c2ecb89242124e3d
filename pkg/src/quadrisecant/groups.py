"""Small permutation groups and homomorphism search for knot groups.

Elements are permutation tuples; ``mul(p, q)`` applies ``q`` first.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations
from typing import Iterator, Sequence

Perm = tuple


def mul(p: Perm, q: Perm) -> Perm:
    return tuple(p[i] for i in q)


def inv(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, x in enumerate(p):
        out[x] = i
    return tuple(out)


def power(p: Perm, k: int) -> Perm:
    if k < 0:
        p, k = inv(p), -k
    r = tuple(range(len(p)))
    for _ in range(k):
        r = mul(r, p)
    return r


def is_identity(p: Perm) -> bool:
    return all(i == x for i, x in enumerate(p))


def _parity(p: Perm) -> int:
    seen, par = set(), 0
    for i in range(len(p)):
        if i in seen:
            continue
        j, L = i, 0
        while j not in seen:
            seen.add(j)
            j = p[j]
            L += 1
        par ^= (L - 1) & 1
    return par


def _closure(gens: Sequence[Perm]) -> list:
    n = len(gens[0])
    e = tuple(range(n))
    elems, frontier = {e}, [e]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = mul(g, x)
                if y not in elems:
                    elems.add(y)
                    nxt.append(y)
        frontier = nxt
    return sorted(elems)


@dataclass(frozen=True)
class FiniteGroup:
    name: str
    elements: tuple

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def degree(self) -> int:
        return len(self.elements[0])

    def conjugacy_classes(self) -> list:
        return _classes(self)


@lru_cache(maxsize=None)
def _classes(G: FiniteGroup) -> list:
    left = set(G.elements)
    out = []
    for x in G.elements:
        if x not in left:
            continue
        cls = sorted({mul(mul(g, x), inv(g)) for g in G.elements})
        left -= set(cls)
        out.append(tuple(cls))
    return out


@lru_cache(maxsize=None)
def symmetric(n: int) -> FiniteGroup:
    return FiniteGroup(f"S{n}", tuple(sorted(permutations(range(n)))))


@lru_cache(maxsize=None)
def alternating(n: int) -> FiniteGroup:
    return FiniteGroup(f"A{n}", tuple(p for p in symmetric(n).elements if _parity(p) == 0))


@lru_cache(maxsize=None)
def dihedral(n: int) -> FiniteGroup:
    """Symmetry group of the regular n-gon (order 2n)."""
    r = tuple((i + 1) % n for i in range(n))
    s = tuple((-i) % n for i in range(n))
    return FiniteGroup(f"D{n}", tuple(_closure([r, s])))


def default_groups() -> list:
    """Search order: S3, D4, D5, S4, A5, S5, then the remaining dihedral
    groups of order at most 20."""
    return [symmetric(3), dihedral(4), dihedral(5), symmetric(4), alternating(5),
            symmetric(5), dihedral(6), dihedral(7), dihedral(8), dihedral(9), dihedral(10)]


def evaluate(word, images: Sequence[Perm]) -> Perm:
    """Image of ``word = [(generator, exponent), ...]``."""
    r = tuple(range(len(images[0])))
    for g, e in word:
        r = mul(r, power(images[g], e))
    return r


def homomorphisms(n_gens: int, relations, G: FiniteGroup,
                  deadline: float | None = None) -> Iterator[list]:
    """Enumerate Wirtinger-type homomorphisms into ``G`` up to conjugacy.

    ``relations`` are tuples ``(o, i, j, c)`` meaning
    ``x_j = x_o^{-c} x_i x_o^{c}``.  All generators are conjugate in a knot
    group, so their images are drawn from a single conjugacy class; the
    first generator is fixed to a class representative.
    """
    if n_gens == 0:
        return
    rels = list(relations)
    by_gen = [[] for _ in range(n_gens)]
    for r in rels:
        for g in set(r[:3]):
            by_gen[g].append(r)
    for cls in G.conjugacy_classes():
        if is_identity(cls[0]):
            continue
        assign: list = [None] * n_gens
        assign[0] = cls[0]
        yield from _search(assign, rels, by_gen, cls, deadline)


def _propagate(assign, rels, by_gen, start):
    """Fill forced images; returns list of newly set indices or None on
    conflict."""
    changed = []
    stack = list(start)
    while stack:
        g = stack.pop()
        for o, i, j, c in by_gen[g]:
            xo, xi, xj = assign[o], assign[i], assign[j]
            if xo is None:
                continue
            conj = power(xo, c)
            if xi is not None:
                val = mul(mul(inv(conj), xi), conj)
                if xj is None:
                    assign[j] = val
                    changed.append(j)
                    stack.append(j)
                elif xj != val:
                    return changed, False
            elif xj is not None:
                assign[i] = mul(mul(conj, xj), inv(conj))
                changed.append(i)
                stack.append(i)
    return changed, True


def _pick(assign, by_gen, free) -> int:
    """Free generator touching the most assigned ones; fixing it forces
    the most propagation."""
    def score(g):
        return sum(sum(assign[h] is not None for h in r[:3] if h != g) for r in by_gen[g])
    return max(free, key=score)


def _search(assign, rels, by_gen, cls, deadline, start=None):
    if deadline is not None and time.perf_counter() > deadline:
        return
    if start is None:
        start = [k for k, a in enumerate(assign) if a is not None]
    changed, ok = _propagate(assign, rels, by_gen, start)
    if ok:
        free = [k for k, a in enumerate(assign) if a is None]
        if not free:
            if all(assign[j] == mul(mul(inv(power(assign[o], c)), assign[i]), power(assign[o], c))
                   for o, i, j, c in rels):
                yield list(assign)
        else:
            g = _pick(assign, by_gen, free)
            for x in cls:
                assign[g] = x
                yield from _search(assign, rels, by_gen, cls, deadline, [g])
                assign[g] = None
    for k in changed:
        assign[k] = None
