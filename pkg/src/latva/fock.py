"""Fock monomials and graded bases for lattice vertex algebras.

A monomial is a multiset of Heisenberg creation operators a_i(-n) applied to
a lattice exponential e^beta: parts ((depth, index), ...) sorted descending,
plus the lattice point.  Elements are sparse dicts monomial -> coefficient
(Fraction, or GaussQ for the Z[1/2,i] work).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, NamedTuple

from .rootdata import RootLattice, Vec

Parts = tuple[tuple[int, int], ...]


class Mono(NamedTuple):
    parts: Parts
    point: Vec

    def depth(self) -> int:
        return sum(n for n, _ in self.parts)


def vacuum_mono(rank: int) -> Mono:
    return Mono((), (0,) * rank)


def heis_mono(pairs: Iterable[tuple[int, int]], rank: int) -> Mono:
    return Mono(tuple(sorted(pairs, reverse=True)), (0,) * rank)


def point_mono(point: Vec) -> Mono:
    return Mono((), tuple(point))


def insert_part(parts: Parts, depth: int, idx: int) -> Parts:
    return tuple(sorted(list(parts) + [(depth, idx)], reverse=True))


def remove_once(parts: Parts, entry: tuple[int, int]) -> Parts:
    out = list(parts)
    out.remove(entry)
    return tuple(out)


def mono_weight(m: Mono, lattice: RootLattice) -> int:
    nn = lattice.norm(m.point)
    assert nn % 2 == 0
    return m.depth() + nn // 2


def mono_sort_key(m: Mono):
    """Deterministic basis order: depth total, then partition, then point."""
    return (m.depth(), m.parts, m.point)


def colored_partitions(total: int, colors: int):
    """Multisets of (part, color) pairs with given total, descending order."""
    out: list[Parts] = []

    def rec(rem: int, maxpart: int, acc: list[tuple[int, int]]):
        if rem == 0:
            out.append(tuple(acc))
            return
        for part in range(min(rem, maxpart), 0, -1):
            start = acc[-1][1] if acc and acc[-1][0] == part else colors - 1
            for color in range(start, -1, -1):
                acc.append((part, color))
                rec(rem - part, part, acc)
                acc.pop()

    rec(total, total, [])
    return out


def fock_basis(lattice: RootLattice, n: int) -> list[Mono]:
    """Ordered basis of the weight-n space of the lattice vertex algebra."""
    if n < 0:
        return []
    out: list[Mono] = []
    for pt in lattice.vectors_up_to_norm(2 * n):
        half = lattice.norm(pt) // 2
        for parts in colored_partitions(n - half, lattice.rank):
            out.append(Mono(parts, pt))
    out.sort(key=mono_sort_key)
    return out


# ------------------------------------------------------------- element utils


def el_iadd(target: dict, mono: Mono, coeff) -> None:
    if not coeff:
        return
    cur = target.get(mono)
    if cur is None:
        target[mono] = coeff
    else:
        s = cur + coeff
        if s:
            target[mono] = s
        else:
            del target[mono]


def el_add(a: dict, b: dict) -> dict:
    out = dict(a)
    for m, c in b.items():
        el_iadd(out, m, c)
    return out


def el_scale(a: dict, c) -> dict:
    if not c:
        return {}
    return {m: c * v for m, v in a.items()}


def el_sub(a: dict, b: dict) -> dict:
    out = dict(a)
    for m, c in b.items():
        el_iadd(out, m, -c)
    return out


def el_eq(a: dict, b: dict) -> bool:
    return not el_sub(a, b)


def el_weights(a: dict, lattice: RootLattice) -> set[int]:
    return {mono_weight(m, lattice) for m in a}
