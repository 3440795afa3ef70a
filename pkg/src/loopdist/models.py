"""Small reference semigroups used by the CLI, tests and benchmarks."""
from __future__ import annotations

from fractions import Fraction

from .semigroup import FiniteSemigroup, adjoin_zero, close_generators, from_table

# Klein four-group Z2 x Z2 written multiplicatively on {(±1, ±1)}
KLEIN_ELEMENTS = ((1, 1), (1, -1), (-1, 1), (-1, -1))


def _klein_table(with_zero: bool):
    idx = {e: i for i, e in enumerate(KLEIN_ELEMENTS)}
    n = len(KLEIN_ELEMENTS) + (1 if with_zero else 0)
    table = [[0] * n for _ in range(n)]
    for x in KLEIN_ELEMENTS:
        for y in KLEIN_ELEMENTS:
            table[idx[x]][idx[y]] = idx[(x[0] * y[0], x[1] * y[1])]
    if with_zero:
        z = n - 1
        for i in range(n):
            table[i][z] = table[z][i] = z
    return table


def klein_group() -> FiniteSemigroup:
    """Z2 x Z2 generated by a = (1,-1), b = (-1,1)."""
    return from_table(_klein_table(False), [("a", 1), ("b", 2)])


def klein_with_zero() -> FiniteSemigroup:
    """Z2 x Z2 ∪ {□} generated by a, b and the zero □."""
    return from_table(_klein_table(True), [("a", 1), ("b", 2), ("□", 4)])


def klein_with_adjoined_zero() -> FiniteSemigroup:
    return adjoin_zero(klein_group())


def constant_maps() -> FiniteSemigroup:
    """The two constant maps on {0, 1}: a left-zero semigroup."""
    return close_generators([("a", (0, 0)), ("b", (1, 1))])


def uniform_probs(S: FiniteSemigroup) -> dict:
    n = len(S.generators)
    return {lab: Fraction(1, n) for lab in S.letters}


def tsetlin_library(n: int = 3) -> FiniteSemigroup:
    """Move-to-front maps on orderings of n items (a classic left-zero-free example).

    Generators act on the set of permutations of range(n); ``g_i`` moves item
    ``i`` to the front.
    """
    from itertools import permutations

    perms = list(permutations(range(n)))
    index = {p: k for k, p in enumerate(perms)}
    gens = []
    for i in range(n):
        m = []
        for p in perms:
            q = (i,) + tuple(x for x in p if x != i)
            m.append(index[q])
        gens.append((f"m{i}", tuple(m)))
    return close_generators(gens)
