"""Finite semigroups given by generators.

Elements are indexed ``0..size-1`` in breadth-first discovery order from
the generators (extending words on the right, letters in generator order),
so the label of each element is its shortlex-least word.  The adjoined
identity of ``S^1`` is never a table row; graph code represents it as a
separate root vertex.

Transformations compose with the left-action convention
``(uv)(w) = u(v(w))``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .errors import ClosureCapExceeded, EmptyGenerators, UnknownLabel, ValidationError

ZERO_LABEL = "□"
DEFAULT_CLOSURE_CAP = 10_000


@dataclass(frozen=True, eq=False)
class FiniteSemigroup:
    table: np.ndarray  # table[x, y] = x*y
    generators: tuple  # ((label, element), ...) in letter order
    labels: tuple  # display name per element (shortlex word)
    zero: int | None = None
    has_adjoined_identity: bool = True
    maps: tuple | None = None  # transformation per element, when known
    _gen_index: dict = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_gen_index", {lab: i for i, (lab, _) in enumerate(self.generators)})

    @property
    def size(self) -> int:
        return int(self.table.shape[0])

    @property
    def letters(self) -> tuple:
        return tuple(lab for lab, _ in self.generators)

    def gen(self, label: str) -> int:
        """Element index of generator ``label``."""
        try:
            return self.generators[self._gen_index[label]][1]
        except KeyError:
            raise UnknownLabel(f"unknown generator label {label!r}; known: {list(self.letters)}") from None

    def letter_index(self, label: str) -> int:
        try:
            return self._gen_index[label]
        except KeyError:
            raise UnknownLabel(f"unknown generator label {label!r}; known: {list(self.letters)}") from None

    def mul(self, x: int, y: int) -> int:
        return int(self.table[x, y])

    def __repr__(self):
        return f"FiniteSemigroup(size={self.size}, generators={list(self.letters)}, zero={self.zero})"


# ---------------------------------------------------------------------------
# construction


def _compose(u: tuple, v: tuple) -> tuple:
    return tuple(u[w] for w in v)


def close_generators(gens: Sequence, cap: int = DEFAULT_CLOSURE_CAP) -> FiniteSemigroup:
    """Semigroup generated by labelled transformations ``[(label, map), ...]``."""
    gens = list(gens)
    if not gens:
        raise EmptyGenerators("at least one generator is required")
    domain = len(gens[0][1])
    for lab, m in gens:
        if len(m) != domain:
            raise ValidationError(f"generator {lab!r} acts on {len(m)} points, expected {domain}")
        if any(not (0 <= int(x) < domain) for x in m):
            raise ValidationError(f"generator {lab!r} is not a map of [0, {domain})")
    gmaps = [tuple(int(x) for x in m) for _, m in gens]
    labels_in = [lab for lab, _ in gens]
    if len(set(labels_in)) != len(labels_in):
        raise ValidationError("generator labels must be distinct")

    index: dict = {}
    elems: list = []
    words: list = []
    queue = deque()
    for lab, m in zip(labels_in, gmaps):
        if m not in index:
            index[m] = len(elems)
            elems.append(m)
            words.append(lab)
            queue.append(m)
    while queue:
        x = queue.popleft()
        wx = words[index[x]]
        for lab, g in zip(labels_in, gmaps):
            y = _compose(x, g)
            if y not in index:
                if len(elems) >= cap:
                    raise ClosureCapExceeded(f"closure exceeds {cap} elements")
                index[y] = len(elems)
                elems.append(y)
                words.append(wx + lab)
                queue.append(y)
    n = len(elems)
    table = np.empty((n, n), dtype=np.int64)
    for i, x in enumerate(elems):
        for j, y in enumerate(elems):
            table[i, j] = index[_compose(x, y)]
    generators = tuple((lab, index[m]) for lab, m in zip(labels_in, gmaps))
    zero = _find_zero(table)
    return FiniteSemigroup(table=table, generators=generators, labels=tuple(words), zero=zero, maps=tuple(elems))


def from_table(table, generators: Sequence, element_names: Sequence[str] | None = None,
               cap: int = DEFAULT_CLOSURE_CAP) -> FiniteSemigroup:
    """Subsemigroup generated by ``generators = [(label, element), ...]`` of a
    semigroup given by its multiplication table (row = left factor).

    Elements are re-indexed canonically; elements not generated are dropped.
    """
    generators = list(generators)
    if not generators:
        raise EmptyGenerators("at least one generator is required")
    t = np.asarray(table, dtype=np.int64)
    if t.ndim != 2 or t.shape[0] != t.shape[1]:
        raise ValidationError("multiplication table must be square")
    m = t.shape[0]
    if t.size and (t.min() < 0 or t.max() >= m):
        raise ValidationError("table entries must be element indices")
    labels_in = [lab for lab, _ in generators]
    if len(set(labels_in)) != len(labels_in):
        raise ValidationError("generator labels must be distinct")
    for lab, g in generators:
        if not (0 <= int(g) < m):
            raise ValidationError(f"generator {lab!r} index {g} out of range")

    order: dict = {}
    words: list = []
    old: list = []
    queue = deque()
    for lab, g in generators:
        g = int(g)
        if g not in order:
            order[g] = len(old)
            old.append(g)
            words.append(lab)
            queue.append(g)
    while queue:
        x = queue.popleft()
        for lab, g in generators:
            y = int(t[x, int(g)])
            if y not in order:
                if len(old) >= cap:
                    raise ClosureCapExceeded(f"closure exceeds {cap} elements")
                order[y] = len(old)
                old.append(y)
                words.append(words[order[x]] + lab)
                queue.append(y)
    sub = t[np.ix_(old, old)]
    remap = np.vectorize(lambda v: order.get(int(v), -1), otypes=[np.int64])(sub) if sub.size else sub
    if (remap < 0).any():
        raise ValidationError("generated subset is not closed under the table")
    labels = tuple(words)
    if element_names is not None:
        labels = tuple(str(element_names[o]) for o in old)
    gens = tuple((lab, order[int(g)]) for lab, g in generators)
    return FiniteSemigroup(table=remap, generators=gens, labels=labels, zero=_find_zero(remap))


def _find_zero(table: np.ndarray) -> int | None:
    n = table.shape[0]
    for z in range(n):
        if (table[z, :] == z).all() and (table[:, z] == z).all():
            return z
    return None


def is_associative(S: FiniteSemigroup) -> bool:
    t = S.table
    # (xy)z == x(yz) for all triples, vectorized over z
    for x in range(S.size):
        for y in range(S.size):
            if not np.array_equal(t[t[x, y], :], t[x, t[y, :]]):
                return False
    return True


# ---------------------------------------------------------------------------
# words


def parse_word(S: FiniteSemigroup, text: str) -> tuple:
    """Split ``text`` into generator labels (longest match first).

    ``zero`` is accepted as an alias of the reserved label ``□``.
    """
    text = text.replace("zero", ZERO_LABEL) if ZERO_LABEL in S.letters else text
    if text in ("", "1", "𝟙"):
        return ()
    letters = sorted(S.letters, key=len, reverse=True)
    out = []
    i = 0
    while i < len(text):
        if text[i] in " .·":
            i += 1
            continue
        for lab in letters:
            if text.startswith(lab, i):
                out.append(lab)
                i += len(lab)
                break
        else:
            raise UnknownLabel(f"cannot parse {text!r} at position {i}: no generator label matches")
    return tuple(out)


def eval_word(S: FiniteSemigroup, word: Iterable[str]) -> int:
    """Element ``[w]_S`` of a nonempty word of generator labels."""
    word = list(word)
    if not word:
        raise ValueError("empty word has no value in S (it denotes the adjoined identity)")
    x = S.gen(word[0])
    for lab in word[1:]:
        x = int(S.table[x, S.gen(lab)])
    return x


# ---------------------------------------------------------------------------
# ideals


def _closure(S: FiniteSemigroup, seeds: Iterable[int], left: bool, right: bool) -> set:
    gens = [g for _, g in S.generators]
    seen = set(int(s) for s in seeds)
    stack = list(seen)
    t = S.table
    while stack:
        x = stack.pop()
        nxt = []
        if left:
            nxt.extend(int(t[g, x]) for g in gens)
        if right:
            nxt.extend(int(t[x, g]) for g in gens)
        for y in nxt:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return seen


def minimal_ideal(S: FiniteSemigroup) -> frozenset:
    """The minimal two-sided ideal K(S).

    The product of all elements lies in K(S); K(S) is the two-sided ideal
    it generates.
    """
    z = 0
    for x in range(1, S.size):
        z = int(S.table[z, x])
    return frozenset(_closure(S, [z], left=True, right=True))


def is_left_zero(S: FiniteSemigroup, K: Iterable[int]) -> bool:
    K = sorted(K)
    t = S.table
    return all(int(t[x, y]) == x for x in K for y in K)


def minimal_left_ideal(S: FiniteSemigroup, K: Iterable[int] | None = None) -> tuple:
    """First minimal left ideal ``S^1 k`` for the least ``k`` in K(S), sorted."""
    K = minimal_ideal(S) if K is None else K
    k = min(K)
    return tuple(sorted(_closure(S, [k], left=True, right=False)))


def idempotent_in(S: FiniteSemigroup, elements: Iterable[int]) -> int:
    for x in sorted(elements):
        if int(S.table[x, x]) == x:
            return x
    raise ValueError("no idempotent in the given set")


def adjoin_zero(S: FiniteSemigroup, label: str = ZERO_LABEL) -> FiniteSemigroup:
    """``S ∪ {□}`` with a fresh absorbing element and a new generator ``□``."""
    if label in S.letters:
        label = label + "'"
        while label in S.letters:
            label += "'"
    n = S.size
    t = np.empty((n + 1, n + 1), dtype=np.int64)
    t[:n, :n] = S.table
    t[n, :] = n
    t[:, n] = n
    maps = None
    return FiniteSemigroup(
        table=t,
        generators=S.generators + ((label, n),),
        labels=S.labels + (label,),
        zero=n,
        has_adjoined_identity=S.has_adjoined_identity,
        maps=maps,
    )


def check_invariants(S: FiniteSemigroup, max_assoc: int = 64) -> None:
    """Raise ValidationError on any broken structural invariant."""
    if S.size <= max_assoc and not is_associative(S):
        raise ValidationError("multiplication table is not associative")
    reach = _closure(S, [g for _, g in S.generators], left=False, right=True)
    if len(reach) != S.size:
        raise ValidationError("some elements are not products of generators")
    if S.zero is not None:
        z = S.zero
        if not ((S.table[z, :] == z).all() and (S.table[:, z] == z).all()):
            raise ValidationError("declared zero is not absorbing")


def brute_force_ideals(S: FiniteSemigroup) -> list:
    """All nonempty two-sided ideals, by subset enumeration (tiny S only)."""
    n = S.size
    out = []
    for mask in range(1, 1 << n):
        I = {i for i in range(n) if mask >> i & 1}
        if all(int(S.table[x, y]) in I and int(S.table[y, x]) in I for x in I for y in range(n)):
            out.append(frozenset(I))
    return out


def word_products(S: FiniteSemigroup, max_len: int):
    """Yield ``(word, element)`` for all words up to ``max_len`` in shortlex order."""
    letters = S.letters
    for n in range(1, max_len + 1):
        for w in product(letters, repeat=n):
            yield w, eval_word(S, w)
