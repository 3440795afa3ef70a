"""Karnofsky–Rhodes and McCammond expansions of a right Cayley graph."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .cayley import ROOT, ROOT_LABEL, CayleyGraph
from .errors import VertexCapExceeded
from .semigroup import FiniteSemigroup, minimal_ideal

DEFAULT_KR_CAP = 100_000
DEFAULT_MC_CAP = 100_000


def word_name(word, root: str = ROOT_LABEL) -> str:
    return "".join(word) if word else root


@dataclass(frozen=True, eq=False)
class KRGraph:
    """Right Cayley graph of KR(S, A).

    Vertex ``v`` is the pair ``(cayley vertex, crossed transition edges)``;
    vertex 0 is the root ``(𝟙, ∅)``.  ``words[v]`` is the shortlex-least
    word reaching ``v``.
    """

    cayley: CayleyGraph
    vertices: tuple  # ((cayley_vertex, frozenset(edge ids)), ...)
    succ: np.ndarray
    words: tuple
    _ideal: frozenset = field(default=None, repr=False)

    @property
    def semigroup(self) -> FiniteSemigroup:
        return self.cayley.semigroup

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def letters(self) -> tuple:
        return self.semigroup.letters

    def projection(self, v: int) -> int:
        """Cayley vertex under ``v``."""
        return self.vertices[v][0]

    def element(self, v: int) -> int | None:
        return self.cayley.element(self.vertices[v][0])

    def crossed(self, v: int) -> frozenset:
        return self.vertices[v][1]

    def name(self, v: int) -> str:
        return word_name(self.words[v])

    def walk(self, word, start: int = ROOT) -> int:
        v = start
        for lab in word:
            v = int(self.succ[v, self.semigroup.letter_index(lab)])
        return v

    def minimal_ideal(self) -> frozenset:
        """K(KR): vertices whose projection lies in K(S)."""
        if self._ideal is None:
            K = minimal_ideal(self.semigroup)
            ideal = frozenset(v for v in range(1, self.n_vertices) if self.element(v) in K)
            object.__setattr__(self, "_ideal", ideal)
        return self._ideal


def kr_expand(G: CayleyGraph, cap: int = DEFAULT_KR_CAP) -> KRGraph:
    m = G.n_letters
    letters = G.semigroup.letters
    root = (ROOT, frozenset())
    index = {root: 0}
    verts = [root]
    words = [()]
    rows: list = []
    q = deque([0])
    while q:
        i = q.popleft()
        cv, crossed = verts[i]
        row = []
        for a in range(m):
            eid = cv * m + a
            nv = int(G.succ[cv, a])
            nc = crossed | {eid} if eid in G.transition else crossed
            key = (nv, nc)
            j = index.get(key)
            if j is None:
                if len(verts) >= cap:
                    raise VertexCapExceeded(f"KR expansion exceeds {cap} vertices")
                j = len(verts)
                index[key] = j
                verts.append(key)
                words.append(words[i] + (letters[a],))
                q.append(j)
            row.append(j)
        rows.append((i, row))
    succ = np.empty((len(verts), m), dtype=np.int64)
    for i, row in rows:
        succ[i, :] = row
    return KRGraph(cayley=G, vertices=tuple(verts), succ=succ, words=tuple(words))


@dataclass(frozen=True, eq=False)
class McGraph:
    """McCammond expansion of a KR graph.

    Vertex ``p`` is a simple KR path from the root; ``paths[p]`` lists its KR
    vertices and ``words[p]`` its edge labels (the normal form).  ``succ[p][a]``
    is the target of the ``a``-edge or -1 if ``p`` is absorbing.  An edge is a
    tree edge iff it lengthens the path by one.
    """

    kr: KRGraph
    paths: tuple
    words: tuple
    parent: tuple  # Mc id of the parent, -1 for the root
    succ: np.ndarray
    absorbing: frozenset | None

    @property
    def n_vertices(self) -> int:
        return len(self.paths)

    @property
    def letters(self) -> tuple:
        return self.kr.letters

    def tau(self, p: int) -> int:
        """KR vertex at the end of path ``p``."""
        return self.paths[p][-1]

    def depth(self, p: int) -> int:
        return len(self.paths[p]) - 1

    def name(self, p: int) -> str:
        return word_name(self.words[p])

    def is_tree_edge(self, p: int, a: int) -> bool:
        q = int(self.succ[p, a])
        return q >= 0 and self.parent[q] == p and len(self.paths[q]) == len(self.paths[p]) + 1

    def edges(self):
        """Yield ``(src, letter_index, dst, is_tree)``."""
        for p in range(self.n_vertices):
            for a in range(self.succ.shape[1]):
                q = int(self.succ[p, a])
                if q >= 0:
                    yield p, a, q, self.parent[q] == p and len(self.paths[q]) == len(self.paths[p]) + 1

    def find(self, word) -> int:
        """Mc vertex whose normal form is ``word``."""
        word = tuple(word)
        idx = self.__dict__.get("_by_word")
        if idx is None:
            idx = {w: i for i, w in enumerate(self.words)}
            object.__setattr__(self, "_by_word", idx)
        try:
            return idx[word]
        except KeyError:
            raise KeyError(f"no McCammond tree vertex with normal form {word_name(word)!r}") from None

    def walk(self, word, start: int = 0) -> int | None:
        v = start
        for lab in word:
            v = int(self.succ[v, self.kr.semigroup.letter_index(lab)])
            if v < 0:
                return None
        return v

    def as_digraph(self):
        from .loopgraph import LabeledDigraph

        letters = self.letters
        edges = [(p, letters[a], q) for p, a, q, _ in self.edges()]
        return LabeledDigraph(names=tuple(self.name(p) for p in range(self.n_vertices)), edges=tuple(edges))


def mc_expand(K: KRGraph, absorbing=None, cap: int = DEFAULT_MC_CAP) -> McGraph:
    """Breadth-first McCammond expansion.

    With ``absorbing`` (a set of KR vertices) the outgoing edges of every
    path ending in that set are pruned.
    """
    absorbing = frozenset(absorbing) if absorbing is not None else None
    m = K.succ.shape[1]
    letters = K.letters
    paths = [(ROOT,)]
    prefix_ids = [(0,)]
    words = [()]
    parent = [-1]
    rows = []
    q = deque([0])
    while q:
        p = q.popleft()
        path = paths[p]
        tau = path[-1]
        if absorbing is not None and tau in absorbing:
            rows.append((p, [-1] * m))
            continue
        row = []
        for a in range(m):
            u = int(K.succ[tau, a])
            if u in path:
                row.append(prefix_ids[p][path.index(u)])
                continue
            if len(paths) >= cap:
                raise VertexCapExceeded(f"McCammond expansion exceeds {cap} vertices")
            j = len(paths)
            paths.append(path + (u,))
            prefix_ids.append(prefix_ids[p] + (j,))
            words.append(words[p] + (letters[a],))
            parent.append(p)
            q.append(j)
            row.append(j)
        rows.append((p, row))
    succ = np.empty((len(paths), m), dtype=np.int64)
    for p, row in rows:
        succ[p, :] = row
    return McGraph(kr=K, paths=tuple(paths), words=tuple(words), parent=tuple(parent),
                   succ=succ, absorbing=absorbing)


def spanning_tree(M: McGraph) -> dict:
    """``{vertex: (parent, label)}`` over tree edges (root omitted)."""
    tree = {}
    for p in range(1, M.n_vertices):
        par = M.parent[p]
        tree[p] = (par, M.words[p][-1])
    return tree


def semaphore_enumerate(S: FiniteSemigroup, max_len: int) -> list:
    """Words of length <= max_len entering K(S) exactly at their last letter.

    Returned in length-then-lexicographic order of generator indices.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    K = minimal_ideal(S)
    out = []
    frontier = [((), None)]
    for _ in range(max_len):
        nxt = []
        for w, x in frontier:
            for lab, g in S.generators:
                y = g if x is None else int(S.table[x, g])
                if y in K:
                    out.append(w + (lab,))
                else:
                    nxt.append((w + (lab,), y))
        frontier = nxt
    out.sort(key=lambda w: (len(w), [S.letter_index(c) for c in w]))
    return out
