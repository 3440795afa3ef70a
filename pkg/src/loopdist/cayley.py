"""Right Cayley graph of ``(S, A)`` and its transition edges."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .semigroup import FiniteSemigroup

ROOT = 0
ROOT_LABEL = "𝟙"


def strongly_connected_components(succ) -> list:
    """Component id per vertex for adjacency lists ``succ`` (iterative Tarjan).

    Ids are assigned in the order components are completed, so sink
    components get the smallest ids.
    """
    n = len(succ)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    comp = [-1] * n
    stack: list = []
    counter = 0
    ncomp = 0
    for start in range(n):
        if index[start] != -1:
            continue
        work = [(start, 0)]
        index[start] = low[start] = counter
        counter += 1
        stack.append(start)
        on_stack[start] = True
        while work:
            v, i = work[-1]
            nbrs = succ[v]
            if i < len(nbrs):
                work[-1] = (v, i + 1)
                w = nbrs[i]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
    return comp


@dataclass(frozen=True, eq=False)
class CayleyGraph:
    """Vertex 0 is the root 𝟙; vertex ``i + 1`` is element ``i`` of S.

    ``succ[v][a]`` is the target of the ``a``-edge (letter index ``a``).
    Edge ids are ``v * |A| + a``.
    """

    semigroup: FiniteSemigroup
    succ: np.ndarray
    scc_id: tuple
    transition: frozenset

    @property
    def n_vertices(self) -> int:
        return self.succ.shape[0]

    @property
    def n_letters(self) -> int:
        return self.succ.shape[1]

    def element(self, v: int) -> int | None:
        """Element of S at vertex ``v`` (None for the root)."""
        return None if v == ROOT else v - 1

    def vertex(self, element: int) -> int:
        return element + 1

    def edge_id(self, v: int, a: int) -> int:
        return v * self.n_letters + a

    def edges(self):
        """Yield ``(edge_id, src, letter, dst)``."""
        m = self.n_letters
        for v in range(self.n_vertices):
            for a in range(m):
                yield v * m + a, v, a, int(self.succ[v, a])

    def vertex_name(self, v: int) -> str:
        return ROOT_LABEL if v == ROOT else self.semigroup.labels[v - 1]

    def is_transition(self, edge_id: int) -> bool:
        return edge_id in self.transition


def right_cayley(S: FiniteSemigroup) -> CayleyGraph:
    gens = [g for _, g in S.generators]
    n, m = S.size, len(gens)
    succ = np.empty((n + 1, m), dtype=np.int64)
    for a, g in enumerate(gens):
        succ[ROOT, a] = g + 1
    if n:
        succ[1:, :] = S.table[:, gens] + 1
    adj = [sorted(set(int(x) for x in row)) for row in succ]
    comp = strongly_connected_components(adj)
    trans = frozenset(
        v * m + a for v in range(n + 1) for a in range(m) if comp[v] != comp[int(succ[v, a])]
    )
    return CayleyGraph(semigroup=S, succ=succ, scc_id=tuple(comp), transition=trans)


def transition_edges(G: CayleyGraph) -> frozenset:
    """Edge ids ``s -a-> s'`` with no directed path from ``s'`` back to ``s``."""
    return G.transition


def reachable_from(succ, start: int) -> set:
    """Plain BFS reachability (used as an independent check of the SCC test)."""
    seen = {start}
    q = deque([start])
    while q:
        v = q.popleft()
        for w in succ[v]:
            w = int(w)
            if w not in seen:
                seen.add(w)
                q.append(w)
    return seen
