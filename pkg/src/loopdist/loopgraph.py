"""Loop graphs, the Pict unfolding of unique-simple-path graphs, path
enumeration and subset-construction determinization."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .cayley import ROOT_LABEL
from .errors import NotSimplePath, RecursionCapExceeded, UspViolation, VertexCapExceeded

DEFAULT_RECURSION_CAP = 64
DEFAULT_USP_CAP = 1_000_000
_PRIMES = "′″‴⁗"


@dataclass(frozen=True, eq=False)
class LabeledDigraph:
    """Rooted edge-labelled digraph; vertex 0 is the root.

    ``edges`` is a tuple of ``(src, label, dst)``; parallel edges are allowed
    and are distinguished by their position.
    """

    names: tuple
    edges: tuple

    @property
    def n_vertices(self) -> int:
        return len(self.names)

    def _adj(self):
        cached = self.__dict__.get("_adj_cache")
        if cached is None:
            out = [[] for _ in self.names]
            inc = [[] for _ in self.names]
            for k, (s, _, d) in enumerate(self.edges):
                out[s].append(k)
                inc[d].append(k)
            cached = (out, inc)
            object.__setattr__(self, "_adj_cache", cached)
        return cached

    def out_edges(self, v: int) -> list:
        return self._adj()[0][v]

    def in_edges(self, v: int) -> list:
        return self._adj()[1][v]

    def labels(self) -> tuple:
        seen = []
        for _, lab, _ in self.edges:
            if lab not in seen:
                seen.append(lab)
        return tuple(seen)


# ---------------------------------------------------------------------------
# unique simple path property


def validate_usp(G: LabeledDigraph, cap: int = DEFAULT_USP_CAP) -> bool:
    """Exhaustive check that every vertex has exactly one simple path from the root.

    Simple paths are edge sequences without repeated vertices, so parallel
    edges count as distinct paths.  ``cap`` bounds the number of DFS steps.
    """
    n = G.n_vertices
    count = [0] * n
    count[0] = 1
    on_path = [False] * n
    on_path[0] = True
    steps = 0
    stack = [(0, iter(G.out_edges(0)))]
    while stack:
        v, it = stack[-1]
        k = next(it, None)
        if k is None:
            stack.pop()
            on_path[v] = False
            continue
        steps += 1
        if steps > cap:
            raise VertexCapExceeded(f"simple-path enumeration exceeds {cap} steps")
        w = G.edges[k][2]
        if on_path[w]:
            continue
        count[w] += 1
        if count[w] > 1:
            return False
        on_path[w] = True
        stack.append((w, iter(G.out_edges(w))))
    return all(c == 1 for c in count)


@dataclass(frozen=True)
class UspTree:
    """Spanning tree of unique simple paths: parent vertex, parent edge, depth, BFS rank."""

    parent: tuple
    parent_edge: tuple
    depth: tuple
    order: tuple  # BFS rank per vertex

    def path_to(self, v: int) -> list:
        out = [v]
        while self.parent[v] >= 0:
            v = self.parent[v]
            out.append(v)
        return out[::-1]

    def is_ancestor(self, u: int, v: int) -> bool:
        """True iff ``u`` lies on the root path of ``v`` (inclusive)."""
        du = self.depth[u]
        while self.depth[v] > du:
            v = self.parent[v]
        return u == v


def usp_tree(G: LabeledDigraph) -> UspTree:
    """BFS tree; raises UspViolation unless every non-tree edge points to an
    ancestor of its source (which is equivalent to the USP property)."""
    n = G.n_vertices
    parent = [-1] * n
    pedge = [-1] * n
    depth = [-1] * n
    order = [-1] * n
    depth[0] = 0
    order[0] = 0
    rank = 1
    q = deque([0])
    while q:
        v = q.popleft()
        for k in G.out_edges(v):
            w = G.edges[k][2]
            if depth[w] < 0:
                depth[w] = depth[v] + 1
                parent[w] = v
                pedge[w] = k
                order[w] = rank
                rank += 1
                q.append(w)
    if rank != n:
        raise UspViolation("graph has vertices unreachable from the root")
    tree = UspTree(tuple(parent), tuple(pedge), tuple(depth), tuple(order))
    for k, (s, _, d) in enumerate(G.edges):
        if pedge[d] == k:
            continue
        if not tree.is_ancestor(d, s):
            raise UspViolation(
                f"edge {G.names[s]} -> {G.names[d]} creates a second simple path to {G.names[d]}"
            )
    return tree


def _check_path(G: LabeledDigraph, path) -> list:
    path = [int(v) for v in path]
    if not path or path[0] != 0:
        raise NotSimplePath("path must start at the root")
    if len(set(path)) != len(path):
        raise NotSimplePath("path repeats a vertex")
    edges = []
    for u, v in zip(path, path[1:]):
        ks = [k for k in G.out_edges(u) if G.edges[k][2] == v]
        if not ks:
            raise NotSimplePath(f"no edge {G.names[u]} -> {G.names[v]}")
        edges.append(ks[0])
    return edges


# ---------------------------------------------------------------------------
# loop graphs


@dataclass(frozen=True)
class Loop:
    attach: int
    steps: tuple  # ((label, vertex), ...); the last vertex is ``attach``

    @property
    def labels(self) -> tuple:
        return tuple(lab for lab, _ in self.steps)

    @property
    def fresh(self) -> tuple:
        return tuple(v for _, v in self.steps[:-1])


@dataclass(frozen=True, eq=False)
class LoopGraph:
    """Straight spine ``𝟙 -> 1 -> ... -> n`` with loops attached recursively.

    ``loops[v]`` holds the loops attached at vertex ``v``; ``origin[v]`` is
    the vertex of the unfolded graph a Pict copy came from (or None).
    """

    names: tuple
    spine: tuple
    spine_labels: tuple
    loops: tuple
    origin: tuple | None = None

    @property
    def root(self) -> int:
        return self.spine[0]

    @property
    def end(self) -> int:
        return self.spine[-1]

    @property
    def n_vertices(self) -> int:
        return len(self.names)

    def all_loops(self):
        for v in range(self.n_vertices):
            yield from self.loops[v]

    def edges(self) -> list:
        out = [(u, lab, v) for u, lab, v in zip(self.spine, self.spine_labels, self.spine[1:])]
        for lp in self.all_loops():
            prev = lp.attach
            for lab, v in lp.steps:
                out.append((prev, lab, v))
                prev = v
        return out

    def as_digraph(self) -> LabeledDigraph:
        return LabeledDigraph(names=self.names, edges=tuple(self.edges()))

    def check(self) -> None:
        """Raise ValueError unless spine edges plus loop edges minus return
        edges form a spanning tree rooted at the spine root."""
        if self.spine[0] != 0:
            raise ValueError("root must be vertex 0")
        tree_in = [0] * self.n_vertices
        for v in self.spine[1:]:
            tree_in[v] += 1
        for lp in self.all_loops():
            if not lp.steps or lp.steps[-1][1] != lp.attach:
                raise ValueError("loop does not return to its attachment vertex")
            for v in lp.fresh:
                tree_in[v] += 1
        if tree_in[0] != 0 or any(c != 1 for c in tree_in[1:]):
            raise ValueError("spine and loop bodies do not form a spanning tree")
        if not validate_usp(self.as_digraph()):
            raise ValueError("loop graph violates the unique simple path property")


class LoopGraphBuilder:
    """Incremental construction of a LoopGraph with readable vertex names."""

    def __init__(self, root_name: str = ROOT_LABEL):
        self.names = [root_name]
        self.origin = [None]
        self.loops = [[]]
        self.spine = [0]
        self.spine_labels = []
        self._copies: dict = {}

    def vertex(self, name: str | None = None, origin=None, copy: bool = False) -> int:
        if name is None:
            name = str(len(self.names))
        if copy:
            k = self._copies.get(name, 0) + 1
            self._copies[name] = k
            name = name + (_PRIMES[k - 1] if k <= len(_PRIMES) else "′" * k)
        self.names.append(name)
        self.origin.append(origin)
        self.loops.append([])
        return len(self.names) - 1

    def extend_spine(self, labels, names=None) -> list:
        ids = []
        for i, lab in enumerate(labels):
            v = self.vertex(None if names is None else names[i])
            self.spine.append(v)
            self.spine_labels.append(lab)
            ids.append(v)
        return ids

    def add_loop(self, attach: int, labels, names=None) -> list:
        """Attach a loop spelling ``labels`` at ``attach``; returns fresh vertex ids."""
        labels = list(labels)
        fresh = [self.vertex(None if names is None else names[i]) for i in range(len(labels) - 1)]
        self.loops[attach].append(Loop(attach, tuple(zip(labels, fresh + [attach]))))
        return fresh

    def build(self) -> LoopGraph:
        return LoopGraph(
            names=tuple(self.names),
            spine=tuple(self.spine),
            spine_labels=tuple(self.spine_labels),
            loops=tuple(tuple(l) for l in self.loops),
            origin=tuple(self.origin),
        )


# ---------------------------------------------------------------------------
# Pict


def pict(G: LabeledDigraph, path, max_depth: int = DEFAULT_RECURSION_CAP) -> LoopGraph:
    """Unfold the USP graph ``G`` along the simple root path ``path`` (vertex ids)
    into a loop graph whose accepted paths biject with the G-paths from the
    root to the end of ``path``."""
    tree = usp_tree(G)
    _check_path(G, path)
    path = [int(v) for v in path]
    b = LoopGraphBuilder(root_name=G.names[0])
    b.origin[0] = 0
    ids = [0]
    for v in path[1:]:
        w = b.vertex(G.names[v], origin=v)
        b.spine.append(w)
        b.spine_labels.append(G.edges[tree.parent_edge[v]][1])
        ids.append(w)
    live = frozenset(range(len(G.edges)))
    _unfold(G, tree, live, path, ids, b, 0, max_depth)
    return b.build()


def pict_target(G: LabeledDigraph, target: int, **kw) -> LoopGraph:
    return pict(G, usp_tree(G).path_to(target), **kw)


def _unfold(G, tree, live, path, ids, b, level, max_depth):
    if level > max_depth:
        raise RecursionCapExceeded(f"Pict recursion deeper than {max_depth}")
    for i in range(1, len(path)):
        v0, v1 = path[i - 1], path[i]
        e = tree.parent_edge[v1]
        others = [k for k in G.in_edges(v1) if k != e and k in live]
        others.sort(key=lambda k: (tree.order[G.edges[k][0]], G.edges[k][1]))
        for k in others:
            src, lab, _ = G.edges[k]
            if not tree.is_ancestor(v1, src):
                raise UspViolation(f"edge into {G.names[v1]} from a non-descendant")
            tail = tree.path_to(src)[tree.depth[v1]:]  # v1 ... src
            full = path[: i + 1] + tail[1:]
            keep = {tree.parent_edge[w] for w in full[1:]}
            prefix = set(path[: i + 1])
            sub_live = frozenset(
                j for j in live
                if j in keep or (G.edges[j][0] not in prefix and G.edges[j][2] not in prefix)
            )
            sub_live = _reachable_edges(G, sub_live, v0)
            sub_path = full[i - 1:]
            sub_ids = [ids[i - 1], ids[i]]
            for w in tail[1:]:
                sub_ids.append(b.vertex(G.names[w], origin=w, copy=True))
            _unfold(G, tree, sub_live, sub_path, sub_ids, b, level + 1, max_depth)
            steps = [(G.edges[tree.parent_edge[w]][1], x) for w, x in zip(tail[1:], sub_ids[2:])]
            steps.append((lab, ids[i]))
            b.loops[ids[i]].append(Loop(ids[i], tuple(steps)))


def _reachable_edges(G, live, start) -> frozenset:
    seen = {start}
    stack = [start]
    keep = set()
    while stack:
        v = stack.pop()
        for k in G.out_edges(v):
            if k not in live:
                continue
            keep.add(k)
            w = G.edges[k][2]
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return frozenset(keep)


# ---------------------------------------------------------------------------
# paths and automata


@dataclass(frozen=True)
class PathSample:
    word: tuple
    weight: object


def enumerate_paths(G: LoopGraph, max_len: int, weights: dict):
    """Accepted paths (root to spine end) of length <= max_len with weights.

    Returns ``(samples, partial_sum)``.
    """
    D = G.as_digraph()
    end = G.end
    samples = []
    total = Fraction(0)
    stack = [(G.root, (), Fraction(1))]
    while stack:
        v, word, w = stack.pop()
        if v == end:
            samples.append(PathSample(word, w))
            total = total + w
        if len(word) == max_len:
            continue
        for k in reversed(D.out_edges(v)):
            _, lab, dst = D.edges[k]
            stack.append((dst, word + (lab,), w * weights[lab]))
    samples.sort(key=lambda s: (len(s.word), s.word))
    return samples, total


def path_counts(G: LabeledDigraph, target: int, max_len: int, start: int = 0) -> list:
    """``counts[l]`` = number of paths of length ``l`` from ``start`` to ``target``."""
    cur = [0] * G.n_vertices
    cur[start] = 1
    out = [cur[target]]
    for _ in range(max_len):
        nxt = [0] * G.n_vertices
        for s, _, d in G.edges:
            if cur[s]:
                nxt[d] += cur[s]
        cur = nxt
        out.append(cur[target])
    return out


@dataclass(frozen=True, eq=False)
class Dfa:
    states: tuple  # frozensets of source vertices; index 0 is the start {root}
    alphabet: tuple
    transition: dict  # (state index, label) -> state index
    accepting: frozenset

    def run(self, word):
        s = 0
        for lab in word:
            s = self.transition.get((s, lab))
            if s is None:
                return None
        return s

    def accepts(self, word) -> bool:
        s = self.run(word)
        return s is not None and s in self.accepting


def determinize(G, accept=None) -> Dfa:
    """Accessible subset construction from ``{root}``; empty subsets are omitted."""
    D = G.as_digraph() if isinstance(G, LoopGraph) else G
    if accept is None:
        accept = {G.end} if isinstance(G, LoopGraph) else set()
    accept = set(accept)
    alphabet = D.labels()
    start = frozenset([0])
    index = {start: 0}
    states = [start]
    trans = {}
    q = deque([start])
    while q:
        Z = q.popleft()
        zi = index[Z]
        for lab in alphabet:
            nxt = frozenset(D.edges[k][2] for z in Z for k in D.out_edges(z) if D.edges[k][1] == lab)
            if not nxt:
                continue
            j = index.get(nxt)
            if j is None:
                j = len(states)
                index[nxt] = j
                states.append(nxt)
                q.append(nxt)
            trans[(zi, lab)] = j
    accepting = frozenset(i for i, Z in enumerate(states) if Z & accept)
    return Dfa(states=tuple(states), alphabet=alphabet, transition=trans, accepting=accepting)
