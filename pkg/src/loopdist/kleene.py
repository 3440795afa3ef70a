"""Kleene expressions of loop graphs, Zimin union elimination and exact
evaluation of the weighted path sum."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import UnknownLabel
from .exactnum import star
from .loopgraph import LabeledDigraph, LoopGraph, UspTree, usp_tree


class KleeneExpr:
    __slots__ = ()

    def __str__(self):
        return render(self)


@dataclass(frozen=True, eq=True, repr=False)
class Letter(KleeneExpr):
    label: str

    def __repr__(self):
        return f"Letter({self.label!r})"


@dataclass(frozen=True, eq=True, repr=False)
class Concat(KleeneExpr):
    children: tuple

    def __repr__(self):
        return f"Concat{self.children!r}"


@dataclass(frozen=True, eq=True, repr=False)
class Union(KleeneExpr):
    children: tuple

    def __repr__(self):
        return f"Union{self.children!r}"


@dataclass(frozen=True, eq=True, repr=False)
class Star(KleeneExpr):
    child: KleeneExpr

    def __repr__(self):
        return f"Star({self.child!r})"


EPSILON = Concat(())


def concat(*parts) -> KleeneExpr:
    """Concat with nested concatenations flattened; a single part is returned as is."""
    flat = []
    for p in parts:
        if p is None:
            continue
        if isinstance(p, Concat):
            flat.extend(p.children)
        else:
            flat.append(p)
    if len(flat) == 1:
        return flat[0]
    return Concat(tuple(flat))


def render(e: KleeneExpr) -> str:
    """Text form: juxtaposition, ``*``, and ``{x,y}`` for unions."""
    if isinstance(e, Letter):
        return e.label
    if isinstance(e, Concat):
        if not e.children:
            return "ε"
        return "".join(render(c) for c in e.children)
    if isinstance(e, Union):
        return "{" + ",".join(render(c) for c in e.children) + "}"
    if isinstance(e, Star):
        c = e.child
        if isinstance(c, Union) and len(c.children) == 1:
            c = c.children[0]
        if isinstance(c, (Letter, Union)):
            return render(c) + "*"
        return "(" + render(c) + ")*"
    raise TypeError(f"not a Kleene expression: {e!r}")


# ---------------------------------------------------------------------------
# expressions of an explicit loop graph


def _loops_star(G: LoopGraph, v: int):
    loops = G.loops[v]
    if not loops:
        return None
    return Star(Union(tuple(_loop_expr(G, lp) for lp in loops)))


def _loop_expr(G: LoopGraph, lp) -> KleeneExpr:
    # cut the loop into a line attach -> v1 -> ... -> attach; the final
    # vertex is the attachment itself, whose loops belong to the caller
    parts = []
    for lab, v in lp.steps[:-1]:
        parts.append(Letter(lab))
        parts.append(_loops_star(G, v))
    parts.append(Letter(lp.steps[-1][0]))
    return concat(*parts)


def kleene_of_loopgraph(G: LoopGraph) -> KleeneExpr:
    parts = []
    for lab, v in zip(G.spine_labels, G.spine[1:]):
        parts.append(Letter(lab))
        parts.append(_loops_star(G, v))
    if not parts:
        return EPSILON
    return concat(*parts)


# ---------------------------------------------------------------------------
# the same expression read directly off a USP graph, with shared subterms


class PictExpressions:
    """Kleene expressions of ``Pict(G, path)`` for a fixed USP graph ``G``.

    The loops Pict attaches at a copy of vertex ``w`` only depend on ``w``
    (one loop per non-tree edge into ``w``), so each ``{loops at w}*`` term
    is built once and shared.  ``expression(path)`` is structurally equal to
    ``kleene_of_loopgraph(pict(G, path))``.
    """

    def __init__(self, G: LabeledDigraph, tree: UspTree | None = None):
        self.G = G
        self.tree = tree if tree is not None else usp_tree(G)
        self._star: dict = {}
        self._back: list = [[] for _ in range(G.n_vertices)]
        for k, (s, _, d) in enumerate(G.edges):
            if self.tree.parent_edge[d] != k:
                self._back[d].append(k)
        order = self.tree.order
        for ks in self._back:
            ks.sort(key=lambda k: (order[G.edges[k][0]], G.edges[k][1]))

    def _label_into(self, w: int) -> str:
        return self.G.edges[self.tree.parent_edge[w]][1]

    def star_at(self, w: int):
        """``{loops at w}*`` or None when no loop is attached at ``w``."""
        if w in self._star:
            return self._star[w]
        # resolve dependencies deepest-first to keep the Python stack shallow
        pending = [w]
        while pending:
            u = pending[-1]
            if u in self._star:
                pending.pop()
                continue
            missing = []
            for k in self._back[u]:
                src = self.G.edges[k][0]
                x = src
                while x != u:
                    if x not in self._star:
                        missing.append(x)
                    x = self.tree.parent[x]
            if missing:
                pending.extend(missing)
                continue
            pending.pop()
            loops = [self._loop(u, k) for k in self._back[u]]
            self._star[u] = Star(Union(tuple(loops))) if loops else None
        return self._star[w]

    def _loop(self, u: int, k: int) -> KleeneExpr:
        src, lab, _ = self.G.edges[k]
        body = []
        x = src
        while x != u:
            body.append(x)
            x = self.tree.parent[x]
        parts = []
        for x in reversed(body):
            parts.append(Letter(self._label_into(x)))
            parts.append(self._star[x])
        parts.append(Letter(lab))
        return concat(*parts)

    def expression(self, path) -> KleeneExpr:
        path = list(path)
        if len(path) == 1:
            return EPSILON
        for v in path[1:]:
            self.star_at(v)
        parts = []
        for v in path[1:]:
            parts.append(Letter(self._label_into(v)))
            parts.append(self._star[v])
        return concat(*parts)

    def expression_to(self, target: int) -> KleeneExpr:
        return self.expression(self.tree.path_to(target))


# ---------------------------------------------------------------------------
# Zimin words


def zimin_star(items) -> KleeneExpr:
    """Union-free form of ``{x1, ..., xn}*``:
    ``{x}* = x*`` and ``{X, y}* = ({X}* y)* {X}*``."""
    items = list(items)
    if not items:
        return EPSILON
    acc = Star(items[0])
    for y in items[1:]:
        acc = concat(Star(concat(acc, y)), acc)
    return acc


def _union_items(e: Union) -> list:
    # nested unions are one flat sum
    out = []
    for c in e.children:
        out.extend(_union_items(c) if isinstance(c, Union) else [c])
    return out


def zimin_eliminate(e: KleeneExpr, _memo=None) -> KleeneExpr:
    """Replace every starred union by its Zimin form (bare unions are kept)."""
    memo = {} if _memo is None else _memo
    key = id(e)
    if key in memo:
        return memo[key][1]
    if isinstance(e, Letter):
        out = e
    elif isinstance(e, Concat):
        out = concat(*(zimin_eliminate(c, memo) for c in e.children)) if e.children else e
    elif isinstance(e, Union):
        out = Union(tuple(zimin_eliminate(c, memo) for c in e.children))
    elif isinstance(e, Star):
        c = zimin_eliminate(e.child, memo)
        out = zimin_star(_union_items(c)) if isinstance(c, Union) else Star(c)
    else:
        raise TypeError(f"not a Kleene expression: {e!r}")
    memo[key] = (e, out)  # keep e alive so id() stays unique
    return out


def is_union_free_under_star(e: KleeneExpr) -> bool:
    if isinstance(e, Letter):
        return True
    if isinstance(e, (Concat, Union)):
        return all(is_union_free_under_star(c) for c in e.children)
    if isinstance(e, Star):
        return not isinstance(e.child, Union) and is_union_free_under_star(e.child)
    raise TypeError(e)


# ---------------------------------------------------------------------------
# evaluation


def eval_expr(e: KleeneExpr, weights: dict, memo: dict | None = None):
    """Weighted path sum: letters map to weights, concatenation multiplies,
    union adds and star is the geometric series ``1/(1-x)``.

    Works for Fraction or RatFunc weights.  ``memo`` (keyed by node id) may
    be shared across calls over the same expression DAG.
    """
    memo = {} if memo is None else memo
    stack = [e]
    while stack:
        node = stack[-1]
        key = id(node)
        if key in memo:
            stack.pop()
            continue
        if isinstance(node, Letter):
            try:
                val = weights[node.label]
            except KeyError:
                raise UnknownLabel(f"no weight for letter {node.label!r}") from None
        elif isinstance(node, Star):
            cval = memo.get(id(node.child))
            if cval is None:
                stack.append(node.child)
                continue
            val = star(cval[1])
        elif isinstance(node, (Concat, Union)):
            missing = [c for c in node.children if id(c) not in memo]
            if missing:
                stack.extend(missing)
                continue
            vals = [memo[id(c)][1] for c in node.children]
            if not vals:
                val = Fraction(1) if isinstance(node, Concat) else Fraction(0)
            else:
                val = vals[0]
                for v in vals[1:]:
                    val = val * v if isinstance(node, Concat) else val + v
        else:
            raise TypeError(f"not a Kleene expression: {node!r}")
        memo[key] = (node, val)
        stack.pop()
    return memo[id(e)][1]
