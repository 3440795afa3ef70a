"""Stationary distributions of random walks on finite semigroups.

Two independent routes:

* :func:`stationary_oracle` solves ``T psi = psi`` by exact Gaussian
  elimination;
* :func:`stationary_semigroup` sums normal distributions of Pict loop graphs
  over the McCammond tree of ``KR(S, A)`` (with the flat operation and the
  ``t -> 0`` limit when K(S) is not left zero), then lumps.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .cayley import right_cayley
from .errors import (
    NonPositiveProbability,
    NotLeftZero,
    PipelineMismatch,
    ProbsNotNormalized,
    SingularSystem,
    UnknownLabel,
)
from .exactnum import RatFunc, as_fraction, rf_limit_at_zero
from .expand import DEFAULT_KR_CAP, DEFAULT_MC_CAP, KRGraph, McGraph, kr_expand, mc_expand
from .kleene import PictExpressions, eval_expr, kleene_of_loopgraph
from .loopgraph import DEFAULT_RECURSION_CAP, pict
from .semigroup import (
    FiniteSemigroup,
    adjoin_zero,
    eval_word,
    idempotent_in,
    is_left_zero,
    minimal_ideal,
    minimal_left_ideal,
)


@dataclass(frozen=True, eq=False)
class MarkovChain:
    """Column-stochastic chain: ``matrix[i][j]`` is the probability of ``states[j] -> states[i]``."""

    states: tuple
    labels: tuple
    matrix: tuple
    letter_probs: dict

    @property
    def n(self) -> int:
        return len(self.states)

    def column_sums(self) -> list:
        return [sum((self.matrix[i][j] for i in range(self.n)), Fraction(0)) for j in range(self.n)]


@dataclass(frozen=True, eq=False)
class Distribution:
    values: dict  # label -> Fraction or RatFunc

    def __getitem__(self, key):
        return self.values[key]

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)

    def items(self):
        return self.values.items()

    def total(self):
        tot = Fraction(0)
        for v in self.values.values():
            tot = tot + v
        return tot

    def as_strings(self) -> dict:
        from .exactnum import format_value

        return {k: format_value(v) for k, v in self.values.items()}


def validate_probs(S: FiniteSemigroup, probs: dict) -> dict:
    out = {}
    for lab in probs:
        if lab not in S.letters:
            raise UnknownLabel(f"probability given for unknown generator {lab!r}")
    for lab in S.letters:
        if lab not in probs:
            raise NonPositiveProbability(f"no probability for generator {lab!r}")
        p = as_fraction(probs[lab])
        if p <= 0:
            raise NonPositiveProbability(f"probability of {lab!r} is {p}, must be positive")
        out[lab] = p
    total = sum(out.values(), Fraction(0))
    if total != 1:
        raise ProbsNotNormalized(f"probabilities sum to {total}, not 1")
    return out


def chain_from_action(states, labels, probs: dict, act) -> MarkovChain:
    """Chain on ``states`` where letter ``a`` moves ``s`` to ``act(a, s)``."""
    states = tuple(states)
    pos = {s: i for i, s in enumerate(states)}
    n = len(states)
    T = [[Fraction(0)] * n for _ in range(n)]
    for j, s in enumerate(states):
        for lab, p in probs.items():
            t = act(lab, s)
            if t not in pos:
                raise ValueError(f"action leaves the state set: {lab}·{s} = {t}")
            T[pos[t]][j] += p
    return MarkovChain(states=states, labels=tuple(labels), matrix=tuple(tuple(r) for r in T),
                       letter_probs=dict(probs))


def build_chain(S: FiniteSemigroup, probs: dict) -> MarkovChain:
    """Left-multiplication chain of ``M(S, A)`` on the first minimal left ideal of K(S)."""
    probs = validate_probs(S, probs)
    L = minimal_left_ideal(S)
    return chain_from_action(L, [S.labels[x] for x in L], probs, lambda lab, s: int(S.table[S.gen(lab), s]))


def stationary_oracle(M: MarkovChain) -> Distribution:
    """Exact solution of ``(T - I) psi = 0``, ``sum(psi) = 1``."""
    n = M.n
    A = [[M.matrix[i][j] - (1 if i == j else 0) for j in range(n)] + [Fraction(0)] for i in range(n)]
    A[n - 1] = [Fraction(1)] * n + [Fraction(1)]
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col] != 0), None)
        if piv is None:
            raise SingularSystem("stationary system is singular (chain not irreducible)")
        A[col], A[piv] = A[piv], A[col]
        inv = 1 / A[col][col]
        A[col] = [x * inv for x in A[col]]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return Distribution({M.labels[i]: A[i][n] for i in range(n)})


def lump_distribution(d: dict, proj) -> dict:
    """Block sums of ``d`` over the fibres of ``proj``."""
    out: dict = {}
    for k, v in d.items():
        c = proj(k)
        out[c] = out[c] + v if c in out else v
    return out


def check_lumpable(M: MarkovChain, partition) -> bool:
    """Column-sum condition for lumping ``M`` along ``partition`` (blocks of states)."""
    pos = {s: i for i, s in enumerate(M.states)}
    blocks = [[pos[s] for s in block] for block in partition]
    seen = sorted(i for b in blocks for i in b)
    if seen != list(range(M.n)):
        raise ValueError("partition does not cover the state set exactly once")
    for Bi in blocks:
        for Bj in blocks:
            sums = {sum((M.matrix[t][s] for t in Bj), Fraction(0)) for s in Bi}
            if len(sums) > 1:
                return False
    return True


def kr_chain(K: KRGraph, probs: dict) -> MarkovChain:
    """Left action of the letters on K(KR): ``a · v`` is the class of ``a`` followed by a word for ``v``."""
    S = K.semigroup
    probs = validate_probs(S, probs)
    states = sorted(K.minimal_ideal())
    return chain_from_action(states, [K.name(v) for v in states], probs,
                             lambda lab, v: K.walk((lab,) + K.words[v]))


def kr_partition(K: KRGraph, strip: str | None = None) -> list:
    """Blocks of K(KR) by their class in S: the element of the vertex word,
    after removing trailing ``strip`` letters (None marks the root class)."""
    S = K.semigroup
    blocks: dict = {}
    for v in sorted(K.minimal_ideal()):
        word = K.words[v]
        if strip is not None:
            while word and word[-1] == strip:
                word = word[:-1]
        key = eval_word(S, word) if word else None
        blocks.setdefault(key, []).append(v)
    return [blocks[k] for k in sorted(blocks, key=lambda k: -1 if k is None else k)]


# ---------------------------------------------------------------------------
# the loop-graph pipeline


@dataclass(frozen=True, eq=False)
class StationaryResult:
    distribution: Distribution  # over the first minimal left ideal of K(S)
    flat: bool
    semigroup: FiniteSemigroup  # the semigroup the expansions were built on
    kr: KRGraph
    mc: McGraph
    targets: tuple  # Mc tree vertices projecting into K(KR)
    symbolic: dict  # normal-form word -> RatFunc (in t when flat)
    values: dict  # normal-form word -> Fraction (limit t -> 0 when flat)
    kr_values: dict = field(default_factory=dict)  # KR vertex -> Fraction


def letter_weights(S: FiniteSemigroup, probs: dict, flat: bool, zero_label: str | None = None) -> dict:
    """``x_a = p_a`` or, for the flat operation, ``x_a = (1-t) p_a`` and ``x_□ = t``."""
    if not flat:
        return {lab: RatFunc.const(p) for lab, p in probs.items()}
    t = RatFunc.var()
    one_minus_t = RatFunc.const(1) - t
    w = {lab: one_minus_t * p for lab, p in probs.items()}
    w[zero_label] = t
    return w


def stationary_semigroup(
    S: FiniteSemigroup,
    probs: dict,
    flat: str = "auto",
    method: str = "shared",
    kr_cap: int = DEFAULT_KR_CAP,
    mc_cap: int = DEFAULT_MC_CAP,
    recursion_cap: int = DEFAULT_RECURSION_CAP,
) -> StationaryResult:
    """Stationary distribution of ``M(S, A)`` from normal distributions of loop graphs.

    ``flat`` is ``auto`` (adjoin □ only when K(S) is not left zero), ``force``
    or ``off``.  ``method="pict"`` materializes every Pict loop graph;
    ``method="shared"`` builds the identical Kleene expressions with shared
    subterms, which is much cheaper on larger graphs.
    """
    probs = validate_probs(S, probs)
    K = minimal_ideal(S)
    left_zero = is_left_zero(S, K)
    if flat not in ("auto", "force", "off"):
        raise ValueError(f"flat must be auto, force or off, not {flat!r}")
    if flat == "off" and not left_zero:
        raise NotLeftZero("K(S) is not left zero; the flat operation is required")
    use_flat = flat == "force" or (flat == "auto" and not left_zero)

    T = adjoin_zero(S) if use_flat else S
    zero_label = T.letters[-1] if use_flat else None
    weights = letter_weights(T, probs, use_flat, zero_label)

    kr = kr_expand(right_cayley(T), cap=kr_cap)
    ideal = kr.minimal_ideal()
    mc = mc_expand(kr, absorbing=ideal, cap=mc_cap)
    targets = tuple(p for p in range(mc.n_vertices) if mc.tau(p) in ideal)
    graph = mc.as_digraph()

    symbolic = {}
    if method == "shared":
        exprs = PictExpressions(graph)
        memo: dict = {}
        for p in targets:
            symbolic[mc.words[p]] = eval_expr(exprs.expression_to(p), weights, memo)
    elif method == "pict":
        for p in targets:
            lg = pict(graph, _tree_path(mc, p), max_depth=recursion_cap)
            symbolic[mc.words[p]] = eval_expr(kleene_of_loopgraph(lg), weights)
    else:
        raise ValueError(f"unknown method {method!r}")

    values = {}
    for w, f in symbolic.items():
        values[w] = rf_limit_at_zero(f) if use_flat else f.constant_value()

    # sum over tree vertices with the same KR endpoint, then lump to S
    kr_values = lump_distribution({p: values[mc.words[p]] for p in targets}, mc.tau)

    e = idempotent_in(S, minimal_left_ideal(S, K))
    L = minimal_left_ideal(S, K)
    dist = {x: Fraction(0) for x in L}
    for p in targets:
        v = values[mc.words[p]]
        word = mc.words[p]
        if use_flat:
            while word and word[-1] == zero_label:
                word = word[:-1]
        if not word:
            if v != 0:
                raise PipelineMismatch(f"root class carries mass {v}")
            continue
        x = eval_word(S, word)
        if x not in K:
            if v != 0:
                raise PipelineMismatch(f"mass {v} outside K(S) at {S.labels[x]}")
            continue
        # x -> x e maps every minimal left ideal isomorphically onto L
        dist[int(S.table[x, e])] += v
    distribution = Distribution({S.labels[x]: dist[x] for x in L})
    if distribution.total() != 1:
        raise PipelineMismatch(f"pipeline distribution sums to {distribution.total()}")
    return StationaryResult(
        distribution=distribution, flat=use_flat, semigroup=T, kr=kr, mc=mc, targets=targets,
        symbolic=symbolic, values=values, kr_values=kr_values,
    )


def _tree_path(mc: McGraph, p: int) -> list:
    out = [p]
    while mc.parent[out[-1]] >= 0:
        out.append(mc.parent[out[-1]])
    return out[::-1]


def compare_with_oracle(S: FiniteSemigroup, probs: dict, **kw):
    """``(pipeline, oracle, equal)`` for one semigroup and probability vector."""
    res = stationary_semigroup(S, probs, **kw)
    oracle = stationary_oracle(build_chain(S, probs))
    return res, oracle, dict(res.distribution.values) == dict(oracle.values)
