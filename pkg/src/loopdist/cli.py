"""Command line front end: model files in, JSON / DOT / text out.

Model files are JSON in one of two shapes::

    {"states": 2,
     "generators": [{"name": "a", "map": [0, 0], "prob": "1/3"},
                    {"name": "b", "map": [1, 1], "prob": "2/3"}]}

    {"table": [[0, 1], [1, 0]],
     "generator_indices": {"a": 1},
     "probs": {"a": "1"}}

Probabilities are exact rational strings.  The label ``□`` (alias ``zero``)
is reserved for the generator injected by the flat operation.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction

from .cayley import CayleyGraph, right_cayley
from .errors import LoopdistError, ParseError, ValidationError
from .exactnum import RatFunc, format_value, rf_limit_at_zero
from .expand import (
    DEFAULT_KR_CAP,
    DEFAULT_MC_CAP,
    KRGraph,
    McGraph,
    kr_expand,
    mc_expand,
    semaphore_enumerate,
    word_name,
)
from .kleene import PictExpressions, eval_expr, kleene_of_loopgraph, render, zimin_eliminate
from .loopgraph import DEFAULT_RECURSION_CAP, LabeledDigraph, LoopGraph, pict
from .markov import build_chain, letter_weights, stationary_oracle, stationary_semigroup, validate_probs
from .semigroup import (
    DEFAULT_CLOSURE_CAP,
    ZERO_LABEL,
    FiniteSemigroup,
    adjoin_zero,
    close_generators,
    eval_word,
    from_table,
    is_associative,
    is_left_zero,
    minimal_ideal,
    minimal_left_ideal,
    parse_word,
)

RESERVED_NAMES = (ZERO_LABEL, "zero")
COMMANDS = ("inspect", "cayley", "kr", "mc", "pict", "kleene", "semaphore", "stationary", "verify")


# ---------------------------------------------------------------------------
# model files


@dataclass(frozen=True)
class ModelSpec:
    """Either ``states`` + ``generators`` ((name, map, prob), ...) or
    ``table`` + ``generator_indices`` ((name, index), ...) + ``probs``."""

    states: int | None = None
    generators: tuple = ()
    table: tuple | None = None
    generator_indices: tuple = ()
    probs: tuple = ()  # ((name, Fraction), ...) for the table form

    @property
    def kind(self) -> str:
        return "table" if self.table is not None else "maps"

    def probabilities(self) -> dict:
        if self.kind == "maps":
            return {name: p for name, _, p in self.generators}
        return dict(self.probs)

    def names(self) -> tuple:
        if self.kind == "maps":
            return tuple(name for name, _, _ in self.generators)
        return tuple(name for name, _ in self.generator_indices)


@dataclass(frozen=True)
class RunConfig:
    fmt: str = "json"
    flat: str = "auto"
    closure_cap: int = DEFAULT_CLOSURE_CAP
    kr_cap: int = DEFAULT_KR_CAP
    mc_cap: int = DEFAULT_MC_CAP
    recursion_cap: int = DEFAULT_RECURSION_CAP

    def __post_init__(self):
        for name in ("closure_cap", "kr_cap", "mc_cap", "recursion_cap"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be positive")
        if self.fmt not in ("json", "dot", "text"):
            raise ValidationError(f"unknown format {self.fmt!r}")
        if self.flat not in ("auto", "force", "off"):
            raise ValidationError(f"unknown flat mode {self.flat!r}")


def _field(doc: dict, key: str, where: str):
    if key not in doc:
        raise ParseError(f"{where}: missing field {key!r}")
    return doc[key]


def _int(x, where: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ParseError(f"{where}: expected an integer, got {json.dumps(x)}")
    return x


def _rational(x, where: str) -> Fraction:
    if isinstance(x, bool) or not isinstance(x, (str, int)):
        raise ParseError(f"{where}: probabilities must be rational strings like \"1/3\", got {json.dumps(x)}")
    try:
        return Fraction(x)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"{where}: cannot parse {x!r} as a rational") from None


def _name(x, where: str) -> str:
    if not isinstance(x, str) or not x or any(c.isspace() for c in x):
        raise ParseError(f"{where}: generator names must be nonempty single tokens, got {json.dumps(x)}")
    if x in RESERVED_NAMES:
        raise ValidationError(f"{where}: {x!r} is reserved for the flat-operation zero")
    return x


def parse_model(source: str) -> ModelSpec:
    """Parse and validate a model given as JSON text or a file path."""
    text = source
    if not source.lstrip().startswith("{"):
        try:
            with open(source, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise ParseError(f"cannot read model file {source!r}: {e.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"line {e.lineno}, column {e.colno}: {e.msg}") from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be a JSON object")
    if "table" in doc:
        spec = _parse_table(doc)
    elif "states" in doc:
        spec = _parse_maps(doc)
    else:
        raise ParseError("model needs either 'states' and 'generators' or 'table'")
    validate_model(spec)
    return spec


def _parse_maps(doc: dict) -> ModelSpec:
    n = _int(doc["states"], "states")
    gens = _field(doc, "generators", "model")
    if not isinstance(gens, list):
        raise ParseError("generators: expected a list")
    out = []
    for i, g in enumerate(gens):
        where = f"generators[{i}]"
        if not isinstance(g, dict):
            raise ParseError(f"{where}: expected an object")
        name = _name(_field(g, "name", where), where + ".name")
        m = _field(g, "map", where)
        if not isinstance(m, list):
            raise ParseError(f"{where}.map: expected a list")
        m = tuple(_int(x, f"{where}.map[{j}]") for j, x in enumerate(m))
        p = _rational(_field(g, "prob", where), where + ".prob")
        out.append((name, m, p))
    return ModelSpec(states=n, generators=tuple(out))


def _parse_table(doc: dict) -> ModelSpec:
    t = doc["table"]
    if not isinstance(t, list) or not all(isinstance(r, list) for r in t):
        raise ParseError("table: expected a list of rows")
    table = tuple(tuple(_int(x, f"table[{i}][{j}]") for j, x in enumerate(r)) for i, r in enumerate(t))
    gi = _field(doc, "generator_indices", "model")
    if not isinstance(gi, dict):
        raise ParseError("generator_indices: expected an object {name: index}")
    gens = tuple((_name(k, f"generator_indices.{k}"), _int(v, f"generator_indices.{k}")) for k, v in gi.items())
    pr = _field(doc, "probs", "model")
    if not isinstance(pr, dict):
        raise ParseError("probs: expected an object {name: \"p/q\"}")
    probs = tuple((k, _rational(v, f"probs.{k}")) for k, v in pr.items())
    return ModelSpec(table=table, generator_indices=gens, probs=probs)


def validate_model(spec: ModelSpec) -> None:
    names = spec.names()
    if not names:
        raise ValidationError("at least one generator is required")
    if len(set(names)) != len(names):
        raise ValidationError("generator names must be distinct")
    if spec.kind == "maps":
        n = spec.states
        if n <= 0:
            raise ValidationError("states must be positive")
        for name, m, _ in spec.generators:
            if len(m) != n:
                raise ValidationError(f"generator {name!r}: map has length {len(m)}, expected {n}")
            if any(not 0 <= x < n for x in m):
                raise ValidationError(f"generator {name!r}: map is not total on [0, {n})")
    else:
        n = len(spec.table)
        if n == 0 or any(len(r) != n for r in spec.table):
            raise ValidationError("table must be a nonempty square matrix")
        if any(not 0 <= x < n for r in spec.table for x in r):
            raise ValidationError(f"table entries must lie in [0, {n})")
        for name, g in spec.generator_indices:
            if not 0 <= g < n:
                raise ValidationError(f"generator {name!r}: index {g} out of range")
        extra = set(dict(spec.probs)) - set(names)
        if extra:
            raise ValidationError(f"probs for unknown generators: {sorted(extra)}")
        missing = set(names) - set(dict(spec.probs))
        if missing:
            raise ValidationError(f"no probability for generators: {sorted(missing)}")
    probs = spec.probabilities()
    for name in names:
        if probs[name] <= 0:
            raise ValidationError(f"probability of {name!r} must be positive")
    total = sum(probs.values(), Fraction(0))
    if total != 1:
        raise ValidationError(f"probabilities sum to {total}, not 1")


def render_model(spec: ModelSpec) -> str:
    """JSON text with ``parse_model(render_model(spec)) == spec``."""
    if spec.kind == "maps":
        doc = {
            "states": spec.states,
            "generators": [{"name": n, "map": list(m), "prob": str(p)} for n, m, p in spec.generators],
        }
    else:
        doc = {
            "table": [list(r) for r in spec.table],
            "generator_indices": dict(spec.generator_indices),
            "probs": {n: str(p) for n, p in spec.probs},
        }
    return json.dumps(doc, ensure_ascii=False, indent=1) + "\n"


def build_semigroup(spec: ModelSpec, cap: int = DEFAULT_CLOSURE_CAP) -> FiniteSemigroup:
    if spec.kind == "maps":
        return close_generators([(n, m) for n, m, _ in spec.generators], cap=cap)
    S = from_table(spec.table, list(spec.generator_indices), cap=cap)
    if not is_associative(S):
        raise ValidationError("multiplication table is not associative on the generated elements")
    return S


# ---------------------------------------------------------------------------
# DOT


def _q(s) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _dot(name: str, nodes, edges) -> str:
    """``nodes``: [(id, label, attrs)], ``edges``: [(src, dst, label, attrs)]."""
    lines = [f"digraph {_q(name)} {{", "  rankdir=LR;", "  node [shape=circle];"]
    for v, label, attrs in nodes:
        extra = "".join(f", {k}={_q(x)}" for k, x in attrs)
        lines.append(f"  n{v} [label={_q(label)}{extra}];")
    for s, d, label, attrs in edges:
        extra = "".join(f", {k}={_q(x)}" for k, x in attrs)
        lines.append(f"  n{s} -> n{d} [label={_q(label)}{extra}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def dot_export(graph) -> str:
    """Deterministic DOT for Cayley, KR, Mc and loop graphs.

    Transition edges are blue; Mc tree edges are solid and non-tree edges
    dashed red; loop graph spines are bold.
    """
    if isinstance(graph, CayleyGraph):
        letters = graph.semigroup.letters
        nodes = [(v, graph.vertex_name(v), ()) for v in range(graph.n_vertices)]
        edges = [
            (s, d, letters[a], (("color", "blue"), ("style", "bold")) if graph.is_transition(e) else ())
            for e, s, a, d in graph.edges()
        ]
        return _dot("cayley", nodes, edges)
    if isinstance(graph, KRGraph):
        letters = graph.letters
        G = graph.cayley
        nodes = [(v, graph.name(v), (("shape", "doublecircle"),) if v in graph.minimal_ideal() else ())
                 for v in range(graph.n_vertices)]
        edges = []
        for v in range(graph.n_vertices):
            cv = graph.projection(v)
            for a in range(len(letters)):
                tr = G.is_transition(G.edge_id(cv, a))
                edges.append((v, int(graph.succ[v, a]), letters[a],
                              (("color", "blue"), ("style", "bold")) if tr else ()))
        return _dot("kr", nodes, edges)
    if isinstance(graph, McGraph):
        letters = graph.letters
        absorbing = graph.absorbing or frozenset()
        nodes = [(p, graph.name(p), (("shape", "doublecircle"),) if graph.tau(p) in absorbing else ())
                 for p in range(graph.n_vertices)]
        edges = [
            (p, q, letters[a], (("style", "solid"),) if tree else (("style", "dashed"), ("color", "red")))
            for p, a, q, tree in graph.edges()
        ]
        return _dot("mc", nodes, edges)
    if isinstance(graph, LoopGraph):
        nodes = [(v, graph.names[v], (("shape", "doublecircle"),) if v == graph.end else ())
                 for v in range(graph.n_vertices)]
        edges = [(u, v, lab, (("style", "bold"),)) for u, lab, v in zip(graph.spine, graph.spine_labels, graph.spine[1:])]
        for lp in graph.all_loops():
            prev = lp.attach
            for i, (lab, v) in enumerate(lp.steps):
                last = i == len(lp.steps) - 1
                edges.append((prev, v, lab, (("style", "dashed"),) if last else ()))
                prev = v
        return _dot("pict", nodes, edges)
    if isinstance(graph, LabeledDigraph):
        nodes = [(v, graph.names[v], ()) for v in range(graph.n_vertices)]
        return _dot("graph", nodes, [(s, d, lab, ()) for s, lab, d in graph.edges])
    raise TypeError(f"cannot export {type(graph).__name__} to DOT")


# ---------------------------------------------------------------------------
# commands


class Context:
    """Lazily built pipeline objects for one model and config."""

    def __init__(self, spec: ModelSpec, cfg: RunConfig):
        self.spec = spec
        self.cfg = cfg
        self.S = build_semigroup(spec, cfg.closure_cap)
        self.probs = validate_probs(self.S, spec.probabilities())
        self.K = minimal_ideal(self.S)
        self.left_zero = is_left_zero(self.S, self.K)
        self.flat = cfg.flat == "force" or (cfg.flat == "auto" and not self.left_zero)
        self.T = adjoin_zero(self.S) if self.flat else self.S
        self._cayley = self._kr = self._mc = None

    @property
    def cayley(self):
        if self._cayley is None:
            self._cayley = right_cayley(self.T)
        return self._cayley

    @property
    def kr(self):
        if self._kr is None:
            self._kr = kr_expand(self.cayley, cap=self.cfg.kr_cap)
        return self._kr

    @property
    def mc(self):
        if self._mc is None:
            self._mc = mc_expand(self.kr, absorbing=self.kr.minimal_ideal(), cap=self.cfg.mc_cap)
        return self._mc

    def weights(self):
        return letter_weights(self.T, self.probs, self.flat, self.T.letters[-1] if self.flat else None)

    def target(self, text: str | None) -> int:
        if text is None:
            raise ValidationError("this command needs --target WORD")
        return self.mc.find(parse_word(self.T, text))


def _graph_json(names, edges, **extra) -> dict:
    return {"vertices": list(names),
            "edges": [dict(src=names[s], label=lab, dst=names[d], **x) for s, lab, d, x in edges], **extra}


def _value_json(f) -> str:
    if isinstance(f, RatFunc):
        return str(f) if not f.is_constant() else format_value(f.constant_value())
    return format_value(f)


def cmd_inspect(ctx: Context, args):
    S = ctx.S
    L = minimal_left_ideal(S, ctx.K)
    info = {
        "size": S.size,
        "generators": list(S.letters),
        "elements": list(S.labels),
        "minimal_ideal": [S.labels[x] for x in sorted(ctx.K)],
        "left_zero": ctx.left_zero,
        "minimal_left_ideal": [S.labels[x] for x in L],
        "flat": ctx.flat,
    }
    if ctx.cfg.fmt == "text":
        return "\n".join([
            f"|S| = {S.size}",
            f"generators: {' '.join(S.letters)}",
            f"K(S) = {{{', '.join(info['minimal_ideal'])}}} ({len(ctx.K)} elements)",
            f"left zero: {'yes' if ctx.left_zero else 'no'}",
            f"flat operation: {'on' if ctx.flat else 'off'}",
        ]) + "\n"
    return info


def cmd_cayley(ctx: Context, args):
    G = ctx.cayley
    if ctx.cfg.fmt == "dot":
        return dot_export(G)
    letters = G.semigroup.letters
    names = [G.vertex_name(v) for v in range(G.n_vertices)]
    edges = [(s, letters[a], d, {"transition": G.is_transition(e)}) for e, s, a, d in G.edges()]
    if ctx.cfg.fmt == "text":
        return _edge_text(names, edges, "transition")
    return _graph_json(names, edges)


def cmd_kr(ctx: Context, args):
    K = ctx.kr
    if ctx.cfg.fmt == "dot":
        return dot_export(K)
    names = [K.name(v) for v in range(K.n_vertices)]
    letters = K.letters
    edges = [(v, letters[a], int(K.succ[v, a]), {}) for v in range(K.n_vertices) for a in range(len(letters))]
    ideal = sorted(K.minimal_ideal())
    if ctx.cfg.fmt == "text":
        return f"{K.n_vertices} vertices, {len(ideal)} in K(KR)\n" + _edge_text(names, edges, None)
    return _graph_json(names, edges, minimal_ideal=[names[v] for v in ideal])


def cmd_mc(ctx: Context, args):
    M = ctx.mc
    if ctx.cfg.fmt == "dot":
        return dot_export(M)
    names = [M.name(p) for p in range(M.n_vertices)]
    letters = M.letters
    edges = [(p, letters[a], q, {"tree": tree}) for p, a, q, tree in M.edges()]
    if ctx.cfg.fmt == "text":
        head = f"{M.n_vertices} vertices, {M.n_vertices - 1} tree edges, {len(edges)} edges\n"
        return head + _edge_text(names, edges, "tree")
    return _graph_json(names, edges)


def _edge_text(names, edges, flag) -> str:
    out = []
    for s, lab, d, x in edges:
        mark = f"  [{flag}]" if flag and x.get(flag) else ""
        out.append(f"{names[s]} -{lab}-> {names[d]}{mark}")
    return "\n".join(out) + "\n"


def _tree_path(M: McGraph, p: int) -> list:
    out = [p]
    while M.parent[out[-1]] >= 0:
        out.append(M.parent[out[-1]])
    return out[::-1]


def cmd_pict(ctx: Context, args):
    M = ctx.mc
    p = ctx.target(args.target)
    L = pict(M.as_digraph(), _tree_path(M, p), max_depth=ctx.cfg.recursion_cap)
    if ctx.cfg.fmt == "dot":
        return dot_export(L)
    names = L.names
    if ctx.cfg.fmt == "text":
        lines = ["spine: " + " ".join(
            [names[L.spine[0]]] + [f"-{lab}-> {names[v]}" for lab, v in zip(L.spine_labels, L.spine[1:])])]
        for lp in L.all_loops():
            lines.append(f"loop at {names[lp.attach]}: " + " ".join(f"-{lab}-> {names[v]}" for lab, v in lp.steps))
        return "\n".join(lines) + "\n"
    return {
        "target": M.name(p),
        "vertices": list(names),
        "spine": [names[v] for v in L.spine],
        "spine_labels": list(L.spine_labels),
        "loops": [{"attach": names[lp.attach], "labels": list(lp.labels), "vertices": [names[v] for _, v in lp.steps]}
                  for lp in L.all_loops()],
    }


def cmd_kleene(ctx: Context, args):
    M = ctx.mc
    p = ctx.target(args.target)
    if args.literal:
        e = kleene_of_loopgraph(pict(M.as_digraph(), _tree_path(M, p), max_depth=ctx.cfg.recursion_cap))
    else:
        e = PictExpressions(M.as_digraph()).expression_to(p)
    if args.zimin:
        e = zimin_eliminate(e)
    text = render(e)
    if ctx.cfg.fmt == "text":
        return text + "\n"
    val = eval_expr(e, ctx.weights())
    out = {"target": M.name(p), "expression": text, "value": _value_json(val)}
    if ctx.flat:
        out["limit"] = format_value(rf_limit_at_zero(val))
    return out


def cmd_semaphore(ctx: Context, args):
    if args.max_len is None:
        raise ValidationError("semaphore needs --max-len N")
    S = ctx.S
    words = semaphore_enumerate(S, args.max_len)
    rows = []
    for w in words:
        weight = Fraction(1)
        for lab in w:
            weight *= ctx.probs[lab]
        rows.append({"word": word_name(w), "element": S.labels[eval_word(S, w)], "weight": format_value(weight)})
    if ctx.cfg.fmt == "text":
        return "".join(f"{r['word']}\t{r['element']}\t{r['weight']}\n" for r in rows)
    return {"max_len": args.max_len, "left_zero": ctx.left_zero, "words": rows}


def _stationary(ctx: Context):
    return stationary_semigroup(
        ctx.S, ctx.probs, flat=ctx.cfg.flat, kr_cap=ctx.cfg.kr_cap, mc_cap=ctx.cfg.mc_cap,
        recursion_cap=ctx.cfg.recursion_cap,
    )


def cmd_stationary(ctx: Context, args):
    d = _stationary(ctx).distribution.as_strings()
    if ctx.cfg.fmt == "text":
        return "".join(f"{k}\t{v}\n" for k, v in d.items())
    return d


def cmd_verify(ctx: Context, args):
    pipe = _stationary(ctx).distribution
    oracle = stationary_oracle(build_chain(ctx.S, ctx.probs))
    ok = dict(pipe.values) == dict(oracle.values)
    n = len(oracle)
    vals = set(oracle.values.values())
    summary = f"pipeline {'==' if ok else '!='} oracle, {n} states"
    if len(vals) == 1:
        summary += f", uniform {format_value(next(iter(vals)))}"
    report = {"ok": ok, "summary": summary, "pipeline": pipe.as_strings(), "oracle": oracle.as_strings()}
    if ctx.cfg.fmt == "text":
        return summary + "\n", 0 if ok else 1
    return report, 0 if ok else 1


HANDLERS = {
    "inspect": cmd_inspect, "cayley": cmd_cayley, "kr": cmd_kr, "mc": cmd_mc, "pict": cmd_pict,
    "kleene": cmd_kleene, "semaphore": cmd_semaphore, "stationary": cmd_stationary, "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="loopdist", description="Exact stationary distributions via loop graphs.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("model", help="model JSON file ('-' for stdin)")
    ap.add_argument("--target", help="McCammond tree vertex as a word, e.g. ab□ or abzero")
    ap.add_argument("--max-len", type=int, help="longest semaphore word to list")
    ap.add_argument("--format", dest="fmt", choices=("json", "dot", "text"), default="json")
    ap.add_argument("--flat", choices=("auto", "force", "off"), default="auto")
    ap.add_argument("--cap-closure", type=int, default=DEFAULT_CLOSURE_CAP)
    ap.add_argument("--cap-kr", type=int, default=DEFAULT_KR_CAP)
    ap.add_argument("--cap-mc", type=int, default=DEFAULT_MC_CAP)
    ap.add_argument("--cap-recursion", type=int, default=DEFAULT_RECURSION_CAP)
    ap.add_argument("--zimin", action="store_true", help="kleene: eliminate unions under stars")
    ap.add_argument("--literal", action="store_true", help="kleene: build the Pict loop graph explicitly")
    return ap


def run(command: str, spec: ModelSpec, cfg: RunConfig, args) -> tuple:
    """Returns ``(text, exit_status)``."""
    out = HANDLERS[command](Context(spec, cfg), args)
    status = 0
    if isinstance(out, tuple):
        out, status = out
    if not isinstance(out, str):
        out = json.dumps(out, ensure_ascii=False, indent=2) + "\n"
    return out, status


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        source = sys.stdin.read() if args.model == "-" else args.model
        spec = parse_model(source)
        cfg = RunConfig(fmt=args.fmt, flat=args.flat, closure_cap=args.cap_closure, kr_cap=args.cap_kr,
                        mc_cap=args.cap_mc, recursion_cap=args.cap_recursion)
        if cfg.fmt == "dot" and args.command not in ("cayley", "kr", "mc", "pict"):
            raise ValidationError(f"--format dot is only available for graph commands, not {args.command!r}")
        text, status = run(args.command, spec, cfg, args)
    except (LoopdistError, KeyError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else str(e)
        sys.stdout.write(json.dumps({"error": type(e).__name__, "message": msg}, ensure_ascii=False) + "\n")
        return 2
    sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
