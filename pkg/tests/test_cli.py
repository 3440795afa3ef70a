import json
import re
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from loopdist.cayley import right_cayley
from loopdist.cli import (
    ModelSpec,
    RunConfig,
    build_semigroup,
    dot_export,
    main,
    parse_model,
    render_model,
)
from loopdist.errors import ParseError, ValidationError
from loopdist.expand import kr_expand, mc_expand
from loopdist.loopgraph import LoopGraphBuilder
from loopdist.models import constant_maps, klein_with_zero

MODELS = Path(__file__).resolve().parent.parent / "models"
CONST = '{"states":2,"generators":[{"name":"a","map":[0,0],"prob":"1/3"},{"name":"b","map":[1,1],"prob":"2/3"}]}'


def run_cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, out


def test_parse_constant_maps():
    spec = parse_model(CONST)
    assert spec.kind == "maps"
    assert spec.probabilities() == {"a": Fraction(1, 3), "b": Fraction(2, 3)}
    assert build_semigroup(spec).size == 2


def test_parse_klein_table_file():
    spec = parse_model(str(MODELS / "klein.json"))
    assert spec.kind == "table"
    assert build_semigroup(spec).size == 4


@pytest.mark.parametrize("text, err", [
    ('{"states":2,"generators":[{"name":"a","map":[0,0],"prob":"1/3"},{"name":"b","map":[1,1],"prob":"1/3"}]}',
     ValidationError),
    ('{"states":2,"generators":[{"name":"a","map":[0,2],"prob":"1"}]}', ValidationError),
    ('{"states":2,"generators":[{"name":"a","map":[0],"prob":"1"}]}', ValidationError),
    ('{"states":2,"generators":[{"name":"a","map":[0,1],"prob":0.5},{"name":"b","map":[0,1],"prob":0.5}]}',
     ParseError),
    ('{"states":2,"generators":[{"name":"a b","map":[0,1],"prob":"1"}]}', ParseError),
    ('{"states":2,"generators":[{"name":"□","map":[0,1],"prob":"1"}]}', ValidationError),
    ('{"states":2,"generators":[{"name":"a","map":[0,1],"prob":"1"},{"name":"a","map":[1,0],"prob":"0"}]}',
     ValidationError),
    ('{"states":2,"generators":[{"map":[0,1],"prob":"1"}]}', ParseError),
    ('{"table":[[0,1],[1,0]],"generator_indices":{"a":1},"probs":{"a":"1","b":"0"}}', ValidationError),
    ('{"table":[[0,1],[1]],"generator_indices":{"a":1},"probs":{"a":"1"}}', ValidationError),
    ('{"foo":1}', ParseError),
    ('[1,2]', ParseError),
])
def test_parse_errors(text, err):
    with pytest.raises(err):
        parse_model(text)


def test_parse_error_reports_line():
    with pytest.raises(ParseError, match="line 3"):
        parse_model('{"states": 2,\n "generators": [\n  {"name": "a",, }]}')


def test_non_associative_table():
    spec = parse_model('{"table":[[1,0],[0,0]],"generator_indices":{"a":0},"probs":{"a":"1"}}')
    with pytest.raises(ValidationError):
        build_semigroup(spec)


def test_run_config_validation():
    with pytest.raises(ValidationError):
        RunConfig(mc_cap=0)
    with pytest.raises(ValidationError):
        RunConfig(fmt="xml")


names = st.text(alphabet="abcdefgh", min_size=1, max_size=3)


@st.composite
def specs(draw):
    if draw(st.booleans()):
        n = draw(st.integers(1, 4))
        labels = draw(st.lists(names, min_size=1, max_size=3, unique=True))
        ws = [draw(st.integers(1, 9)) for _ in labels]
        gens = tuple((lab, tuple(draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n))),
                      Fraction(w, sum(ws))) for lab, w in zip(labels, ws))
        return ModelSpec(states=n, generators=gens)
    n = draw(st.integers(1, 3))
    table = tuple(tuple(draw(st.integers(0, n - 1)) for _ in range(n)) for _ in range(n))
    labels = draw(st.lists(names, min_size=1, max_size=2, unique=True))
    ws = [draw(st.integers(1, 9)) for _ in labels]
    return ModelSpec(table=table, generator_indices=tuple((lab, draw(st.integers(0, n - 1))) for lab in labels),
                     probs=tuple((lab, Fraction(w, sum(ws))) for lab, w in zip(labels, ws)))


@given(specs())
def test_render_round_trip(spec):
    assert parse_model(render_model(spec)) == spec


def test_dot_constant_maps():
    dot = dot_export(right_cayley(constant_maps()))
    assert dot.startswith('digraph "cayley" {')
    assert dot.count("[label=") == 3 + 6
    assert dot.count(" -> ") == 6
    assert dot.count('color="blue"') == 2


def test_dot_klein_mc():
    K = kr_expand(right_cayley(klein_with_zero()))
    M = mc_expand(K, absorbing=K.minimal_ideal())
    dot = dot_export(M)
    node_lines = [l for l in dot.splitlines() if re.match(r"\s*n\d+ \[", l) and "->" not in l]
    assert len(node_lines) == 30
    assert dot.count('style="solid"') == 29
    assert dot.count('style="dashed"') == sum(1 for *_, tree in M.edges() if not tree)
    assert dot == dot_export(M)
    assert dot_export(K).count(" -> ") == 18 * 3


def test_dot_spine_only_loop_graph():
    b = LoopGraphBuilder()
    b.extend_spine(["a"])
    dot = dot_export(b.build())
    assert dot.count(" -> ") == 1
    assert len([l for l in dot.splitlines() if "[label=" in l and "->" not in l]) == 2


def test_dot_rejects_unknown():
    with pytest.raises(TypeError):
        dot_export(42)


def test_cli_stationary_constant_maps(capsys, tmp_path):
    p = tmp_path / "m.json"
    p.write_text(CONST)
    code, out = run_cli(capsys, "stationary", p)
    assert code == 0
    assert json.loads(out) == {"a": "1/3", "b": "2/3"}


def test_cli_verify_klein(capsys):
    code, out = run_cli(capsys, "verify", MODELS / "klein.json", "--format", "text")
    assert code == 0
    assert out.strip() == "pipeline == oracle, 4 states, uniform 1/4"


def test_cli_kleene_klein(capsys):
    code, out = run_cli(capsys, "kleene", MODELS / "klein.json", "--target", "ab□")
    doc = json.loads(out)
    assert code == 0
    assert doc["limit"] == "3/32"
    assert doc["expression"].startswith("a{") and doc["expression"].endswith("b(a(bb)*a)*□")
    code, out = run_cli(capsys, "kleene", MODELS / "klein.json", "--target", "abzero", "--zimin",
                        "--format", "text")
    assert "{" not in out


def test_cli_inspect(capsys):
    code, out = run_cli(capsys, "inspect", MODELS / "klein.json")
    doc = json.loads(out)
    assert doc["size"] == 4 and doc["left_zero"] is False and len(doc["minimal_ideal"]) == 4


def test_cli_graph_commands(capsys):
    for cmd in ("cayley", "kr", "mc"):
        for fmt in ("json", "dot", "text"):
            code, out = run_cli(capsys, cmd, MODELS / "klein.json", "--format", fmt)
            assert code == 0 and out
    code, out = run_cli(capsys, "mc", MODELS / "klein.json")
    assert len(json.loads(out)["vertices"]) == 30
    code, out = run_cli(capsys, "pict", MODELS / "klein.json", "--target", "ab□", "--format", "dot")
    assert code == 0 and out.startswith('digraph "pict"')
    code, out = run_cli(capsys, "pict", MODELS / "klein.json", "--target", "ab□")
    assert json.loads(out)["spine_labels"] == ["a", "b", "□"]


def test_cli_semaphore(capsys):
    code, out = run_cli(capsys, "semaphore", MODELS / "constant_maps.json", "--max-len", "3")
    doc = json.loads(out)
    assert [r["word"] for r in doc["words"]] == ["a", "b"]


def test_cli_errors_are_json(capsys):
    code, out = run_cli(capsys, "pict", MODELS / "klein.json", "--target", "zz")
    assert code == 2
    assert json.loads(out)["error"] == "UnknownLabel"
    code, out = run_cli(capsys, "pict", MODELS / "klein.json")
    assert code == 2 and json.loads(out)["error"] == "ValidationError"
    code, out = run_cli(capsys, "stationary", MODELS / "klein.json", "--flat", "off")
    assert code == 2 and json.loads(out)["error"] == "NotLeftZero"
    code, out = run_cli(capsys, "stationary", "/nonexistent.json")
    assert code == 2 and json.loads(out)["error"] == "ParseError"
    code, out = run_cli(capsys, "mc", MODELS / "klein.json", "--cap-mc", "5")
    assert code == 2 and json.loads(out)["error"] == "VertexCapExceeded"
    code, out = run_cli(capsys, "stationary", MODELS / "klein.json", "--format", "dot")
    assert code == 2


def test_cli_output_is_deterministic(capsys):
    outs = [run_cli(capsys, "mc", MODELS / "klein.json", "--format", "dot")[1] for _ in range(2)]
    assert outs[0] == outs[1]
