import pytest

from bisem.cli import main
from bisem.core import example_a, group_with_zero, cyclic_group
from bisem.formats import dump_cayley, dump_graph

from conftest import GRAPHS, semigroup

I2_GENS = "points 2\nswap: 1->2 2->1\nfix: 1->1\n"
LOOP_EXIT = "vertex v\nvertex w\nedge e: v -> v\nedge f: v -> w\n"


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        p = tmp_path / name
        p.write_text(text, encoding="utf-8")
        return str(p)
    return _write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_example_a(write, capsys):
    code, out, _ = run(capsys, "analyze", write("a.txt", dump_cayley(example_a())))
    assert "boolean: FAIL (BIS2) witness a,b\n" in out
    assert "mu: {1,u}" in out
    assert code == 2


def test_analyze_i2_generators(write, capsys):
    code, out, _ = run(capsys, "analyze", write("i2.gen", I2_GENS))
    assert code == 0
    assert "typ: free on 1 generator\n" in out
    assert "boolean: OK" in out and "inverse: OK (7 elements)" in out


def test_analyze_fork_theorem(write, capsys):
    path = write("fork.graph", dump_graph(GRAPHS["fork"]()))
    code, out, _ = run(capsys, "analyze", path, "--verify-graph-theorem")
    assert code == 0
    assert out.rstrip("\n").splitlines()[-1] == "theorem: VERIFIED (ℕ₀², a_v ↦ (1,1))"


def test_kv_format_is_deterministic(write, capsys):
    path = write("i2.gen", I2_GENS)
    _, first, _ = run(capsys, "analyze", path, "--format", "kv")
    _, second, _ = run(capsys, "analyze", path, "--format", "kv")
    assert first == second
    assert "section: typ\nvalue: free on 1 generator\n" in first
    assert first.endswith("status: ok\n")


def test_timing_goes_to_stderr(write, capsys):
    code, out, err = run(capsys, "analyze", write("i2.gen", I2_GENS), "--timing")
    assert code == 0 and "time verify:" in err and "time" not in out


def test_typ_word_problem(write, capsys):
    path = write("i3.gen", "points 3\na: 1->2 2->3 3->1\nb: 1->2 2->1 3->3\nc: 1->1 2->2\n")
    code, out, _ = run(capsys, "typ", path, "--word", "3,0,0", "--word", "0,0,1")
    assert code == 0
    assert "verdict: equal (2-step trace)" in out
    steps = [line for line in out.splitlines() if line.startswith("step ")]
    assert steps == ["step 1: relation 1 -> 1 1 0", "step 2: relation 2 -> 0 0 1"]


def test_typ_distinct_on_free_monoid(write, capsys):
    path = write("free.pres", "monoid 2\nx y\n")
    code, out, _ = run(capsys, "typ", path, "--word", "1,0", "--word", "0,1")
    assert code == 0 and "verdict: distinct" in out


def test_typ_loop_and_exit(write, capsys):
    path = write("loop.graph", LOOP_EXIT)
    code, out, _ = run(capsys, "typ", path, "--word", "1,0", "--word", "1,1")
    assert code == 0 and "verdict: equal" in out
    code, out, _ = run(capsys, "typ", path, "--word", "1,0", "--word", "0,1", "--budget", "20")
    assert "verdict: unknown" in out


def test_typ_bad_vector(write, capsys):
    path = write("free.pres", "monoid 2\nx y\n")
    code, _, err = run(capsys, "typ", path, "--word", "1", "--word", "0,1")
    assert code == 1 and "error:" in err


def test_decompose(write, capsys):
    path = write("z2.txt", dump_cayley(group_with_zero(cyclic_group(2))))
    code, out, _ = run(capsys, "decompose", path)
    assert code == 0
    assert "block: 1 x 1 rook matrices over Z2" in out and "fundamental: no" in out


def test_graph_verb_and_cycle(write, capsys):
    code, out, _ = run(capsys, "graph", write("d.graph", dump_graph(GRAPHS["double"]())))
    assert code == 0 and "normal_form: a_v = (2)" in out
    code, _, err = run(capsys, "verify-graph", write("loop.graph", LOOP_EXIT))
    assert code == 1 and "cycle" in err


def test_verify_graph(write, capsys):
    code, out, _ = run(capsys, "verify-graph", write("c.graph", dump_graph(GRAPHS["chain"]())))
    assert code == 0
    assert "theorem: VERIFIED (ℕ₀, a_v ↦ (1), a_u ↦ (1))" in out


def test_verify_rook(write, capsys):
    path = write("i2.txt", dump_cayley(semigroup("I2")))
    code, out, _ = run(capsys, "verify-rook", path)
    assert code == 0
    assert "rook: M_2 has 209 elements" in out and "theorem: VERIFIED at k=2" in out
    code, out, _ = run(capsys, "verify-rook", path, "--dim", "1")
    assert code == 0 and "M_1 has 7 elements" in out


def test_verify_rook_needs_boolean(write, capsys):
    code, out, _ = run(capsys, "verify-rook", write("a.txt", dump_cayley(example_a())))
    assert code == 2 and "rook: FAIL not Boolean (BIS2) witness a,b" in out


def test_export_dot(write, capsys):
    code, out, _ = run(capsys, "export-dot", write("i2.gen", I2_GENS))
    assert code == 0 and out.startswith("digraph") and out.count("->") == 2
    code, out, _ = run(capsys, "export-dot", write("fork.graph", dump_graph(GRAPHS["fork"]())))
    assert code == 0 and out.count("subgraph cluster_") == 2


def test_parse_error_exit_code(write, capsys):
    code, _, err = run(capsys, "analyze", write("bad.txt", "semigroup 2\nzero x\n"))
    assert code == 1 and "parse error: line 2, col 6" in err


def test_usage_errors(write, capsys):
    assert run(capsys, "analyze", "/nonexistent/file")[0] == 1
    assert run(capsys, "frobnicate", "x")[0] == 1
    assert run(capsys, "analyze", write("c.cong", "congruence\n0\n"))[0] == 1


def test_max_elements_budget(write, capsys):
    code, _, err = run(capsys, "analyze", write("i3.gen", "points 3\na: 1->2 2->3 3->1\nb: 1->2 2->1 3->3\nc: 1->1 2->2\n"),
                       "--max-elements", "10")
    assert code == 2 and "budget" in err


def test_certified_header_is_checked(write, capsys):
    text = "boolean certified\n" + dump_cayley(example_a())
    code, out, _ = run(capsys, "analyze", write("a.txt", text))
    assert code == 2 and "certified: FAIL" in out
