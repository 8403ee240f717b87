import json
import subprocess
import sys

import pytest

from bookemb import formats
from bookemb.cli import main, roles_path
from bookemb.satenc import dpll_solve, emit_model, parse_dimacs


@pytest.fixture
def q1(tmp_path):
    p = tmp_path / "q1.graph.json"
    assert main(["gen", "--gadget", "q1", "--out", str(p)]) == 0
    return p


def test_gen_writes_graph_and_roles(q1, capsys):
    g = formats.parse_graph_json(q1.read_bytes())
    assert g.n == 10
    roles = formats.parse_roles((q1.parent / "q1.roles.json").read_bytes())
    assert roles["center_c1"] == 4
    assert roles_path("x.graph.txt") == "x.roles.json"


def test_gen_bad_args(tmp_path, capsys):
    assert main(["gen", "--gadget", "g", "--n", "1", "--out", str(tmp_path / "g.json")]) == 2
    assert "path length" in capsys.readouterr().err


def test_gen_large_uses_text(tmp_path, capsys):
    out = tmp_path / "g.graph.txt"
    assert main(["gen", "--gadget", "g", "--n", "3", "--copies", "1", "--depth", "0", "--out", str(out)]) == 0
    assert out.read_bytes().startswith(b"bookemb ")


def test_solve_min_and_verify(q1, tmp_path, capsys):
    cert = tmp_path / "q1.cert.json"
    assert main(["solve", "--graph", str(q1), "--min", "--out", str(cert)]) == 0
    assert capsys.readouterr().out.strip() == "2"
    assert main(["verify", "--graph", str(q1), "--cert", str(cert)]) == 0
    assert capsys.readouterr().out.strip() == "ok"


def test_solve_k_exit_codes(q1, capsys):
    assert main(["solve", "--graph", str(q1), "--k", "1"]) == 20
    assert main(["solve", "--graph", str(q1), "--k", "2"]) == 0
    assert main(["solve", "--graph", str(q1), "--k", "1", "--budget-nodes", "1"]) in (20, 30)


def test_verify_reports_conflict(q1, tmp_path, capsys):
    g = formats.parse_graph_json(q1.read_bytes())
    bad = {"k": 1, "order": list(range(10)), "pages": {f"{u}-{v}": 1 for u, v in g.edges()}}
    cert = tmp_path / "bad.cert.json"
    cert.write_text(json.dumps(bad))
    assert main(["verify", "--graph", str(q1), "--cert", str(cert)]) == 1
    assert "conflict:" in capsys.readouterr().out


def test_parse_error_exit_2(tmp_path, capsys):
    p = tmp_path / "broken.graph.json"
    p.write_text('{"n": 3,\n "edges": [[0, 1], [0, 1]]}')
    assert main(["stats", "--graph", str(p)]) == 2
    assert "line" in capsys.readouterr().err


def test_encode_decode_round_trip(q1, tmp_path, capsys):
    cnf_path = tmp_path / "q1.cnf"
    assert main(["encode", "--graph", str(q1), "--k", "2", "--out", str(cnf_path)]) == 0
    cnf = parse_dimacs(cnf_path.read_text())
    res = dpll_solve(cnf)
    model = tmp_path / "q1.model"
    model.write_text(emit_model(res.model))
    cert = tmp_path / "q1.cert.json"
    assert main(["decode", "--graph", str(q1), "--cnf", str(cnf_path), "--model", str(model), "--k", "2", "--out", str(cert)]) == 0
    assert main(["verify", "--graph", str(q1), "--cert", str(cert)]) == 0
    model.write_text(emit_model([-x for x in res.model]))
    assert main(["decode", "--graph", str(q1), "--cnf", str(cnf_path), "--model", str(model), "--k", "2"]) == 1


def test_lemma_verbs(tmp_path, capsys):
    assert main(["lemma", "--list"]) == 0
    assert "lemma1_plus12" in capsys.readouterr().out
    assert main(["lemma", "--name", "nope"]) == 2
    rep = tmp_path / "r.report.json"
    cert = tmp_path / "w.cert.json"
    assert main(["lemma", "--name", "lemma1_control", "--report", str(rep), "--cert", str(cert)]) == 0
    assert formats.parse_report(rep.read_bytes())["outcome"] == "pass"
    assert cert.exists()
    assert main(["lemma", "--name", "lemma2_degenerate"]) == 20
    assert main(["lemma", "--name", "lemma3_both_centers_inside"]) == 2
    assert main(["lemma", "--name", "lemma3_both_centers_inside", "--export", str(tmp_path / "x")]) == 0
    ext = tmp_path / "ext.txt"
    ext.write_text("s UNSATISFIABLE\n")
    assert main(["lemma", "--name", "lemma3_both_centers_inside", "--external", str(ext)]) == 20


def test_draw_and_stats(q1, tmp_path, capsys):
    cert = tmp_path / "q1.cert.json"
    main(["solve", "--graph", str(q1), "--k", "3", "--out", str(cert)])
    svg = tmp_path / "q1.svg"
    assert main(["draw", "--graph", str(q1), "--cert", str(cert), "--out", str(svg), "--labels"]) == 0
    assert "center_c1" in svg.read_text()
    capsys.readouterr()
    assert main(["stats", "--graph", str(q1)]) == 0
    out = capsys.readouterr().out
    assert "nodes 10" in out and "edges 22" in out


def test_console_entry_point(q1):
    r = subprocess.run([sys.executable, "-m", "bookemb.cli", "stats", "--graph", str(q1)], capture_output=True, text=True)
    assert r.returncode == 0 and "nodes 10" in r.stdout
