import json
from pathlib import Path

import pytest

from modaltw import cli

HERE = Path(__file__).parent
FIX = HERE / "fixtures"
GOLDEN = HERE / "golden"
FIG1 = str(FIX / "fig1.mf")


def run(capsys, *argv):
    code = cli.run([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def js(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    return json.loads(out)


@pytest.mark.parametrize(
    "golden, argv",
    [
        ("structure_fig1.json", ["structure", FIG1]),
        ("structure_fig1_pv.json", ["structure", "--pv-mode", FIG1]),
        ("decompose_fig1_minfill.json", ["decompose", "--minfill", FIG1]),
        ("decompose_small_exact.json", ["decompose", "--exact", "-e", "(q | []r) & <>~q"]),
        (
            "reduce_pwsat_small.json",
            ["reduce", "pwsat-to-modal", FIX / "pwsat_small.json", "--pd", FIX / "pwsat_small_pd.json"],
        ),
        ("reduce_nlcp_edge.json", ["reduce", "nlcp-to-pwsat", FIX / "nlcp_edge.json"]),
    ],
)
def test_golden_outputs(capsys, golden, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert out == (GOLDEN / golden).read_text()


def test_structure_fig1_relations(capsys, fig1_labels):
    data = js(capsys, "structure", FIG1)
    assert data["md"] == 1
    lab = fig1_labels["labels"]
    oc = {tuple(p) for p in data["oc"]}
    assert (lab["e1"], lab["e9"]) in oc and (lab["e10"], lab["e8"]) in oc


def test_reduce_has_depth_two(capsys):
    data = js(capsys, "reduce", "pwsat-to-modal", FIX / "pwsat_small.json", "--pd", FIX / "pwsat_small_pd.json")
    assert data["modalDepth"] == 2


def test_reduce_with_pd_reports_bound(capsys):
    data = js(capsys, "reduce", "pwsat-to-modal", FIX / "pwsat_small.json", "--with-pd")
    assert data["structurePdWidth"] <= data["widthBound"]


def test_solve_all_engines_fig1(capsys):
    data = js(capsys, "solve", "--class", "general", "--engine", "all", FIG1)
    assert data["sat"] is True
    assert len(data["engines"]) == 3
    assert all(e["sat"] is True for e in data["engines"])


def test_solve_exit_codes(capsys):
    assert run(capsys, "solve", "--exitcode-verdict", "-e", "q")[0] == 10
    assert run(capsys, "solve", "--exitcode-verdict", "-e", "q & ~q")[0] == 20
    assert run(capsys, "solve", "--class", "reflexive", "--engine", "oracle", "--exitcode-verdict", "-e", "q & ~q")[0] == 30
    assert run(capsys, "solve", "-e", "q & ~q")[0] == 0


def test_solve_classes(capsys):
    box = ["-e", "[]false"]
    assert js(capsys, "solve", "--class", "euclid", *box)["sat"] is True
    assert js(capsys, "solve", "--class", "euclid,reflexive", *box)["sat"] is False
    assert js(capsys, "solve", "--class", "transitive-bounded", "--engine", "oracle", "--max-worlds", "2", "-e", "<>q")["sat"]


def test_usage_errors(capsys):
    assert run(capsys, "solve", "--class", "k45", "-e", "q")[0] == 2
    with pytest.raises(SystemExit) as exc:
        cli.run(["solve", "--bogus", "-e", "q"])
    assert exc.value.code == 2
    code, _, err = run(capsys, "parse", "-e", "q &")
    assert code == 2 and "modaltw:" in err
    assert run(capsys, "parse", FIX / "missing.mf")[0] == 2
    assert run(capsys, "structure", "-e", "false")[0] == 2
    assert run(capsys, "solve", "--class", "transitive-bounded", "-e", "q")[0] == 2


def test_size_guard_env(capsys, monkeypatch):
    monkeypatch.setenv("MODALTW_SIZE_GUARD", "nope")
    assert run(capsys, "parse", "-e", "q")[0] == 2


def test_internal_error_exit(capsys, monkeypatch):
    def broken(*_a, **_k):
        raise AssertionError("boom")

    monkeypatch.setattr(cli.S, "solve", broken)
    code, _, err = run(capsys, "solve", "-e", "q")
    assert code == 70 and "internal error" in err


def test_mso_stats(capsys):
    sizes = [js(capsys, "mso-stats", "--formula", "xi", "--md", md)["nodeCount"] for md in range(4)]
    assert len({b - a for a, b in zip(sizes, sizes[1:])}) == 1
    chi = js(capsys, "mso-stats", "--formula", "chi", "--variant", "plain", "--dump")
    assert chi["variant"] == "plain" and chi["text"]


def test_generate_corpus_deterministic(capsys, tmp_path):
    a = js(capsys, "generate-corpus", "--seed", 1, "--count", 20)
    b = js(capsys, "generate-corpus", "--seed", 1, "--count", 20)
    assert a == b
    texts = {c["text"] for c in a}
    assert any("[]" in t or "<>" in t for t in texts)
    flat = js(capsys, "generate-corpus", "--seed", 1, "--count", 10, "--max-depth", 0, "--no-edge-cases")
    assert all("[]" not in c["text"] and "<>" not in c["text"] for c in flat)
    out = js(capsys, "generate-corpus", "--seed", 2, "--count", 5, "--out", tmp_path / "c")
    assert out["written"] == len(list((tmp_path / "c").glob("*.mf")))


def test_cross_check_small(capsys):
    data = js(capsys, "cross-check", "--seed", 3, "--cases", 8, "--vars", 2, "--max-clauses", 2)
    assert data["disagreements"] == [] and data["cases"] >= 8


def test_verify_pipeline_single(capsys):
    yes = js(capsys, "verify-pipeline", FIX / "nlcp_edge.json")
    assert yes["ok"] and yes["nlcpYes"]
    no = js(capsys, "verify-pipeline", FIX / "nlcp_triangle.json")
    assert no["ok"] and not no["nlcpYes"]
    assert no["checks"]["c"]["status"] == "pass"


def test_verify_pipeline_exhaustive_tiny(capsys):
    data = js(capsys, "verify-pipeline", "--exhaustive", "--max-vertices", 1)
    assert data["failed"] == [] and data["instances"] > 0 and data["maxWidthSlack"] >= 0


def test_validate_decomposition(capsys, tmp_path):
    good = js(capsys, "decompose", "--minfill", FIG1)
    path = tmp_path / "td.json"
    path.write_text(json.dumps(good))
    assert js(capsys, "validate-decomposition", FIG1, "--decomposition", path)["valid"]
    path.write_text(json.dumps({"bags": [[0]]}))
    code, out, _ = run(capsys, "validate-decomposition", FIG1, "--decomposition", path)
    assert code == 1 and not json.loads(out)["valid"]


def test_cnf_and_parse(capsys):
    assert js(capsys, "parse", "-e", "[]<>q")["modalDepth"] == 2
    data = js(capsys, "cnf", "-e", "q & q")
    assert data["modalDepth"] == 0 and not data["trivialUnsat"]
    assert js(capsys, "cnf", "-e", "q & false")["trivialUnsat"]
