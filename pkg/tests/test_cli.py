import csv
import io
import json
from fractions import Fraction as F

import pytest

from rrhsim.cli import main


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr().out
    return code, out


def parse_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], rows[1:]


def test_oracle_p1_table(capsys):
    code, out = run_cli(["oracle", "--table", "p1", "--n", "4"], capsys)
    assert code == 0
    header, rows = parse_csv(out)
    assert header == ["n1", "probability", "probability_float"]
    assert [(r[0], r[1]) for r in rows] == [("1", "1/6"), ("2", "2/3"), ("3", "1/6")]


def test_oracle_rank2_table(capsys):
    code, out = run_cli(["oracle", "--table", "rank2", "--n", "4"], capsys)
    header, rows = parse_csv(out)
    assert [(r[0], r[1]) for r in rows] == [("1", "1/3"), ("2", "1/2"), ("3", "1/6")]


def test_oracle_constants_table(capsys):
    code, out = run_cli(["oracle", "--table", "constants"], capsys)
    header, rows = parse_csv(out)
    names = {r[0]: r[1] for r in rows}
    assert names["nu_1_1"] == "1/12"
    assert names["quickest_leader_2"] == "1/4"


def test_oracle_validity_window_error(capsys):
    code = main(["oracle", "--table", "p1", "--n", "0"])
    assert code == 2


def test_oracle_json_format(capsys):
    code, out = run_cli(
        ["oracle", "--table", "nk-mean", "--n", "10", "--format", "json"], capsys
    )
    doc = json.loads(out)
    assert doc["table"] == "nk-mean"
    assert doc["rows"][0][:2] == [1, "5"]


def test_enumerate_joint_table(capsys):
    code, out = run_cli(
        ["enumerate", "--model", "rrh", "--n", "4", "--statistic", "joint-n123"],
        capsys,
    )
    assert code == 0
    header, rows = parse_csv(out)
    assert header[:3] == ["n1", "n2", "n3"]
    table = {(int(a), int(b), int(c)): F(p) for a, b, c, p, _ in rows}
    assert table == {(3, 0, 0): F(1, 6), (2, 1, 0): F(1, 2),
                     (2, 0, 1): F(1, 6), (1, 1, 1): F(1, 6)}


def test_enumerate_redirect_rational(capsys):
    code, out = run_cli(
        ["enumerate", "--model", "redirect", "--r", "1/2", "--n", "3",
         "--statistic", "rank-count", "--k", "2"],
        capsys,
    )
    header, rows = parse_csv(out)
    assert {r[0]: r[1] for r in rows} == {"1": "1/4", "2": "3/4"}


def test_enumerate_needs_k(capsys):
    with pytest.raises(SystemExit):
        main(["enumerate", "--model", "rrh", "--n", "4",
              "--statistic", "degree-count"])


def test_grow_shapes(capsys):
    code, out = run_cli(["grow", "--model", "rrh", "--n", "14", "--seed", "7"],
                        capsys)
    doc = json.loads(out)
    assert doc["n"] == 14 and len(doc["parents"]) == 13
    code, out = run_cli(
        ["grow", "--model", "redirect", "--r", "0.5", "--n", "100", "--seed", "1"],
        capsys,
    )
    doc = json.loads(out)
    assert len(doc["parents"]) == 99
    assert all(1 <= p < i for i, p in enumerate(doc["parents"], start=2))


def test_grow_duplicate_edge_count(capsys):
    code, out = run_cli(
        ["grow", "--model", "duplicate", "--mu", "0.3", "--n", "50",
         "--seed", "2"],
        capsys,
    )
    doc = json.loads(out)
    assert doc["n_edges"] == 50
    assert len(doc["provenance"]) == 50
    assert doc["n_vertices"] <= 50


def test_grow_expanded_members(capsys):
    code, out = run_cli(
        ["grow", "--model", "rrh", "--n", "5", "--seed", "3", "--expanded"],
        capsys,
    )
    doc = json.loads(out)
    assert doc["edges"][0] == [1]
    for e, members in enumerate(doc["edges"], start=1):
        assert members[-1] == e and members[0] == 1


def test_grow_bad_flag_combination():
    with pytest.raises(SystemExit) as exc:
        main(["grow", "--model", "rrh", "--n", "5", "--r", "0.5"])
    assert exc.value.code == 2


def test_grow_reproducible_with_manifest(tmp_path, capsys):
    out1 = tmp_path / "a.json"
    out2 = tmp_path / "b.json"
    for out in (out1, out2):
        main(["grow", "--model", "rrh", "--n", "30", "--seed", "5",
              "--out", str(out)])
    assert out1.read_text() == out2.read_text()
    manifest = json.loads((tmp_path / "a.json.manifest.json").read_text())
    assert manifest["seed"] == 5
    assert manifest["command"][0] == "rrhsim"
    assert manifest["outputs"][0]["sha256"]
    capsys.readouterr()


def test_ensemble_compare_round_trip(tmp_path, capsys):
    rep = tmp_path / "rep.json"
    code = main(["ensemble", "--model", "rrh", "--n", "100", "--seed", "12",
                 "--replicas", "4000", "--out", str(rep),
                 "--csv-dir", str(tmp_path / "hists")])
    assert code == 0
    assert (tmp_path / "hists" / "degree.csv").exists()
    header, rows = parse_csv((tmp_path / "hists" / "degree.csv").read_text())
    assert header == ["k", "count"]
    assert sum(int(c) for _, c in rows) == 100 * 4000
    capsys.readouterr()

    code, out = run_cli(["compare", "--report", str(rep),
                         "--out", str(tmp_path / "cmp.json")], capsys)
    assert code == 0
    assert "overall: PASS" in out
    cmp_doc = json.loads((tmp_path / "cmp.json").read_text())
    assert cmp_doc["passed"] is True


def test_compare_exit_codes(tmp_path, capsys):
    # doctored report: biased growth relabeled as plain -> statistical fail
    rep = tmp_path / "rep.json"
    main(["ensemble", "--model", "redirect", "--r", "0.4", "--n", "100",
          "--seed", "12", "--replicas", "4000", "--out", str(rep)])
    doc = json.loads(rep.read_text())
    doc["config"] = {"model": "rrh", "target_n": 100, "seed": 12}
    forged = tmp_path / "forged.json"
    forged.write_text(json.dumps(doc))
    capsys.readouterr()
    code, out = run_cli(["compare", "--report", str(forged)], capsys)
    assert code == 1
    assert "overall: FAIL" in out
    assert main(["compare", "--report", str(tmp_path / "nope.json")]) == 2
    capsys.readouterr()


def test_ensemble_manifest_reproduces(tmp_path, capsys):
    rep = tmp_path / "rep.json"
    args = ["ensemble", "--model", "rrh", "--n", "60", "--seed", "3",
            "--replicas", "500", "--out", str(rep)]
    main(args)
    first = rep.read_text()
    manifest = json.loads((tmp_path / "rep.json.manifest.json").read_text())
    replay = manifest["command"][1:]
    main(replay)
    assert rep.read_text() == first
    capsys.readouterr()


def test_bench_command(capsys):
    code, out = run_cli(["bench", "--n", "50", "--replicas", "100"], capsys)
    assert code == 0
    assert "replicas/s" in out


def test_leaves_table_large_n_uses_floats(capsys):
    code, out = run_cli(["oracle", "--table", "leaves", "--n", "5000"], capsys)
    assert code == 0
    header, rows = parse_csv(out)
    probs = [float(r[2]) for r in rows]
    assert abs(sum(probs) - 1) < 1e-9


def test_vertex_degree_table(capsys):
    code, out = run_cli(
        ["oracle", "--table", "vertex-degree", "--n", "5", "--m", "3"], capsys
    )
    header, rows = parse_csv(out)
    assert rows[1] == ["2", "1/3", str(float(F(1, 3)))]


def test_leaders_command(tmp_path, capsys):
    out = tmp_path / "lead.json"
    code, text = run_cli(
        ["leaders", "--m", "2", "--n-max", "200", "--trajectories", "5000",
         "--seed", "5", "--out", str(out)],
        capsys,
    )
    assert code == 0
    assert "infinite-horizon value 1/4" in text
    doc = json.loads(out.read_text())
    assert doc["checkpoints"][-1] == 200
    assert (tmp_path / "lead.json.manifest.json").exists()
