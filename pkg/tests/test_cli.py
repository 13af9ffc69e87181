import json
import shutil
from pathlib import Path

import numpy as np
import pytest

from bracketgrowth import cli
from bracketgrowth.algebra import AlgebraSpec
from conftest import classical

GOLDEN = Path(__file__).resolve().parents[1] / "golden"


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def sl2(tmp_path, capsys):
    path = tmp_path / "sl2.json"
    assert run(capsys, "build", "sl", 2, "--p", 5, "--out", path)[0] == 0
    return path


def write_set(path, elems):
    path.write_text(json.dumps({"elements": elems}))
    return path


def test_build_examples(tmp_path, capsys):
    code, out, _ = run(capsys, "build", "g2", "--p", 7, "--out", tmp_path / "g2.json")
    assert code == 0 and json.loads((tmp_path / "g2.json").read_text())["dim"] == 14
    code, _, _ = run(capsys, "build", "sl", 2, "--p", 5, "--out", tmp_path / "a.json")
    assert json.loads((tmp_path / "a.json").read_text())["dim"] == 3
    code, _, err = run(capsys, "build", "sl", 3, "--p", 3, "--out", tmp_path / "b.json")
    assert code == 0 and "not simple" in err
    assert (tmp_path / "b.json.manifest.json").exists()


def test_build_usage_errors(tmp_path, capsys):
    assert run(capsys, "build", "sl", 2, "--p", 4, "--out", tmp_path / "x.json")[0] == 2
    assert run(capsys, "build", "xx", 2, "--p", 5, "--out", tmp_path / "x.json")[0] == 2
    assert run(capsys, "build", "sl", 2)[0] == 2  # missing --p
    assert not (tmp_path / "x.json").exists()


def test_round_trip_is_bit_exact(tmp_path, capsys):
    for kind, n in (("sl", 3), ("g2", None), ("so", 7)):
        path = tmp_path / f"{kind}.json"
        args = ["build", kind] + ([n] if n else []) + ["--p", 7, "--out", path]
        assert run(capsys, *args)[0] == 0
        text = path.read_text()
        g = AlgebraSpec.from_json(json.loads(text))
        assert json.dumps(g.to_json(), sort_keys=True, separators=(",", ":")) + "\n" == text
    mem = classical("sl", 3, 7)
    assert np.array_equal(AlgebraSpec.from_json(json.loads((tmp_path / "sl.json").read_text())).dense, mem.dense)


def test_grow_examples(sl2, tmp_path, capsys):
    pair = write_set(tmp_path / "pair.json", [[0, 0, 0], [1, 0, 0], [4, 0, 0], [0, 1, 0], [0, 4, 0]])
    code, out, _ = run(capsys, "grow", sl2, pair, "--k", 2, "--layers")
    assert code == 0 and [json.loads(l)["size"] for l in out.splitlines()] == [5, 15]
    every = [[a, b, c] for a in range(5) for b in range(5) for c in range(5)]
    code, out, _ = run(capsys, "grow", sl2, write_set(tmp_path / "all.json", every), "--k", 4, "--fill")
    assert code == 0 and json.loads(out)["fill"] == 1
    code, out, _ = run(capsys, "grow", sl2, write_set(tmp_path / "z.json", [[0, 0, 0]]), "--k", 1, "--olson")
    assert code == 0 and json.loads(out)["horn"] == "closed"


def test_grow_input_and_budget_codes(sl2, tmp_path, capsys):
    bad = write_set(tmp_path / "bad.json", [[1, 0, 0]])
    assert run(capsys, "grow", sl2, bad, "--k", 2, "--layers")[0] == 2
    assert run(capsys, "grow", sl2, tmp_path / "missing.json", "--k", 2, "--layers")[0] == 2
    pair = write_set(tmp_path / "pair.json", [[1, 0, 0], [0, 1, 0]])
    code, out, _ = run(capsys, "grow", sl2, pair, "--k", 5, "--layers", "--symmetrize", "--max-elements", 20)
    assert code == 3 and "truncated" in out


def test_certify(tmp_path, capsys):
    for kind, n, entries in (("g2", None, 14), ("sl", 3, 8)):
        alg = tmp_path / f"{kind}.json"
        run(capsys, "build", kind, *([n] if n else []), "--p", 7, "--out", alg)
        out = tmp_path / f"{kind}.cert.json"
        assert run(capsys, "certify", alg, "--out", out)[0] == 0
        cert = json.loads(out.read_text())
        assert len(cert["entries"]) == entries
        assert cert["properties"] == {"a": "verified", "b": "verified"}
    h = tmp_path / "h.json"
    run(capsys, "build", "heisenberg", "--p", 5, "--out", h)
    code, _, err = run(capsys, "certify", h, "--out", tmp_path / "h.cert.json")
    assert code == 2 and "sandwich encountered / not classical" in err


def test_experiment_requires_seed(sl2, tmp_path, capsys):
    code, _, err = run(capsys, "experiment", "--case", "dimest", "--algebra", sl2, "--out", tmp_path / "r")
    assert code == 2 and "seed" in err
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 3}))
    assert run(capsys, "experiment", "--case", "olson", "--algebra", sl2, "--config", cfg, "--trials", 5, "--out", tmp_path / "r")[0] == 0


def test_experiment_bad_config(sl2, tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"epsilon": "-1/2"}))
    code = run(capsys, "experiment", "--case", "dimest", "--algebra", sl2, "--config", cfg, "--seed", 1, "--out", tmp_path / "r")[0]
    assert code == 2


def test_experiment_deterministic_across_workers(tmp_path, capsys):
    alg = tmp_path / "sl2f11.json"
    run(capsys, "build", "sl", 2, "--p", 11, "--out", alg)
    for w in (1, 3):
        code = run(capsys, "experiment", "--case", "onedim", "--algebra", alg, "--trials", 6, "--seed", 9, "--workers", w, "--out", tmp_path / f"w{w}")[0]
        assert code == 0
    assert (tmp_path / "w1" / "onedim.jsonl").read_bytes() == (tmp_path / "w3" / "onedim.jsonl").read_bytes()
    m1 = json.loads((tmp_path / "w1" / "manifest.json").read_text())
    assert m1["seed"] == 9 and m1["tool_version"] and m1["inputs"][0]["sha256"]
    assert m1["outputs"][0]["sha256"] == json.loads((tmp_path / "w3" / "manifest.json").read_text())["outputs"][0]["sha256"]


def test_replay_reproduces_outputs(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    run(capsys, "build", "sl", 2, "--p", 11, "--out", "a.json")
    assert run(capsys, "experiment", "--case", "dimest", "--algebra", "a.json", "--trials", 5, "--seed", 2, "--out", "r")[0] == 0
    code, out, _ = run(capsys, "replay", "r/manifest.json")
    assert code == 0 and json.loads(out)["mismatched"] == []
    # a changed input is refused
    Path("a.json").write_text(Path("a.json").read_text().replace('"label":"sl_2"', '"label":"sl_2x"'))
    assert run(capsys, "replay", "r/manifest.json")[0] == 2


def test_field_sweeps(tmp_path, capsys):
    code, out, _ = run(capsys, "experiment", "--case", "covering", "--q", 9, "--d", 2, "--seed", 0, "--out", tmp_path / "c")
    assert code == 0 and json.loads(out)["summary"] == {"instances": 84, "covers": 84, "faults": 0}
    lines = (tmp_path / "c" / "covering.csv").read_text().splitlines()
    assert lines[0].startswith("q,d,size") and len(lines) == 85
    code, out, _ = run(capsys, "experiment", "--case", "cauchy-davenport", "--seed", 0, "--out", tmp_path / "cd")
    assert code == 0 and json.loads(out)["summary"]["violations"] == 0


def test_turrifiability_case(tmp_path, capsys):
    alg = tmp_path / "r.json"
    assert run(capsys, "build", "random", "--p", 5, "--dim", 4, "--seed", 1, "--density", 0.3, "--out", alg)[0] == 0
    code, out, _ = run(capsys, "experiment", "--case", "turrifiability", "--algebra", alg, "--trials", 5, "--seed", 0, "--out", tmp_path / "t")
    assert code == 0 and sum(json.loads(out)["summary"].values()) == 5


def test_atomic_write_leaves_no_temp_files(tmp_path):
    target = tmp_path / "x" / "out.json"
    cli.atomic_write(target, "a")
    cli.atomic_write(target, "b")
    assert target.read_text() == "b" and [p.name for p in target.parent.iterdir()] == ["out.json"]


def test_verify_golden_detects_mismatch(tmp_path, capsys):
    gd = tmp_path / "golden"
    shutil.copytree(GOLDEN, gd)
    name = "fill_sl2_f5_e12_e21"
    assert run(capsys, "verify-golden", "--golden-dir", gd, "--only", name)[0] == 0
    obj = json.loads((gd / f"{name}.json").read_text())
    obj["fill"] += 1
    (gd / f"{name}.json").write_text(json.dumps(obj, sort_keys=True, indent=1) + "\n")
    code, out, _ = run(capsys, "verify-golden", "--golden-dir", gd, "--only", name)
    assert code == 1 and "MISMATCH" in out
    assert run(capsys, "verify-golden", "--golden-dir", gd, "--only", name, "--bless")[0] == 2
    assert run(capsys, "verify-golden", "--golden-dir", gd, "--only", name, "--bless", "--note", "restore")[0] == 0
    assert "restore" in (gd / "CHANGELOG.md").read_text()
    assert (gd / f"{name}.json").read_text() == (GOLDEN / f"{name}.json").read_text()


@pytest.mark.parametrize("name", ["fill_sl2_f5_e12_e21", "turrifiability_random_dim5", "growth_ratio_gf101_size10", "cauchy_davenport_small_primes", "dimest_sl2_f11_digest"])
def test_quick_golden_entries(name, capsys):
    code, out, _ = run(capsys, "verify-golden", "--only", name)
    assert code == 0 and json.loads(out)["status"] == "ok"
