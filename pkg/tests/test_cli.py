import json
from pathlib import Path

import pytest

from hwpkit.cli import run


def test_solve_cli_end_to_end(tmp_path):
    out = tmp_path / "sol.json"
    code = run(["solve", "-v", "96", "-M", "4", "-N", "8",
                "-a", "46", "-b", "1", "--seed", "42", "-o", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["kind"] == "hwp-certificate"
    assert len(doc["factors"]) == 47
    assert run(["verify", str(out)]) == 0


def test_solve_cli_determinism(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["solve", "-v", "96", "-M", "4", "-N", "8", "-a", "23", "-b", "24",
            "--seed", "7"]
    assert run(argv + ["-o", str(a)]) == 0
    assert run(argv + ["-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_solve_cli_known_exception():
    assert run(["solve", "-v", "12", "-M", "4", "-N", "6", "-a", "2", "-b", "3"]) == 2


def test_solve_cli_invalid_params():
    assert run(["solve", "-v", "90", "-M", "4", "-N", "6", "-a", "22", "-b", "22"]) == 3
    assert run(["solve", "-v", "96", "-M", "4"]) == 3          # missing flags


def test_verify_cli_detects_tampering(tmp_path):
    out = tmp_path / "sol.json"
    assert run(["solve", "-v", "96", "-M", "4", "-N", "8",
                "-a", "24", "-b", "23", "-o", str(out)]) == 0
    doc = json.loads(out.read_text())
    doc["factors"][0]["cycles"][0][0:2] = doc["factors"][0]["cycles"][0][1::-1]
    tampered = tmp_path / "tampered.json"
    tampered.write_text(json.dumps(doc))
    assert run(["verify", str(tampered)]) == 1


def test_rsm_build_factorize_verify(tmp_path):
    rsm_path = tmp_path / "m.json"
    code = run(["rsm-build", "--group", "dihedral:m=1,n=1,k=1", "-g", "3",
                "--alpha", "7", "--beta", "1", "-o", str(rsm_path)])
    assert code == 0
    assert run(["rsm-verify", str(rsm_path), "--orders", "[^7 1, ^1 2]"]) == 0
    assert run(["rsm-verify", str(rsm_path), "--orders", "[^8 1]"]) == 1
    fact_path = tmp_path / "f.json"
    assert run(["factorize", "--rsm", str(rsm_path), "-o", str(fact_path)]) == 0
    assert run(["verify", str(fact_path)]) == 0


def test_rsm_build_unsupported_case():
    assert run(["rsm-build", "--group", "dihedral:m=1,n=1,k=2",
                "--alpha", "16", "--beta", "0"]) == 2


def test_ingredients_search_cli(tmp_path):
    out = tmp_path / "ing"
    out.mkdir()
    code = run(["ingredients-search", "--type", "uniform", "--v", "8", "--c", "4",
                "-o", str(out)])
    assert code == 0
    files = list(out.glob("*.json"))
    assert len(files) == 1
    assert run(["verify", str(files[0])]) == 0
    assert run(["ingredients-search", "--type", "uniform",
                "--v", "6", "--c", "3"]) == 2
    code = run(["ingredients-search", "--type", "equipartite", "--t", "3",
                "--z", "4", "--c", "4", "-o", str(out / "eq.json")])
    assert code == 0


def test_solve_uses_ingredient_dir(tmp_path):
    ing = tmp_path / "certs"
    ing.mkdir()
    assert run(["ingredients-search", "--type", "uniform", "--v", "32", "--c", "4",
                "-o", str(ing)]) == 0
    out = tmp_path / "sol.json"
    assert run(["solve", "-v", "96", "-M", "4", "-N", "8", "-a", "46", "-b", "1",
                "--ingredients", str(ing), "-o", str(out)]) == 0
    assert run(["verify", str(out)]) == 0
