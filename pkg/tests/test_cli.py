import json
import subprocess
import sys

import pytest

from wgroup.cli import main
from wgroup.formats import fixture, parse_cgp, parse_sos
from wgroup.orderspace import equivalent

F = {name: str(fixture(name)) for name in (
    "leaf.sos", "sap2.sos", "connected4.sos", "two_components.sos",
    "connected4.cgp", "two_components.cgp", "nonrealizable.cgp",
)}


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    data = json.loads(out)
    assert "tool_version" in data and "input" in data
    return code, data


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "wgroup", "classify", F["connected4.sos"]],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert "tree: E2(L)" in proc.stdout and "log2 order: 5" in proc.stdout


def test_unknown_flag_exits_2():
    proc = subprocess.run(
        [sys.executable, "-m", "wgroup", "verify", "--bogus", F["leaf.sos"]],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 2


def test_classify_two_components(capsys):
    code, out, _ = run(capsys, "classify", F["two_components.sos"])
    assert code == 0
    assert "tree: F(E2(L),E2(L))" in out
    assert "log2 order: 19" in out and "log2 Frattini: 13" in out
    code, data = run_json(capsys, "classify", F["two_components.sos"])
    assert data["tree"] == "F(E2(L),E2(L))"
    assert data["log2_order"] == 19 and data["log2_frattini"] == 13 and data["rank"] == 6
    assert data["tree_json"]["kind"] == "free"


def test_verify(capsys, tmp_path):
    code, out, _ = run(capsys, "verify", F["connected4.sos"])
    assert code == 0 and "all axioms hold" in out
    bad = tmp_path / "bad.sos"
    bad.write_text("sos 1\ndim 5\nchar -++++\nchar -+++-\nchar -++-+\nchar -+-++\nchar --+++\nchar -----\n")
    code, data = run_json(capsys, "verify", str(bad), "--max-len", "3")
    assert code == 1
    w = data["report"]["axiom4"]["witness"]
    assert w["total_length"] == 3
    assert data["report"]["ok"] is False


def test_max_len_bounds(capsys):
    with pytest.raises(SystemExit) as info:
        main(["verify", F["leaf.sos"], "--max-len", "1"])
    assert info.value.code == 2
    with pytest.raises(SystemExit):
        main(["verify", F["leaf.sos"], "--max-len", "9"])
    code, _, err = run(capsys, "verify", F["leaf.sos"], "--max-len", "7")
    assert code == 0 and "warning" in err


def test_format_errors_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.sos"
    bad.write_text("sos 1\ndim 2\nchar -x\n")
    code, _, err = run(capsys, "verify", str(bad))
    assert code == 2
    assert f"{bad}:3:7:" in err
    code, _, err = run(capsys, "verify", str(tmp_path / "missing.sos"))
    assert code == 2 and "missing.sos" in err
    code, _, err = run(capsys, "build", "--tree", "E2(")
    assert code == 2 and "column" in err


def test_components_and_translation(capsys, two_comp):
    code, data = run_json(capsys, "components", F["two_components.sos"])
    assert code == 0 and data["count"] == 2
    assert all(parse_sos(text).size == 4 for text in data["components"])
    code, data = run_json(capsys, "translation", F["connected4.sos"])
    assert data["dim"] == 2 and len(data["basis"]) == 2
    code, data = run_json(capsys, "translation", F["two_components.sos"])
    assert data["dim"] == 0


def test_build_and_realize(capsys, two_comp):
    code, out, _ = run(capsys, "build", "--tree", "F(E2(L),E2(L))")
    assert code == 0 and equivalent(parse_sos(out), two_comp) is not None
    code, out, _ = run(capsys, "realize", "--tree", "E2(L)")
    p = parse_cgp(out)
    assert code == 0 and p.gens == 3


def test_group_queries(capsys):
    _, data = run_json(capsys, "group", F["two_components.cgp"], "order")
    assert data["log2_order"] == 19
    _, data = run_json(capsys, "group", F["two_components.cgp"], "frattini")
    assert data["log2_order"] == 13 and data["equals_commutator_subgroup"] is True
    _, data = run_json(capsys, "group", F["connected4.cgp"], "center")
    assert data["log2_order"] == 4 and data["independent_order4"] == 2
    _, data = run_json(capsys, "group", F["nonrealizable.cgp"], "involutions")
    assert data["count"] == 6


def test_extract(capsys, conn4):
    code, data = run_json(capsys, "extract", F["connected4.cgp"])
    assert code == 0 and equivalent(parse_sos(data["sos"]), conn4) is not None
    code, out, _ = run(capsys, "extract", F["nonrealizable.cgp"], "--max-len", "3")
    assert code == 1 and "# axiom (4) up to length 3: FAIL" in out
    assert parse_sos(out).size == 6


def test_realizable(capsys):
    code, out, _ = run(capsys, "realizable", F["nonrealizable.cgp"])
    assert code == 1
    assert out.startswith("not realizable")
    assert "axiom (4) witness" in out and "presented 2^14 vs required 2^21" in out
    code, data = run_json(capsys, "realizable", F["nonrealizable.cgp"])
    assert data["verdict"] == "not realizable"
    assert data["presented_log2_order"] == 14 and data["required_log2_order"] == 21
    assert data["axioms"]["axiom4"]["witness"]["total_length"] <= 6
    code, data = run_json(capsys, "realizable", F["connected4.cgp"])
    assert code == 0 and data["verdict"] == "consistent"


def test_equiv(capsys, tmp_path):
    code, out, _ = run(capsys, "equiv", F["connected4.sos"], F["connected4.sos"])
    assert code == 0 and out.startswith("equivalent")
    code, data = run_json(capsys, "equiv", F["connected4.sos"], F["sap2.sos"])
    assert code == 1 and data["equivalent"] is False


def test_oracle(capsys):
    code, out, _ = run(capsys, "oracle", "space", F["connected4.sos"])
    assert code == 0 and out.rstrip().endswith("identical")
    code, data = run_json(capsys, "oracle", "group", F["connected4.cgp"])
    assert code == 0 and data["identical"] and all(c["match"] for c in data["checks"])
    code, _, err = run(capsys, "oracle", "space", F["two_components.sos"], "--max-len", "6")
    assert code == 2 and "too large" in err


def test_text_and_json_agree_on_exit_codes(capsys):
    for argv in (["verify", F["sap2.sos"]], ["realizable", F["nonrealizable.cgp"], "--max-len", "3"]):
        code_text, _, _ = run(capsys, *argv)
        code_json, _ = run_json(capsys, *argv)
        assert code_text == code_json


def test_verify_reports_phantom_ordering(capsys, tmp_path):
    path = tmp_path / "fan_minus_one.sos"
    path.write_text("sos 1\ndim 4\n" + "".join(f"char -{c}\n" for c in ("+++", "++-", "+-+", "+--", "-++", "-+-", "---")))
    code, out, _ = run(capsys, "verify", str(path))
    assert code == 1
    assert "axiom (4) up to length 6: ok" in out
    assert "saturation: FAIL" in out and "phantom ordering outside X: ---+" in out
    code, data = run_json(capsys, "verify", str(path))
    assert data["report"]["saturation"] == {"ok": False, "phantom": "---+"}
