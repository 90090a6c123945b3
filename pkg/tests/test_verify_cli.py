import copy
import json
import os

import pytest

from hcork import cli
from hcork.cli import BAD_INPUT, FIXTURES, NO, OK, UNKNOWN, main
from hcork.pipeline import extract, load_scenario
from hcork.verify import EvidenceMismatch, verify_certificate


@pytest.fixture(scope="module")
def akbulut():
    sc = load_scenario(FIXTURES / "akbulut.json")
    return sc, extract(sc)


def test_verify_accepts(akbulut):
    sc, cert = akbulut
    assert set(verify_certificate(cert, sc).values()) == {"yes"}


def test_verify_rejects_other_scenario(akbulut):
    _, cert = akbulut
    with pytest.raises(EvidenceMismatch) as e:
        verify_certificate(cert, load_scenario(FIXTURES / "minimal.json"))
    assert e.value.step == "scenario_sha256"


def _bad_move(c):
    c["evidence"]["theorem1"]["moves"].append({"kind": "slide", "l": 99, "m": 1, "word": [],
                                                "sign": 1})


def _bad_op(c):
    c["stage1"]["ops"] = [{"kind": "add_row", "i": 0, "j": 0, "c": 1}]


def _bad_log(c):
    c["dual_state"]["log"].insert(0, {"kind": "bogus", "args": []})


def _bad_record(c):
    c["evidence"]["addendumD"]["involution"] = "none"


def _bad_cork(c):
    c["cork"]["spare_pairs"] = 5


@pytest.mark.parametrize("corrupt,step", [
    (_bad_move, "evidence.theorem1.moves["),
    (_bad_op, "stage1.ops"),
    (_bad_log, "dual_state.log[0]"),
    (_bad_record, "evidence.addendumD"),
    (_bad_cork, "cork"),
])
def test_verify_names_the_failing_step(akbulut, corrupt, step):
    sc, cert = akbulut
    bad = copy.deepcopy(cert)
    corrupt(bad)
    with pytest.raises(EvidenceMismatch) as e:
        verify_certificate(bad, sc)
    assert e.value.step.startswith(step)


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_extract_and_verify(tmp_path, capsys):
    out = tmp_path / "c.json"
    code, text, _ = run(["extract", "minimal", "-o", str(out)], capsys)
    assert code == OK and "addendumD: yes" in text
    first = out.read_bytes()
    code, text, _ = run(["verify", str(out), "minimal"], capsys)
    assert code == OK and "evidence checked" in text
    run(["extract", "minimal", "-o", str(out)], capsys)
    assert out.read_bytes() == first
    assert not [p for p in os.listdir(tmp_path) if p.endswith(".tmp")]


def test_cli_extract_unknown_exit(tmp_path, capsys):
    code, _, _ = run(["extract", "interleaved-natural", "-o", str(tmp_path / "c")], capsys)
    assert code == UNKNOWN


def test_cli_json_flag(capsys):
    code, text, _ = run(["trivialize", "two-generator.txt", "--json"], capsys)
    data = json.loads(text)
    assert code == OK and data["verdict"] == "yes"


def test_cli_trivialize_no(capsys):
    code, text, _ = run(["trivialize", "x-squared.txt"], capsys)
    assert code == NO and "torsion [2]" in text


def test_cli_verify_mismatch(tmp_path, capsys):
    out = tmp_path / "c.json"
    run(["extract", "minimal", "-o", str(out)], capsys)
    code, text, _ = run(["verify", str(out), "akbulut"], capsys)
    assert code == NO and "scenario_sha256" in text


def test_cli_bad_input(tmp_path, capsys):
    assert run(["extract", str(tmp_path / "missing.json")], capsys)[0] == BAD_INPUT
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["verify", str(bad), "minimal"], capsys)[0] == BAD_INPUT
    assert run(["nonsense"], capsys)[0] == BAD_INPUT
    assert run(["extract", "minimal", "--budget", "0"], capsys)[0] == BAD_INPUT
    assert run(["cork", "generalized", "--matrix", "1 x"], capsys)[0] == BAD_INPUT


def test_cli_diagram_commands(tmp_path, capsys):
    code, text, _ = run(["diagram", "homology", "akbulut-diagram"], capsys)
    assert code == OK and text.strip() == "H_1 = 0, H_2 = Z^2"
    code, text, _ = run(["diagram", "involution", "akbulut-diagram", "--perm", "1,0"], capsys)
    assert code == OK and "true" in text
    out = tmp_path / "t.json"
    code, _, _ = run(["diagram", "trade", "akbulut-diagram", "--component", "0", "-o", str(out)], capsys)
    assert code == OK and json.loads(out.read_text())["components"][0]["role"] == "dotted"
    code, text, _ = run(["diagram", "homology", str(out)], capsys)
    assert text.strip() == "H_1 = 0, H_2 = 0"
    code, text, _ = run(["diagram", "boundary", str(out)], capsys)
    assert text.strip() == "H_1 = 0"


def test_cli_cork_commands(capsys):
    assert run(["cork", "generalized", "--matrix", "1 0;0 1"], capsys)[0] == OK
    code, text, _ = run(["cork", "generalized", "--matrix", "1 0;0 1", "--family0-meets"], capsys)
    assert code == NO
    code, text, _ = run(["cork", "akbulut"], capsys)
    assert code == OK and json.loads(text)["components"]


def test_cli_fixtures(capsys):
    code, text, _ = run(["fixtures"], capsys)
    assert "akbulut.json" in text.split()
    code, text, _ = run(["fixtures", "minimal"], capsys)
    assert text.strip().endswith("minimal.json")


def test_write_atomic_keeps_old_file_on_failure(tmp_path, monkeypatch):
    target = tmp_path / "f.txt"
    target.write_text("old")

    def boom(*a):
        raise OSError("disk full")
    monkeypatch.setattr(cli.os, "replace", boom)
    with pytest.raises(OSError):
        cli.write_atomic(target, "new")
    assert target.read_text() == "old"
    assert os.listdir(tmp_path) == ["f.txt"]
