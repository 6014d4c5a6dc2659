import io
import json

import pytest

from polarforge import __version__
from polarforge.cli import run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def call_json(*argv):
    code, out, err = call(*argv)
    assert code == 0, err
    return json.loads(out)


@pytest.mark.parametrize("cmd", [[], ["ga"], ["attractor"], ["order"], ["order", "check"],
                                 ["order", "closure"], ["order", "operators"], ["design"],
                                 ["simulate"], ["verify"]])
def test_help(cmd, capsys):
    code, _, _ = call(*cmd, "--help")
    assert code == 0
    assert "usage" in capsys.readouterr().out


def test_version(capsys):
    assert call("--version")[0] == 0
    assert __version__ in capsys.readouterr().out


def test_ga_index():
    obj = call_json("ga", "--n", "2", "--llr", "1.0", "--index", "10")
    assert obj["index"] == {"n": 2, "bits": "10"}
    assert obj["value"] > 0 and obj["schema"] == "polarforge/v1"


def test_ga_profile_csv(tmp_path):
    path = tmp_path / "p.csv"
    obj = call_json("ga", "--n", "3", "--sigma", "1.0", "--csv", str(path))
    assert len(obj["values"]) == 8 and obj["emitted"] == [str(path)]
    lines = path.read_text().splitlines()
    assert lines[0] == "index,index_bits,value,error_prob" and len(lines) == 9


def test_attractor():
    obj = call_json("attractor", "--n", "6", "--json")
    assert obj["count"] == 21 and obj["closure_size"] == 36
    assert call_json("attractor", "--n", "6", "--regime", "pi")["seed_size"] == 13


def test_order_check():
    obj = call_json("order", "check", "--less", "011100", "--more", "100010")
    assert "dominates" in obj
    obj = call_json("order", "check", "--less", "0110", "--more", "1001")
    assert obj["dominates"] and obj["witness"]
    assert not call_json("order", "check", "--less", "1001", "--more", "0110")["dominates"]


def test_order_closure_and_operators():
    obj = call_json("order", "closure", "0000", "--direction", "up")
    assert obj["size"] == 16
    ops = call_json("order", "operators", "--n", "16")["operators"]
    assert {o["order"] for o in ops} == {1, 2, 3, 4, 5}


def test_design_emit_frozen(tmp_path):
    path = tmp_path / "f.txt"
    obj = call_json("design", "--n", "6", "--rate", "0.5", "--snr-db", "2", "--emit-frozen", str(path))
    assert len(path.read_text().splitlines()) == 32 == len(obj["frozen"])
    sim = call_json("simulate", "--channel", "awgn", "--snr-db", "2", "--n", "6",
                    "--trials", "500", "--frozen", str(path))
    assert sim["frozen_count"] == 32 and 0.0 <= sim["fer"] <= 1.0


@pytest.mark.parametrize("argv", [
    ["design", "--n", "6", "--rate", "2", "--sigma", "1"],
    ["design", "--n", "0", "--rate", "0.5", "--sigma", "1"],
    ["ga", "--n", "3", "--index", "01x", "--sigma", "1"],
    ["bogus"],
    ["simulate", "--channel", "bsc", "--n", "3"],
    ["simulate", "--channel", "bsc", "--param", "0.1", "--n", "3", "--frozen", "auto"],
    ["verify", "table2", "--trials", "10"],
])
def test_invalid_input_exit_2(argv):
    code, out, err = call(*argv)
    assert code == 2 and out == "" and "error" in err


def test_io_error_exit_4(tmp_path):
    code, _, err = call("simulate", "--channel", "bec", "--param", "0.5", "--n", "3",
                        "--frozen", str(tmp_path / "missing.txt"))
    assert code == 4 and "I/O" in err


def test_simulate_deterministic_across_blocks():
    a = call("simulate", "--channel", "bec", "--param", "0.5", "--n", "4", "--trials", "20000")
    b = call("simulate", "--channel", "bec", "--param", "0.5", "--n", "4", "--trials", "20000",
             "--blocks", "3")
    assert a[0] == b[0] == 0 and a[1] == b[1]


def test_verify_passing_suite_is_byte_identical():
    a = call("verify", "operators")
    b = call("verify", "operators")
    assert a[0] == 0 and a[1] == b[1]
    assert a[2].startswith("PASS operators")


def test_verify_failure_exit_3():
    code, out, err = call("verify", "series")
    assert code == 3
    assert json.loads(out)["passed"] is False and "FAIL" in err
