import json
import subprocess
import sys

import pytest

from qchar import sl3
from qchar.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_char_vk_matches_fermionic(capsys):
    code, out, _ = run(capsys, "char", "vk", "--k", "1", "--zmax", "3")
    assert code == 0
    assert out.strip() == sl3.ch_Vk(1, 3, (0, 8)).to_json()


def test_char_I_unit(capsys):
    code, out, _ = run(capsys, "char", "I", "--d1", "0", "--d2", "0", "--format", "table")
    assert code == 0
    rows = [ln.split() for ln in out.strip().splitlines()[2:]]
    assert rows == [["0", "0", "0", "1/1"]]


def test_char_psi_region(capsys):
    base = ["char", "sl3-psi", "--k1", "1", "--k2", "2", "--l1", "0", "--l2", "1"]
    assert run(capsys, *base, "--l3", "1")[0] == 0
    code, _, err = run(capsys, *base, "--l3", "2")
    assert code == 2 and "outside P_V" in err


def test_char_missing_argument(capsys):
    code, _, err = run(capsys, "char", "sl2", "--k", "2")
    assert code == 2 and "--l" in err


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as e:
        main(["bogus"])
    assert e.value.code == 2
    assert run(capsys, "verify", "ses", "--k1", "3", "--k2", "2")[0] == 2
    assert run(capsys, "verify", "toda", "--qlo", "5", "--qhi", "1")[0] == 0  # toda ignores the window
    assert run(capsys, "char", "sl2", "--k", "1", "--l", "1", "--qlo", "5", "--qhi", "1")[0] == 2


def test_verify_toda_passes(capsys):
    code, out, err = run(capsys, "verify", "toda")
    assert code == 0
    rep = json.loads(out)
    assert rep["pass"] and rep["failed"] == 0 and "seconds" not in rep
    assert "toda: pass" in err


def test_verify_json_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["verify", "terms", "--out", str(a)]) == 0
    assert main(["verify", "terms", "--out", str(b)]) == 0
    capsys.readouterr()
    assert a.read_text() == b.read_text()


def test_verify_failure_exit_code(capsys):
    code, out, _ = run(capsys, "verify", "gl", "--format", "table")
    assert code == 1
    assert "FAIL gl-phi" in out


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "qchar", "char", "sl2", "--k", "1", "--l", "0",
                        "--zmax", "2", "--qhi", "4", "--format", "table"],
                       capture_output=True, text=True)
    assert r.returncode == 0
    assert r.stdout.splitlines()[0].startswith("# orientation=")
