import json
import math
import subprocess
import sys

import numpy as np
import pytest

from fracbound import cli


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip().startswith("{") else out)


@pytest.fixture
def diag_matrix(tmp_path):
    p = tmp_path / "a.json"
    p.write_text(json.dumps([[-2, 0], [0, 3]]))
    return str(p)


# parsing helpers -----------------------------------------------------------

@pytest.mark.parametrize("text,val", [("1", 1), ("0.5+2i", 0.5 + 2j), ("-1j", -1j),
                                      ([0.3, -1], 0.3 - 1j), (2.5, 2.5)])
def test_parse_complex(text, val):
    assert cli.parse_complex(text) == val


def test_parse_norm_forms():
    assert cli.parse_norm("sup").kind == "sup"
    assert cli.parse_norm("holder:0.4").alpha == 0.4
    with pytest.raises(cli.ValidationError):
        cli.parse_norm("bogus")


def test_jsonable_complex_arrays():
    out = cli.jsonable({"a": np.array([1 + 2j, 3]), "b": 1j, "c": np.float64(2.0)})
    assert out == {"a": [[1.0, 2.0], [3.0, 0.0]], "b": [0.0, 1.0], "c": 2.0}


def test_csv_matrix_reader(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("# A\n-2,0,1,0\n0,0,3,1\n")
    assert np.array_equal(cli.read_matrix(p), [[-2, 1], [0, 3 + 1j]])


# verbs ---------------------------------------------------------------------

def test_rl_apply_first_order_on_one(capsys):
    code, doc = run_cli(capsys, "rl-apply", "--z", "1", "--f", "one", "--N", "65")
    assert code == 0 and doc["status"] == 0
    nodes = np.array(doc["result"]["function"]["nodes"])
    vals = np.array(doc["result"]["function"]["values"])
    assert np.abs(vals[:, 0] - nodes).max() <= 1e-12
    assert np.abs(vals[:, 1]).max() <= 1e-12
    assert set(doc) == {"verb", "config", "metadata", "result", "status"}


def test_rl_norm_l2_on_the_boundary(capsys):
    # the computed norm at z = i is exp(pi/2); see the acceptance notes
    code, doc = run_cli(capsys, "rl-norm-l2", "--z", "i", "--N", "1024")
    assert code == 0
    assert abs(doc["result"]["value"] - math.exp(math.pi / 2)) <= 2e-2 * math.exp(math.pi / 2)


def test_spectral_split_diagonal(capsys, diag_matrix):
    code, doc = run_cli(capsys, "spectral-split", "--matrix", diag_matrix, "--t-list", "1")
    assert code == 0
    p = np.array(doc["result"]["P"])
    p = p[..., 0] + 1j * p[..., 1]
    assert np.abs(p - np.diag([1, 0])).max() <= 1e-8
    assert doc["result"]["split"]["dim1"] == 1
    assert doc["result"]["defects"]["oracle"] <= 1e-8


def test_diag_example_upper_unit(capsys):
    code, doc = run_cli(capsys, "diag-example", "--theta", "upper", "--t", "1",
                        "--sequence", "unit(2)", "--N", "16")
    assert code == 0
    ref = math.exp(-2 * math.sqrt(2) - math.log(3) / math.sqrt(2))
    assert abs(doc["result"]["upper_norm"] - ref) <= 1e-12


def test_diag_example_lower_verdict(capsys):
    code, doc = run_cli(capsys, "diag-example", "--theta", "lower", "--t", "2",
                        "--sequence", "polynomial(1)")
    assert code == 0
    assert doc["result"]["membership"]["verdict"] == "non-member"


# sweeps --------------------------------------------------------------------

def test_sweep_sup_norm_slope(capsys):
    code, doc = run_cli(capsys, "sweep", "--verb", "rl-norm-sup", "--axis", "sigma",
                        "--values", "0.2,0.1,0.05,0.025", "--z", "0.1+1i")
    assert code == 0
    rows = doc["result"]
    assert len(rows) == 4 and abs(rows[0]["slope"] + 1) < 0.1


def test_sweep_cesaro_csv(capsys):
    code, out = run_cli(capsys, "sweep", "--verb", "cesaro-power", "--axis", "n",
                        "--values", "1,2,3", "--f", "linear", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "axis,x,value,local_slope,slope"
    values = [float(l.split(",")[2]) for l in lines[1:]]
    assert len(values) == 3 and max(values) <= 1e-4


def test_sweep_unknown_axis(capsys):
    code, _ = run_cli(capsys, "sweep", "--verb", "rl-norm-sup", "--axis", "bogus", "--values", "1")
    assert code == 2


# replay and configuration ----------------------------------------------------

def test_replay_is_bitwise(tmp_path, capsys):
    first = tmp_path / "first.json"
    again = tmp_path / "again.json"
    assert cli.main(["rl-apply", "--z", "0.5+1i", "--f", "sin", "--N", "129", "-o", str(first)]) == 0
    assert cli.main(["run", "--config", str(first), "-o", str(again)]) == 0
    assert first.read_bytes() == again.read_bytes()


def test_flags_override_config_file(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"verb": "rl-norm-sup", "z": "1"}))
    _, from_file = run_cli(capsys, "run", "--config", str(cfg))
    _, overridden = run_cli(capsys, "rl-norm-sup", "--config", str(cfg), "--z", "0.5")
    assert from_file["config"]["z"] == "1" and overridden["config"]["z"] == "0.5"
    assert overridden["result"]["value"] > from_file["result"]["value"]


def test_unknown_config_key_rejected(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"verb": "rl-norm-sup", "z": "1", "colour": "red"}))
    assert cli.main(["run", "--config", str(cfg)]) == 2


def test_csv_output_with_sidecar(tmp_path, capsys):
    out = tmp_path / "f.csv"
    assert cli.main(["rl-apply", "--z", "1", "--f", "linear", "--N", "9",
                     "--format", "csv", "-o", str(out)]) == 0
    rows = out.read_text().strip().splitlines()
    assert len(rows) == 10
    meta = json.loads((tmp_path / "f.csv.meta.json").read_text())
    assert meta["verb"] == "rl-apply" and meta["status"] == 0


# exit codes ------------------------------------------------------------------

def test_exit_invalid_input(capsys):
    assert cli.main(["rl-apply", "--z", "0"]) == 2
    assert cli.main(["rl-apply", "--z", "nonsense"]) == 2
    assert cli.main(["spectral-split"]) == 2
    assert cli.main(["spectral-split", "--matrix", "/nonexistent/a.json"]) == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["no-such-verb"])
    assert exc.value.code == 2


def test_exit_not_converged(capsys):
    # an arithmetic schedule does not shrink the differences geometrically
    code, doc = run_cli(capsys, "rl-boundary", "--s", "1", "--f", "one", "--sigmas", "0.3,0.2,0.1")
    assert code == 3 and doc["status"] == 3
    assert doc["result"]["report"]["verdict"] != "converged"


def test_exit_converged_boundary(capsys):
    code, doc = run_cli(capsys, "rl-boundary", "--s", "1", "--f", "linear")
    assert code == 0 and doc["result"]["report"]["verdict"] == "converged"


def test_exit_numerical_failure(tmp_path, capsys):
    m = tmp_path / "a.json"
    m.write_text(json.dumps([[-1.1, 0], [0, 3]]))
    assert cli.main(["laplace-check", "--matrix", str(m), "--z", "0.01", "--t-max", "2"]) == 4
    assert cli.main(["cesaro-power", "--N", "512", "--x-min", "0.01", "--n", "3"]) == 4


def test_console_script_runs():
    out = subprocess.run([sys.executable, "-m", "fracbound.cli", "rl-norm-sup", "--z", "1"],
                         capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["result"]["value"] == pytest.approx(1.0, abs=1e-12)
