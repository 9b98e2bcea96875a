import csv
import io
import json

import pytest

from ztdyn import cli, couplings as C


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_simulate_csv_and_config_echo(capsys):
    code, out, err = run_cli(capsys, "simulate", "--n", "30", "--trials", "3", "--seed", "5", "--m0", "auto:0.1")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["trial"] for r in rows] == ["0", "1", "2"]
    assert list(rows[0]) == ["trial", "seed", "n", "param", "m0", "steps", "flips", "status",
                             "final_magnetization"]
    echoed = json.loads(err.splitlines()[0])
    assert echoed["seed"] == 5 and echoed["n"] == 30 and echoed["m0"] == "auto:0.1"
    assert {r["m0"] for r in rows} == {"4"}  # ceil(30^0.4) = 4, already even


def test_global_flags_before_subcommand(capsys):
    a = run_cli(capsys, "--seed", "7", "simulate", "--n", "20")
    b = run_cli(capsys, "simulate", "--n", "20", "--seed", "7")
    assert a == b


def test_every_subcommand_runs(capsys, tmp_path):
    J = C.sample_constant(5, 1)
    C.dump(J, tmp_path / "j.txt")
    cases = [
        ["simulate", "--model", "pareto", "--n", "20", "--alpha", "0.5", "--policy", "minus"],
        ["qd", "--n", "20", "--replicas", "3", "--trials", "2"],
        ["mincut", "--n", "20", "--start", "half"],
        ["bully", "--n", "30"],
        ["enumerate", "--couplings-file", str(tmp_path / "j.txt")],
        ["mag0", "--n", "100", "--epsilon", "0.2", "--trials", "10"],
        ["drift", "--n", "100", "--trials", "2"],
    ]
    for argv in cases:
        code, out, err = run_cli(capsys, *argv)
        assert code == 0, (argv, err)
        assert out
        json.loads(err.splitlines()[0])


def test_enumerate_output(capsys, tmp_path):
    C.dump(C.sample_constant(3, 1), tmp_path / "k3.txt")
    code, out, _ = run_cli(capsys, "enumerate", "--couplings-file", str(tmp_path / "k3.txt"))
    assert json.loads(out) == {"n": 3, "ground_states": 2, "strict_local_minima": 0,
                               "plateau_members": 0, "min_energy": -1.0}


def test_json_output_to_file(capsys, tmp_path):
    out_path = tmp_path / "r.json"
    code, out, _ = run_cli(capsys, "qd", "--n", "20", "--trials", "2", "--format", "json",
                           "--out", str(out_path))
    assert code == 0 and out == ""
    doc = json.loads(out_path.read_text())
    assert doc["experiment"] == "qd"


def test_dump_and_reuse_couplings(capsys, tmp_path):
    path = tmp_path / "j.txt"
    code, first, _ = run_cli(capsys, "simulate", "--n", "12", "--dump-couplings", str(path))
    assert code == 0 and C.load(path).n == 12
    code, second, _ = run_cli(capsys, "simulate", "--n", "12", "--couplings-file", str(path))
    assert code == 0 and first == second


@pytest.mark.parametrize("argv", [
    ["simulate", "--n", "10", "--m0", "3"],
    ["simulate", "--n", "10", "--m0", "many"],
    ["simulate", "--n", "10", "--max-steps", "0"],
    ["simulate", "--model", "bernoulli", "--n", "10", "--p", "1.5"],
    ["qd", "--n", "10", "--replicas", "1"],
    ["mag0", "--n", "10", "--epsilon", "0.7"],
    ["simulate", "--n", "10", "--trials", "0"],
    ["simulate", "--n", "10", "--seed", "-1"],
])
def test_config_errors_exit_2(capsys, argv):
    code, _, err = run_cli(capsys, *argv)
    assert code == 2
    assert "configuration error" in err


def test_io_errors_exit_3(capsys, tmp_path):
    code, _, err = run_cli(capsys, "simulate", "--n", "10", "--out", str(tmp_path / "no" / "x.csv"))
    assert code == 3 and "x.csv" in err
    code, _, err = run_cli(capsys, "enumerate", "--couplings-file", str(tmp_path / "absent.txt"))
    assert code == 3


def test_enumerate_cap(capsys, tmp_path):
    C.dump(C.sample_constant(23, 1), tmp_path / "big.txt")
    code, _, _ = run_cli(capsys, "enumerate", "--couplings-file", str(tmp_path / "big.txt"))
    assert code == 2
