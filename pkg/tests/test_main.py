import json

import pytest

from main import main

BASE = ["--no-file-log", "--log-level", "WARNING"]


def test_run_writes_csv(tmp_path):
    out = tmp_path / "protocol1.csv"
    assert main(["run", "--preset", "protocol1", "--grid", "32", "--out", str(out)] + BASE) == 0
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("s,e1,U_1,")
    assert len(lines) == 34


def test_ldos_plot_to_stdout(capsys):
    assert main(["ldos", "--preset", "protocol1", "--s", "0.5", "--format", "plot"] + BASE) == 0
    out = capsys.readouterr().out
    assert out.startswith("# s: 0.5\n# sigma: 0.050000000000000003\n# curve: ldos_1")


def test_oracle_check_to_stdout(capsys):
    code = main(["oracle-check", "--preset", "protocol1", "--samples", "2", "--random-models", "2"] + BASE)
    assert code == 0
    assert capsys.readouterr().out.startswith("model,s,check,error,tolerance,passed\n")


def test_pathdep_table(tmp_path):
    out = tmp_path / "paths.csv"
    assert main(["pathdep", "--preset", "pathdep", "--grid", "512", "--out", str(out)] + BASE) == 0
    assert out.read_text(encoding="utf-8").startswith("label,quantity,path_A,path_B,difference,quadrature_error\n")


@pytest.mark.parametrize("argv", [
    ["run", "--config", "does-not-exist.json"],
    ["run", "--preset", "protocol1", "--grid", "100"],
    ["sweep", "--preset", "protocol1", "--grid", "32"],
    ["lever", "--preset", "protocol2", "--grid", "32"],
    ["ldos", "--preset", "protocol1", "--s", "2"],
])
def test_validation_errors_exit_2(argv):
    assert main(argv + BASE) == 2


def test_degenerate_protocol_exits_3(tmp_path):
    document = {
        "model": {"sites": ["1", "2"], "onsite": {"1": "e1", "2": "e2"}, "bonds": [["1", "2", "w"]]},
        "partition": {"assignment": {"1": "1", "2": "2"}, "labels": ["1", "2"]},
        "reservoir": {"temperature": 0.2},
        "protocol": {"waypoints": [
            {"s": 0, "params": {"e1": -1.0, "e2": 0.0, "w": 0.0}},
            {"s": 1, "params": {"e1": 1.0, "e2": 0.0, "w": 0.0}},
        ]},
        "grid": 32,
    }
    path = tmp_path / "crossing.json"
    path.write_text(json.dumps(document), encoding="utf-8")
    assert main(["run", "--config", str(path)] + BASE) == 3


def test_config_or_preset_required():
    with pytest.raises(SystemExit) as info:
        main(["run"] + BASE)
    assert info.value.code == 2


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0
    assert capsys.readouterr().out.strip() == "SubThermo 1.0"
