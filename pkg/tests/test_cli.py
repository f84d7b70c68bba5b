import csv
import json
import subprocess
import sys

import pytest

from exjacobi.cli import EXPERIMENTS, ConfigError, ExperimentConfig, fmt, main, parse_complex, run

SMALL = {"n_list": [20, 40], "l_max": 3, "z_list": [2, "0+1j"]}


def write_cfg(tmp_path, **kw):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(kw))
    return path


def test_fmt_and_parse():
    assert fmt(True) == "true" and fmt(3) == "3"
    assert fmt(0.1) == "0.10000000000000001"
    assert fmt(1 - 2j) == "1-2j"
    assert fmt(complex(2, 0)) == "2"
    assert parse_complex("1+2j") == 1 + 2j
    assert parse_complex([1, -1]) == 1 - 1j
    assert parse_complex(3) == 3
    with pytest.raises(ConfigError):
        parse_complex("abc")


def test_config_defaults():
    cfg = ExperimentConfig.from_dict({"experiment": "zeros"})
    assert cfg.n_list == [50, 100, 200, 400] and cfg.l_max == 6 and cfg.z_list == [2]
    assert cfg.family["seed_type"] == "I"


@pytest.mark.parametrize("bad", [
    [],
    {"family": "nope", "experiment": "zeros"},
    {"family": 3, "experiment": "zeros"},
    {"family": "F1"},
    {"experiment": "zeros", "n_list": []},
    {"experiment": "zeros", "n_list": ["x"]},
])
def test_config_errors(bad):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(bad)


@pytest.mark.parametrize("name", sorted(EXPERIMENTS))
def test_every_experiment_runs(tmp_path, name):
    cfg = ExperimentConfig.from_dict({"family": "F1", "experiment": name, **SMALL})
    code, summary_path = run(cfg, tmp_path)
    assert code == 0
    summary = json.loads(summary_path.read_text())
    assert summary["experiment"] == name and summary["checks"]
    rows = list(csv.reader((tmp_path / summary["csv"]).open()))
    assert len(rows) >= 2
    assert all(len(r) == len(rows[0]) for r in rows)


def test_main_writes_outputs(tmp_path, capsys):
    cfg = write_cfg(tmp_path, family="F2", experiment="ratio", **SMALL)
    assert main(["--config", str(cfg), "--out", str(tmp_path / "out")]) == 0
    assert (tmp_path / "out" / "ratio.csv").exists()
    assert str(tmp_path / "out" / "ratio.json") in capsys.readouterr().out


def test_custom_family_dict(tmp_path):
    fam = {"seed_type": "II", "alpha": 0.5, "beta": 2.5, "m": 1}
    cfg = write_cfg(tmp_path, family=fam, experiment="family-check", n_list=[10])
    assert main(["--config", str(cfg), "--out", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "family-check.json").read_text())["passed"]


def test_exit_codes(tmp_path):
    assert main(["--experiment", "nope", "--out", str(tmp_path)]) == 1
    assert main(["--config", str(tmp_path / "missing.json")]) == 1
    bad_fam = write_cfg(tmp_path, family={"seed_type": "II", "alpha": -0.9, "beta": 0.5, "m": 1},
                        experiment="zeros")
    assert main(["--config", str(bad_fam), "--out", str(tmp_path)]) == 2
    incomplete = write_cfg(tmp_path, family="F3", experiment="traces", n_list=[10], l_max=2)
    assert main(["--config", str(incomplete), "--out", str(tmp_path)]) == 3
    with pytest.raises(SystemExit) as exc:
        main(["--bogus"])
    assert exc.value.code == 1


def test_sweep_output_deterministic(tmp_path):
    cfg = write_cfg(tmp_path, family="F1", experiment="selfinv-sweep", seed=5)
    out = []
    for d in ("a", "b"):
        assert main(["--config", str(cfg), "--out", str(tmp_path / d)]) == 0
        out.append((tmp_path / d / "selfinv-sweep.csv").read_bytes())
    assert out[0] == out[1]


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "exjacobi.cli", "--experiment", "selfinv-sweep", "--out", str(tmp_path)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert json.loads((tmp_path / "selfinv-sweep.json").read_text())["passed"]
