import json
import subprocess
import sys

import pytest

from subspace_doa.cli import EXIT_ALL_DIVERGED, EXIT_INVALID, EXIT_OK, main
from subspace_doa.experiment import PRESET_NAMES, preset


def small_config(tmp_path, **kw):
    d = preset("fig5").to_dict()
    d.update(num_trials=1, trace_every=50)
    d["learning"]["max_epochs"] = 20
    d.update(kw)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(d))
    return path


def test_presets_listing(capsys):
    assert main(["presets"]) == EXIT_OK
    assert capsys.readouterr().out.split() == list(PRESET_NAMES)


def test_run_config(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", "--config", str(small_config(tmp_path)), "--out", str(out)]) == EXIT_OK
    assert sorted(p.name for p in out.iterdir()) == ["config.json", "report.json", "spectrum.csv", "trace.csv"]
    assert "median_rmse" in capsys.readouterr().out


def test_seed_and_trials_override(tmp_path):
    out = tmp_path / "out"
    assert main(["run", "--config", str(small_config(tmp_path)), "--out", str(out), "--seed", "42", "--trials", "2"]) == EXIT_OK
    cfg = json.loads((out / "config.json").read_text())
    assert cfg["seed"] == 42 and cfg["num_trials"] == 2
    assert len(json.loads((out / "report.json").read_text())["records"]) == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["run", "--preset", "nope"],
        ["run"],
        ["run", "--preset", "fig5", "--config", "x.json"],
        ["run", "--preset", "fig5", "--trials", "zero"],
        ["frobnicate"],
    ],
)
def test_usage_errors_exit_1(argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == EXIT_INVALID


def test_invalid_config_values(tmp_path):
    assert main(["run", "--config", str(small_config(tmp_path, num_trials=0))]) == EXIT_INVALID
    assert main(["run", "--preset", "fig5", "--trials", "0", "--out", str(tmp_path)]) == EXIT_INVALID
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["run", "--config", str(bad)]) == EXIT_INVALID
    assert main(["run", "--config", str(tmp_path / "missing.json")]) == EXIT_INVALID


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["run", "--config", str(small_config(tmp_path)), "--out", str(blocker / "sub")]) == EXIT_INVALID


def test_all_diverged_exit_2(tmp_path):
    d = preset("fig5").to_dict()
    d.update(num_trials=2, sources=[{"doa_deg": 60.0, "normalized_freq": 0.35, "amplitude": 20.0}])
    d["learning"].update(eta=0.5, max_epochs=10)
    path = tmp_path / "div.json"
    path.write_text(json.dumps(d))
    assert main(["run", "--config", str(path), "--out", str(tmp_path / "o")]) == EXIT_ALL_DIVERGED


def test_console_script_module(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "subspace_doa.cli", "run", "--config", str(small_config(tmp_path)), "--out", str(tmp_path / "o")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
