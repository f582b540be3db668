import json
import os
import re
import subprocess
import sys

import numpy as np
import pytest

from ppclab.energy import EnergyReport, energy_report
from ppclab.errors import ConfigError, DomainError
from ppclab.expcli import (RunManifest, config_hash, emit_plot, parse_config, read_paircorr_table,
                           run_experiment)
from ppclab.expcli.cli import main
from ppclab.paircorr import PairCorrCurve, r2_curve
from ppclab.sequences import gen_power, load_sequence, save_sequence
from ppclab.variance import VarianceEstimate

BASE = {"sequence": {"family": "power", "theta": [2.5, 3.5]}, "tasks": ["paircorr"],
        "N_grid": [256], "s_grid": [0.5, 1, 2], "alpha": {"measure": "mu", "samples": 5, "seed": 7}}


def cfg(tmp_path, **over):
    raw = json.loads(json.dumps(BASE))
    raw.update(over)
    raw.setdefault("output", {"dir": str(tmp_path / "out")})
    return parse_config(raw)


# -- config ----------------------------------------------------------------------

def test_empty_task_list_rejected():
    with pytest.raises(ConfigError) as info:
        parse_config({**BASE, "tasks": []})
    assert any(p.startswith("tasks") for p in info.value.problems)


def test_every_problem_listed():
    raw = {"sequence": {"family": "power"}, "tasks": ["variance", "bogus"], "N_grid": [8, 4],
           "gamma": [2.0], "typo": 1, "alpha": {"measure": "mu"}}
    with pytest.raises(ConfigError) as info:
        parse_config(raw)
    text = "\n".join(info.value.problems)
    for needle in ("theta", "tasks", "typo", "N_grid", "gamma", "alpha.seed"):
        assert needle in text


def test_unknown_nested_key_rejected():
    raw = json.loads(json.dumps(BASE))
    raw["alpha"]["sede"] = 3
    with pytest.raises(ConfigError):
        parse_config(raw)


def test_seed_required_for_stochastic_tasks():
    raw = json.loads(json.dumps(BASE))
    del raw["alpha"]["seed"]
    with pytest.raises(ConfigError):
        parse_config(raw)
    raw["alpha"] = {"measure": "fixed", "values": [[0.3, 0.7]]}
    parse_config(raw)  # a fixed alpha list needs no seed


def test_config_hash_ignores_key_order():
    a = json.loads(json.dumps(BASE))
    b = dict(reversed(list(a.items())))
    b["alpha"] = dict(reversed(list(a["alpha"].items())))
    assert config_hash(a) == config_hash(b)
    assert config_hash(parse_config(a)) == config_hash(parse_config(b))
    assert config_hash(a) != config_hash({**a, "N_grid": [512]})


# -- runner ----------------------------------------------------------------------

def test_paircorr_run_layout(tmp_path):
    c = cfg(tmp_path, alpha={"measure": "mu", "samples": 20, "seed": 7}, N_grid=[1024])
    m = run_experiment(c)
    assert m.ok and m.exit_code == 0
    out = tmp_path / "out"
    lines = (out / "paircorr.csv").read_text().splitlines()
    head = lines[0].split(",")
    assert head[:4] == ["N", "s", "reference", "mean"]
    assert head[4:] == [f"alpha_{i:03d}" for i in range(20)]
    assert len(lines) == 4
    row = [float(v) for v in lines[2].split(",")]
    assert row[3] == pytest.approx(np.mean(row[4:]))
    assert b"\r" not in (out / "paircorr.csv").read_bytes()


def test_manifest_complete_and_parses_back(tmp_path):
    seq = gen_power([2.5], 300)
    save_sequence(seq, tmp_path / "seq.csv")
    c = parse_config({"sequence": {"family": "file", "path": str(tmp_path / "seq.csv")},
                      "tasks": ["paircorr", "energy", "variance", "selberg-check", "watt-check"],
                      "N_grid": [64, 128, 256], "alpha": {"samples": 4, "seed": 1},
                      "watt": {"A": [1, 2, 3], "M": [1], "delta": [0.5]},
                      "output": {"dir": str(tmp_path / "o")}})
    m = run_experiment(c)
    assert m.ok
    out = tmp_path / "o"
    back = RunManifest.read(out / "manifest.json")
    assert back == m
    for rec in m.tasks.values():
        for f in rec.files:
            assert (out / f).exists()
    table = read_paircorr_table(out / "paircorr.csv", d=1)
    assert sorted(table) == [64, 128, 256]
    mean, per = table[128]
    assert isinstance(mean, PairCorrCurve) and len(per) == 4
    np.testing.assert_allclose(mean.r2, np.mean([p.r2 for p in per], axis=0))
    rep = EnergyReport.read(out / "energy.csv", out / "energy.json")
    assert rep == energy_report(seq.values, 1.0, [64, 128, 256])
    ests = [VarianceEstimate(**e) for e in json.loads((out / "variance.json").read_text())]
    assert [e.N for e in ests] == [64, 128, 256]
    csv_rows = (out / "variance.csv").read_text().splitlines()
    assert csv_rows[0] == "N,var_stat,stderr"
    assert csv_rows[1:] == [e.csv_row() for e in ests]
    assert json.loads((out / "selberg.json").read_text())["ok"] is True
    assert json.loads((out / "watt.json").read_text())["rows"][0]["V"] == 3


def test_failed_task_recorded_and_others_run(tmp_path):
    c = cfg(tmp_path, tasks=["selberg-check", "energy"], N_grid=[16, 32, 64],
            selberg={"s": 6, "scale": 10})
    m = run_experiment(c)
    assert m.tasks["selberg-check"].status == "failed"
    assert "arc length" in m.tasks["selberg-check"].error
    assert m.tasks["selberg-check"].files == []
    assert m.tasks["energy"].status == "ok"
    assert m.exit_code == 2
    # nothing from the failed task is left behind
    assert not (tmp_path / "out" / "selberg.json").exists()
    assert not [p for p in os.listdir(tmp_path / "out") if p.startswith(".stage")]


def test_byte_identical_reruns(tmp_path):
    c1 = cfg(tmp_path, tasks=["paircorr", "variance"], N_grid=[64, 128],
             output={"dir": str(tmp_path / "a")})
    c2 = cfg(tmp_path, tasks=["paircorr", "variance"], N_grid=[64, 128],
             output={"dir": str(tmp_path / "b")})
    m1, m2 = run_experiment(c1), run_experiment(c2)
    for name, rec in m1.tasks.items():
        assert rec.files == m2.tasks[name].files
        for f in rec.files:
            assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
    # the output directory is part of the config, so the hashes differ
    assert m1.config_hash != m2.config_hash


def test_sequence_problems_raise_before_tasks(tmp_path):
    c = parse_config({"sequence": {"family": "file", "path": str(tmp_path / "none.csv")},
                      "tasks": ["energy"], "N_grid": [2, 3, 4]})
    with pytest.raises(Exception) as info:
        run_experiment(c, str(tmp_path / "o"))
    assert getattr(info.value, "code", None) == "missing"
    c = cfg(tmp_path, d=3)
    with pytest.raises(DomainError):
        run_experiment(c)


# -- plots -----------------------------------------------------------------------

def test_curve_svg(tmp_path):
    curve = r2_curve(np.random.default_rng(0).random((100, 2)), [0.5, 1, 2])
    path = emit_plot(curve, tmp_path / "c.svg")
    text = open(path).read()
    assert text.startswith("<svg") and text.count("<polyline") == 2
    assert text.count('<g class="axes"') == 1


def test_energy_svg_legend(tmp_path):
    rep = energy_report(np.arange(1, 65, dtype=float), 1.0, [8, 16, 32, 64])
    text = open(emit_plot(rep, tmp_path / "e.svg")).read()
    assert re.search(r"slope=2\.996±\d\.\d{3}", text)
    assert text.count("<circle") == 4 and text.count("<polyline") == 1


def test_empty_plot_and_unwritable_path(tmp_path):
    empty = PairCorrCurve(np.array([]), np.array([]), np.array([]), 1, 1)
    with pytest.raises(DomainError):
        emit_plot(empty, tmp_path / "x.svg")
    curve = r2_curve(np.random.default_rng(0).random((10, 1)), [1.0])
    with pytest.raises(OSError):
        emit_plot(curve, tmp_path / "missing-dir" / "x.svg")


# -- command line ----------------------------------------------------------------

def test_cli_roundtrip(tmp_path, capsys):
    seq = tmp_path / "seq.csv"
    assert main(["gen", "--family", "power", "--theta", "2.5,3.5", "--n", "256",
                 "--out", str(seq)]) == 0
    assert load_sequence(seq).values.shape == (256, 2)
    assert main(["energy", "--seq", str(seq), "--gamma", "1,1", "--n-grid", "32,64,128",
                 "--out-dir", str(tmp_path / "e")]) == 0
    assert "slope=" in capsys.readouterr().out
    assert main(["paircorr", "--seq", str(seq), "--alpha-samples", "3", "--seed", "7",
                 "--s-grid", "0.5,1,2", "--out-dir", str(tmp_path / "p")]) == 0
    assert (tmp_path / "p" / "paircorr.csv").exists()
    assert main(["paircorr", "--seq", str(seq), "--alpha", "0.5,1.5", "--s-grid", "1",
                 "--out-dir", str(tmp_path / "p2")]) == 0
    assert main(["selberg-check", "--k", "64", "--s", "1", "--scale", "10",
                 "--out-dir", str(tmp_path / "s")]) == 0


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["selberg-check", "--k", "8", "--s", "9", "--scale", "10",
                 "--out-dir", str(tmp_path / "s")]) == 2
    assert main(["energy", "--seq", str(tmp_path / "nope.csv"), "--n-grid", "1,2,3"]) == 3
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"tasks": []}))
    assert main(["run", str(bad)]) == 1
    bad.write_text("{not json")
    assert main(["run", str(bad)]) == 1
    assert main(["run", str(tmp_path / "absent.json")]) == 3
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 1


def test_cli_run_with_seed_override(tmp_path):
    conf = tmp_path / "c.json"
    raw = json.loads(json.dumps(BASE))
    raw["N_grid"] = [64]
    raw["output"] = {"dir": str(tmp_path / "r")}
    conf.write_text(json.dumps(raw))
    assert main(["run", str(conf), "--seed", "11", "--threads", "1"]) == 0
    m = json.loads((tmp_path / "r" / "manifest.json").read_text())
    assert m["tasks"]["paircorr"]["status"] == "ok"


def test_module_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "ppclab", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("ppclab ")
