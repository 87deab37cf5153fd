import csv
import json

import numpy as np
import pytest

from mixfreq import cli
from mixfreq.serialize import load_model


CONFIG = """version: 1
seed: 11
data:
  synthetic: {T: 56}
models:
  - {type: mean}
  - {type: ar1}
  - {type: mfesn, preset: "singleESN [A]"}
  - {type: midas, p: 1}
window: {kind: rolling, initial: 40, step: 5}
horizons: [1, 2]
tests: {mcs_B: 200, umcs_B: 40}
output: {dir: out}
"""


@pytest.fixture
def config(tmp_path):
    p = tmp_path / "exp.yaml"
    p.write_text(CONFIG)
    return p


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_run_then_evaluate_and_compare(config, tmp_path):
    out = tmp_path / "res"
    assert cli.main(["--config", str(config), "--out-dir", str(out), "run"]) == cli.EXIT_OK
    for f in ("forecasts.csv", "metrics.csv", "table.csv", "table.json", "csfe.csv", "rmsfe_by_horizon.csv",
              "mdm.csv", "mcs.csv", "umcs.json", "run.json"):
        assert (out / f).exists(), f
    before = (out / "metrics.csv").read_text()
    # evaluate regenerates the metrics from forecasts.csv alone
    assert cli.main(["evaluate", "--forecasts", str(out / "forecasts.csv"), "--out-dir", str(tmp_path / "ev")]) == 0
    rel = {(r["model"], r["horizon"]): r["relative_msfe"] for r in _rows(tmp_path / "ev" / "metrics.csv")}
    for r in _rows(out / "metrics.csv"):
        assert float(rel[(r["model"], r["horizon"])]) == pytest.approx(float(r["relative_msfe"]), rel=1e-12)
    assert before == (out / "metrics.csv").read_text()
    assert cli.main(["compare", "--config", str(config), "--forecasts", str(out / "forecasts.csv"),
                     "--out-dir", str(tmp_path / "cmp")]) == 0
    assert (tmp_path / "cmp" / "mcs.csv").exists()


def test_flags_after_verb_and_seed_override(config, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(["run", "--config", str(config), "--out-dir", str(a), "--seed", "5", "--threads", "2"]) == 0
    assert cli.main(["--config", str(config), "--seed", "5", "run", "--out-dir", str(b)]) == 0
    assert (a / "forecasts.csv").read_bytes() == (b / "forecasts.csv").read_bytes()
    assert json.loads((a / "run.json").read_text())["seed"] == 5


def test_fit_forecast_roundtrip(config, tmp_path):
    out = tmp_path / "o"
    assert cli.main(["--config", str(config), "--out-dir", str(out), "fit", "--model", "singleESN [A]"]) == 0
    path = out / "models" / "singleESN__A.json"
    model, meta = load_model(path, with_meta=True)
    assert meta["name"] == "singleESN [A]" and meta["fit_stop"] == 40
    assert cli.main(["--config", str(config), "--out-dir", str(out), "forecast", str(path), "--horizons", "1", "2"]) == 0
    rows = _rows(out / "forecast_singleESN__A.csv")
    assert {r["horizon"] for r in rows} == {"1", "2"}
    # first-window forecasts agree with the run verb's fixed first window
    assert cli.main(["--config", str(config), "--out-dir", str(tmp_path / "r"), "run"]) == 0
    ref = {(r["origin"], r["horizon"]): float(r["forecast"]) for r in _rows(tmp_path / "r" / "forecasts.csv")
           if r["model"] == "singleESN [A]" and r["origin"] == "39"}
    mine = {(r["origin"], r["horizon"]): float(r["forecast"]) for r in rows if r["origin"] == "39"}
    for k, v in ref.items():
        assert mine[k] == pytest.approx(v, rel=1e-12, abs=1e-12)


def test_robustness_outputs(config, tmp_path):
    out = tmp_path / "rb"
    code = cli.main(["--config", str(config), "--out-dir", str(out), "robustness", "--model", "midas",
                     "--model", "singleESN [A]", "--starts", "4", "--replications", "3"])
    assert code == 0
    assert len(_rows(out / "robustness_midas.csv")) == 4
    assert _rows(out / "resample_singleESN__A.csv")


def test_ingest(tmp_path):
    rng = np.random.default_rng(0)
    (tmp_path / "q.csv").write_text("date,gdp\n" + "".join(f"{2000 + i // 4}-Q{i % 4 + 1},{v}\n"
                                                            for i, v in enumerate(rng.random(8))))
    (tmp_path / "m.csv").write_text("date,ip\n" + "".join(f"{2000 + i // 12}-{i % 12 + 1:02d},{v}\n"
                                                          for i, v in enumerate(1 + rng.random(24))))
    man = tmp_path / "man.yaml"
    man.write_text("version: 1\ntarget: {file: q.csv, column: gdp}\nseries:\n  - {file: m.csv, column: ip, kappa: 3}\n")
    assert cli.main(["ingest", str(man), "--output", str(tmp_path / "p.json")]) == 0
    assert json.loads((tmp_path / "p.json").read_text())["format"] == "mixfreq-panel"


def test_exit_codes(config, tmp_path, monkeypatch):
    assert cli.main(["--config", str(tmp_path / "missing.yaml"), "run"]) == cli.EXIT_CONFIG
    assert cli.main(["run"]) == cli.EXIT_CONFIG
    bad = tmp_path / "bad.yaml"
    bad.write_text(CONFIG.replace("singleESN [A]", "bigESN"))
    assert cli.main(["--config", str(bad), "run"]) == cli.EXIT_CONFIG
    monkeypatch.setenv("MIXFREQ_THREADS", "zero")
    assert cli.main(["--config", str(config), "--out-dir", str(tmp_path / "x"), "run"]) == cli.EXIT_CONFIG
    monkeypatch.delenv("MIXFREQ_THREADS")
    broken = tmp_path / "broken.yaml"
    broken.write_text(CONFIG.replace("{type: midas, p: 1}", "{type: midas, lags: [5000, null]}"))
    assert cli.main(["--config", str(broken), "--out-dir", str(tmp_path / "y"), "run"]) == cli.EXIT_PARTIAL
    assert cli.main(["evaluate", "--forecasts", str(tmp_path / "nothing.csv")]) == cli.EXIT_CONFIG
    with pytest.raises(SystemExit):
        cli.main(["launch"])
