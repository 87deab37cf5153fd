import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mixfreq import harness
from mixfreq.harness import (ConfigError, ExperimentConfig, WindowScheme, classify_step, multicast,
                             run_experiment, run_model_windows, windows)
from mixfreq.synthetic import simulate_mixed_panel


def test_classify_step_examples():
    assert (classify_step(2, 3).kind, classify_step(2, 3).ell) == ("nowcast", 2)
    s = classify_step(3, 3)
    assert (s.kind, s.h) == ("lf", 1)
    s = classify_step(4, 3)
    assert (s.kind, s.h, s.ell, s.m) == ("hf", 2, 1, 1)
    with pytest.raises(ValueError):
        classify_step(0, 3)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12), st.integers(1, 72))
def test_multicast_partition(H, kappa):
    steps = multicast(H, kappa)
    assert [s.l for s in steps] == list(range(1, H * kappa + 1))
    for s in steps:
        assert s.h == math.ceil(s.l / kappa) and s.ell == s.l % kappa
        if s.kind == "hf":
            assert s.ell != 0
        if s.kind == "nowcast":
            assert s.l <= kappa - 1


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(["fixed", "rolling", "expanding"]), st.integers(3, 30), st.integers(1, 6),
       st.integers(0, 5), st.integers(1, 4), st.integers(0, 40))
def test_window_invariants(kind, initial, step, start, H, extra):
    T = start + initial + H + extra
    ws = windows(WindowScheme(kind, initial, step, start), T, H)
    origins = [o for w in ws for o in w.origins]
    assert origins == list(range(start + initial - 1, T - H))
    for w in ws:
        assert all(w.stop - 1 <= o for o in w.origins) and w.stop - 1 == w.origins[0]
    if kind == "rolling":
        assert len({w.stop - w.start for w in ws}) == 1
    if kind == "expanding":
        for a, b in zip(ws, ws[1:]):
            assert b.start == a.start and b.stop > a.stop
    if kind == "fixed":
        assert len(ws) == 1


def test_window_errors():
    with pytest.raises(ConfigError):
        WindowScheme("sliding")
    with pytest.raises(ConfigError):
        windows(WindowScheme("fixed", 40), 40, 1)
    with pytest.raises(ConfigError):
        windows(WindowScheme("fixed", 10, test=50), 40, 1)


def test_fit_counts():
    panel = simulate_mixed_panel(T=50, seed=0)
    fixed = run_model_windows({"type": "ar1"}, panel, WindowScheme("fixed", 30), [1])
    assert fixed.n_fits == 1 and fixed.origins.size == 50 - 30 - 1 + 1
    S = 10
    roll = run_model_windows({"type": "ar1"}, panel, WindowScheme("rolling", 30, 1, test=S), [1])
    assert roll.n_fits == S and roll.origins.size == S


def test_rolling_step1_refits_each_origin():
    panel = simulate_mixed_panel(T=45, seed=1)
    fs = run_model_windows({"type": "ar1"}, panel, WindowScheme("rolling", 30, 1, test=5), [1])
    phis = [i["phi"] for i in fs.info]
    assert len(set(phis)) == 5


def _cfg(tmp_path, **over):
    doc = {
        "version": 1, "seed": 3,
        "data": {"synthetic": {"T": 60}},
        "models": [{"type": "mean"}, {"type": "ar1"}, {"type": "mfesn", "preset": "singleESN [A]"}],
        "window": {"kind": "rolling", "initial": 40, "step": 5},
        "horizons": [1, 2],
        "tests": {"mcs_B": 200, "umcs_B": 50},
        "output": {"dir": str(tmp_path / "out")},
    }
    doc.update(over)
    return ExperimentConfig.from_dict(doc, tmp_path)


def test_run_and_emit(tmp_path):
    cfg = _cfg(tmp_path)
    res = run_experiment(cfg)
    assert not res.failures
    out = tmp_path / "out"
    harness.emit_tables(res, out)
    table = json.loads((out / "table.json").read_text())
    assert all(table["mean"][h]["relative_msfe"] == 1.0 for h in ("1", "2"))
    csv_rows = [l.split(",") for l in (out / "metrics.csv").read_text().splitlines()[1:]]
    for name, h, msfe, _, rel, _, _ in csv_rows:
        j = table[name][h]
        assert float(f"{float(msfe):.12g}") == float(f"{j['msfe']:.12g}")
        assert float(f"{float(rel):.12g}") == float(f"{j['relative_msfe']:.12g}")
    names, hs, origins, losses = harness.read_forecasts(out / "forecasts.csv")
    assert names == res.model_names and hs == (1, 2)
    for n in names:
        assert np.allclose(losses[n], res.losses[n], rtol=1e-15)
    assert json.loads((out / "umcs.json").read_text())["config"]["kernel"] == "bartlett"


def test_threads_do_not_change_results(tmp_path):
    a = run_experiment(_cfg(tmp_path), threads=1)
    b = run_experiment(_cfg(tmp_path), threads=3)
    for n in a.model_names:
        assert np.array_equal(a.losses[n], b.losses[n])


def test_failure_isolation_and_na(tmp_path):
    # a MIDAS with more lags than the window can identify fails in every cell
    cfg = _cfg(tmp_path, models=[{"type": "mean"}, {"type": "midas", "lags": [2000, None], "name": "broken"}])
    res = run_experiment(cfg)
    assert "broken" in res.failures and "mean" not in res.failures
    out = tmp_path / "out"
    harness.emit_tables(res, out)
    lines = [l for l in (out / "forecasts.csv").read_text().splitlines() if l.startswith("broken,")]
    assert lines and all(l.endswith(",NA") for l in lines)
    metrics = [l for l in (out / "metrics.csv").read_text().splitlines() if l.startswith("broken,")]
    assert all(",NA," in l for l in metrics)
    assert np.all(np.isfinite(res.losses["mean"]))


def test_expanding_refuses_umcs(tmp_path):
    cfg = _cfg(tmp_path, window={"kind": "expanding", "initial": 40, "step": 5})
    res = run_experiment(cfg)
    assert "skipped" in res.tests["umcs"]


def test_config_validation(tmp_path):
    with pytest.raises(ConfigError, match="version"):
        _cfg(tmp_path, version=9)
    with pytest.raises(ConfigError, match="preset"):
        _cfg(tmp_path, models=[{"type": "mfesn", "preset": "nope"}])
    with pytest.raises(ConfigError, match="duplicate"):
        _cfg(tmp_path, models=[{"type": "mean"}, {"type": "mean"}])
    with pytest.raises(ConfigError, match="exactly one"):
        _cfg(tmp_path, data={})
    with pytest.raises(ConfigError):
        _cfg(tmp_path, window={"kind": "rolling", "width": 3})
    with pytest.raises(ConfigError):
        _cfg(tmp_path, data={"panel": "missing.json"}).load_panel()
    assert _cfg(tmp_path, horizons=3).horizons == (1, 2, 3)


def test_cv_span_start_must_precede_window(tmp_path):
    cfg = _cfg(tmp_path, cv={"span_start": 5}, models=[{"type": "mfesn", "preset": "singleESN [A]"}],
               window={"kind": "fixed", "initial": 40})
    res = run_experiment(cfg)
    assert res.failures  # span_start later than the window start (0)
    cfg = _cfg(tmp_path, cv={"span_start": 0}, models=[{"type": "mfesn", "preset": "singleESN [A]"}],
               window={"kind": "fixed", "initial": 30, "start": 10})
    assert not run_experiment(cfg).failures
