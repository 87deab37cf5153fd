import json

import numpy as np
import pytest

from mixfreq import benchmarks, dfm, mfesn, midas
from mixfreq.serialize import from_jsonable, load_model, save_model, to_jsonable
from mixfreq.synthetic import simulate_mixed_panel


def _same(a, b):
    assert json.dumps(to_jsonable(a), sort_keys=True) == json.dumps(to_jsonable(b), sort_keys=True)


@pytest.fixture(scope="module")
def panel():
    return simulate_mixed_panel(T=50, seed=2)


def _models(panel):
    yield benchmarks.fit_mean(panel.target)
    yield benchmarks.fit_ar1(panel.target)
    yield mfesn.fit_preset(panel, "singleESN [A]", seed=1, lambdas=(1e-3, 1e-2))
    yield mfesn.fit_preset(panel, "multiESN [A]", seed=1, lambdas=(1e-3, 1e-2))
    yield midas.fit_midas(midas.build_design(panel, 1, [12, 6]), multistart=4)
    yield dfm.example3_model(k=2)


def test_roundtrip_is_exact(panel, tmp_path):
    for i, m in enumerate(_models(panel)):
        path = tmp_path / f"m{i}.json"
        save_model(m, path, {"note": i, "norm": {"mean": np.float64(0.1)}})
        back, meta = load_model(path, with_meta=True)
        assert type(back) is type(m)
        _same(back, m)
        assert meta["note"] == i


def test_roundtrip_forecasts_identical(panel, tmp_path):
    m = mfesn.fit_preset(panel, "singleESN [A]", seed=4, lambdas=(1e-2, 1e-1))
    save_model(m, tmp_path / "m.json")
    back = load_model(tmp_path / "m.json")
    assert np.array_equal(mfesn.forecast(m, panel, 2), mfesn.forecast(back, panel, 2))


def test_rejects_foreign_files(tmp_path):
    p = tmp_path / "x.json"
    p.write_text(json.dumps({"format": "other"}))
    with pytest.raises(ValueError):
        load_model(p)
    p.write_text(json.dumps({"format": "mixfreq-model", "version": 99, "model": None}))
    with pytest.raises(ValueError, match="version"):
        load_model(p)
    with pytest.raises(ValueError, match="unknown"):
        from_jsonable({"__type__": "Evil"})
    with pytest.raises(TypeError):
        to_jsonable(object())
