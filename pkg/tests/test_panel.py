import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mixfreq.panel import (GarchError, MixedPanel, SeriesGroup, TransformDomainError, apply_normalization,
                           apply_transform, average_blocks, fill_trailing_mean, fit_garch11,
                           interpolate_to_fixed_grid, load_csv, load_manifest, load_panel, save_panel, standardize)
from mixfreq.synthetic import simulate_mixed_panel


def _garch_sim(omega, a, b, T, seed, mu=0.0):
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(T + 500)
    r = np.empty_like(z)
    s2 = omega / (1 - a - b)
    for t in range(z.size):
        r[t] = mu + np.sqrt(s2) * z[t]
        s2 = omega + a * (r[t] - mu) ** 2 + b * s2
    return r[500:]


# ---------------------------------------------------------------- csv

def test_load_csv_basic_missing_and_errors(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("date,x\n2020-01-01,1\n2020-01-02,2\n2020-01-03,3\n")
    s = load_csv(p, kappa=3)
    assert s.values.tolist() == [1.0, 2.0, 3.0] and s.name == "x"

    p.write_text("date,x\n2020-01-01,1\n2020-01-02,\n2020-01-03,3\n")
    assert np.isnan(load_csv(p, 3).values).sum() == 1

    p.write_text("date,x\n2020-01-01,1\n2020-01-02,abc\n")
    with pytest.raises(ValueError, match=":3:"):
        load_csv(p, 3)

    p.write_text("date,x\n2020-01-01,1\n2020-01-01,2\n")
    with pytest.raises(ValueError, match="duplicate"):
        load_csv(p, 3)


def test_load_csv_sorts_rows(tmp_path):
    p = tmp_path / "b.csv"
    p.write_text('date,"x, quoted"\n2020-02-01,2\n2020-01-01,1\n')
    s = load_csv(p, 3, column="x, quoted")
    assert s.keys == ["2020-01-01", "2020-02-01"] and s.values.tolist() == [1.0, 2.0]


# ---------------------------------------------------------------- transforms

def test_transform_examples():
    assert apply_transform(np.array([1.0, 3.0, 6.0]), 2).tolist() == [2.0, 3.0]
    np.testing.assert_allclose(apply_transform(np.exp([0.0, 1.0, 2.0]), 5), [1.0, 1.0])
    assert apply_transform(np.array([2.0, 3.0]), 7).tolist() == [0.5]
    with pytest.raises(TransformDomainError, match="index 1"):
        apply_transform(np.array([1.0, -1.0, 2.0]), 4)
    with pytest.raises(TransformDomainError):
        apply_transform(np.array([0.0, 1.0]), 7)
    with pytest.raises(ValueError):
        apply_transform(np.array([1.0, 2.0]), 9)


@given(st.lists(st.floats(0.1, 100), min_size=4, max_size=30))
def test_transform_compositions(xs):
    x = np.array(xs)
    np.testing.assert_allclose(apply_transform(x, 3), apply_transform(apply_transform(x, 2), 2))
    np.testing.assert_allclose(apply_transform(x, 6), apply_transform(apply_transform(apply_transform(x, 4), 2), 2))


# ---------------------------------------------------------------- garch

def test_garch_on_iid_noise():
    r = np.random.default_rng(0).standard_normal(2000)
    p, vol = fit_garch11(r)
    assert p.a + p.b < 1
    assert np.mean(np.abs(vol - 1.0)) < 0.1
    if p.a < 0.05:
        assert abs(p.omega - r.var() * (1 - p.a - p.b)) < 0.1


def test_garch_recovery_single():
    r = _garch_sim(0.1, 0.1, 0.8, 5000, seed=1)
    p, vol = fit_garch11(r)
    assert abs(p.omega - 0.1) < 0.1 and abs(p.a - 0.1) < 0.1 and abs(p.b - 0.8) < 0.1
    assert vol.shape == r.shape and np.all(vol > 0)


def test_garch_recovery_rate():
    hits = 0
    for seed in range(20):
        p, _ = fit_garch11(_garch_sim(0.1, 0.1, 0.8, 5000, seed=100 + seed))
        hits += abs(p.a - 0.1) < 0.1 and abs(p.b - 0.8) < 0.1
    assert hits >= 18


def test_garch_degenerate():
    with pytest.raises(GarchError):
        fit_garch11(np.ones(100))
    with pytest.raises(ValueError):
        fit_garch11(np.zeros(10))


def test_code8_is_volatility_of_log_returns():
    price = 100 * np.exp(np.cumsum(0.01 * np.random.default_rng(2).standard_normal(400)))
    vol = apply_transform(price, 8)
    assert vol.size == 399 and np.all(vol > 0)
    np.testing.assert_allclose(vol, fit_garch11(np.diff(np.log(price)))[1])


# ---------------------------------------------------------------- grids

def test_interpolation_examples():
    x = np.arange(24.0)
    np.testing.assert_array_equal(interpolate_to_fixed_grid([x], 24), x)
    np.testing.assert_allclose(interpolate_to_fixed_grid([[2.0, 4.0]], 4, anchor=0.0), [2 / 3, 4 / 3, 2, 4])
    np.testing.assert_array_equal(interpolate_to_fixed_grid([np.arange(26.0)], 24), np.arange(2.0, 26.0))
    with pytest.raises(ValueError, match="anchor"):
        interpolate_to_fixed_grid([[1.0]], 3)


def test_interpolation_uses_previous_block_end():
    out = interpolate_to_fixed_grid([[1.0, 2.0, 3.0], [6.0]], 3)
    np.testing.assert_allclose(out, [1, 2, 3, 4, 5, 6])


@given(st.lists(st.integers(1, 30), min_size=1, max_size=8), st.integers(1, 24))
def test_interpolation_length(sizes, per):
    blocks = [np.arange(n, dtype=float) for n in sizes]
    assert interpolate_to_fixed_grid(blocks, per, anchor=0.0).size == per * len(sizes)


def test_trailing_mean_fill():
    np.testing.assert_allclose(fill_trailing_mean([1, 2, 3, 4, 5, np.nan]), [1, 2, 3, 4, 5, 3])
    with pytest.raises(ValueError):
        fill_trailing_mean([np.nan, 1.0])


def test_average_blocks_examples():
    assert average_blocks(np.arange(1.0, 7.0), 6).tolist() == [3.5]
    assert average_blocks(np.full(6, 2.5), 6).tolist() == [2.5]
    with pytest.raises(ValueError):
        average_blocks(np.arange(7.0), 6)
    assert average_blocks(np.arange(72.0 * 2), 6).size == 24


@given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=10), st.integers(1, 6))
def test_average_then_repeat_keeps_block_means(vals, b):
    x = np.repeat(np.array(vals), b) + np.tile(np.linspace(-1, 1, b), len(vals))
    avg = average_blocks(x, b)
    np.testing.assert_allclose(average_blocks(np.repeat(avg, b), b), avg, atol=1e-9)


# ---------------------------------------------------------------- standardize / io

def _tiny_panel():
    return MixedPanel(np.array([1.0, 2.0, 3.0]), [SeriesGroup(2, np.arange(6.0)[:, None] ** 2, ["z"])], "y")


def test_standardize_example_and_inverse():
    p = standardize(_tiny_panel())
    np.testing.assert_allclose(p.target, [-1.224744871, 0, 1.224744871], atol=1e-9)
    np.testing.assert_allclose(p.destandardize_target(p.target), [1, 2, 3])
    q = apply_normalization(_tiny_panel(), p.normalization)
    np.testing.assert_array_equal(q.groups[0].data, p.groups[0].data)


def test_standardize_constant_series_names_it():
    p = MixedPanel(np.ones(3), [SeriesGroup(1, np.arange(3.0)[:, None], ["z"])], "gdp")
    with pytest.raises(ValueError, match="gdp"):
        standardize(p)


def test_panel_invariants():
    with pytest.raises(ValueError):
        MixedPanel(np.ones(3), [SeriesGroup(2, np.ones((5, 1)), ["z"])])
    with pytest.raises(ValueError):
        MixedPanel(np.ones(3), [SeriesGroup(4, np.ones((12, 1)), ["a"]), SeriesGroup(3, np.ones((9, 1)), ["b"])])
    with pytest.raises(ValueError):
        MixedPanel(np.ones(1), [])


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_panel_round_trip_is_bit_exact(tmp_path_factory, seed):
    p = standardize(simulate_mixed_panel(T=12, seed=seed))
    path = tmp_path_factory.mktemp("p") / "panel.json"
    save_panel(p, path)
    q = load_panel(path)
    assert q.target.tobytes() == p.target.tobytes()
    for a, b in zip(p.groups, q.groups):
        assert a.kappa == b.kappa and a.names == b.names and a.data.tobytes() == b.data.tobytes()
    assert {k: tuple(v) for k, v in q.normalization.items()} == p.normalization
    assert json.loads(path.read_text())["format"] == "mixfreq-panel"


def test_manifest_ingestion(tmp_path):
    T = 6
    rng = np.random.default_rng(0)
    q = tmp_path / "q.csv"
    q.write_text("date,gdp\n" + "".join(f"{2000 + i // 4}-Q{i % 4 + 1},{v}\n" for i, v in enumerate(rng.random(T))))
    m = tmp_path / "m.csv"
    rows = [f"{2000 + i // 12}-{i % 12 + 1:02d},{v}\n" for i, v in enumerate(1 + rng.random(3 * T))]
    m.write_text("date,ip\n" + "".join(rows))
    d = tmp_path / "d.csv"
    rows = []
    for i in range(3 * T):
        n = 4 if i % 2 else 5  # ragged months
        rows += [f"{2000 + i // 12}-{i % 12 + 1:02d}-{k + 1:02d},{1 + rng.random()}\n" for k in range(n)]
    d.write_text("date,spread\n" + "".join(rows))
    man = tmp_path / "manifest.yaml"
    man.write_text("""version: 1
target: {file: q.csv, column: gdp, kappa: 1, transform_code: 1}
series:
  - {file: m.csv, column: ip, kappa: 3, transform_code: 5}
  - {file: d.csv, column: spread, kappa: 12, transform_code: 1, per_period: 4}
""")
    p = load_manifest(man)
    assert p.kappa_max == 12 and [g.kappa for g in p.groups] == [12, 3]
    assert all(g.data.shape[0] == p.T * g.kappa for g in p.groups)
