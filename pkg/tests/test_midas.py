import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mixfreq import midas
from mixfreq.midas import (AlmonDomainError, MidasModel, almon_weights, build_design, fit_midas,
                           forecast_midas, hf_forecast_midas, midas_loss_grad, robustness_rows, start_points)
from mixfreq.panel import MixedPanel, SeriesGroup
from mixfreq.synthetic import simulate_midas


def _panel(T=40, kappas=(3,), seed=0):
    rng = np.random.default_rng(seed)
    groups = [SeriesGroup(k, rng.standard_normal((T * k, 1)), [f"z{k}"]) for k in kappas]
    return MixedPanel(rng.standard_normal(T), groups, "y")


# ---------------------------------------------------------------- weights

def test_almon_examples():
    assert np.allclose(almon_weights((0, 0), 2), [1 / 3] * 3, atol=1e-15)
    w = np.exp(-np.arange(3.0))
    assert np.allclose(almon_weights((-1, 0), 2), w / w.sum(), atol=1e-15)
    assert np.allclose(almon_weights((-1, 0), 2), [0.66524, 0.24473, 0.09003], atol=5e-6)


def test_almon_overflow_guard():
    w = almon_weights((700 / 30, 0.0), 30)  # exactly at the guard
    assert np.all(np.isfinite(w)) and abs(w.sum() - 1) < 1e-12
    with pytest.raises(AlmonDomainError, match="rescale"):
        almon_weights((0.0, 1.0), 30)


@settings(max_examples=100, deadline=None)
@given(st.floats(-5, 5), st.floats(-0.5, 0.5), st.integers(0, 40))
def test_almon_normalized_nonnegative(t1, t2, K):
    if abs(t1) * K + abs(t2) * K * K > 700:
        return
    w = almon_weights((t1, t2), K)
    assert w.shape == (K + 1,) and np.all(w >= 0) and abs(w.sum() - 1) < 1e-12


@settings(max_examples=50, deadline=None)
@given(st.floats(-2, 2), st.floats(-0.05, 0.05), st.floats(-50, 50))
def test_softmax_shift_invariance(t1, t2, c):
    k = np.arange(13.0)
    e = t1 * k + t2 * k * k
    a = np.exp(e - e.max())
    b = np.exp(e + c - (e + c).max())
    assert np.allclose(a / a.sum(), b / b.sum(), rtol=1e-12, atol=1e-15)
    assert np.allclose(almon_weights((t1, t2), 12), a / a.sum(), rtol=1e-12, atol=1e-15)


# ---------------------------------------------------------------- design

def test_design_contemporaneous_k1():
    p = _panel(T=12, kappas=(1,))
    d = build_design(p, 0, [0])
    # row for period t uses the regressor released at the end of t-1
    assert np.array_equal(d.y, p.target[1:])
    assert np.array_equal(d.Z[0][:, 0], p.groups[0].data[:-1, 0])
    assert d.ar.shape == (11, 0)


def test_replicated_response_rows():
    d = build_design(_panel(T=10, kappas=(3,)), 0, [2])
    assert d.replicated_response.shape == (30,)


def test_paper_configuration_builds():
    p = _panel(T=80, kappas=(3, 72))
    d = build_design(p, 3, {0: 9, 1: 30})
    assert d.n_params == 1 + 3 + 6 and d.n_rows > 0
    assert len({d.y.size, d.ar.shape[0], d.Z[0].shape[0], d.Z[1].shape[0]}) == 1


def test_identifiability_error():
    with pytest.raises(ValueError, match="need T >"):
        build_design(_panel(T=4, kappas=(3,)), 1, [9])


def test_design_spot_checks():
    p = _panel(T=30, kappas=(3, 12), seed=4)
    d = build_design(p, 2, [5, 20])
    rng = np.random.default_rng(0)
    km = p.kappa_max
    for r in rng.integers(0, d.n_rows, 25):
        t, s = d.t[r], d.s[r]
        assert d.y[r] == p.target[t]
        assert np.array_equal(d.ar[r], p.target[[t - 1, t - 2]])
        J = t * km + s
        for (g, K), Z in zip(((0, 5), (1, 20)), d.Z):
            kap = p.groups[g].kappa
            c = J // (km // kap) - 1
            assert np.array_equal(Z[r], p.groups[g].data[c - np.arange(K + 1), 0])
    # only rows that really lack a lag are dropped
    assert d.t.min() >= 2


# ---------------------------------------------------------------- loss and gradient

def _random_design(seed=0):
    p = _panel(T=50, kappas=(3, 12), seed=seed)
    return build_design(p, 2, [6, 15])


def test_gradient_matches_central_differences():
    d = _random_design()
    rng = np.random.default_rng(1)
    for _ in range(20):
        x = rng.normal(0, 0.3, d.n_params)
        x[[5, 8]] = rng.normal(0, 0.05, 2)  # theta2 entries stay moderate
        _, g = midas_loss_grad(x, d)
        fd = np.empty_like(x)
        for i in range(x.size):
            e = np.zeros_like(x)
            e[i] = 1e-6
            fd[i] = (midas_loss_grad(x + e, d)[0] - midas_loss_grad(x - e, d)[0]) / 2e-6
        assert np.max(np.abs(g - fd)) <= 1e-5 * max(1.0, np.max(np.abs(fd)))


def test_zero_beta_kills_theta_gradient():
    d = _random_design(2)
    x = np.random.default_rng(0).normal(0, 0.3, d.n_params)
    x[3] = 0.0  # beta of the first regressor; its thetas follow
    _, g = midas_loss_grad(x, d)
    assert g[4] == 0.0 and g[5] == 0.0 and g[7] != 0.0


def test_zero_loss_at_truth():
    p = simulate_midas(120, 0.3, [0.4], 1.2, (0.2, -0.03), 9, kappa=3, seed=3)
    d = build_design(p, 1, [9]).lf()
    loss, g = midas_loss_grad([0.3, 0.4, 1.2, 0.2, -0.03], d)
    assert loss < 1e-20 and np.max(np.abs(g)) < 1e-8


# ---------------------------------------------------------------- fitting

def test_noiseless_recovery_from_zero():
    truth = np.array([0.3, 0.5, 1.5, 0.3, -0.04])
    p = simulate_midas(200, 0.3, [0.5], 1.5, (0.3, -0.04), 9, kappa=3, seed=7)
    m = fit_midas(build_design(p, 1, [9]))
    assert np.max(np.abs(m.vector() - truth)) < 1e-3
    assert np.array_equal(m.starts[0].start, np.zeros(5))


def test_start_points_in_cube_and_seeded():
    for method in ("sobol", "stratified"):
        s = start_points(64, 5, 0.025, method, seed=3)
        assert s.shape == (64, 5) and s.min() >= 0 and s.max() <= 0.025
        assert np.array_equal(s, start_points(64, 5, 0.025, method, seed=3))
    with pytest.raises(ValueError):
        start_points(4, 2, method="halton")


def test_multistart_selects_minimum_and_is_thread_invariant():
    p = simulate_midas(80, 0.1, [0.3], 1.0, (0.5, -0.05), 12, kappa=3, seed=1, noise=0.3)
    d = build_design(p, 1, [12])
    m = fit_midas(d, multistart=16, seed=5)
    assert len(m.starts) == 16
    assert all(m.loss <= r.loss for r in m.starts)
    m2 = fit_midas(d, multistart=16, seed=5, workers=4)
    assert np.array_equal(m.vector(), m2.vector())
    rows = robustness_rows(m)
    assert len(rows) == 16 and {"loss", "grad_inf_norm", "x0"} <= set(rows[0])


def test_default_is_64_point_cube():
    s = start_points(64, 5)
    assert s.shape == (64, 5) and s.max() <= 0.025


def test_fit_rejects_short_design():
    d = _random_design()
    with pytest.raises(ValueError):
        fit_midas(d.subset(np.arange(d.n_rows) < 5))


# ---------------------------------------------------------------- forecasting

def _model(alpha0, ar, beta, theta, K, group=0):
    return MidasModel(alpha0, np.asarray(ar, float), np.array([beta]), np.array([theta], float), (K,), (group,))


def test_forecast_constant_when_no_dynamics():
    p = _panel(T=20, kappas=(3,))
    m = _model(0.7, [], 0.0, (0.0, 0.0), 3)
    for h in (1, 2, 5):
        f = forecast_midas(m, p, h)
        assert np.all(f[~np.isnan(f)] == 0.7)


def test_hf_s0_equals_lf_one_step():
    p = _panel(T=25, kappas=(3, 12), seed=3)
    m = fit_midas(build_design(p, 2, [6, 15]))
    lf = forecast_midas(m, p, 1)
    hf = hf_forecast_midas(m, p)
    # hf[t, 0] forecasts y[t] from the end of period t-1
    assert np.allclose(hf[1:, 0], lf[:-1], equal_nan=True, rtol=0, atol=1e-13)


def test_hand_trace():
    # y[t] = a0 + a1 y[t-1] + b (w0 z_c + w1 z_{c-1}), kappa = 1
    y = np.array([1.0, 2.0, 0.5, -1.0])
    z = np.array([0.2, -0.4, 1.0, 3.0])
    p = MixedPanel(y, [SeriesGroup(1, z[:, None], ["z"])], "y")
    m = _model(0.5, [0.25], 2.0, (np.log(3.0), 0.0), 1)  # weights (1/4, 3/4)
    f1 = forecast_midas(m, p, 1, origin=2)
    mid = 0.5 + 2.0 * (0.25 * 1.0 + 0.75 * -0.4)
    assert f1 == pytest.approx(mid + 0.25 * 0.5, abs=1e-14)
    f2 = forecast_midas(m, p, 2, origin=2)
    assert f2 == pytest.approx(mid + 0.25 * f1, abs=1e-14)
    with pytest.raises(ValueError, match="insufficient"):
        forecast_midas(m, p, 1, origin=0)
    with pytest.raises(ValueError):
        forecast_midas(m, p, 0)


def test_guard_error_type():
    assert issubclass(midas.AlmonDomainError, ValueError)
