"""Synthetic mixed-frequency data generators used by tests and demos."""

from __future__ import annotations

import numpy as np

from .panel import MixedPanel, SeriesGroup

__all__ = ["simulate_mixed_panel", "simulate_midas", "simulate_midas_two_modes", "simulate_dfm_ar1"]


def simulate_mixed_panel(T: int = 88, seed: int | None = 0, kappa_hf: int = 12, kappa_lf: int = 3,
                         persistence: float = 0.6, loading: float = 1.0, noise_y: float = 0.5,
                         noise_hf: float = 0.3, noise_lf: float = 0.3, burn: int = 20) -> MixedPanel:
    """Quarterly target driven by a latent high-frequency AR(1) factor.

    The factor ``g`` evolves at ``kappa_hf`` steps per period with
    per-period autocorrelation ``persistence``.  The high-frequency
    covariate observes ``g`` with noise, the low-frequency covariate averages
    it over each of its sub-periods, and ``y[i] = loading * mean(g over
    period i) + noise``.  The covariates therefore Granger-cause the target.
    """
    if kappa_hf % kappa_lf:
        raise ValueError("kappa_lf must divide kappa_hf")
    rng = np.random.default_rng(seed)
    phi = persistence ** (1.0 / kappa_hf)
    n = (T + burn) * kappa_hf
    u = rng.standard_normal(n) * np.sqrt(1.0 - phi**2)
    g = np.empty(n)
    g[0] = rng.standard_normal()
    for j in range(1, n):
        g[j] = phi * g[j - 1] + u[j]
    g = g[burn * kappa_hf:]
    hf = g + noise_hf * rng.standard_normal(g.size)
    lf = g.reshape(-1, kappa_hf // kappa_lf).mean(axis=1) + noise_lf * rng.standard_normal(T * kappa_lf)
    y = loading * g.reshape(T, kappa_hf).mean(axis=1) + noise_y * rng.standard_normal(T)
    groups = [SeriesGroup(kappa_hf, hf[:, None], ["hf"]), SeriesGroup(kappa_lf, lf[:, None], ["lf"])]
    return MixedPanel(y, groups, "y")


def simulate_midas(T: int, alpha0: float, ar, beta: float, theta, K: int, kappa: int = 3,
                   seed: int | None = 0, noise: float = 0.0) -> MixedPanel:
    """Panel whose target follows a one-regressor MIDAS forecasting equation exactly.

    ``y[t] = alpha0 + sum_i ar_i y[t-i] + beta * sum_k w_k z[end of period t-1 - k]``.
    """
    from .midas import almon_weights

    rng = np.random.default_rng(seed)
    ar = np.atleast_1d(np.asarray(ar, dtype=float))
    p = ar.size
    z = rng.standard_normal(T * kappa)
    w = almon_weights(theta, K)
    y = np.zeros(T)
    y[:p] = rng.standard_normal(p)
    for t in range(T):
        c = t * kappa - 1
        if t < p or c - K < 0:
            y[t] = rng.standard_normal()
            continue
        m = z[c - np.arange(K + 1)] @ w
        y[t] = alpha0 + ar @ y[t - 1 - np.arange(p)] + beta * m + noise * rng.standard_normal()
    return MixedPanel(y, [SeriesGroup(kappa, z[:, None], ["z"])], "y")


def simulate_midas_two_modes(T: int = 120, K: int = 30, kappa: int = 3, seed: int | None = 0,
                             near=(-1.0, 0.0), far=(0.0, 0.01), betas=(1.0, 0.8), phi: float = 0.2,
                             period: float = 10.0, noise_z: float = 0.5, noise: float = 0.1) -> MixedPanel:
    """Target loading on two separated Almon profiles of one periodic regressor.

    A single-term Almon fit has to pick one profile; the periodic carrier
    adds further local minima along the way, so different starting points
    settle in different basins.
    """
    from .midas import almon_weights

    rng = np.random.default_rng(seed)
    j = np.arange(T * kappa)
    z = np.sin(2 * np.pi * j / period + rng.uniform(0, 2 * np.pi)) + noise_z * rng.standard_normal(j.size)
    w = betas[0] * almon_weights(near, K) + betas[1] * almon_weights(far, K)
    y = np.zeros(T)
    for t in range(T):
        c = t * kappa - 1
        if c - K < 0:
            y[t] = rng.standard_normal()
            continue
        y[t] = phi * y[t - 1] + z[c - np.arange(K + 1)] @ w + noise * rng.standard_normal()
    return MixedPanel(y, [SeriesGroup(kappa, z[:, None], ["z"])], "y")


def simulate_dfm_ar1(T: int, A: float = 0.8, beta: float = 1.0, r: float = 1.0, s: float = 1.0,
                     seed: int | None = 0):
    """Scalar factor AR(1) observed with noise: returns (y, v)."""
    rng = np.random.default_rng(seed)
    v = np.empty(T)
    v[0] = rng.standard_normal() * r / np.sqrt(1 - A**2)
    for t in range(1, T):
        v[t] = A * v[t - 1] + r * rng.standard_normal()
    y = beta * v + s * rng.standard_normal(T)
    return y, v
