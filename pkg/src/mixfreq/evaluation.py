"""Forecast accuracy metrics and forecast-comparison tests.

Metrics take forecast errors ``e_s`` on an ordered index set ``S`` (the
forecast target dates).  Tests take losses: a pair of loss series for the
modified Diebold-Mariano test, a ``(T, M)`` matrix for the model confidence
set, and an ``(M, H, T)`` tensor for the uniform multi-horizon MCS.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

__all__ = [
    "TestResult",
    "DegenerateInputError",
    "msfe",
    "rmsfe",
    "csfe",
    "crmsfe",
    "ahead_rmsfe",
    "one_year_ahead_rmsfe",
    "newey_west_variance",
    "mdm_test",
    "block_bootstrap_indices",
    "mcs_test",
    "umcs_test",
]


class DegenerateInputError(ValueError):
    pass


@dataclass
class TestResult:
    statistic: float
    p_value: float | None = None
    included: dict = field(default_factory=dict)  # level -> list of model positions
    p_values: np.ndarray | None = None  # per-model MCS p-values
    eliminated: list = field(default_factory=list)
    config: dict = field(default_factory=dict)


def _sq(errors):
    e = np.asarray(errors, dtype=float)
    return e**2 if e.ndim == 1 else np.sum(e**2, axis=tuple(range(1, e.ndim)))


def _select(errors, index, mask_fn, tau):
    sq = _sq(errors)
    idx = np.arange(sq.size) if index is None else np.asarray(index)
    sel = mask_fn(idx)
    if not sel.any():
        raise ValueError(f"no forecasts in the index set for tau={tau}")
    return sq[sel]


def msfe(errors) -> float:
    sq = _sq(errors)
    if sq.size == 0:
        raise ValueError("empty error set")
    return float(sq.mean())


def rmsfe(errors) -> float:
    return math.sqrt(msfe(errors))


def csfe(errors, tau, index=None) -> float:
    # exactly rounded sum, so CSFE never decreases in tau
    return math.fsum(_select(errors, index, lambda s: s <= tau, tau))


def crmsfe(errors, tau, index=None) -> float:
    return math.sqrt(_select(errors, index, lambda s: s <= tau, tau).mean())


def ahead_rmsfe(errors, tau, index=None) -> float:
    return math.sqrt(_select(errors, index, lambda s: s >= tau, tau).mean())


def one_year_ahead_rmsfe(errors, tau, index=None, periods_per_year: int = 4) -> float:
    return ahead_rmsfe(errors, tau + periods_per_year, index)


def newey_west_variance(d, lags: int) -> float:
    """Bartlett-kernel long-run variance with weights ``1 - k/(lags+1)``."""
    d = np.asarray(d, dtype=float)
    x = d - d.mean()
    T = x.size
    v = x @ x / T
    for k in range(1, min(lags, T - 1) + 1):
        v += 2.0 * (1.0 - k / (lags + 1)) * (x[k:] @ x[:-k]) / T
    return float(v)


def mdm_test(loss_a, loss_b, h: int = 1) -> TestResult:
    """Modified Diebold-Mariano test.

    One-sided: the null says model ``a`` is at least as accurate as ``b``;
    small p-values indicate ``a`` has larger expected loss.
    """
    a = np.asarray(loss_a, dtype=float)
    b = np.asarray(loss_b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("loss series must be 1-D with equal length")
    T = a.size
    if T < h + 2:
        raise ValueError(f"need at least h+2 = {h + 2} losses")
    d = a - b
    if np.ptp(d) <= 1e-12 * max(1.0, float(np.abs(d).max())):
        raise DegenerateInputError("loss differential has zero variance")
    V = newey_west_variance(d, h - 1)
    if not V > 0:
        raise DegenerateInputError("non-positive long-run variance")
    dm = d.mean() / math.sqrt(V / T)
    corr = math.sqrt((T + 1 - 2 * h + h * (h - 1) / T) / T)
    stat = float(dm * corr)
    p = float(stats.t.sf(stat, df=T - 1))
    return TestResult(stat, p, config={"kernel": "bartlett", "lags": h - 1, "df": T - 1, "correction": corr})


def block_bootstrap_indices(T: int, block: int, B: int, rng) -> np.ndarray:
    """``(B, T)`` moving-block bootstrap index draws."""
    block = max(1, min(block, T))
    nb = -(-T // block)
    starts = rng.integers(0, T - block + 1, size=(B, nb))
    idx = (starts[:, :, None] + np.arange(block)[None, None, :]).reshape(B, -1)
    return idx[:, :T]


def _levels(alphas):
    return {round(1.0 - a, 10): a for a in alphas}


def _mcs_sets(order_p, survivors, alphas, M):
    """Inclusion sets from the elimination order and running-max p-values."""
    pvals = np.ones(M)
    for i, p in order_p:
        pvals[i] = p
    for i in survivors:
        pvals[i] = 1.0
    included = {lvl: [i for i in range(M) if pvals[i] >= a] for lvl, a in _levels(alphas).items()}
    return pvals, included


def mcs_test(losses, alphas=(0.25, 0.10), B: int = 1000, block: int | None = None,
             seed: int | None = 0) -> TestResult:
    """Model confidence set with the range statistic and a moving-block bootstrap.

    ``losses`` is ``(T, M)``.  Returns per-model MCS p-values and the set of
    surviving model positions per confidence level (0.75 and 0.90 by default).
    """
    L = np.asarray(losses, dtype=float)
    if L.ndim != 2:
        raise ValueError("losses must be (T, M)")
    T, M = L.shape
    block = math.ceil(T ** (1 / 3)) if block is None else block
    cfg = {"statistic": "T_R", "B": B, "block_length": block, "alphas": tuple(alphas), "seed": seed}
    if M == 1:
        return TestResult(0.0, 1.0, {lvl: [0] for lvl in _levels(alphas)}, np.ones(1), [], cfg)
    rng = np.random.default_rng(seed)
    idx = block_bootstrap_indices(T, block, B, rng)
    Lbar = L.mean(axis=0)
    Lboot = L[idx].mean(axis=1)  # (B, M)
    alive = list(range(M))
    order, running = [], 0.0
    stat0 = None
    while len(alive) > 1:
        a = np.array(alive)
        d = Lbar[a][:, None] - Lbar[a][None, :]
        db = Lboot[:, a][:, :, None] - Lboot[:, a][:, None, :]
        var = np.mean((db - d[None]) ** 2, axis=0)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(var > 1e-300, d / np.sqrt(var), 0.0)
            tb = np.where(var > 1e-300, np.abs(db - d[None]) / np.sqrt(var), 0.0)
        TR = float(np.max(np.abs(t)))
        TRb = tb.reshape(B, -1).max(axis=1)
        p = float(np.mean(TRb >= TR)) if TR > 0 else 1.0
        stat0 = TR if stat0 is None else stat0
        running = max(running, p)
        if running >= max(alphas):
            break
        worst = int(a[np.argmax(t.max(axis=1))])
        order.append((worst, running))
        alive.remove(worst)
    pvals, included = _mcs_sets(order, alive, alphas, M)
    return TestResult(stat0, float(pvals.min()), included, pvals, [i for i, _ in order], cfg)


def _usp_stats(D, omega, T):
    """Minimum over horizons of sqrt(T) * mean / omega; D holds means (..., H)."""
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(omega > 1e-300, math.sqrt(T) * D / omega, 0.0)
    return z.min(axis=-1)


def umcs_test(losses, alphas=(0.25, 0.10), B_outer: int = 100, B_inner: int = 100, alpha_inner: float = 0.1,
              block: int | None = None, seed: int | None = 0) -> TestResult:
    """Uniform multi-horizon model confidence set.

    ``losses`` is ``(M, H, T)`` on a common origin set.  For each ordered
    pair the uniform statistic is the minimum over horizons of the
    Newey-West (Bartlett, ``h-1`` lags at horizon ``h``) studentized mean
    loss differential.  The set statistic is the maximum over pairs with an
    outer moving-block bootstrap p-value.  An inner bootstrap gives each
    pair's critical value at ``alpha_inner``; the model eliminated is the
    one exceeding its critical value by the most.
    """
    L = np.asarray(losses, dtype=float)
    if L.ndim != 3:
        raise ValueError("losses must be (models, horizons, origins)")
    M, H, T = L.shape
    block = math.ceil(T ** (1 / 3)) if block is None else block
    cfg = {"kernel": "bartlett", "hac_lags": "h-1", "B_outer": B_outer, "B_inner": B_inner,
           "alpha_inner": alpha_inner, "block_length": block, "alphas": tuple(alphas), "seed": seed}
    if M == 1:
        return TestResult(0.0, 1.0, {lvl: [0] for lvl in _levels(alphas)}, np.ones(1), [], cfg)
    ss = np.random.SeedSequence(seed)
    r_out, r_in = (np.random.default_rng(s) for s in ss.spawn(2))
    idx_o = block_bootstrap_indices(T, block, B_outer, r_out)
    idx_i = block_bootstrap_indices(T, block, B_inner, r_in)
    # pairwise differentials (M, M, H, T)
    D = L[:, None] - L[None, :]
    Dbar = D.mean(axis=-1)
    omega = np.empty((M, M, H))
    for i in range(M):
        for j in range(M):
            for h in range(H):
                omega[i, j, h] = math.sqrt(max(newey_west_variance(D[i, j, h], h), 0.0))

    def boot(idx):
        Db = D[..., idx].mean(axis=-1)  # (M, M, H, B)
        return _usp_stats(np.moveaxis(Db, -1, 0) - Dbar[None], omega[None], T)  # (B, M, M)

    t = _usp_stats(Dbar, omega, T)  # (M, M)
    tb_out = boot(idx_o)
    crit = np.quantile(boot(idx_i), 1.0 - alpha_inner, axis=0)  # (M, M)
    alive = list(range(M))
    order, running, stat0 = [], 0.0, None
    while len(alive) > 1:
        a = np.array(alive)
        sub = t[np.ix_(a, a)].copy()
        np.fill_diagonal(sub, -np.inf)
        Tm = float(sub.max())
        subb = tb_out[:, a][:, :, a].copy()
        for k in range(a.size):
            subb[:, k, k] = -np.inf
        Tb = subb.reshape(B_outer, -1).max(axis=1)
        p = float(np.mean(Tb >= Tm)) if Tm > 0 else 1.0
        stat0 = Tm if stat0 is None else stat0
        running = max(running, p)
        if running >= max(alphas):
            break
        excess = sub - crit[np.ix_(a, a)]
        worst = int(a[np.argmax(excess.max(axis=1))])
        order.append((worst, running))
        alive.remove(worst)
    pvals, included = _mcs_sets(order, alive, alphas, M)
    return TestResult(stat0, float(pvals.min()), included, pvals, [i for i, _ in order], cfg)
