"""Dynamic MIDAS regression with normalized exponential Almon weights.

    y = a0 + sum_i a_i y_{-i} + sum_l beta_l sum_k w_k(theta_l) z^(l)_{-k}

The design is laid out at ``kappa_max`` resolution: row ``(t, s)`` holds the
target ``y[t]`` and the regressor lags available ``s`` fine steps after the
end of period ``t-1``.  Rows with ``s = 0`` form the usual low-frequency
forecasting regression; the others are nowcasting rows with the same
coefficients.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize
from scipy.stats import qmc

from .panel import MixedPanel

__all__ = [
    "AlmonDomainError",
    "almon_weights",
    "MidasDesign",
    "MidasModel",
    "StartResult",
    "build_design",
    "midas_loss_grad",
    "fit_midas",
    "start_points",
    "forecast_midas",
    "hf_forecast_midas",
    "robustness_rows",
]

EXP_GUARD = 700.0


class AlmonDomainError(ValueError):
    pass


def _softmax_weights(theta, K):
    k = np.arange(K + 1, dtype=float)
    e = theta[0] * k + theta[1] * k * k
    e -= e.max()
    w = np.exp(e)
    return w / w.sum()


def almon_weights(theta, K: int) -> np.ndarray:
    """Weights ``exp(t1*k + t2*k^2)`` normalized over ``k = 0..K``."""
    t1, t2 = float(theta[0]), float(theta[1])
    if abs(t1) * K + abs(t2) * K * K > EXP_GUARD:
        raise AlmonDomainError(
            f"|theta1|K + |theta2|K^2 exceeds {EXP_GUARD:g}; rescale the starting values"
        )
    return _softmax_weights((t1, t2), K)


@dataclass
class MidasDesign:
    y: np.ndarray
    ar: np.ndarray  # (rows, p): y[t-1] .. y[t-p]
    Z: list  # per regressor (rows, K_l + 1): lag 0 .. K_l
    t: np.ndarray
    s: np.ndarray
    p: int
    lags: tuple
    groups: tuple  # panel group position of each regressor
    kappa_max: int
    replicated_response: np.ndarray = field(repr=False, default=None)

    @property
    def n_rows(self) -> int:
        return self.y.size

    @property
    def n_params(self) -> int:
        return 1 + self.p + 3 * len(self.Z)

    def subset(self, mask) -> "MidasDesign":
        mask = np.asarray(mask)
        return MidasDesign(self.y[mask], self.ar[mask], [z[mask] for z in self.Z], self.t[mask],
                           self.s[mask], self.p, self.lags, self.groups, self.kappa_max,
                           self.replicated_response)

    def lf(self) -> "MidasDesign":
        return self.subset(self.s == 0)


def _normalize_lags(panel, lags):
    if isinstance(lags, dict):
        items = sorted(lags.items())
    else:
        items = [(i, K) for i, K in enumerate(lags) if K is not None]
    for i, K in items:
        if not 0 <= i < len(panel.groups):
            raise ValueError(f"no panel group {i}")
        if K < 0:
            raise ValueError("lag counts must be >= 0")
    return items


def _lag_matrix(data_col, rows, K):
    """Entries data_col[rows - k] for k = 0..K (rows already validated)."""
    idx = rows[:, None] - np.arange(K + 1)[None, :]
    return data_col[idx]


def build_design(panel: MixedPanel, p: int, lags, column: int = 0) -> MidasDesign:
    """Regression blocks for every (period, fine step) with complete lags.

    ``lags`` gives ``K_l`` per panel group (``None`` skips a group) or a dict
    ``{group: K}``; each group contributes its ``column``-th series.
    """
    items = _normalize_lags(panel, lags)
    if p < 0:
        raise ValueError("p must be >= 0")
    T, km = panel.T, panel.kappa_max
    need = 1 + p + sum(math.ceil(K / panel.groups[i].kappa) for i, K in items)
    if T <= need:
        raise ValueError(f"MIDAS not identifiable: need T > {need}, got T = {T}")
    tt, ss = np.divmod(np.arange(T * km), km)
    J = tt * km + ss
    ok = tt >= p
    crow = []
    for i, K in items:
        q = km // panel.groups[i].kappa
        c = J // q - 1
        ok &= c - K >= 0
        crow.append(c)
    ok &= J > 0
    rows = np.flatnonzero(ok)
    t, s = tt[rows], ss[rows]
    y = panel.target[t]
    ar = np.column_stack([panel.target[t - i] for i in range(1, p + 1)]) if p else np.empty((rows.size, 0))
    Z = [
        _lag_matrix(panel.groups[i].data[:, column], c[rows], K)
        for (i, K), c in zip(items, crow)
    ]
    return MidasDesign(y, ar, Z, t, s, p, tuple(K for _, K in items), tuple(i for i, _ in items), km,
                       np.kron(panel.target, np.ones(km)))


@dataclass
class StartResult:
    start: np.ndarray
    x: np.ndarray
    loss: float
    grad_norm: float
    success: bool


@dataclass
class MidasModel:
    alpha0: float
    ar: np.ndarray
    betas: np.ndarray
    thetas: np.ndarray  # (L, 2)
    lags: tuple
    groups: tuple
    column: int = 0
    loss: float = math.nan
    starts: list = field(default_factory=list)

    @property
    def p(self) -> int:
        return self.ar.size

    def vector(self) -> np.ndarray:
        parts = [[self.alpha0], self.ar]
        for b, th in zip(self.betas, self.thetas):
            parts.append([b, th[0], th[1]])
        return np.concatenate([np.asarray(v, dtype=float) for v in parts])

    @classmethod
    def from_vector(cls, v, p, lags, groups, column=0, **kw):
        v = np.asarray(v, dtype=float)
        L = len(lags)
        blk = v[1 + p:].reshape(L, 3) if L else np.empty((0, 3))
        return cls(float(v[0]), v[1:1 + p].copy(), blk[:, 0].copy(), blk[:, 1:].copy(),
                   tuple(lags), tuple(groups), column, **kw)

    def midas_terms(self, Zs) -> np.ndarray:
        out = 0.0
        for b, th, K, Z in zip(self.betas, self.thetas, self.lags, Zs):
            out = out + b * (Z @ _softmax_weights(th, K))
        return out


def _unpack(v, design):
    p = design.p
    return v[0], v[1:1 + p], v[1 + p:].reshape(len(design.Z), 3)


def midas_loss_grad(params, design: MidasDesign):
    """Sum of squared residuals and its exact gradient.

    ``params`` is a MidasModel or its parameter vector
    ``[a0, a_1..a_p, (beta, theta1, theta2) per regressor]``.
    """
    v = params.vector() if isinstance(params, MidasModel) else np.asarray(params, dtype=float)
    a0, ar, blk = _unpack(v, design)
    pred = a0 + design.ar @ ar
    cache = []
    for (b, t1, t2), K, Z in zip(blk, design.lags, design.Z):
        w = _softmax_weights((t1, t2), K)
        m = Z @ w
        pred = pred + b * m
        cache.append((b, w, m, K, Z))
    r = design.y - pred
    loss = float(r @ r)
    g = np.empty_like(v)
    g[0] = -2.0 * r.sum()
    g[1:1 + design.p] = -2.0 * (design.ar.T @ r)
    pos = 1 + design.p
    for b, w, m, K, Z in cache:
        k = np.arange(K + 1, dtype=float)
        zr = Z.T @ r  # (K+1,)
        g[pos] = -2.0 * (m @ r)
        for j, mk in enumerate((k, k * k)):
            dw = w * (mk - w @ mk)
            g[pos + 1 + j] = -2.0 * b * (dw @ zr)
        pos += 3
    return loss, g


def start_points(n: int, dim: int, edge: float = 0.025, method: str = "sobol", seed: int | None = 0):
    """Starting values in ``[0, edge]^dim``: scrambled Sobol or stratified uniform."""
    if method == "sobol":
        pts = qmc.Sobol(dim, scramble=True, seed=seed).random(n)
    elif method == "stratified":
        rng = np.random.default_rng(seed)
        pts = (rng.permuted(np.tile(np.arange(n), (dim, 1)), axis=1).T + rng.random((n, dim))) / n
    else:
        raise ValueError(f"unknown start method {method!r}")
    return edge * pts


def _theta_bounds(design):
    bnds = [(None, None)] * (1 + design.p)
    for K in design.lags:
        K = max(K, 1)
        bnds += [(None, None), (-0.5 * EXP_GUARD / K, 0.5 * EXP_GUARD / K),
                 (-0.5 * EXP_GUARD / K**2, 0.5 * EXP_GUARD / K**2)]
    return bnds


def _minimize(design, x0, gtol, max_iter):
    res = optimize.minimize(
        midas_loss_grad, x0, args=(design,), jac=True, method="L-BFGS-B",
        bounds=_theta_bounds(design),
        options={"maxiter": max_iter, "gtol": gtol, "ftol": 1e-15, "maxfun": 20 * max_iter},
    )
    loss, g = midas_loss_grad(res.x, design)
    return StartResult(np.asarray(x0, dtype=float), res.x, loss, float(np.max(np.abs(g))), bool(res.success))


def fit_midas(design: MidasDesign, init: str | np.ndarray = "zero", multistart: int = 0,
              edge: float = 0.025, start_method: str = "sobol", seed: int | None = 0,
              rows: str = "lf", gtol: float = 1e-8, max_iter: int = 500, column: int = 0,
              workers: int = 1) -> MidasModel:
    """Least-squares MIDAS fit with L-BFGS-B and the analytic gradient.

    ``multistart > 0`` replaces the single start by that many low-discrepancy
    points; every local minimizer is kept in ``model.starts`` and the lowest
    loss wins (ties go to the earlier start).  ``rows="all"`` also uses the
    nowcasting rows.  ``workers > 1`` runs the starts on a thread pool; the
    result does not depend on it.
    """
    d = design.lf() if rows == "lf" else design
    if d.n_rows <= d.n_params:
        raise ValueError(f"{d.n_rows} rows cannot identify {d.n_params} parameters")
    if multistart:
        starts = start_points(multistart, d.n_params, edge, start_method, seed)
    elif isinstance(init, str):
        if init != "zero":
            raise ValueError(f"unknown init policy {init!r}")
        starts = np.zeros((1, d.n_params))
    else:
        starts = np.atleast_2d(np.asarray(init, dtype=float))
    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(lambda x0: _minimize(d, x0, gtol, max_iter), starts))
    else:
        results = [_minimize(d, x0, gtol, max_iter) for x0 in starts]
    finite = [r for r in results if np.isfinite(r.loss)]
    if not finite:
        raise RuntimeError("every MIDAS start diverged")
    best = min(finite, key=lambda r: r.loss)
    return MidasModel.from_vector(best.x, d.p, d.lags, d.groups, column, loss=best.loss, starts=results)


def robustness_rows(model: MidasModel) -> list:
    """Per-start minimizer, loss and gradient norm as flat dict rows."""
    out = []
    for i, r in enumerate(model.starts):
        row = {"start": i, "loss": r.loss, "grad_inf_norm": r.grad_norm, "converged": r.success}
        row.update({f"x{j}": float(v) for j, v in enumerate(r.x)})
        out.append(row)
    return out


def _z_lags(model, panel, J):
    """Lag blocks at paper fine cutoffs J (array); rows with missing lags -> NaN."""
    km = panel.kappa_max
    Zs, ok = [], np.ones(J.shape, dtype=bool)
    for gi, K in zip(model.groups, model.lags):
        g = panel.groups[gi]
        c = J // (km // g.kappa) - 1
        valid = c - K >= 0
        ok &= valid
        Zs.append(_lag_matrix(g.data[:, model.column], np.where(valid, c, K), K))
    return Zs, ok


def forecast_midas(model: MidasModel, panel: MixedPanel, h: int, origin: int | None = None):
    """Forecast ``y[o+h]`` from origin ``o`` (all origins if None; NaN if history is short).

    The regressor terms stay at the origin's information set and the AR part
    is iterated on its own forecasts.
    """
    if h < 1:
        raise ValueError("horizon must be >= 1")
    T, km, p = panel.T, panel.kappa_max, model.p
    origins = np.arange(T) if origin is None else np.atleast_1d(origin)
    Zs, ok = _z_lags(model, panel, (origins + 1) * km)
    ok &= origins - p + 1 >= 0
    mid = model.alpha0 + model.midas_terms(Zs)
    hist = np.full((origins.size, p + h), np.nan)  # y[o-p+1 .. o+h]
    for i in range(p):
        src = origins - p + 1 + i
        hist[:, i] = np.where(src >= 0, panel.target[np.clip(src, 0, T - 1)], np.nan)
    for r in range(h):
        lagged = hist[:, p + r - 1::-1][:, :p] if p else np.empty((origins.size, 0))
        hist[:, p + r] = mid + lagged @ model.ar
    out = np.where(ok, hist[:, -1], np.nan)
    if origin is not None and np.ndim(origin) == 0:
        if not ok[0]:
            raise ValueError(f"insufficient lag history at origin {origin}")
        return float(out[0])
    return out


def hf_forecast_midas(model: MidasModel, panel: MixedPanel, t=None, s=None):
    """Nowcast of ``y[t]`` from data through fine step ``s`` of tempo period ``t``.

    AR lags stay at the last released values ``y[t-1..t-p]``.  Without
    arguments returns the full ``(T, kappa_max)`` grid (NaN where lags are
    missing).
    """
    T, km, p = panel.T, panel.kappa_max, model.p
    tt, ss = np.divmod(np.arange(T * km), km)
    Zs, ok = _z_lags(model, panel, tt * km + ss)
    ok &= tt - p >= 0
    ar = np.column_stack([panel.target[np.clip(tt - i, 0, None)] for i in range(1, p + 1)]) if p else np.zeros((tt.size, 0))
    out = model.alpha0 + ar @ model.ar + model.midas_terms(Zs)
    out = np.where(ok, out, np.nan).reshape(T, km)
    if t is None:
        return out
    if not ok.reshape(T, km)[t, s]:
        raise ValueError(f"insufficient lag history at ({t}, {s})")
    return float(out[t, s])
