"""Mixed-frequency linear-Gaussian dynamic factor model.

The ``k`` factors follow a VAR(1) at the highest frequency ``kappa_max``::

    v_{j+1} = A v_j + diag(R) u_j,     A = A_bar * rho / max(rho, |lambda_1(A_bar)|)

Each observation block releases every ``q = kappa_max / kappa`` fine steps
and loads on a window of the latest ``L`` factor values through an
aggregation scheme (stock, exponential-Almon lags or trigonometric lags).
The state carries the last ``L_max`` factor vectors in companion form, so
lagged aggregation is handled exactly by the Kalman filter.

Fine step ``j`` of the filter is the release time of row ``j`` of a
``kappa_max`` group; a block at ``kappa`` observes its row ``c`` at fine step
``(c + 1) * q - 1`` and the target ``y[i]`` is observed at
``(i + 1) * kappa_max - 1``.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, replace

import numba
import numpy as np
from scipy import optimize

from .panel import MixedPanel

__all__ = [
    "FactorDynamics",
    "Stock",
    "AlmonLag",
    "Trigonometric",
    "ObservationBlock",
    "MfDfmModel",
    "FilterState",
    "FilterResult",
    "KalmanError",
    "aggregate",
    "observation_matrix",
    "kalman_step",
    "kalman_filter",
    "marginal_loglik",
    "fit_dfm",
    "DfmFit",
    "forecast_dfm",
    "forecast_origins",
    "hf_forecast_dfm",
    "example3_model",
    "write_filter_trace",
]

LOG2PI = math.log(2.0 * math.pi)
JITTERS = (0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6)


class KalmanError(RuntimeError):
    pass


# ---------------------------------------------------------------- parameters

@dataclass(frozen=True)
class FactorDynamics:
    A_bar: np.ndarray
    rho: float = 0.95
    R: np.ndarray | None = None

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A_bar, dtype=float))
        if A.shape[0] != A.shape[1]:
            raise ValueError("A_bar must be square")
        object.__setattr__(self, "A_bar", A)
        R = np.ones(A.shape[0]) if self.R is None else np.asarray(self.R, dtype=float).ravel()
        if R.shape != (A.shape[0],) or np.any(R <= 0):
            raise ValueError("R must hold k positive scales")
        object.__setattr__(self, "R", R)
        if not 0.0 < self.rho < 1.0:
            raise ValueError("rho must lie in (0, 1)")

    @property
    def k(self) -> int:
        return self.A_bar.shape[0]

    @property
    def A(self) -> np.ndarray:
        lam = float(np.max(np.abs(np.linalg.eigvals(self.A_bar))))
        return self.A_bar * (self.rho / max(self.rho, lam))


def _almon(psi, L):
    l = np.arange(L, dtype=float)
    e = psi[0] * l + psi[1] * l * l
    e -= e.max()
    w = np.exp(e)
    return w / w.sum()


@dataclass(frozen=True)
class Stock:
    beta: np.ndarray
    L: int = 1

    def lag_weights(self) -> np.ndarray:
        """(L, k) weight of lag l on factor m."""
        k = np.atleast_2d(self.beta).shape[1]
        w = np.zeros((self.L, k))
        w[0] = 1.0
        return w


@dataclass(frozen=True)
class AlmonLag:
    beta: np.ndarray
    psi: np.ndarray  # (k, 2)
    L: int = 3

    def lag_weights(self) -> np.ndarray:
        psi = np.atleast_2d(np.asarray(self.psi, dtype=float))
        return np.column_stack([_almon(p, self.L) for p in psi])


@dataclass(frozen=True)
class Trigonometric:
    beta: np.ndarray
    lam: np.ndarray
    omega: np.ndarray
    gamma: np.ndarray
    tau: float = 1.0
    L: int = 3

    def lag_weights(self) -> np.ndarray:
        l = np.arange(self.L, dtype=float)[:, None]
        lam, om, ga = (np.atleast_1d(np.asarray(v, dtype=float)) for v in (self.lam, self.omega, self.gamma))
        e = (lam**2 * np.cos(2 * np.pi * om * l + ga)).sum(axis=1) / self.tau
        e -= e.max()
        w = np.exp(e)
        w /= w.sum()
        k = np.atleast_2d(self.beta).shape[1]
        return np.repeat(w[:, None], k, axis=1)


@dataclass(frozen=True)
class ObservationBlock:
    kappa: int
    scheme: object
    S: np.ndarray
    source: int = -1  # -1: target, otherwise panel group position

    @property
    def n(self) -> int:
        return np.atleast_2d(self.scheme.beta).shape[0]

    def loadings(self, k: int, L_max: int) -> np.ndarray:
        """Rows of the observation matrix on the stacked state (v_j, v_{j-1}, ...)."""
        beta = np.atleast_2d(np.asarray(self.scheme.beta, dtype=float))
        W = self.scheme.lag_weights()
        if W.shape[0] > L_max:
            raise ValueError("block needs more lags than the state carries")
        H = np.zeros((beta.shape[0], k * L_max))
        for l in range(W.shape[0]):
            H[:, l * k:(l + 1) * k] = beta * W[l][None, :]
        return H


@dataclass(frozen=True)
class MfDfmModel:
    dynamics: FactorDynamics
    blocks: tuple
    kappa_max: int

    @property
    def k(self) -> int:
        return self.dynamics.k

    @property
    def L_max(self) -> int:
        return max([b.scheme.L for b in self.blocks], default=1)

    @property
    def state_dim(self) -> int:
        return self.k * self.L_max

    def transition(self):
        k, L = self.k, self.L_max
        F = np.zeros((k * L, k * L))
        F[:k, :k] = self.dynamics.A
        if L > 1:
            F[k:, :-k] = np.eye(k * (L - 1))
        Q = np.zeros_like(F)
        Q[:k, :k] = np.diag(self.dynamics.R**2)
        return F, Q

    def observation(self):
        H = np.vstack([b.loadings(self.k, self.L_max) for b in self.blocks])
        s2 = np.concatenate([np.asarray(b.S, dtype=float) ** 2 for b in self.blocks])
        return H, s2

    def block_slices(self):
        out, pos = [], 0
        for b in self.blocks:
            out.append(slice(pos, pos + b.n))
            pos += b.n
        return out


def aggregate(scheme, history) -> np.ndarray:
    """Apply a scheme to a factor history whose row 0 is the latest value."""
    history = np.atleast_2d(np.asarray(history, dtype=float))
    W = scheme.lag_weights()
    if history.shape[0] < W.shape[0]:
        raise ValueError(f"history has {history.shape[0]} rows, scheme needs {W.shape[0]}")
    beta = np.atleast_2d(np.asarray(scheme.beta, dtype=float))
    return beta @ (W * history[:W.shape[0]]).sum(axis=0)


def observation_matrix(model: MfDfmModel, panel: MixedPanel) -> np.ndarray:
    """``(T*kappa_max, n_total)`` array of releases, NaN where nothing is released."""
    km = model.kappa_max
    if panel.kappa_max != km and panel.groups:
        raise ValueError(f"panel kappa_max {panel.kappa_max} differs from model {km}")
    n_tot = sum(b.n for b in model.blocks)
    Y = np.full((panel.T * km, n_tot), np.nan)
    for b, sl in zip(model.blocks, model.block_slices()):
        if b.source < 0:
            data = panel.target[:, None]
            kappa = 1
        else:
            g = panel.groups[b.source]
            data, kappa = g.data, g.kappa
        if kappa != b.kappa or data.shape[1] != b.n:
            raise ValueError("block layout does not match the panel")
        q = km // kappa
        Y[q - 1::q, sl] = data
    return Y


# ---------------------------------------------------------------- filter

@dataclass
class FilterState:
    mean: np.ndarray
    cov: np.ndarray
    loglik: float = 0.0
    step: int = -1


def _chol_jitter(G):
    for jit in JITTERS:
        try:
            Lc = np.linalg.cholesky(G + jit * np.eye(G.shape[0]))
            break
        except np.linalg.LinAlgError:
            continue
    else:
        raise KalmanError("innovation covariance not positive definite after jitter")
    return Lc


def kalman_step(model: MfDfmModel, state: FilterState, observation, fine_index: int | None = None,
                F=None, Q=None, H=None, s2=None) -> FilterState:
    """One predict + update cycle; NaN entries of ``observation`` are missing."""
    if F is None:
        F, Q = model.transition()
    if H is None:
        H, s2 = model.observation()
    m = F @ state.mean
    P = F @ state.cov @ F.T + Q
    y = np.asarray(observation, dtype=float)
    obs = ~np.isnan(y)
    ll = state.loglik
    if obs.any():
        Hs = H[obs]
        v = y[obs] - Hs @ m
        G = Hs @ P @ Hs.T + np.diag(s2[obs])
        Lc = _chol_jitter(G)
        PHt = P @ Hs.T
        Kt = np.linalg.solve(Lc.T, np.linalg.solve(Lc, PHt.T))  # G^{-1} H P
        K = Kt.T
        m = m + K @ v
        IKH = np.eye(P.shape[0]) - K @ Hs
        P = IKH @ P @ IKH.T + (K * s2[obs]) @ K.T
        w = np.linalg.solve(Lc, v)
        ll += -0.5 * (obs.sum() * LOG2PI + 2.0 * np.log(np.diag(Lc)).sum() + w @ w)
    P = 0.5 * (P + P.T)
    step = state.step + 1 if fine_index is None else fine_index
    return FilterState(m, P, ll, step)


@numba.njit(cache=True)
def _chol(G):
    n = G.shape[0]
    L = np.zeros_like(G)
    for i in range(n):
        for j in range(i + 1):
            s = G[i, j]
            for p in range(j):
                s -= L[i, p] * L[j, p]
            if i == j:
                if s <= 0.0:
                    return L, False
                L[i, i] = math.sqrt(s)
            else:
                L[i, j] = s / L[j, j]
    return L, True


@numba.njit(cache=True)
def _lower_solve(L, B):
    n = L.shape[0]
    X = B.copy()
    for c in range(X.shape[1]):
        for i in range(n):
            s = X[i, c]
            for p in range(i):
                s -= L[i, p] * X[p, c]
            X[i, c] = s / L[i, i]
    return X


@numba.njit(cache=True)
def _upper_solve_t(L, B):
    # solves L^T X = B
    n = L.shape[0]
    X = B.copy()
    for c in range(X.shape[1]):
        for i in range(n - 1, -1, -1):
            s = X[i, c]
            for p in range(i + 1, n):
                s -= L[p, i] * X[p, c]
            X[i, c] = s / L[i, i]
    return X


@numba.njit(cache=True)
def _filter_core(F, Q, H, s2, Y, m0, P0, store):
    T, n = Y.shape
    d = m0.shape[0]
    means = np.zeros((T if store else 1, d))
    covs = np.zeros((T if store else 1, d, d))
    lls = np.zeros(T if store else 1)
    m = m0.copy()
    P = P0.copy()
    ll = 0.0
    status = 0
    jitters = np.array([0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6])
    for t in range(T):
        m = F @ m
        P = F @ P @ F.T + Q
        cnt = 0
        for i in range(n):
            if not np.isnan(Y[t, i]):
                cnt += 1
        if cnt > 0:
            idx = np.empty(cnt, dtype=np.int64)
            c = 0
            for i in range(n):
                if not np.isnan(Y[t, i]):
                    idx[c] = i
                    c += 1
            Hs = np.empty((cnt, d))
            v = np.empty((cnt, 1))
            for a in range(cnt):
                Hs[a] = H[idx[a]]
                v[a, 0] = Y[t, idx[a]] - H[idx[a]] @ m
            PHt = P @ Hs.T
            G = Hs @ PHt
            for a in range(cnt):
                G[a, a] += s2[idx[a]]
            G = 0.5 * (G + G.T)
            ok = False
            L = np.zeros_like(G)
            for jt in jitters:
                Gj = G.copy()
                for a in range(cnt):
                    Gj[a, a] += jt
                L, ok = _chol(Gj)
                if ok:
                    break
            if not ok:
                status = 1
                return ll, means, covs, lls, status
            Kt = _upper_solve_t(L, _lower_solve(L, PHt.T))  # G^{-1} H P
            K = Kt.T
            w = _lower_solve(L, v)
            m = m + (K @ v)[:, 0]
            IKH = np.eye(d) - K @ Hs
            KS = K.copy()
            for a in range(cnt):
                KS[:, a] *= s2[idx[a]]
            P = IKH @ P @ IKH.T + KS @ K.T
            logdet = 0.0
            for a in range(cnt):
                logdet += 2.0 * math.log(L[a, a])
            q = 0.0
            for a in range(cnt):
                q += w[a, 0] * w[a, 0]
            ll += -0.5 * (cnt * math.log(2.0 * math.pi) + logdet + q)
        P = 0.5 * (P + P.T)
        if store:
            means[t] = m
            covs[t] = P
            lls[t] = ll
    return ll, means, covs, lls, status


@dataclass
class FilterResult:
    loglik: float
    means: np.ndarray
    covs: np.ndarray
    cum_loglik: np.ndarray


def _prior(model):
    d = model.state_dim
    return np.zeros(d), np.eye(d)


def kalman_filter(model: MfDfmModel, Y, store: bool = True, m0=None, P0=None) -> FilterResult:
    """Run the filter over a release matrix (see ``observation_matrix``)."""
    F, Q = model.transition()
    H, s2 = model.observation()
    pm, pP = _prior(model)
    m0 = pm if m0 is None else np.asarray(m0, dtype=float)
    P0 = pP if P0 is None else np.asarray(P0, dtype=float)
    Y = np.ascontiguousarray(Y, dtype=float)
    ll, means, covs, lls, status = _filter_core(F, Q, H, s2, Y, m0, P0, store)
    if status:
        raise KalmanError("innovation covariance not positive definite after jitter")
    return FilterResult(float(ll), means, covs, lls)


def marginal_loglik(model: MfDfmModel, panel: MixedPanel) -> float:
    return kalman_filter(model, observation_matrix(model, panel), store=False).loglik


def write_filter_trace(result: FilterResult, path) -> None:
    """CSV with one row per fine step: filtered means and cumulative log-likelihood."""
    d = result.means.shape[1]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["step"] + [f"mean_{i}" for i in range(d)] + ["cum_loglik"])
        for j in range(result.means.shape[0]):
            w.writerow([j] + [repr(float(v)) for v in result.means[j]] + [repr(float(result.cum_loglik[j]))])


# ---------------------------------------------------------------- forecasting

def forecast_dfm(model: MfDfmModel, state, h_fine: int, block: int = 0) -> np.ndarray:
    """Block forecast ``h_fine`` fine steps after the filtered state."""
    if h_fine < 0:
        raise ValueError("h_fine must be >= 0")
    mean = state.mean if isinstance(state, FilterState) else np.asarray(state, dtype=float)
    F, _ = model.transition()
    m = np.linalg.matrix_power(F, h_fine) @ mean
    return model.blocks[block].loadings(model.k, model.L_max) @ m


def _target_block(model):
    for i, b in enumerate(model.blocks):
        if b.source < 0:
            return i
    raise ValueError("model has no target block")


def forecast_origins(model: MfDfmModel, panel: MixedPanel, h: int, result: FilterResult | None = None):
    """Forecast of ``y[o+h]`` from the filtered state at the end of every period ``o``."""
    km = model.kappa_max
    if result is None:
        result = kalman_filter(model, observation_matrix(model, panel))
    ends = result.means[km - 1::km]
    F, _ = model.transition()
    Fh = np.linalg.matrix_power(F, h * km)
    b = _target_block(model)
    H = model.blocks[b].loadings(model.k, model.L_max)
    return (ends @ Fh.T @ H.T)[:, 0]


def hf_forecast_dfm(model: MfDfmModel, panel: MixedPanel, result: FilterResult | None = None):
    """Grid ``[t, s]``: forecast of ``y[t]`` with data through fine step ``s`` of tempo period ``t``."""
    km = model.kappa_max
    if result is None:
        result = kalman_filter(model, observation_matrix(model, panel))
    F, _ = model.transition()
    b = _target_block(model)
    H = model.blocks[b].loadings(model.k, model.L_max)
    m0, _ = _prior(model)
    means = np.vstack([m0[None, :], result.means])  # row J = state after fine step J-1
    out = np.empty((panel.T, km))
    powers = [np.linalg.matrix_power(F, km - s) for s in range(km)]
    for s in range(km):
        J = np.arange(panel.T) * km + s
        out[:, s] = (means[J] @ powers[s].T @ H.T)[:, 0]
    return out


# ---------------------------------------------------------------- estimation

def _logit(p):
    return math.log(p / (1 - p))


def _sigmoid(x):
    return 1.0 / (1.0 + math.exp(-x))


@dataclass
class _Layout:
    k: int
    kappa_max: int
    blocks: list  # dicts: kind, kappa, n, L, source, K (trig terms)
    fix_R: bool
    fix_rho: float | None

    def size(self):
        k = self.k
        n = k * k + (0 if self.fix_rho is not None else 1) + (0 if self.fix_R else k)
        for b in self.blocks:
            n += b["n"] * k + b["n"]
            if b["kind"] == "almon":
                n += 2 * k
            elif b["kind"] == "trig":
                n += 3 * b["K"] + 1
        return n

    def unpack(self, th) -> MfDfmModel:
        k, pos = self.k, 0
        A_bar = th[:k * k].reshape(k, k)
        pos = k * k
        if self.fix_rho is None:
            rho = min(max(_sigmoid(th[pos]), 1e-6), 1 - 1e-6)
            pos += 1
        else:
            rho = self.fix_rho
        if self.fix_R:
            R = np.ones(k)
        else:
            R = np.exp(th[pos:pos + k])
            pos += k
        blocks = []
        for b in self.blocks:
            n = b["n"]
            beta = th[pos:pos + n * k].reshape(n, k)
            pos += n * k
            if b["kind"] == "stock":
                sch = Stock(beta, 1)
            elif b["kind"] == "almon":
                sch = AlmonLag(beta, th[pos:pos + 2 * k].reshape(k, 2), b["L"])
                pos += 2 * k
            else:
                K = b["K"]
                lam = th[pos:pos + K]
                om = 1.0 / (1.0 + np.exp(-th[pos + K:pos + 2 * K]))
                ga = np.pi * np.tanh(th[pos + 2 * K:pos + 3 * K])
                tau = math.exp(th[pos + 3 * K])
                pos += 3 * K + 1
                sch = Trigonometric(beta, lam, om, ga, tau, b["L"])
            S = np.exp(th[pos:pos + n])
            pos += n
            blocks.append(ObservationBlock(b["kappa"], sch, S, b["source"]))
        return MfDfmModel(FactorDynamics(A_bar, rho, R), tuple(blocks), self.kappa_max)

    def initial(self, rng) -> np.ndarray:
        k = self.k
        parts = [(0.5 * np.eye(k)).ravel()]
        if self.fix_rho is None:
            parts.append([_logit(0.95)])
        if not self.fix_R:
            parts.append(np.zeros(k))
        for b in self.blocks:
            n = b["n"]
            parts.append(0.5 + 0.1 * rng.standard_normal(n * k))
            if b["kind"] == "almon":
                parts.append(np.zeros(2 * k))
            elif b["kind"] == "trig":
                parts.append(np.concatenate([np.zeros(b["K"]), np.zeros(b["K"]), np.zeros(b["K"]), [0.0]]))
            parts.append(np.zeros(n))
        return np.concatenate([np.asarray(p, dtype=float).ravel() for p in parts])


def _layout_for(panel: MixedPanel, k, schemes, fix_R, fix_rho, trig_terms):
    km = panel.kappa_max
    sources = [(-1, 1, 1)] + [(i, g.kappa, g.n) for i, g in enumerate(panel.groups)]
    if schemes is None:
        schemes = ["stock"] * len(sources)
    if len(schemes) != len(sources):
        raise ValueError(f"need {len(sources)} schemes (target first, then groups)")
    blocks = []
    for (src, kappa, n), sch in zip(sources, schemes):
        sch = sch.lower()
        if sch not in ("stock", "almon", "trig"):
            raise ValueError(f"unknown aggregation {sch!r}")
        q = km // kappa
        blocks.append({"kind": sch, "kappa": kappa, "n": n, "source": src,
                       "L": 1 if sch == "stock" else q, "K": trig_terms})
    return _Layout(k, km, blocks, fix_R, fix_rho)


@dataclass
class DfmFit:
    model: MfDfmModel
    loglik: float
    history: list
    converged: bool
    theta: np.ndarray


def _fd_grad(f, th, step):
    g = np.empty_like(th)
    for i in range(th.size):
        e = np.zeros_like(th)
        e[i] = step * max(1.0, abs(th[i]))
        g[i] = (f(th + e) - f(th - e)) / (2 * e[i])
    return g


def _sign_normalize(model: MfDfmModel) -> MfDfmModel:
    """Flip factor signs so the first loading of each factor is >= 0."""
    beta0 = np.atleast_2d(model.blocks[0].scheme.beta)
    d = np.where(beta0[0] < 0, -1.0, 1.0)
    if np.all(d > 0):
        return model
    dyn = model.dynamics
    A_bar = d[:, None] * dyn.A_bar * d[None, :]
    blocks = []
    for b in model.blocks:
        sch = replace(b.scheme, beta=np.atleast_2d(b.scheme.beta) * d[None, :])
        blocks.append(replace(b, scheme=sch))
    return MfDfmModel(FactorDynamics(A_bar, dyn.rho, dyn.R), tuple(blocks), model.kappa_max)


def fit_dfm(panel: MixedPanel, k: int = 1, schemes=None, n_fit: int | None = None, method: str = "adaptive",
            max_iter: int = 300, tol: float = 1e-7, seed: int | None = 0, fix_R: bool = True,
            fix_rho: float | None = None, trig_terms: int = 1, fd_step: float = 1e-5,
            init: np.ndarray | None = None) -> DfmFit:
    """Maximum-likelihood fit by first-order ascent on finite-difference gradients.

    ``schemes`` lists one aggregation per block (target first, then the panel
    groups): ``"stock"``, ``"almon"`` or ``"trig"``; lag windows default to
    one coarse period of fine steps.  With ``fix_R`` the factor innovation
    scales are pinned to one, which fixes the scale of the loadings.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    lay = _layout_for(panel, k, schemes, fix_R, fix_rho, trig_terms)
    n = panel.T if n_fit is None else int(n_fit)
    Y = observation_matrix(lay.unpack(lay.initial(np.random.default_rng(0))), panel)
    Y = np.ascontiguousarray(Y[:n * lay.kappa_max])
    n_obs = max(1, int(np.sum(~np.isnan(Y))))

    def obj(th):
        try:
            return kalman_filter(lay.unpack(th), Y, store=False).loglik / n_obs
        except (KalmanError, ValueError, FloatingPointError, np.linalg.LinAlgError):
            return -np.inf

    th = lay.initial(np.random.default_rng(seed)) if init is None else np.asarray(init, dtype=float)
    f = obj(th)
    if not np.isfinite(f):
        raise KalmanError("log-likelihood not finite at the starting point")
    history = [f * n_obs]
    converged = False
    if method == "lbfgs":
        res = optimize.minimize(lambda x: -obj(x), th, jac=lambda x: -_fd_grad(obj, x, fd_step),
                                method="L-BFGS-B", options={"maxiter": max_iter})
        if -res.fun > f:
            th, f = res.x, -res.fun
        history.append(f * n_obs)
        converged = bool(res.success)
    elif method == "adaptive":
        g = _fd_grad(obj, th, fd_step)
        eta = 0.1 / max(1e-12, np.max(np.abs(g)))
        for _ in range(max_iter):
            if np.max(np.abs(g)) < tol:
                converged = True
                break
            accepted = False
            for _ in range(40):
                cand = th + eta * g
                fc = obj(cand)
                if fc > f:
                    accepted = True
                    break
                eta *= 0.5
            if not accepted:
                converged = True
                break
            g_new = _fd_grad(obj, cand, fd_step)
            s, yv = cand - th, g - g_new
            sy = s @ yv
            gain = fc - f
            th, f, g = cand, fc, g_new
            history.append(f * n_obs)
            eta = (s @ s) / sy if sy > 0 else 2.0 * eta
            eta = min(eta, 1e3)
            if gain < tol * max(1.0, abs(f)) * 1e-3:
                converged = True
                break
        else:
            warnings.warn("DFM fit hit max_iter; returning the best iterate", stacklevel=2)
    else:
        raise ValueError(f"unknown method {method!r}")
    model = _sign_normalize(lay.unpack(th))
    return DfmFit(model, f * n_obs, history, converged, th)


def example3_model(k: int = 5, n_monthly: int = 1, n_daily: int = 1, seed: int | None = 0) -> MfDfmModel:
    """Quarterly target with 12 Almon lags, monthly block with 4 Almon lags and a
    stock-aggregated 6-day block, all at ``kappa_max = 12``."""
    rng = np.random.default_rng(seed)
    dyn = FactorDynamics(0.5 * np.eye(k) + 0.05 * rng.standard_normal((k, k)), 0.95, np.ones(k))
    blocks = (
        ObservationBlock(1, AlmonLag(rng.standard_normal((1, k)), np.zeros((k, 2)), 12), np.ones(1), -1),
        ObservationBlock(3, AlmonLag(rng.standard_normal((n_monthly, k)), np.zeros((k, 2)), 4), np.ones(n_monthly), 1),
        ObservationBlock(12, Stock(rng.standard_normal((n_daily, k))), np.ones(n_daily), 0),
    )
    return MfDfmModel(dyn, blocks, 12)
