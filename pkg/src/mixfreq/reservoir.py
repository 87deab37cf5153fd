"""Single-frequency echo state network core.

State equation::

    x_t = alpha * x_{t-1} + (1 - alpha) * tanh(rho*A x_{t-1} + gamma*C z_t + omega*zeta)

with ``A``, ``C``, ``zeta`` normalized to unit spectral radius / 2-norm.  Only
linear ridge readouts are estimated.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg
from scipy.sparse.linalg import eigs

__all__ = [
    "StateParams",
    "Hyperparams",
    "Readout",
    "EsnModel",
    "sample_params",
    "spectral_radius",
    "normalize_params",
    "state_step",
    "run_states",
    "ridge_fit",
    "ridge_path",
    "autonomous_step",
    "autonomous_batch",
    "esp_margin",
    "fit_esn",
    "forecast_esn",
]

DENSE_EIG_MAX = 512


@dataclass(frozen=True)
class StateParams:
    A: np.ndarray
    C: np.ndarray
    zeta: np.ndarray
    sparsity: float = 1.0
    seed: int | None = None
    normalized: bool = False

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        C = np.atleast_2d(np.asarray(self.C, dtype=float))
        zeta = np.asarray(self.zeta, dtype=float).ravel()
        N = A.shape[0]
        if A.shape != (N, N) or C.shape[0] != N or zeta.shape != (N,):
            raise ValueError(f"inconsistent shapes A{A.shape} C{C.shape} zeta{zeta.shape}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "zeta", zeta)

    @property
    def N(self) -> int:
        return self.A.shape[0]

    @property
    def K(self) -> int:
        return self.C.shape[1]


@dataclass(frozen=True)
class Hyperparams:
    alpha: float = 0.0
    rho: float = 0.5
    gamma: float = 1.0
    omega: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError(f"alpha must lie in [0, 1), got {self.alpha}")
        for name in ("rho", "gamma", "omega"):
            v = getattr(self, name)
            if not (v >= 0 and np.isfinite(v)):
                raise ValueError(f"{name} must be finite and >= 0, got {v}")


@dataclass(frozen=True)
class Readout:
    W: np.ndarray
    intercept: np.ndarray
    lam: float
    fit_intercept: bool = True

    def predict(self, X):
        return self.intercept + np.asarray(X) @ self.W


def sample_params(N: int, K: int, sparsity: float, seed: int | None = None) -> StateParams:
    """Sparse-normal reservoir and sparse-uniform input matrices, zero shift."""
    if N < 1 or K < 1:
        raise ValueError("N and K must be >= 1")
    if not 0.0 < sparsity <= 1.0:
        raise ValueError("sparsity must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((N, N))
    A *= rng.random((N, N)) < sparsity
    C = rng.uniform(-1.0, 1.0, (N, K))
    C *= rng.random((N, K)) < sparsity
    return StateParams(A, C, np.zeros(N), sparsity, seed, normalized=False)


def spectral_radius(A) -> float:
    A = np.asarray(A, dtype=float)
    if A.shape[0] <= DENSE_EIG_MAX:
        return float(np.max(np.abs(np.linalg.eigvals(A)))) if A.size else 0.0
    vals = eigs(A, k=1, which="LM", tol=1e-10, maxiter=10_000, return_eigenvectors=False)
    return float(np.abs(vals[0]))


def normalize_params(raw: StateParams) -> StateParams:
    """Scale A to unit spectral radius and C, zeta to unit 2-norm.

    Zero blocks stay zero.
    """
    sr = spectral_radius(raw.A)
    cn = np.linalg.norm(raw.C, 2) if raw.C.size else 0.0
    zn = np.linalg.norm(raw.zeta)
    A = raw.A / sr if sr > 0 else np.zeros_like(raw.A)
    C = raw.C / cn if cn > 0 else np.zeros_like(raw.C)
    zeta = raw.zeta / zn if zn > 0 else np.zeros_like(raw.zeta)
    return StateParams(A, C, zeta, raw.sparsity, raw.seed, normalized=True)


def state_step(params: StateParams, hyper: Hyperparams, x_prev, z, activation=np.tanh):
    x_prev = np.asarray(x_prev, dtype=float)
    z = np.asarray(z, dtype=float)
    if not (np.all(np.isfinite(x_prev)) and np.all(np.isfinite(z))):
        raise ValueError("non-finite state or input")
    drive = hyper.rho * (params.A @ x_prev) + hyper.gamma * (params.C @ z) + hyper.omega * params.zeta
    return hyper.alpha * x_prev + (1.0 - hyper.alpha) * activation(drive)


def run_states(params: StateParams, hyper: Hyperparams, x0, Z, activation=np.tanh) -> np.ndarray:
    """Row ``t`` is the state after consuming rows ``0..t`` of ``Z``."""
    Z = np.asarray(Z, dtype=float)
    if Z.ndim == 1:
        Z = Z[:, None]
    T = Z.shape[0]
    X = np.empty((T, params.N))
    if T == 0:
        return X
    if not np.all(np.isfinite(Z)):
        raise ValueError("non-finite input")
    U = Z @ (hyper.gamma * params.C).T + hyper.omega * params.zeta
    rA = hyper.rho * params.A
    a = hyper.alpha
    x = np.asarray(x0, dtype=float).copy() if x0 is not None else np.zeros(params.N)
    for t in range(T):
        x = a * x + (1.0 - a) * activation(rA @ x + U[t])
        X[t] = x
    return X


def _center(X, Y, fit_intercept):
    if fit_intercept:
        mx, my = X.mean(axis=0), Y.mean(axis=0)
        return X - mx, Y - my, mx, my
    return X, Y, np.zeros(X.shape[1]), np.zeros(Y.shape[1])


def ridge_fit(X, Y, lam: float, fit_intercept: bool = True) -> Readout:
    """Ridge readout ``W = (X'X + lam*n*I)^{-1} X'Y`` with ``n`` rows.

    With ``fit_intercept`` the regression runs on centered data and the
    intercept is recovered afterwards, so it is never shrunk.
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    vec = Y.ndim == 1
    if vec:
        Y = Y[:, None]
    if X.shape[0] != Y.shape[0]:
        raise ValueError("X and Y row counts differ")
    if not lam > 0:
        raise ValueError("lambda must be > 0")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
        raise ValueError("non-finite entries in ridge inputs")
    n = X.shape[0]
    Xc, Yc, mx, my = _center(X, Y, fit_intercept)
    G = Xc.T @ Xc
    G[np.diag_indices_from(G)] += lam * n
    W = linalg.solve(G, Xc.T @ Yc, assume_a="pos")
    icpt = my - mx @ W
    if vec:
        W, icpt = W[:, 0], icpt[0]
    return Readout(W, icpt, float(lam), fit_intercept)


def ridge_path(X, Y, lams, fit_intercept: bool = True) -> list:
    """Ridge solutions over a grid via one eigendecomposition of X'X."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    vec = Y.ndim == 1
    if vec:
        Y = Y[:, None]
    n = X.shape[0]
    Xc, Yc, mx, my = _center(X, Y, fit_intercept)
    evals, V = linalg.eigh(Xc.T @ Xc)
    B = V.T @ (Xc.T @ Yc)
    out = []
    for lam in lams:
        W = V @ (B / (evals + lam * n)[:, None])
        icpt = my - mx @ W
        out.append(Readout(W[:, 0] if vec else W, icpt[0] if vec else icpt, float(lam), fit_intercept))
    return out


def autonomous_step(params: StateParams, hyper: Hyperparams, W_input: Readout, x, activation=np.tanh):
    """One self-fed iteration: the input readout's prediction replaces z."""
    x = np.asarray(x, dtype=float)
    if W_input.W.shape[0] != params.N:
        raise ValueError("input readout does not match the reservoir dimension")
    return state_step(params, hyper, x, W_input.predict(x), activation)


def autonomous_batch(params, hyper, W_input: Readout, X, steps: int, activation=np.tanh):
    """Apply ``steps`` autonomous iterations to every row of ``X``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    M = hyper.rho * params.A.T + W_input.W @ (hyper.gamma * params.C).T
    b = W_input.intercept @ (hyper.gamma * params.C).T + hyper.omega * params.zeta
    a = hyper.alpha
    for _ in range(steps):
        X = a * X + (1.0 - a) * activation(X @ M + b)
    return X


def esp_margin(params: StateParams, hyper: Hyperparams) -> float:
    """``||rho*A||_2``; values below 1 satisfy the sufficient ESP condition."""
    m = hyper.rho * (np.linalg.norm(params.A, 2) if params.A.any() else 0.0)
    if m >= 1.0:
        warnings.warn(f"sufficient echo-state condition not met (margin {m:.3f})", stacklevel=2)
    return float(m)


@dataclass
class EsnModel:
    params: StateParams
    hyper: Hyperparams
    input_readout: Readout
    target_readout: Readout
    meta: dict = field(default_factory=dict)


def fit_esn(Z, y, params: StateParams, hyper: Hyperparams, lam_input: float, lam_target: float) -> EsnModel:
    """Plain single-frequency ESN.

    The target readout regresses ``y[t+1]`` on ``x_t``; the input readout
    regresses ``z_{t+1}`` on ``x_t`` skipping the first state (the transient
    from the zero initial condition).
    """
    Z = np.asarray(Z, dtype=float)
    if Z.ndim == 1:
        Z = Z[:, None]
    y = np.asarray(y, dtype=float)
    T = y.shape[0]
    if T < 3:
        raise ValueError("need at least 3 observations")
    X = run_states(params, hyper, np.zeros(params.N), Z)
    W_in = ridge_fit(X[1:T - 1], Z[2:T], lam_input)
    W = ridge_fit(X[:T - 1], y[1:T], lam_target)
    return EsnModel(params, hyper, W_in, W)


def forecast_esn(model: EsnModel, Z, h: int) -> np.ndarray:
    """Forecast of ``y[t+h]`` from every origin ``t`` (one row per origin)."""
    if h < 1:
        raise ValueError("horizon must be >= 1")
    X = run_states(model.params, model.hyper, np.zeros(model.params.N), Z)
    X = autonomous_batch(model.params, model.hyper, model.input_readout, X, h - 1)
    return model.target_readout.predict(X)
