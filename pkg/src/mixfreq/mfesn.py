"""Multi-frequency echo state networks.

Two designs are provided.  The single-reservoir S-MFESN runs one reservoir at
the highest frequency ``kappa_max`` on a stacked input that repeats every
coarser series until its next release.  The multi-reservoir M-MFESN gives each
frequency group its own reservoir running at that group's ``kappa``; their
period-end states are concatenated for the target readout.

Indexing follows ``panel``: fine row ``j`` of a group at ``kappa`` is the
state after consuming that group's row ``j``, so the period-end ("aligned")
state of period ``i`` is row ``i*kappa + kappa - 1`` and it is regressed on
``y[i+1]``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .panel import MixedPanel
from .reservoir import (
    Hyperparams,
    Readout,
    StateParams,
    autonomous_batch,
    normalize_params,
    ridge_fit,
    ridge_path,
    run_states,
    sample_params,
)
from .tempo import TempoIndex, canonicalize, to_flat

__all__ = [
    "ReservoirSpec",
    "ModelPreset",
    "PRESETS",
    "get_preset",
    "SMfesnModel",
    "MMfesnModel",
    "stack_inputs",
    "stacked_input_matrix",
    "sequential_folds",
    "fit_smfesn",
    "fit_mmfesn",
    "forecast_smfesn",
    "forecast_mmfesn",
    "forecast",
    "hf_forecast",
    "hf_forecasts",
    "cv_ridge",
    "fit_preset",
    "tune_hyperparams",
    "TuningResult",
    "resample_harness",
    "ResampleResult",
    "DEFAULT_LAMBDA_GRID",
]

DEFAULT_LAMBDA_GRID = tuple(float(v) for v in np.logspace(-9, 1, 21))


@dataclass(frozen=True)
class ReservoirSpec:
    N: int
    sparsity: float
    hyper: Hyperparams


@dataclass(frozen=True)
class ModelPreset:
    name: str
    kind: str  # "single" or "multi"
    reservoirs: tuple

    def __post_init__(self):
        if self.kind not in ("single", "multi"):
            raise ValueError(f"unknown preset kind {self.kind!r}")
        if self.kind == "single" and len(self.reservoirs) != 1:
            raise ValueError("a single-reservoir preset has exactly one reservoir")


PRESETS = {
    "singleESN [A]": ModelPreset("singleESN [A]", "single", (
        ReservoirSpec(30, 1 / 3, Hyperparams(alpha=0.1, rho=0.5, gamma=1.0, omega=0.0)),
    )),
    "singleESN [B]": ModelPreset("singleESN [B]", "single", (
        ReservoirSpec(120, 1 / 12, Hyperparams(alpha=0.1, rho=0.5, gamma=1.0, omega=0.0)),
    )),
    # multi presets list the coarser (monthly) reservoir first
    "multiESN [A]": ModelPreset("multiESN [A]", "multi", (
        ReservoirSpec(100, 0.10, Hyperparams(alpha=0.0, rho=0.5, gamma=1.5, omega=0.0)),
        ReservoirSpec(20, 0.50, Hyperparams(alpha=0.1, rho=0.5, gamma=0.5, omega=0.0)),
    )),
    "multiESN [B]": ModelPreset("multiESN [B]", "multi", (
        ReservoirSpec(100, 0.10, Hyperparams(alpha=0.3, rho=0.08, gamma=0.25, omega=0.0)),
        ReservoirSpec(20, 0.50, Hyperparams(alpha=0.99, rho=0.01, gamma=0.01, omega=0.0)),
    )),
}


def get_preset(name: str) -> ModelPreset:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; known: {sorted(PRESETS)}") from None


# ---------------------------------------------------------------- inputs

def _coarse_row(J, q):
    """Group row holding the latest release at paper fine index J (-1: none)."""
    return J // q - 1


def stack_inputs(panel: MixedPanel, idx: TempoIndex) -> np.ndarray:
    """Stacked input vector at a ``kappa_max`` tempo index.

    ``(0, 0)`` is the pre-sample origin and maps to zeros.
    """
    km = panel.kappa_max
    idx = canonicalize(TempoIndex(idx.t, idx.s, km))
    J = to_flat(idx)
    if not 0 <= J <= panel.T * km:
        raise IndexError(f"index {idx} outside the panel span")
    parts = []
    for g, q in zip(panel.groups, panel.ratios):
        r = _coarse_row(J, q)
        parts.append(np.zeros(g.n) if r < 0 else g.data[r])
    return np.concatenate(parts)


def stacked_input_matrix(panel: MixedPanel, start: int = 0) -> np.ndarray:
    """All stacked inputs from period ``start`` on; row ``j`` feeds fine state ``j``."""
    km = panel.kappa_max
    J = np.arange(start * km, panel.T * km) + 1
    cols = []
    for g, q in zip(panel.groups, panel.ratios):
        r = _coarse_row(J, q)
        block = g.data[np.maximum(r, 0)]
        block[r < 0] = 0.0
        cols.append(block)
    return np.hstack(cols)


# ---------------------------------------------------------------- CV

def sequential_folds(n: int, n_folds: int = 10, fold_size: int = 5, min_train: int = 5) -> list:
    """Expanding-window folds over the last ``n_folds*fold_size`` units.

    Returns ``(train_stop, val_start, val_stop)`` half-open unit ranges.
    """
    reserve = n_folds * fold_size
    if n - reserve < min_train:
        raise ValueError(
            f"{n} observations cannot host {n_folds} folds of {fold_size} "
            f"with at least {min_train} training points"
        )
    first = n - reserve
    return [(first + k * fold_size, first + k * fold_size, first + (k + 1) * fold_size) for k in range(n_folds)]


def _cv_select(X, Y, grid, row_unit, folds):
    """Pick the grid value with the lowest mean validation MSE.

    ``row_unit`` maps each regression row to the fold unit it belongs to.
    """
    grid = [float(v) for v in grid]
    if not grid:
        raise ValueError("empty lambda grid")
    if len(grid) == 1:
        return grid[0]
    Y = Y if Y.ndim == 2 else Y[:, None]
    errs = np.zeros(len(grid))
    for tr_stop, v0, v1 in folds:
        tr = row_unit < tr_stop
        va = (row_unit >= v0) & (row_unit < v1)
        if tr.sum() < 2 or not va.any():
            continue
        for k, ro in enumerate(ridge_path(X[tr], Y[tr], grid)):
            errs[k] += np.mean((Y[va] - ro.predict(X[va])) ** 2)
    errs /= len(folds)
    ok = np.isfinite(errs)
    if not ok.any():
        raise RuntimeError("ridge CV failed at every grid point")
    errs[~ok] = np.inf
    return grid[int(np.argmin(errs))]


# ---------------------------------------------------------------- models

@dataclass
class SMfesnModel:
    preset: str
    params: StateParams
    hyper: Hyperparams
    input_readout: Readout
    target_readout: Readout
    kappa_max: int
    kappas: tuple
    widths: tuple
    seed: int | None = None
    meta: dict = field(default_factory=dict)

    def states(self, panel: MixedPanel) -> np.ndarray:
        return run_states(self.params, self.hyper, np.zeros(self.params.N), stacked_input_matrix(panel))

    def aligned_states(self, panel: MixedPanel) -> np.ndarray:
        k = self.kappa_max
        return self.states(panel)[k - 1::k]


@dataclass
class MMfesnModel:
    preset: str
    params: tuple
    hypers: tuple
    input_readouts: tuple
    target_readout: Readout
    kappas: tuple
    seeds: tuple = ()
    meta: dict = field(default_factory=dict)

    @property
    def kappa_max(self) -> int:
        return max(self.kappas)

    def group_states(self, panel: MixedPanel) -> list:
        return [
            run_states(p, h, np.zeros(p.N), g.data)
            for p, h, g in zip(self.params, self.hypers, panel.groups)
        ]

    def aligned_states(self, panel: MixedPanel) -> np.ndarray:
        return np.hstack([X[k - 1::k] for X, k in zip(self.group_states(panel), self.kappas)])


def _check_panel(panel, n_fit):
    n = panel.T if n_fit is None else int(n_fit)
    if not 3 <= n <= panel.T:
        raise ValueError(f"need 3 <= fit periods <= {panel.T}, got {n}")
    return n


def _reservoir(spec: ReservoirSpec, K: int, seed):
    return normalize_params(sample_params(spec.N, K, spec.sparsity, seed))


def _input_rows(X, Z, kappa, n):
    """Pairs (state j, input j+1) for j = kappa .. n*kappa-2."""
    return X[kappa:n * kappa - 1], Z[kappa + 1:n * kappa]


def fit_smfesn(panel: MixedPanel, preset: ModelPreset | str, lambda_input: float, lambda_target: float,
               seed: int | None = 0, n_fit: int | None = None, params: StateParams | None = None,
               hyper: Hyperparams | None = None) -> SMfesnModel:
    """Fit the input and target readouts of a single-reservoir MFESN.

    Only the first ``n_fit`` periods enter the regressions.
    """
    preset = get_preset(preset) if isinstance(preset, str) else preset
    spec = preset.reservoirs[0]
    n = _check_panel(panel, n_fit)
    km = panel.kappa_max
    Z = stacked_input_matrix(panel)
    if params is None:
        params = _reservoir(spec, Z.shape[1], seed)
    hyper = spec.hyper if hyper is None else hyper
    X = run_states(params, hyper, np.zeros(params.N), Z)
    Xin, Zin = _input_rows(X, Z, km, n)
    W_in = ridge_fit(Xin, Zin, lambda_input)
    Xal = X[km - 1::km]
    W = ridge_fit(Xal[:n - 1], panel.target[1:n], lambda_target)
    return SMfesnModel(preset.name, params, hyper, W_in, W, km,
                       tuple(g.kappa for g in panel.groups), tuple(g.n for g in panel.groups), seed)


def _group_order(panel):
    """Group positions sorted from coarsest to finest (preset order)."""
    return sorted(range(len(panel.groups)), key=lambda i: (panel.groups[i].kappa, i))


def fit_mmfesn(panel: MixedPanel, preset: ModelPreset | str, lambdas_input, lambda_target: float,
               seed: int | None = 0, n_fit: int | None = None, params=None, hypers=None) -> MMfesnModel:
    """Fit a multi-reservoir MFESN; ``lambdas_input`` has one entry per group."""
    preset = get_preset(preset) if isinstance(preset, str) else preset
    L = len(panel.groups)
    if len(preset.reservoirs) != L:
        raise ValueError(f"preset {preset.name!r} has {len(preset.reservoirs)} reservoirs, panel has {L} groups")
    n = _check_panel(panel, n_fit)
    lams = np.broadcast_to(np.asarray(lambdas_input, dtype=float), (L,))
    order = _group_order(panel)
    specs = [None] * L
    for rank, gi in enumerate(order):
        specs[gi] = preset.reservoirs[rank]
    plist, hlist, rlist, aligned, seeds = [], [], [], [], []
    for l, g in enumerate(panel.groups):
        s = None if seed is None else seed + l
        p = params[l] if params is not None else _reservoir(specs[l], g.n, s)
        h = hypers[l] if hypers is not None else specs[l].hyper
        X = run_states(p, h, np.zeros(p.N), g.data)
        Xin, Zin = _input_rows(X, g.data, g.kappa, n)
        rlist.append(ridge_fit(Xin, Zin, float(lams[l])))
        aligned.append(X[g.kappa - 1::g.kappa])
        plist.append(p)
        hlist.append(h)
        seeds.append(s)
    Xal = np.hstack(aligned)
    W = ridge_fit(Xal[:n - 1], panel.target[1:n], lambda_target)
    return MMfesnModel(preset.name, tuple(plist), tuple(hlist), tuple(rlist), W,
                       tuple(g.kappa for g in panel.groups), tuple(seeds))


def forecast_smfesn(model: SMfesnModel, panel: MixedPanel, h: int) -> np.ndarray:
    """Forecast of ``y[i+h]`` from every origin ``i`` of ``panel``."""
    if h < 1:
        raise ValueError("horizon must be >= 1")
    X = model.aligned_states(panel)
    X = autonomous_batch(model.params, model.hyper, model.input_readout, X, (h - 1) * model.kappa_max)
    return model.target_readout.predict(X)


def forecast_mmfesn(model: MMfesnModel, panel: MixedPanel, h: int) -> np.ndarray:
    if h < 1:
        raise ValueError("horizon must be >= 1")
    parts = []
    for X, p, hy, ro, k in zip(model.group_states(panel), model.params, model.hypers,
                               model.input_readouts, model.kappas):
        parts.append(autonomous_batch(p, hy, ro, X[k - 1::k], (h - 1) * k))
    return model.target_readout.predict(np.hstack(parts))


def forecast(model, panel: MixedPanel, h: int) -> np.ndarray:
    if isinstance(model, SMfesnModel):
        return forecast_smfesn(model, panel, h)
    return forecast_mmfesn(model, panel, h)


def hf_forecasts(model, panel: MixedPanel) -> np.ndarray:
    """High-frequency one-step forecasts.

    Entry ``[t, s]`` predicts ``y[t]`` using information through fine step
    ``s`` of tempo period ``t``; column 0 equals the low-frequency one-step
    forecast made at the end of period ``t-1``.
    """
    km = model.kappa_max
    T = panel.T
    J = np.arange(T * km)  # paper fine index t*km + s
    if isinstance(model, SMfesnModel):
        X = model.states(panel)
        S = np.vstack([np.zeros((1, X.shape[1])), X])[J]  # row J-1, J=0 -> zero state
    else:
        blocks = []
        for X, k in zip(model.group_states(panel), model.kappas):
            r = J // (km // k)
            blocks.append(np.vstack([np.zeros((1, X.shape[1])), X])[r])
        S = np.hstack(blocks)
    out = model.target_readout.predict(S)
    return out.reshape(T, km, *out.shape[1:])


def hf_forecast(model, panel: MixedPanel, idx: TempoIndex) -> np.ndarray:
    km = model.kappa_max
    idx = canonicalize(TempoIndex(idx.t, idx.s, km))
    if not 0 <= idx.t < panel.T:
        raise IndexError(f"index {idx} outside the panel span")
    return hf_forecasts(model, panel)[idx.t, idx.s]


# ---------------------------------------------------------------- CV + fit

def _target_cv(Xal, y, n, grid, n_folds, fold_size):
    rows = n - 1
    folds = sequential_folds(rows, n_folds, fold_size)
    return _cv_select(Xal[:rows], y[1:n], grid, np.arange(rows), folds), folds


def _input_cv(X, Z, kappa, n, grid, folds):
    Xin, Zin = _input_rows(X, Z, kappa, n)
    # pair (j, j+1) belongs to target row r when its input lies in period r+1
    unit = (np.arange(kappa, n * kappa - 1) + 1) // kappa - 1
    return _cv_select(Xin, Zin, grid, unit, folds)


def cv_ridge(panel: MixedPanel, preset: ModelPreset | str, lambda_grid=DEFAULT_LAMBDA_GRID,
             seed: int | None = 0, n_fit: int | None = None, n_folds: int = 10, fold_size: int = 5,
             which: str = "target"):
    """Sequential-CV penalty for the target (or input) readout; ``which="both"`` returns the pair."""
    lam_in, lam_t = _cv_lambdas(panel, preset, lambda_grid, seed, n_fit, n_folds, fold_size)
    if which == "both":
        return lam_in, lam_t
    return lam_t if which == "target" else lam_in


def _cv_lambdas(panel, preset, grid, seed, n_fit, n_folds, fold_size):
    preset = get_preset(preset) if isinstance(preset, str) else preset
    n = _check_panel(panel, n_fit)
    if preset.kind == "single":
        spec = preset.reservoirs[0]
        km = panel.kappa_max
        Z = stacked_input_matrix(panel)
        params = _reservoir(spec, Z.shape[1], seed)
        X = run_states(params, spec.hyper, np.zeros(params.N), Z)
        lam_t, folds = _target_cv(X[km - 1::km], panel.target, n, grid, n_folds, fold_size)
        lam_in = _input_cv(X, Z, km, n, grid, folds)
        return lam_in, lam_t
    order = _group_order(panel)
    lam_in, aligned = [], []
    folds = sequential_folds(n - 1, n_folds, fold_size)
    for l, g in enumerate(panel.groups):
        spec = preset.reservoirs[order.index(l)]
        p = _reservoir(spec, g.n, None if seed is None else seed + l)
        X = run_states(p, spec.hyper, np.zeros(p.N), g.data)
        lam_in.append(_input_cv(X, g.data, g.kappa, n, grid, folds))
        aligned.append(X[g.kappa - 1::g.kappa])
    lam_t, _ = _target_cv(np.hstack(aligned), panel.target, n, grid, n_folds, fold_size)
    return tuple(lam_in), lam_t


def fit_preset(panel: MixedPanel, preset: ModelPreset | str, seed: int | None = 0, n_fit: int | None = None,
               lambda_grid=DEFAULT_LAMBDA_GRID, n_folds: int = 10, fold_size: int = 5, lambdas=None):
    """Cross-validate both penalties, then fit the preset's model.

    ``lambdas=(input, target)`` skips the CV step.
    """
    preset = get_preset(preset) if isinstance(preset, str) else preset
    if lambdas is None:
        lambdas = _cv_lambdas(panel, preset, lambda_grid, seed, n_fit, n_folds, fold_size)
    lam_in, lam_t = lambdas
    if preset.kind == "single":
        model = fit_smfesn(panel, preset, lam_in, lam_t, seed, n_fit)
    else:
        model = fit_mmfesn(panel, preset, lam_in, lam_t, seed, n_fit)
    model.meta.update(lambda_input=lam_in, lambda_target=lam_t)
    return model


# ---------------------------------------------------------------- tuning

@dataclass
class TuningResult:
    hyper: Hyperparams
    loss: float
    init_loss: float
    n_evals: int
    converged: bool
    history: list = field(default_factory=list)


_HP_NAMES = ("alpha", "rho", "gamma", "omega")


def _one_step_loss(X, y, T0, lam, window, loss):
    """Cumulative loss of one-step forecasts of y[t+1] from x_t, t = T0..T-2."""
    T = y.size
    total = 0.0
    if window == "fixed":
        ro = ridge_fit(X[:T0 - 1], y[1:T0], lam)
        pred = ro.predict(X[T0 - 1:T - 1])
        return float(np.sum(loss(y[T0:T], pred)))
    for t in range(T0, T):
        lo = 0 if window == "expanding" else t - T0
        ro = ridge_fit(X[lo:t - 1], y[lo + 1:t], lam)
        total += float(loss(y[t], ro.predict(X[t - 1])))
    return total


def tune_hyperparams(panel: MixedPanel, preset: ModelPreset | str, init: Hyperparams | None = None,
                     loss=None, T0: int | None = None, lam: float = 1e-4, window: str = "fixed",
                     free=("alpha", "rho", "gamma"), bounds=None, method: str = "pattern",
                     max_iter: int = 100, tol: float = 1e-3, reparam: bool = False,
                     seed: int | None = 0) -> TuningResult:
    """Tune reservoir hyperparameters by cumulative one-step loss.

    For each candidate the readout is refit per ``window`` ("fixed",
    "expanding" or "rolling") and the squared (or custom) loss of the
    one-step forecasts from period ``T0`` on is summed.  ``reparam`` switches
    to the (alpha, psi) form with gamma fixed at 1 and rho = psi, which needs
    omega = 0.  Only single-reservoir presets are tuned.
    """
    preset = get_preset(preset) if isinstance(preset, str) else preset
    spec = preset.reservoirs[0]
    init = spec.hyper if init is None else init
    loss = (lambda a, b: (np.asarray(a) - np.asarray(b)) ** 2) if loss is None else loss
    y = panel.target
    T0 = max(3, y.size // 2) if T0 is None else int(T0)
    if not 2 < T0 < y.size:
        raise ValueError("T0 must satisfy 2 < T0 < T")
    if window not in ("fixed", "expanding", "rolling"):
        raise ValueError(f"unknown window {window!r}")
    km = panel.kappa_max
    Z = stacked_input_matrix(panel)
    params = _reservoir(spec, Z.shape[1], seed)
    if reparam:
        if init.omega != 0:
            raise ValueError("the psi form requires omega = 0")
        free = ("alpha", "psi")
    default_bounds = {"alpha": (0.0, 0.99), "rho": (0.0, 10.0), "gamma": (0.0, 10.0),
                      "omega": (0.0, 10.0), "psi": (0.0, 10.0)}
    bnds = np.array([(bounds or {}).get(k, default_bounds[k]) for k in free], dtype=float)

    def to_hyper(v):
        d = {k: getattr(init, k) for k in _HP_NAMES}
        for k, val in zip(free, v):
            if k == "psi":
                d["rho"], d["gamma"] = float(val), 1.0
            else:
                d[k] = float(val)
        return Hyperparams(**d)

    def start_vec():
        return np.array([init.rho / init.gamma if (k == "psi" and init.gamma > 0)
                         else (init.rho if k == "psi" else getattr(init, k)) for k in free])

    history = []

    def f(v):
        v = np.clip(v, bnds[:, 0], bnds[:, 1])
        hp = to_hyper(v)
        X = run_states(params, hp, np.zeros(params.N), Z)[km - 1::km]
        val = _one_step_loss(X, y, T0, lam, window, loss)
        history.append((tuple(float(a) for a in v), val))
        return val

    x0 = np.clip(start_vec(), bnds[:, 0], bnds[:, 1])
    f0 = f(x0)
    if max_iter <= 0:
        return TuningResult(init, f0, f0, 1, True, history)
    if method == "pattern":
        x, fx, conv = _pattern_search(f, x0, f0, bnds, max_iter, tol)
    elif method == "lbfgsb":
        res = optimize.minimize(f, x0, method="L-BFGS-B", bounds=bnds, options={"maxiter": max_iter})
        x, fx, conv = res.x, float(res.fun), bool(res.success)
        if fx > f0:
            x, fx = x0, f0
    else:
        raise ValueError(f"unknown method {method!r}")
    if not conv:
        warnings.warn("hyperparameter search hit max_iter; returning best iterate", stacklevel=2)
    return TuningResult(to_hyper(x), fx, f0, len(history), conv, history)


def _pattern_search(f, x0, f0, bnds, max_iter, tol):
    """Bounded compass search with step halving."""
    x, fx = x0.copy(), f0
    step = 0.25 * (bnds[:, 1] - bnds[:, 0])
    for _ in range(max_iter):
        improved = False
        for i in range(x.size):
            for sgn in (1.0, -1.0):
                cand = x.copy()
                cand[i] = np.clip(cand[i] + sgn * step[i], bnds[i, 0], bnds[i, 1])
                if cand[i] == x[i]:
                    continue
                fc = f(cand)
                if fc < fx:
                    x, fx, improved = cand, fc, True
                    break
        if not improved:
            step *= 0.5
            if np.all(step < tol):
                return x, fx, True
    return x, fx, False


# ---------------------------------------------------------------- resampling

@dataclass
class ResampleResult:
    origins: np.ndarray
    paths: np.ndarray  # (B, n_origins)
    seeds: list
    quantiles: dict
    failures: dict = field(default_factory=dict)

    @property
    def band_width(self) -> np.ndarray:
        qs = sorted(self.quantiles)
        return self.quantiles[qs[-1]] - self.quantiles[qs[0]]


def resample_harness(preset: ModelPreset | str, panel: MixedPanel, B: int, scheme=None, h: int = 1,
                     seeds=None, base_seed: int = 0, quantiles=(0.05, 0.5, 0.95),
                     lambda_grid=DEFAULT_LAMBDA_GRID) -> ResampleResult:
    """Redraw the reservoir matrices ``B`` times and rerun fit + forecast.

    ``scheme`` is a harness WindowScheme (default: fixed, first half of the
    sample for fitting).  Failed replications are recorded and left as NaN.
    """
    from .harness import WindowScheme, run_model_windows

    if B < 1:
        raise ValueError("B must be >= 1")
    if scheme is None:
        scheme = WindowScheme("fixed", initial=panel.T // 2)
    seeds = list(seeds) if seeds is not None else [base_seed + b for b in range(B)]
    if len(seeds) != B:
        raise ValueError("need one seed per replication")
    paths, failures, origins = [], {}, None
    for b, s in enumerate(seeds):
        cfg = {"type": "mfesn", "preset": preset if isinstance(preset, str) else preset, "seed": s,
               "lambda_grid": lambda_grid}
        try:
            fc = run_model_windows(cfg, panel, scheme, (h,))
            origins = fc.origins
            paths.append(fc.values[h])
        except Exception as exc:  # recorded, not fatal
            failures[b] = repr(exc)
            paths.append(None)
    if origins is None:
        raise RuntimeError(f"every replication failed: {failures}")
    P = np.vstack([np.full(origins.size, np.nan) if p is None else p for p in paths])
    q = {float(a): np.nanquantile(P, a, axis=0) for a in quantiles}
    return ResampleResult(origins, P, seeds, q, failures)
