"""Experiment orchestration: estimation windows, forecast schedules, runner and tables.

Origins are reference periods ``o``; a forecast from origin ``o`` at horizon
``h`` targets ``y[o+h]`` using data through the end of period ``o``.  All
horizons are scored on the same origin set ``o = T0-1 .. T-1-H``, so loss
matrices line up across horizons.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import benchmarks, dfm, evaluation, mfesn, midas
from .panel import MixedPanel, load_manifest, load_panel, standardize
from .synthetic import simulate_mixed_panel

__all__ = [
    "ConfigError",
    "WindowScheme",
    "Window",
    "windows",
    "ForecastSchedule",
    "classify_step",
    "multicast",
    "ForecastSet",
    "fit_model",
    "forecast_model",
    "Cell",
    "run_cell",
    "run_model_windows",
    "ExperimentConfig",
    "load_config",
    "RunResult",
    "run_experiment",
    "run_tests",
    "read_forecasts",
    "emit_metrics",
    "emit_tests",
    "emit_tables",
    "THREADS_ENV",
    "CONFIG_VERSION",
]

THREADS_ENV = "MIXFREQ_THREADS"
CONFIG_VERSION = 1
MODEL_TYPES = ("mean", "ar1", "mfesn", "midas", "dfm")


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------- windows

@dataclass(frozen=True)
class WindowScheme:
    """Estimation-window scheme in reference periods.

    The first window fits periods ``[start, start + initial)``; ``test``
    caps the number of forecast origins (default: all that fit).
    """

    kind: str = "fixed"
    initial: int = 40
    step: int = 1
    start: int = 0
    test: int | None = None

    def __post_init__(self):
        if self.kind not in ("fixed", "expanding", "rolling"):
            raise ConfigError(f"unknown window kind {self.kind!r}")
        if self.initial < 3 or self.step < 1 or self.start < 0:
            raise ConfigError("window needs initial >= 3, step >= 1 and start >= 0")
        if self.test is not None and self.test < 1:
            raise ConfigError("test span must be >= 1")


@dataclass(frozen=True)
class Window:
    start: int  # first fit period
    stop: int  # fit periods are [start, stop)
    origins: tuple  # forecast origins served by this fit


def windows(scheme: WindowScheme, T: int, H: int = 1) -> list:
    """Fit windows and the origins each one serves.

    Origins run from ``start + initial - 1`` to ``T - 1 - H`` (or fewer when
    ``test`` is set), so every horizon up to ``H`` is scored on one set.
    """
    first = scheme.start + scheme.initial - 1
    last = T - 1 - H
    if scheme.test is not None:
        if first + scheme.test - 1 > last:
            raise ConfigError(f"test span {scheme.test} does not fit: T={T}, H={H}")
        last = first + scheme.test - 1
    if last < first:
        raise ConfigError(f"no test origins: start+initial={first + 1}, T={T}, H={H}")
    if scheme.kind == "fixed":
        return [Window(scheme.start, first + 1, tuple(range(first, last + 1)))]
    out = []
    for w in range(0, (last - first) // scheme.step + 1):
        o0 = first + w * scheme.step
        stop = o0 + 1
        start = scheme.start if scheme.kind == "expanding" else scheme.start + w * scheme.step
        out.append(Window(start, stop, tuple(range(o0, min(o0 + scheme.step, last + 1)))))
    return out


# ---------------------------------------------------------------- schedules

@dataclass(frozen=True)
class ForecastSchedule:
    kind: str  # "nowcast", "lf", "hf"
    l: int
    h: int
    ell: int
    m: int


def classify_step(l: int, kappa: int) -> ForecastSchedule:
    """Split a high-frequency step count ``l`` into its schedule type."""
    if l < 1 or kappa < 1:
        raise ValueError("need l >= 1 and kappa >= 1")
    h = -(-l // kappa)
    ell = l % kappa
    m = h - l // kappa
    if l <= kappa - 1:
        kind = "nowcast"
    elif ell == 0:
        kind = "lf"
    else:
        kind = "hf"
    return ForecastSchedule(kind, l, h, ell, m)


def multicast(H: int, kappa: int) -> list:
    return [classify_step(l, kappa) for l in range(1, H * kappa + 1)]


# ---------------------------------------------------------------- model runs

@dataclass
class ForecastSet:
    origins: np.ndarray
    values: dict  # h -> forecasts on ``origins`` (original units)
    n_fits: int = 0
    failures: list = field(default_factory=list)
    hf: dict = field(default_factory=dict)  # target period -> length-kappa_max nowcast path
    info: list = field(default_factory=list)


def _grid(cv):
    g = cv.get("grid")
    if g is None:
        return mfesn.DEFAULT_LAMBDA_GRID
    if isinstance(g, dict):
        return tuple(float(v) for v in np.logspace(g["log10_min"], g["log10_max"], int(g["num"])))
    return tuple(float(v) for v in g)


def _feasible_folds(rows, n_folds, fold_size, min_train=5):
    return max(1, min(n_folds, (rows - min_train) // fold_size))


def _cv_lambdas(cfg, panel, w, cv, first):
    """Penalties for an MFESN cell; the first window may use a longer CV span."""
    folds = cv.get("folds_initial", 10) if first else cv.get("folds", 5)
    fs = cv.get("fold_size", 5)
    lo = cv.get("span_start") if first else None
    lo = w.start if lo is None else int(lo)
    if lo > w.start:
        raise ConfigError("cv span_start must not be later than the first window start")
    pc = standardize(panel.slice_periods(lo, panel.T), (0, w.stop - lo))
    n = w.stop - lo
    return mfesn.cv_ridge(pc, cfg["preset"], cfg.get("lambda_grid") or _grid(cv), cfg.get("seed", 0), n,
                          _feasible_folds(n - 1, folds, fs), fs, which="both")


def fit_model(cfg: dict, pw: MixedPanel, n: int, lambdas=None):
    """Fit the model described by ``cfg`` on the first ``n`` periods of standardized ``pw``.

    Returns ``(model, info)``.
    """
    kind = cfg["type"]
    y = pw.target
    if kind == "mean":
        return benchmarks.fit_mean(y[:n]), {}
    if kind == "ar1":
        mod = benchmarks.fit_ar1(y[:n])
        return mod, {"phi": mod.phi}
    if kind == "mfesn":
        mod = mfesn.fit_preset(pw, cfg["preset"], seed=cfg.get("seed", 0), n_fit=n, lambdas=lambdas)
        return mod, {"lambda_input": mod.meta["lambda_input"], "lambda_target": mod.meta["lambda_target"]}
    if kind == "midas":
        lags = cfg.get("lags")
        if lags is None:
            lags = [min(3 * g.kappa, 30) for g in pw.groups]
        design = midas.build_design(pw.slice_periods(0, n), int(cfg.get("p", 1)), lags)
        mod = midas.fit_midas(design, multistart=int(cfg.get("multistart", 0)), seed=cfg.get("seed", 0))
        return mod, {"loss": mod.loss}
    if kind == "dfm":
        fit = dfm.fit_dfm(pw, int(cfg.get("k", 1)), cfg.get("schemes"), n_fit=n,
                          max_iter=int(cfg.get("max_iter", 300)), seed=cfg.get("seed", 0),
                          method=cfg.get("method", "adaptive"))
        return fit.model, {"loglik": fit.loglik, "converged": fit.converged}
    raise ConfigError(f"unknown model type {kind!r}")


def forecast_model(model, pw: MixedPanel, horizons, want_hf: bool = False):
    """Forecasts for every origin of standardized ``pw``: ``({h: (T,)}, hf grid or None)``."""
    T, km = pw.T, pw.kappa_max
    out, hf = {}, None
    if isinstance(model, benchmarks.MeanModel):
        out = {h: np.full(T, model.mu) for h in horizons}
        if want_hf:
            hf = np.full((T, km), model.mu)
    elif isinstance(model, benchmarks.Ar1Model):
        out = {h: benchmarks.forecast_ar1(model, pw.target, h) for h in horizons}
        if want_hf:
            prev = np.concatenate([[np.nan], benchmarks.forecast_ar1(model, pw.target, 1)[:-1]])
            hf = np.repeat(prev[:, None], km, axis=1)
    elif isinstance(model, (mfesn.SMfesnModel, mfesn.MMfesnModel)):
        out = {h: np.asarray(mfesn.forecast(model, pw, h)).reshape(T) for h in horizons}
        if want_hf:
            hf = np.asarray(mfesn.hf_forecasts(model, pw)).reshape(T, km)
    elif isinstance(model, midas.MidasModel):
        out = {h: midas.forecast_midas(model, pw, h) for h in horizons}
        if want_hf:
            hf = midas.hf_forecast_midas(model, pw)
    elif isinstance(model, dfm.MfDfmModel):
        res = dfm.kalman_filter(model, dfm.observation_matrix(model, pw))
        out = {h: dfm.forecast_origins(model, pw, h, res) for h in horizons}
        if want_hf:
            hf = dfm.hf_forecast_dfm(model, pw, res)
    else:
        raise TypeError(f"cannot forecast with {type(model).__name__}")
    return out, hf


@dataclass
class Cell:
    """Outcome of one (model, window) task."""

    window: int
    values: dict  # h -> forecasts on the window's origins
    hf: dict
    info: dict
    error: str | None = None


def run_cell(cfg: dict, panel: MixedPanel, w: Window, wi: int, horizons, cv: dict, want_hf: bool) -> Cell:
    """Standardize on the window, fit, forecast and map back to original units.

    Any exception degrades the cell to NaN forecasts plus an error message.
    """
    local = np.asarray(w.origins) - w.start
    try:
        lambdas = None
        if cfg["type"] == "mfesn":
            lambdas = _cv_lambdas(cfg, panel, w, cv, wi == 0)
        pw = standardize(panel.slice_periods(w.start, panel.T), (0, w.stop - w.start))
        model, info = fit_model(cfg, pw, w.stop - w.start, lambdas)
        fc, hf = forecast_model(model, pw, horizons, want_hf)
        values = {h: pw.destandardize_target(fc[h][local]) for h in horizons}
        paths = {} if hf is None else {o + 1: pw.destandardize_target(hf[o + 1 - w.start]) for o in w.origins}
        return Cell(wi, values, paths, info)
    except Exception as exc:  # isolated per cell
        nan = {h: np.full(local.size, np.nan) for h in horizons}
        return Cell(wi, nan, {}, {}, f"{type(exc).__name__}: {exc}")


def _assemble(cells, wins, horizons) -> ForecastSet:
    cells = sorted(cells, key=lambda c: c.window)
    origins = np.array([o for w in wins for o in w.origins])
    fs = ForecastSet(origins, {h: np.concatenate([c.values[h] for c in cells]) for h in horizons})
    for c in cells:
        if c.error is None:
            fs.n_fits += 1
            fs.info.append({"window": c.window, **c.info})
            fs.hf.update(c.hf)
        else:
            fs.failures.append({"window": c.window, "error": c.error})
    return fs


def run_model_windows(cfg: dict, panel: MixedPanel, scheme: WindowScheme, horizons, cv: dict | None = None,
                      want_hf: bool = False) -> ForecastSet:
    """Fit ``cfg`` on every window of ``scheme`` and collect its forecasts.

    A failing window is recorded and leaves NaN forecasts for its origins.
    """
    horizons = tuple(int(h) for h in horizons)
    wins = windows(scheme, panel.T, max(horizons))
    cells = [run_cell(cfg, panel, w, wi, horizons, cv or {}, want_hf) for wi, w in enumerate(wins)]
    return _assemble(cells, wins, horizons)


# ---------------------------------------------------------------- config

@dataclass
class ExperimentConfig:
    data: dict
    models: list
    window: WindowScheme
    horizons: tuple = (1,)
    tests: dict = field(default_factory=dict)
    cv: dict = field(default_factory=dict)
    seed: int = 0
    hf: bool = False
    out_dir: str = "results"
    base_dir: str = "."

    @classmethod
    def from_dict(cls, doc: dict, base_dir=".") -> "ExperimentConfig":
        if not isinstance(doc, dict):
            raise ConfigError("config must be a mapping")
        if int(doc.get("version", CONFIG_VERSION)) != CONFIG_VERSION:
            raise ConfigError(f"unsupported config version {doc.get('version')}")
        for key in ("data", "models", "window"):
            if key not in doc:
                raise ConfigError(f"config is missing the {key!r} section")
        data = doc["data"]
        if not isinstance(data, dict) or len({"panel", "manifest", "synthetic"} & set(data)) != 1:
            raise ConfigError("data needs exactly one of: panel, manifest, synthetic")
        models = doc["models"]
        if not isinstance(models, list) or not models:
            raise ConfigError("models must be a non-empty list")
        names = set()
        for m in models:
            if not isinstance(m, dict) or m.get("type") not in MODEL_TYPES:
                raise ConfigError(f"model entry {m!r} needs type in {MODEL_TYPES}")
            if m["type"] == "mfesn":
                if m.get("preset") not in mfesn.PRESETS:
                    raise ConfigError(f"unknown preset {m.get('preset')!r}")
            m.setdefault("name", m.get("preset") or m["type"])
            if m["name"] in names:
                raise ConfigError(f"duplicate model name {m['name']!r}")
            names.add(m["name"])
        try:
            win = WindowScheme(**doc["window"])
        except TypeError as exc:
            raise ConfigError(f"bad window section: {exc}") from None
        hs = doc.get("horizons", [1])
        hs = tuple(range(1, int(hs) + 1)) if isinstance(hs, int) else tuple(int(h) for h in hs)
        if not hs or min(hs) < 1:
            raise ConfigError("horizons must be positive")
        return cls(data, models, win, hs, dict(doc.get("tests", {})), dict(doc.get("cv", {})),
                   int(doc.get("seed", 0)), bool(doc.get("hf", False)),
                   str(doc.get("output", {}).get("dir", "results")), str(base_dir))

    def load_panel(self) -> MixedPanel:
        """Build the panel named by the data section; unreadable sources raise ConfigError."""
        d = self.data
        base = Path(self.base_dir)
        try:
            if "panel" in d:
                return load_panel(base / d["panel"])
            if "manifest" in d:
                return load_manifest(base / d["manifest"])
            syn = dict(d["synthetic"])
            syn.setdefault("seed", self.seed)
            return simulate_mixed_panel(**syn)
        except (OSError, TypeError, KeyError, ValueError) as exc:
            raise ConfigError(f"cannot load data: {exc}") from None


def load_config(path) -> ExperimentConfig:
    import yaml

    path = Path(path)
    try:
        doc = yaml.safe_load(path.read_text())
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return ExperimentConfig.from_dict(doc, path.parent)


# ---------------------------------------------------------------- runner

@dataclass
class RunResult:
    config: ExperimentConfig
    panel: MixedPanel
    forecasts: dict  # model name -> ForecastSet
    losses: dict  # model name -> (H, n_origins)
    origins: np.ndarray
    tests: dict
    failures: dict

    @property
    def model_names(self) -> list:
        return [m["name"] for m in self.config.models]


def _with_seed(m, seed):
    m = dict(m)
    m.setdefault("seed", seed)
    return m


def run_experiment(config: ExperimentConfig, threads: int | None = None) -> RunResult:
    """Fit every model on every window, score forecasts and run the tests.

    The (model, window) grid runs on a bounded thread pool; assembly sorts
    by position, so results do not depend on completion order.
    """
    panel = config.load_panel()
    H = max(config.horizons)
    wins = windows(config.window, panel.T, H)
    if threads is None:
        threads = int(os.environ.get(THREADS_ENV, "1"))
    models = [_with_seed(m, config.seed) for m in config.models]
    tasks = [(mi, wi) for mi in range(len(models)) for wi in range(len(wins))]

    def task(mw):
        mi, wi = mw
        return run_cell(models[mi], panel, wins[wi], wi, config.horizons, config.cv, config.hf)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            cells = list(ex.map(task, tasks))
    else:
        cells = [task(t) for t in tasks]
    forecasts = {}
    for mi, m in enumerate(models):
        mine = [c for (i, _), c in zip(tasks, cells) if i == mi]
        forecasts[m["name"]] = _assemble(mine, wins, config.horizons)
    origins = next(iter(forecasts.values())).origins
    losses = {}
    for name, fs in forecasts.items():
        losses[name] = np.vstack([(panel.target[origins + h] - fs.values[h]) ** 2 for h in config.horizons])
    failures = {n: fs.failures for n, fs in forecasts.items() if fs.failures}
    tests = _run_tests(config, losses, origins)
    return RunResult(config, panel, forecasts, losses, origins, tests, failures)


def run_tests(losses: dict, horizons, tests: dict | None = None, seed: int = 0, window_kind: str = "fixed") -> dict:
    """Pairwise MDM, per-horizon MCS and the multi-horizon uMCS on a loss dict.

    ``losses`` maps model name to an ``(H, n_origins)`` array; models with
    missing losses are left out of every test.
    """
    t = tests or {}
    names = [n for n in losses if np.all(np.isfinite(losses[n]))]
    out = {"mdm": [], "mcs": {}, "umcs": None}
    if not names:
        return out
    if t.get("mdm", True):
        for hi, h in enumerate(horizons):
            for a in names:
                for b in names:
                    if a == b:
                        continue
                    try:
                        r = evaluation.mdm_test(losses[a][hi], losses[b][hi], h)
                        out["mdm"].append((h, a, b, r.statistic, r.p_value))
                    except ValueError:
                        out["mdm"].append((h, a, b, math.nan, math.nan))
    if t.get("mcs", True):
        for hi, h in enumerate(horizons):
            L = np.column_stack([losses[n][hi] for n in names])
            r = evaluation.mcs_test(L, B=int(t.get("mcs_B", 1000)), seed=seed)
            out["mcs"][h] = {lvl: [names[i] for i in inc] for lvl, inc in r.included.items()}
    if t.get("umcs", True):
        if window_kind == "expanding":
            out["umcs"] = {"skipped": "uniform multi-horizon MCS is not valid for expanding windows"}
        else:
            B = int(t.get("umcs_B", 100))
            r = evaluation.umcs_test(np.stack([losses[n] for n in names]), B_outer=B, B_inner=B, seed=seed)
            out["umcs"] = {"included": {lvl: [names[i] for i in inc] for lvl, inc in r.included.items()},
                           "config": r.config}
    return out


def _run_tests(config, losses, origins):
    return run_tests(losses, config.horizons, config.tests, config.seed, config.window.kind)


# ---------------------------------------------------------------- output

def _fmt(v) -> str:
    if v is None:
        return "NA"
    v = float(v)
    return "NA" if not math.isfinite(v) else repr(v)


def _jnum(v):
    if v is None:
        return "NA"
    v = float(v)
    return "NA" if not math.isfinite(v) else v


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def read_forecasts(path):
    """Load a forecasts.csv back into ``(names, horizons, origins, losses)``."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"{path}: no forecasts")
    names = list(dict.fromkeys(r["model"] for r in rows))
    horizons = tuple(sorted({int(r["horizon"]) for r in rows}))
    origins = np.array(sorted({int(r["origin"]) for r in rows}))
    pos = {o: k for k, o in enumerate(origins)}
    losses = {n: np.full((len(horizons), origins.size), np.nan) for n in names}
    for r in rows:
        a, f = float(r["actual"]) if r["actual"] != "NA" else math.nan, r["forecast"]
        f = math.nan if f == "NA" else float(f)
        losses[r["model"]][horizons.index(int(r["horizon"])), pos[int(r["origin"])]] = (a - f) ** 2
    return names, horizons, origins, losses


def emit_metrics(names, horizons, losses, origins, tests, out_dir, benchmark: str = "mean") -> list:
    """Relative-MSFE tables with MCS markers plus cumulative-SFE and RMSFE plot data."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    base = benchmark if benchmark in names else None
    mcs = (tests or {}).get("mcs", {})
    metric_rows, table = [], {}
    for n in names:
        table[n] = {}
        for hi, h in enumerate(horizons):
            L = losses[n][hi]
            ok = bool(np.all(np.isfinite(L)))
            m = float(L.mean()) if ok else None
            rel = None
            if ok and base is not None and np.all(np.isfinite(losses[base][hi])):
                rel = m / float(losses[base][hi].mean())
            rrel = None if rel is None else math.sqrt(rel)
            stars = "*" * sum(n in members for members in mcs.get(h, {}).values())
            metric_rows.append([n, h, _fmt(m), _fmt(None if m is None else math.sqrt(m)), _fmt(rel), _fmt(rrel),
                                stars])
            table[n][str(h)] = {"msfe": _jnum(m), "relative_msfe": _jnum(rel), "relative_rmsfe": _jnum(rrel),
                                "mcs": stars}
    _write_csv(out / "metrics.csv", ["model", "horizon", "msfe", "rmsfe", "relative_msfe", "relative_rmsfe", "mcs"],
               metric_rows)
    _write_csv(out / "table.csv", ["model"] + [f"h{h}" for h in horizons],
               [[n] + [str(table[n][str(h)]["relative_msfe"]) for h in horizons] for n in names])
    (out / "table.json").write_text(json.dumps(table, indent=1, sort_keys=True))

    rows = []
    for n in names:
        for hi, h in enumerate(horizons):
            c = np.cumsum(losses[n][hi])
            rows += [[n, h, int(o + h), _fmt(v)] for o, v in zip(origins, c)]
    _write_csv(out / "csfe.csv", ["model", "horizon", "target_period", "csfe"], rows)
    rows = [[n, h, _fmt(math.sqrt(losses[n][hi].mean()))] for n in names for hi, h in enumerate(horizons)]
    _write_csv(out / "rmsfe_by_horizon.csv", ["model", "horizon", "rmsfe"], rows)
    return [out / f for f in ("metrics.csv", "table.csv", "table.json", "csfe.csv", "rmsfe_by_horizon.csv")]


def emit_tests(tests: dict, out_dir) -> list:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if tests.get("mdm"):
        _write_csv(out / "mdm.csv", ["horizon", "model_a", "model_b", "statistic", "p_value"],
                   [[h, a, b, _fmt(s), _fmt(p)] for h, a, b, s, p in tests["mdm"]])
        written.append(out / "mdm.csv")
    if tests.get("mcs"):
        rows = [[h, lvl, n] for h, sets in tests["mcs"].items() for lvl, members in sorted(sets.items())
                for n in members]
        _write_csv(out / "mcs.csv", ["horizon", "level", "model"], rows)
        written.append(out / "mcs.csv")
    if tests.get("umcs") is not None:
        (out / "umcs.json").write_text(json.dumps(tests["umcs"], indent=1, sort_keys=True, default=str))
        written.append(out / "umcs.json")
    return written


def emit_tables(result: RunResult, out_dir) -> list:
    """Write forecasts, metric tables, test results and plot data; returns paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg = result.config
    names = result.model_names
    y = result.panel.target
    O = result.origins

    rows = []
    for n in names:
        fs = result.forecasts[n]
        for h in cfg.horizons:
            for k, o in enumerate(O):
                rows.append([n, int(o), h, int(o + h), _fmt(y[o + h]), _fmt(fs.values[h][k])])
    _write_csv(out / "forecasts.csv", ["model", "origin", "horizon", "target_period", "actual", "forecast"], rows)
    written = [out / "forecasts.csv"]
    written += emit_metrics(names, cfg.horizons, result.losses, O, result.tests, out)
    written += emit_tests(result.tests, out)
    if cfg.hf:
        rows = []
        for n in names:
            for t, path in sorted(result.forecasts[n].hf.items()):
                rows += [[n, int(t), s, _fmt(v)] for s, v in enumerate(np.ravel(path))]
        _write_csv(out / "hf_forecasts.csv", ["model", "target_period", "substep", "forecast"], rows)
        written.append(out / "hf_forecasts.csv")
    w = cfg.window
    summary = {
        "models": names,
        "window": {"kind": w.kind, "initial": w.initial, "step": w.step, "start": w.start, "test": w.test},
        "horizons": list(cfg.horizons),
        "seed": cfg.seed,
        "n_origins": int(O.size),
        "fits": {n: result.forecasts[n].n_fits for n in names},
        "failures": result.failures,
    }
    (out / "run.json").write_text(json.dumps(summary, indent=1, sort_keys=True))
    written.append(out / "run.json")
    return written
