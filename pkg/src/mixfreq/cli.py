"""Command-line entry point: ``mixfreq VERB [options]``.

Exit codes: 0 success, 1 when some (model, window) cells failed, 2 for
configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, harness, mfesn, midas
from .harness import ConfigError, ExperimentConfig, load_config
from .panel import apply_normalization, load_manifest, load_panel, save_panel, standardize
from .serialize import load_model, save_model

EXIT_OK, EXIT_PARTIAL, EXIT_CONFIG = 0, 1, 2


def _global_flags(p, suppress):
    d = {"default": argparse.SUPPRESS} if suppress else {}
    p.add_argument("--config", help="experiment YAML file", **d)
    p.add_argument("--seed", type=int, help="override the config seed", **d)
    p.add_argument("--out-dir", help="output directory (default: config output.dir or ./results)", **d)
    p.add_argument("--threads", type=int, help=f"worker threads (default: ${harness.THREADS_ENV} or 1)", **d)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mixfreq", description="Mixed-frequency forecasting experiments.")
    p.add_argument("--version", action="version", version=f"mixfreq {__version__}")
    _global_flags(p, False)
    sub = p.add_subparsers(dest="verb", required=True)

    def verb(name, help_):
        sp = sub.add_parser(name, help=help_)
        _global_flags(sp, True)
        return sp

    sp = verb("ingest", "build a panel JSON from a YAML manifest")
    sp.add_argument("manifest", nargs="?", help="manifest file (default: config data.manifest)")
    sp.add_argument("--output", help="panel file (default: OUT_DIR/panel.json)")

    sp = verb("fit", "fit models on the first estimation window and save them")
    sp.add_argument("--model", action="append", help="model name from the config (repeatable; default all)")

    sp = verb("forecast", "forecast every origin of a panel with a saved model")
    sp.add_argument("model_file")
    sp.add_argument("--panel", help="panel JSON (default: config data)")
    sp.add_argument("--horizons", type=int, nargs="+", default=[1])
    sp.add_argument("--output", help="CSV path (default: OUT_DIR/forecast_<stem>.csv)")

    sp = verb("evaluate", "MSFE tables and plot data from a forecasts CSV")
    sp.add_argument("--forecasts", help="default: OUT_DIR/forecasts.csv")
    sp.add_argument("--benchmark", default="mean")

    sp = verb("compare", "MDM, MCS and uMCS tests from a forecasts CSV")
    sp.add_argument("--forecasts", help="default: OUT_DIR/forecasts.csv")
    sp.add_argument("--window-kind", choices=["fixed", "rolling", "expanding"],
                    help="estimation scheme behind the forecasts (default: config window.kind)")

    sp = verb("robustness", "MIDAS multistart and MFESN reservoir-resampling diagnostics")
    sp.add_argument("--model", action="append", help="model name from the config (repeatable; default all)")
    sp.add_argument("--starts", type=int, default=16, help="MIDAS low-discrepancy starts")
    sp.add_argument("--replications", type=int, default=20, help="MFESN reservoir redraws")

    verb("run", "full experiment: fit, forecast, evaluate and compare")
    return p


def _out_dir(args, cfg: ExperimentConfig | None) -> Path:
    if getattr(args, "out_dir", None):
        return Path(args.out_dir)
    return Path(cfg.out_dir) if cfg is not None else Path("results")


def _config(args, required=True) -> ExperimentConfig | None:
    path = getattr(args, "config", None)
    if path is None:
        if required:
            raise ConfigError("this verb needs --config")
        return None
    cfg = load_config(path)
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    return cfg


def _threads(args) -> int:
    t = getattr(args, "threads", None)
    if t is None:
        try:
            t = int(os.environ.get(harness.THREADS_ENV, "1"))
        except ValueError:
            raise ConfigError(f"{harness.THREADS_ENV} must be an integer") from None
    if t < 1:
        raise ConfigError("--threads must be >= 1")
    return t


def _selected(cfg, names):
    models = [harness._with_seed(m, cfg.seed) for m in cfg.models]
    if not names:
        return models
    known = {m["name"]: m for m in models}
    missing = [n for n in names if n not in known]
    if missing:
        raise ConfigError(f"unknown model(s) {missing}; known: {sorted(known)}")
    return [known[n] for n in names]


def _safe(name: str) -> str:
    return "".join(c if c.isalnum() or c in "-_." else "_" for c in name).strip("_")


def cmd_ingest(args) -> int:
    cfg = _config(args, required=args.manifest is None)
    if args.manifest is not None:
        manifest = Path(args.manifest)
    elif "manifest" in cfg.data:
        manifest = Path(cfg.base_dir) / cfg.data["manifest"]
    else:
        raise ConfigError("no manifest given and config data has no manifest entry")
    try:
        panel = load_manifest(manifest)
    except OSError as exc:
        raise ConfigError(f"cannot read manifest: {exc}") from None
    out = Path(args.output) if args.output else _out_dir(args, cfg) / "panel.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    save_panel(panel, out)
    print(f"wrote {out} (T={panel.T}, groups={[g.kappa for g in panel.groups]})")
    return EXIT_OK


def cmd_fit(args) -> int:
    cfg = _config(args)
    panel = cfg.load_panel()
    w = harness.windows(cfg.window, panel.T, max(cfg.horizons))[0]
    out = _out_dir(args, cfg) / "models"
    out.mkdir(parents=True, exist_ok=True)
    status = EXIT_OK
    for m in _selected(cfg, args.model):
        try:
            lambdas = harness._cv_lambdas(m, panel, w, cfg.cv, True) if m["type"] == "mfesn" else None
            pw = standardize(panel.slice_periods(w.start, panel.T), (0, w.stop - w.start))
            model, info = harness.fit_model(m, pw, w.stop - w.start, lambdas)
        except Exception as exc:  # one failed model does not stop the rest
            print(f"FAILED {m['name']}: {type(exc).__name__}: {exc}", file=sys.stderr)
            status = EXIT_PARTIAL
            continue
        path = out / f"{_safe(m['name'])}.json"
        save_model(model, path, {"name": m["name"], "config": m, "normalization": pw.normalization,
                                 "fit_start": w.start, "fit_stop": w.stop, "info": info})
        print(f"wrote {path}")
    return status


def cmd_forecast(args) -> int:
    cfg = _config(args, required=args.panel is None)
    try:
        model, meta = load_model(args.model_file, with_meta=True)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot load model: {exc}") from None
    panel = load_panel(args.panel) if args.panel else cfg.load_panel()
    start = int(meta.get("fit_start", 0))
    pw = apply_normalization(panel.slice_periods(start, panel.T), meta.get("normalization", {}))
    fc, _ = harness.forecast_model(model, pw, args.horizons)
    name = meta.get("name", Path(args.model_file).stem)
    out = Path(args.output) if args.output else _out_dir(args, cfg) / f"forecast_{_safe(name)}.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    rows = []
    for h in args.horizons:
        vals = pw.destandardize_target(fc[h])
        for i, v in enumerate(vals):
            o = start + i
            actual = panel.target[o + h] if o + h < panel.T else None
            rows.append([name, o, h, o + h, harness._fmt(actual), harness._fmt(v)])
    harness._write_csv(out, ["model", "origin", "horizon", "target_period", "actual", "forecast"], rows)
    print(f"wrote {out}")
    return EXIT_OK


def _forecasts_path(args, cfg):
    return Path(args.forecasts) if args.forecasts else _out_dir(args, cfg) / "forecasts.csv"


def _read(args, cfg):
    path = _forecasts_path(args, cfg)
    try:
        return harness.read_forecasts(path)
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError(f"cannot read forecasts {path}: {exc}") from None


def cmd_evaluate(args) -> int:
    cfg = _config(args, required=False)
    names, hs, origins, losses = _read(args, cfg)
    written = harness.emit_metrics(names, hs, losses, origins, {}, _out_dir(args, cfg), args.benchmark)
    for p in written:
        print(f"wrote {p}")
    missing = [n for n in names if not np.all(np.isfinite(losses[n]))]
    return EXIT_PARTIAL if missing else EXIT_OK


def cmd_compare(args) -> int:
    cfg = _config(args, required=False)
    names, hs, origins, losses = _read(args, cfg)
    kind = args.window_kind or (cfg.window.kind if cfg else "fixed")
    tests = harness.run_tests(losses, hs, cfg.tests if cfg else {}, cfg.seed if cfg else 0, kind)
    out = _out_dir(args, cfg)
    for p in harness.emit_tests(tests, out):
        print(f"wrote {p}")
    for h, sets in tests["mcs"].items():
        for lvl, members in sorted(sets.items()):
            print(f"MCS h={h} level={lvl}: {', '.join(members)}")
    return EXIT_OK


def cmd_robustness(args) -> int:
    cfg = _config(args)
    panel = cfg.load_panel()
    w = harness.windows(cfg.window, panel.T, max(cfg.horizons))[0]
    out = _out_dir(args, cfg)
    out.mkdir(parents=True, exist_ok=True)
    status = EXIT_OK
    for m in _selected(cfg, args.model):
        try:
            if m["type"] == "midas":
                pw = standardize(panel.slice_periods(w.start, panel.T), (0, w.stop - w.start))
                model, _ = harness.fit_model(dict(m, multistart=args.starts), pw, w.stop - w.start)
                rows = midas.robustness_rows(model)
                path = out / f"robustness_{_safe(m['name'])}.csv"
                with open(path, "w", newline="") as fh:
                    wr = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
                    wr.writeheader()
                    wr.writerows({k: harness._fmt(v) if isinstance(v, float) else v for k, v in r.items()}
                                 for r in rows)
            elif m["type"] == "mfesn":
                h = min(cfg.horizons)
                res = mfesn.resample_harness(m["preset"], panel, args.replications, cfg.window, h,
                                             base_seed=int(m.get("seed", cfg.seed)))
                path = out / f"resample_{_safe(m['name'])}.csv"
                qs = sorted(res.quantiles)
                harness._write_csv(path, ["origin", "horizon"] + [f"q{q:g}" for q in qs],
                                   [[int(o), h] + [harness._fmt(res.quantiles[q][k]) for q in qs]
                                    for k, o in enumerate(res.origins)])
                if res.failures:
                    status = EXIT_PARTIAL
            else:
                continue
        except Exception as exc:
            print(f"FAILED {m['name']}: {type(exc).__name__}: {exc}", file=sys.stderr)
            status = EXIT_PARTIAL
            continue
        print(f"wrote {path}")
    return status


def cmd_run(args) -> int:
    cfg = _config(args)
    result = harness.run_experiment(cfg, threads=_threads(args))
    out = _out_dir(args, cfg)
    harness.emit_tables(result, out)
    for name, fails in result.failures.items():
        for f in fails:
            print(f"FAILED {name} window {f['window']}: {f['error']}", file=sys.stderr)
    print(f"wrote results to {out}")
    return EXIT_PARTIAL if result.failures else EXIT_OK


COMMANDS = {
    "ingest": cmd_ingest, "fit": cmd_fit, "forecast": cmd_forecast, "evaluate": cmd_evaluate,
    "compare": cmd_compare, "robustness": cmd_robustness, "run": cmd_run,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.verb](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
