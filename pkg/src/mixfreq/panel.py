"""Ingestion and preprocessing of mixed-frequency panels.

Layout convention used throughout the package: the target ``y`` has one
value per reference period, ``y[i]`` for ``i = 0..T-1``.  A covariate group
observed ``kappa`` times per period is a ``(T*kappa, n)`` array whose row
``i*kappa + s`` is the ``s``-th observation inside period ``i``; the last row
of period ``i`` is released together with ``y[i]``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy import optimize, signal

__all__ = [
    "RawSeries",
    "SeriesGroup",
    "MixedPanel",
    "Garch11Params",
    "GarchError",
    "TransformDomainError",
    "load_csv",
    "apply_transform",
    "fit_garch11",
    "fill_trailing_mean",
    "interpolate_to_fixed_grid",
    "average_blocks",
    "standardize",
    "apply_normalization",
    "load_manifest",
    "save_panel",
    "load_panel",
    "PANEL_FORMAT_VERSION",
]

PANEL_FORMAT_VERSION = 1


class TransformDomainError(ValueError):
    pass


class GarchError(RuntimeError):
    def __init__(self, msg, params=None):
        super().__init__(msg)
        self.params = params


@dataclass
class RawSeries:
    name: str
    kappa: int
    values: np.ndarray
    transform_code: int = 1
    keys: list | None = None
    blocks: list | None = None  # reference sub-block label per value

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.transform_code not in range(1, 9):
            raise ValueError(f"transform code must be in 1..8, got {self.transform_code}")
        if self.keys is not None and len(set(self.keys)) != len(self.keys):
            raise ValueError(f"series {self.name!r} has duplicate index keys")


@dataclass
class SeriesGroup:
    kappa: int
    data: np.ndarray
    names: list = field(default_factory=list)

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim == 1:
            data = data[:, None]
        self.data = data
        if not self.names:
            self.names = [f"k{self.kappa}_{j}" for j in range(data.shape[1])]
        if len(self.names) != data.shape[1]:
            raise ValueError("names do not match the column count")

    @property
    def n(self) -> int:
        return self.data.shape[1]


@dataclass
class MixedPanel:
    target: np.ndarray
    groups: list
    target_name: str = "y"
    normalization: dict = field(default_factory=dict)

    def __post_init__(self):
        self.target = np.asarray(self.target, dtype=float).ravel()
        T = self.target.size
        if T < 2:
            raise ValueError("target needs at least two periods")
        for g in self.groups:
            if g.data.shape[0] != T * g.kappa:
                raise ValueError(
                    f"group at kappa={g.kappa} has {g.data.shape[0]} rows, expected {T * g.kappa}"
                )
        km = self.kappa_max
        for g in self.groups:
            if km % g.kappa:
                raise ValueError(f"kappa {g.kappa} does not divide kappa_max {km}")

    @property
    def T(self) -> int:
        return self.target.size

    @property
    def kappa_max(self) -> int:
        return max([g.kappa for g in self.groups], default=1)

    @property
    def ratios(self) -> list:
        km = self.kappa_max
        return [km // g.kappa for g in self.groups]

    def slice_periods(self, start: int, stop: int) -> "MixedPanel":
        groups = [
            SeriesGroup(g.kappa, g.data[start * g.kappa: stop * g.kappa], list(g.names))
            for g in self.groups
        ]
        return MixedPanel(self.target[start:stop], groups, self.target_name, dict(self.normalization))

    def destandardize_target(self, values):
        mu, sd = self.normalization.get(self.target_name, (0.0, 1.0))
        return np.asarray(values, dtype=float) * sd + mu


@dataclass(frozen=True)
class Garch11Params:
    omega: float
    a: float
    b: float
    mu: float

    @property
    def persistence(self) -> float:
        return self.a + self.b


def _default_block(key: str) -> str:
    # "YYYY-MM-DD" style keys group into months
    return key[:7]


def load_csv(path, kappa: int, transform_code: int = 1, column: str | int | None = None,
             block_of: Callable[[str], str] | None = _default_block) -> RawSeries:
    """Read one series from a CSV file with a header row.

    The first column is the index key; ``column`` picks the value column by
    name or position (default: the first value column).  Blank cells become
    NaN.  Rows are sorted by key.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        if len(header) < 2:
            raise ValueError(f"{path}: need an index column and at least one value column")
        if column is None:
            col = 1
        elif isinstance(column, int):
            col = column
        else:
            if column not in header:
                raise ValueError(f"{path}: column {column!r} not in header")
            col = header.index(column)
        keys, vals = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) <= col:
                raise ValueError(f"{path}:{lineno}: expected at least {col + 1} fields")
            cell = row[col].strip()
            if cell == "":
                v = math.nan
            else:
                try:
                    v = float(cell)
                except ValueError:
                    raise ValueError(f"{path}:{lineno}: non-numeric value {cell!r}") from None
            keys.append(row[0].strip())
            vals.append(v)
    if len(set(keys)) != len(keys):
        seen = set()
        dup = next(k for k in keys if k in seen or seen.add(k))
        raise ValueError(f"{path}: duplicate index key {dup!r}")
    order = sorted(range(len(keys)), key=lambda i: keys[i])
    keys = [keys[i] for i in order]
    vals = np.array([vals[i] for i in order], dtype=float)
    name = header[col]
    blocks = [block_of(k) for k in keys] if block_of is not None else None
    return RawSeries(name, kappa, vals, transform_code, keys, blocks)


def _check_positive(x, code):
    bad = np.flatnonzero(~(x > 0))
    if bad.size:
        raise TransformDomainError(
            f"transform code {code} needs positive values; index {bad[0]} is {x[bad[0]]}"
        )


def apply_transform(series: RawSeries | np.ndarray, code: int | None = None) -> np.ndarray:
    """Stationarity transform by code (1 none ... 8 GARCH volatility).

    Code 8 treats the input as a price level, fits a GARCH(1,1) to its log
    returns and returns the conditional volatility path.
    """
    if isinstance(series, RawSeries):
        x, code = series.values, series.transform_code if code is None else code
    else:
        x = np.asarray(series, dtype=float)
        code = 1 if code is None else code
    if code == 1:
        return x.copy()
    if code == 2:
        return np.diff(x)
    if code == 3:
        return np.diff(x, n=2)
    if code in (4, 5, 6, 8):
        _check_positive(x, code)
        lx = np.log(x)
        if code == 4:
            return lx
        if code == 5:
            return np.diff(lx)
        if code == 6:
            return np.diff(lx, n=2)
        _, vol = fit_garch11(np.diff(lx))
        return vol
    if code == 7:
        prev = x[:-1]
        bad = np.flatnonzero(prev == 0)
        if bad.size:
            raise TransformDomainError(f"percentage change undefined: zero at index {bad[0]}")
        return np.diff(x) / prev
    raise ValueError(f"unknown transform code {code}")


def _garch_variance(eps2, omega, a, b, s0):
    u = omega + a * eps2[:-1]
    sig2 = np.empty_like(eps2)
    sig2[0] = s0
    sig2[1:] = signal.lfilter([1.0], [1.0, -b], u, zi=[b * s0])[0]
    return sig2


def fit_garch11(returns) -> tuple[Garch11Params, np.ndarray]:
    """Gaussian quasi-ML GARCH(1,1) with a constant mean.

    Returns are rescaled to unit sample variance for the optimization and
    the fitted parameters mapped back afterwards.
    """
    r = np.asarray(returns, dtype=float)
    if r.size < 50:
        raise ValueError("GARCH fit needs at least 50 observations")
    if not np.all(np.isfinite(r)):
        raise ValueError("returns contain non-finite values")
    scale = r.std()
    if not scale > 0:
        raise GarchError("degenerate return series (zero variance)")
    z = (r - r.mean()) / scale
    s0 = 1.0

    def nll(p):
        mu, lw, la, lb = p
        w, a, b = np.exp([lw, la, lb])
        if a + b >= 1.0 - 1e-8:
            return 1e10 * (1.0 + a + b)
        e2 = (z - mu) ** 2
        sig2 = _garch_variance(e2, w, a, b, s0)
        return 0.5 * np.sum(np.log(sig2) + e2 / sig2)

    best = None
    for a0, b0 in ((0.05, 0.90), (0.10, 0.60), (0.02, 0.50)):
        x0 = np.array([0.0, np.log(1 - a0 - b0), np.log(a0), np.log(b0)])
        res = optimize.minimize(
            nll, x0, method="L-BFGS-B",
            bounds=[(-1, 1), (-20, 2), (-20, 0), (-20, 0)],
        )
        if best is None or res.fun < best.fun:
            best = res
    mu, lw, la, lb = best.x
    w, a, b = np.exp([lw, la, lb])
    params = Garch11Params(omega=w * scale**2, a=a, b=b, mu=r.mean() + mu * scale)
    if a + b >= 1.0:
        raise GarchError("stationarity constraint violated", params)
    e2 = (r - params.mu) ** 2
    sig2 = _garch_variance(e2, params.omega, a, b, e2.mean())
    return params, np.sqrt(sig2)


def fill_trailing_mean(x, window: int = 5) -> np.ndarray:
    """Replace NaNs by the mean of the previous ``window`` (filled) values."""
    x = np.array(x, dtype=float)
    for i in np.flatnonzero(np.isnan(x)):
        prev = x[max(0, i - window): i]
        if prev.size == 0:
            raise ValueError(f"cannot fill missing value at index {i}: no history")
        x[i] = prev.mean()
    return x


def _split_blocks(series):
    if isinstance(series, RawSeries):
        if series.blocks is None:
            return [series.values]
        out, labels = [], series.blocks
        start = 0
        for i in range(1, len(labels) + 1):
            if i == len(labels) or labels[i] != labels[start]:
                out.append(series.values[start:i])
                start = i
        return out
    return [np.asarray(b, dtype=float) for b in series]


def interpolate_to_fixed_grid(series, per_period: int, anchor: float | None = None) -> np.ndarray:
    """Force every reference sub-block to hold exactly ``per_period`` values.

    ``series`` is a RawSeries with block labels or a sequence of arrays.
    Short blocks get their leading slots filled by linear interpolation from
    the previous block's last value (or ``anchor`` for the first block) to the
    block's first observation; long blocks keep their last ``per_period``.
    Interior gaps are filled by the trailing five-value mean first.
    """
    if per_period < 1:
        raise ValueError("per_period must be >= 1")
    out = []
    prev = anchor
    for bi, block in enumerate(_split_blocks(series)):
        block = np.asarray(block, dtype=float)
        if np.isnan(block).any():
            hist = np.concatenate([np.asarray(out[-1]) if out else np.empty(0), block])
            filled = fill_trailing_mean(hist)
            block = filled[filled.size - block.size:]
        n = block.size
        if n >= per_period:
            vals = block[n - per_period:]
        else:
            if prev is None:
                raise ValueError(f"block {bi} has {n} values and no previous anchor")
            m = per_period - n
            end = block[0] if n else prev
            fill = prev + (end - prev) * np.arange(1, m + 1) / (m + 1)
            vals = np.concatenate([fill, block])
        out.append(vals)
        prev = vals[-1]
    return np.concatenate(out) if out else np.empty(0)


def average_blocks(x, block: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if block < 1:
        raise ValueError("block must be >= 1")
    if x.shape[0] % block:
        raise ValueError(f"length {x.shape[0]} not divisible by block {block}")
    return x.reshape(x.shape[0] // block, block, *x.shape[1:]).mean(axis=1)


def standardize(panel: MixedPanel, window: tuple[int, int] | None = None) -> MixedPanel:
    """Z-score every series with its mean and population std over ``window``.

    ``window`` is a half-open range of reference periods; default all.
    """
    start, stop = (0, panel.T) if window is None else window
    if not 0 <= start < stop <= panel.T:
        raise ValueError(f"invalid window {window}")
    norm = {}

    def _z(name, x, w):
        mu, sd = float(w.mean()), float(w.std())
        if not sd > 0:
            raise ValueError(f"series {name!r} has zero variance in the window")
        norm[name] = (mu, sd)
        return (x - mu) / sd

    y = _z(panel.target_name, panel.target, panel.target[start:stop])
    groups = []
    for g in panel.groups:
        cols = []
        for j, name in enumerate(g.names):
            col = g.data[:, j]
            cols.append(_z(name, col, col[start * g.kappa: stop * g.kappa]))
        groups.append(SeriesGroup(g.kappa, np.column_stack(cols), list(g.names)))
    return MixedPanel(y, groups, panel.target_name, norm)


def apply_normalization(panel: MixedPanel, norm: dict) -> MixedPanel:
    """Z-score ``panel`` with stored ``{name: (mean, std)}`` statistics."""

    def _z(name, x):
        if name not in norm:
            raise KeyError(f"no stored normalization for series {name!r}")
        mu, sd = norm[name]
        return (x - mu) / sd

    y = _z(panel.target_name, panel.target)
    groups = [
        SeriesGroup(g.kappa, np.column_stack([_z(nm, g.data[:, j]) for j, nm in enumerate(g.names)]), list(g.names))
        for g in panel.groups
    ]
    return MixedPanel(y, groups, panel.target_name, {k: tuple(v) for k, v in norm.items()})


def _tail_periods(x, kappa, T):
    return x[x.shape[0] - T * kappa:]


def load_manifest(path) -> MixedPanel:
    """Build a panel from a YAML manifest.

    Schema (version 1)::

        version: 1
        target: {file: gdp.csv, column: GDP, transform_code: 5}
        series:
          - {file: monthly.csv, column: IP, kappa: 3, transform_code: 5}
          - {file: daily.csv, column: SP500, kappa: 72, transform_code: 8,
             per_period: 24, average: 6}

    ``per_period`` triggers fixed-grid interpolation by month blocks, and
    ``average`` block-averages afterwards (dividing kappa).  All series are
    aligned on their last complete period and trimmed to the common span.
    """
    import yaml

    path = Path(path)
    spec = yaml.safe_load(path.read_text())
    if not isinstance(spec, dict) or "target" not in spec or "series" not in spec:
        raise ValueError(f"{path}: manifest needs 'target' and 'series' sections")
    if int(spec.get("version", 1)) != 1:
        raise ValueError(f"{path}: unsupported manifest version {spec.get('version')}")
    base = path.parent

    def _load(entry, kappa):
        raw = load_csv(base / entry["file"], kappa, int(entry.get("transform_code", 1)),
                       entry.get("column"))
        if entry.get("per_period"):
            raw = RawSeries(raw.name, kappa,
                            interpolate_to_fixed_grid(raw, int(entry["per_period"])),
                            raw.transform_code)
        elif np.isnan(raw.values).any():
            raw.values = fill_trailing_mean(raw.values)
        x = apply_transform(raw)
        if entry.get("average"):
            b = int(entry["average"])
            x = average_blocks(x[x.size % b:], b)
            kappa //= b
        return raw.name, kappa, x

    tname, _, y = _load(spec["target"], 1)
    cols = [_load(e, int(e["kappa"])) for e in spec["series"]]
    T = min([y.size] + [x.size // k for _, k, x in cols])
    by_kappa: dict[int, list] = {}
    for name, k, x in cols:
        by_kappa.setdefault(k, []).append((name, _tail_periods(x, k, T)))
    groups = [
        SeriesGroup(k, np.column_stack([x for _, x in items]), [n for n, _ in items])
        for k, items in sorted(by_kappa.items(), reverse=True)
    ]
    return MixedPanel(y[y.size - T:], groups, tname)


def _arr(x):
    return np.asarray(x, dtype=float).tolist()


def save_panel(panel: MixedPanel, path) -> None:
    """JSON serialization; Python float repr makes the round trip bit-exact."""
    doc = {
        "format": "mixfreq-panel",
        "version": PANEL_FORMAT_VERSION,
        "target_name": panel.target_name,
        "target": _arr(panel.target),
        "groups": [{"kappa": g.kappa, "names": list(g.names), "data": _arr(g.data)} for g in panel.groups],
        "normalization": {k: list(v) for k, v in panel.normalization.items()},
    }
    Path(path).write_text(json.dumps(doc))


def load_panel(path) -> MixedPanel:
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != "mixfreq-panel":
        raise ValueError(f"{path}: not a panel file")
    if doc.get("version") != PANEL_FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported panel version {doc.get('version')}")
    groups = [
        SeriesGroup(g["kappa"], np.asarray(g["data"], dtype=float).reshape(-1, len(g["names"])), g["names"])
        for g in doc["groups"]
    ]
    norm = {k: tuple(v) for k, v in doc.get("normalization", {}).items()}
    return MixedPanel(np.asarray(doc["target"], dtype=float), groups, doc["target_name"], norm)
