"""Unconditional-mean and AR(1) benchmark forecasters."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

__all__ = ["MeanModel", "Ar1Model", "fit_mean", "fit_ar1", "forecast_mean", "forecast_ar1"]


@dataclass(frozen=True)
class MeanModel:
    mu: float

    def forecast(self, h: int = 1) -> float:
        return self.mu


@dataclass(frozen=True)
class Ar1Model:
    c: float
    phi: float

    @property
    def stationary(self) -> bool:
        return abs(self.phi) < 1.0


def fit_mean(y) -> MeanModel:
    y = np.asarray(y, dtype=float)
    if y.size == 0:
        raise ValueError("empty window")
    return MeanModel(float(y.mean()))


def forecast_mean(model: MeanModel, h: int = 1) -> float:
    return model.mu


def fit_ar1(y) -> Ar1Model:
    """OLS of ``y_t`` on ``(1, y_{t-1})``."""
    y = np.asarray(y, dtype=float)
    if y.size < 3:
        raise ValueError("AR(1) needs at least 3 observations")
    x, z = y[:-1], y[1:]
    xc = x - x.mean()
    sxx = xc @ xc
    if not sxx > 0:
        raise ValueError("degenerate regressor: lagged series is constant")
    phi = float(xc @ (z - z.mean()) / sxx)
    c = float(z.mean() - phi * x.mean())
    if abs(phi) >= 1.0:
        warnings.warn(f"non-stationary AR(1) estimate phi={phi:.3f}", stacklevel=2)
    return Ar1Model(c, phi)


def forecast_ar1(model: Ar1Model, y_T, h: int):
    """``c (1 - phi^h) / (1 - phi) + phi^h y_T``; drift form when ``phi = 1``."""
    if h < 1:
        raise ValueError("horizon must be >= 1")
    c, phi = model.c, model.phi
    y_T = np.asarray(y_T, dtype=float)
    if phi == 1.0:
        return c * h + y_T
    ph = phi**h
    return c * (1.0 - ph) / (1.0 - phi) + ph * y_T
