"""Versioned JSON persistence for fitted models.

Floats are written with their shortest round-trip representation, so a
save/load cycle reproduces every parameter bit for bit.
"""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path

import numpy as np

from . import benchmarks, dfm, mfesn, midas, reservoir

__all__ = ["FORMAT", "VERSION", "to_jsonable", "from_jsonable", "save_model", "load_model"]

FORMAT = "mixfreq-model"
VERSION = 1

_TYPES = {
    cls.__name__: cls
    for cls in (
        benchmarks.MeanModel, benchmarks.Ar1Model,
        reservoir.StateParams, reservoir.Hyperparams, reservoir.Readout, reservoir.EsnModel,
        mfesn.SMfesnModel, mfesn.MMfesnModel, mfesn.ReservoirSpec, mfesn.ModelPreset,
        midas.MidasModel, midas.StartResult,
        dfm.FactorDynamics, dfm.Stock, dfm.AlmonLag, dfm.Trigonometric, dfm.ObservationBlock, dfm.MfDfmModel,
    )
}


def to_jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        name = type(obj).__name__
        if name not in _TYPES:
            raise TypeError(f"cannot serialize {name}")
        return {"__type__": name, **{f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}}
    if isinstance(obj, np.ndarray):
        return {"__ndarray__": obj.ravel().tolist(), "dtype": obj.dtype.str, "shape": list(obj.shape)}
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, tuple):
        return {"__tuple__": [to_jsonable(v) for v in obj]}
    if isinstance(obj, list):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def from_jsonable(doc):
    if isinstance(doc, list):
        return [from_jsonable(v) for v in doc]
    if not isinstance(doc, dict):
        return doc
    if "__ndarray__" in doc:
        return np.array(doc["__ndarray__"], dtype=np.dtype(doc["dtype"])).reshape(doc["shape"])
    if "__tuple__" in doc:
        return tuple(from_jsonable(v) for v in doc["__tuple__"])
    if "__type__" in doc:
        cls = _TYPES.get(doc["__type__"])
        if cls is None:
            raise ValueError(f"unknown model type {doc['__type__']!r}")
        return cls(**{k: from_jsonable(v) for k, v in doc.items() if k != "__type__"})
    return {k: from_jsonable(v) for k, v in doc.items()}


def save_model(model, path, meta: dict | None = None) -> None:
    """Write ``model`` plus free-form ``meta`` (e.g. normalization statistics)."""
    doc = {"format": FORMAT, "version": VERSION, "model": to_jsonable(model), "meta": to_jsonable(meta or {})}
    Path(path).write_text(json.dumps(doc, indent=1))


def load_model(path, with_meta: bool = False):
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != FORMAT:
        raise ValueError(f"{path}: not a {FORMAT} file")
    if doc.get("version") != VERSION:
        raise ValueError(f"{path}: unsupported version {doc.get('version')}")
    model = from_jsonable(doc["model"])
    return (model, from_jsonable(doc.get("meta", {}))) if with_meta else model
