"""Tempo-index arithmetic on the mixed-frequency time axis.

A tempo index ``(t, s, kappa)`` names sub-period ``s`` of reference period
``t`` for a series observed ``kappa`` times per reference period.  Any pair
``(t, s)`` with ``s`` outside ``[0, kappa)`` is equivalent to exactly one
canonical pair, obtained by carrying whole periods out of ``s``.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "TempoIndex",
    "canonicalize",
    "shift",
    "frequency_ratio",
    "project_to_coarse",
    "to_flat",
    "from_flat",
]


@dataclass(frozen=True, order=True)
class TempoIndex:
    t: int
    s: int
    kappa: int = 1

    def __post_init__(self):
        if int(self.kappa) < 1:
            raise ValueError(f"kappa must be >= 1, got {self.kappa}")

    @property
    def is_canonical(self) -> bool:
        return 0 <= self.s < self.kappa


def canonicalize(idx: TempoIndex) -> TempoIndex:
    """Return the equivalent index with ``0 <= s < kappa``.

    Python's floor division already carries negative offsets into earlier
    periods, so the four equivalence rules reduce to one ``divmod``.
    """
    carry, s = divmod(int(idx.s), int(idx.kappa))
    return TempoIndex(int(idx.t) + carry, s, idx.kappa)


def shift(idx: TempoIndex, delta: int) -> TempoIndex:
    """Advance ``idx`` by ``delta`` sub-periods (negative moves backwards)."""
    return canonicalize(TempoIndex(idx.t, idx.s + int(delta), idx.kappa))


def frequency_ratio(kappa_max: int, kappa: int) -> int:
    """``q = kappa_max / kappa``; raises unless the division is exact."""
    if kappa < 1 or kappa_max < 1:
        raise ValueError("frequencies must be positive")
    q, rem = divmod(int(kappa_max), int(kappa))
    if rem:
        raise ValueError(f"kappa {kappa} does not divide kappa_max {kappa_max}")
    return q


def project_to_coarse(idx: TempoIndex, q: int) -> TempoIndex:
    """Most recent coarse sub-period at or before a fine index.

    ``idx`` lives at ``kappa_max``; the result lives at ``kappa_max // q``.
    """
    if q < 1 or idx.kappa % q:
        raise ValueError(f"q={q} does not divide kappa_max {idx.kappa}")
    kappa = idx.kappa // q
    c = canonicalize(idx)
    return TempoIndex(c.t, c.s // q, kappa)


def to_flat(idx: TempoIndex) -> int:
    """Flat sub-period count ``t*kappa + s`` (0 at the origin)."""
    return int(idx.t) * int(idx.kappa) + int(idx.s)


def from_flat(j: int, kappa: int) -> TempoIndex:
    return canonicalize(TempoIndex(0, int(j), kappa))
