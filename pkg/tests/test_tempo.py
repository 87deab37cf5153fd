import pytest
from hypothesis import given, strategies as st

from mixfreq.tempo import (TempoIndex, canonicalize, frequency_ratio, from_flat, project_to_coarse, shift,
                           to_flat)

ints = st.integers(-10_000, 10_000)
kappas = st.integers(1, 100)


@pytest.mark.parametrize("s, expected", [(0, (3, 0)), (4, (4, 0)), (7, (4, 3)), (-1, (2, 3))])
def test_canonicalize_examples(s, expected):
    c = canonicalize(TempoIndex(3, s, 4))
    assert (c.t, c.s) == expected


@pytest.mark.parametrize("start, delta, expected", [((2, 1), 2, (3, 0)), ((2, 1), 0, (2, 1)), ((2, 0), -1, (1, 2))])
def test_shift_examples(start, delta, expected):
    r = shift(TempoIndex(*start, 3), delta)
    assert (r.t, r.s) == expected


@pytest.mark.parametrize("km, q, s, expected", [(72, 24, 25, 1), (72, 1, 10, 10), (12, 4, 11, 2)])
def test_project_examples(km, q, s, expected):
    r = project_to_coarse(TempoIndex(5, s, km), q)
    assert (r.t, r.s, r.kappa) == (5, expected, km // q)


def test_frequency_ratio_requires_exact_division():
    assert frequency_ratio(72, 3) == 24
    with pytest.raises(ValueError):
        frequency_ratio(72, 5)
    with pytest.raises(ValueError):
        project_to_coarse(TempoIndex(0, 0, 12), 5)


def test_kappa_must_be_positive():
    with pytest.raises(ValueError):
        TempoIndex(0, 0, 0)


@given(ints, ints, kappas)
def test_canonical_and_idempotent(t, s, k):
    c = canonicalize(TempoIndex(t, s, k))
    assert 0 <= c.s < k
    assert canonicalize(c) == c
    assert to_flat(c) == t * k + s


@given(ints, st.integers(0, 99), kappas, ints, ints)
def test_shift_is_a_group_action(t, s, k, a, b):
    i = canonicalize(TempoIndex(t, s, k))
    assert shift(shift(i, a), b) == shift(i, a + b)
    assert shift(i, k) == TempoIndex(i.t + 1, i.s, k)


@given(ints, kappas)
def test_flat_round_trip(j, k):
    assert to_flat(from_flat(j, k)) == j


@given(st.integers(-50, 50), st.sampled_from([(72, 24), (72, 3), (12, 4), (12, 1), (6, 6)]))
def test_projection_monotone_and_blockwise_constant(t, kq):
    km, q = kq
    proj = [project_to_coarse(TempoIndex(t, s, km), q).s for s in range(km)]
    assert proj == sorted(proj)
    for s in range(km):
        assert proj[s] == proj[(s // q) * q]
