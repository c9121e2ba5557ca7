from fractions import Fraction as F

import pytest
from hypothesis import given, settings

from ergomax.core import (
    DyadicInterval,
    IntegerInterval,
    WindowedSequence,
    dyadic_intervals_containing,
    expand,
    interval_average,
    prefix_sums,
)

from conftest import exact_sequences


def test_interval_average_examples():
    assert interval_average(WindowedSequence.constant(0, 0, F(0)), (-5, 5)) == 0
    assert interval_average(WindowedSequence.delta(0, F(1)), (0, 1)) == F(1, 2)
    a = WindowedSequence(1, (F(1), F(2), F(3), F(4)))
    assert interval_average(a, (1, 4)) == F(5, 2)


def test_integer_interval_rejects_empty():
    with pytest.raises(ValueError):
        IntegerInterval(3, 2)
    assert len(IntegerInterval(-2, 2)) == 5


def test_dyadic_interval_endpoints():
    I = DyadicInterval(1, 1)
    assert (I.lo, I.hi) == (1, 2)
    assert (DyadicInterval(3, 0).lo, DyadicInterval(3, 0).hi) == (-7, 0)
    with pytest.raises(ValueError):
        DyadicInterval(0, 1)


def test_expand_examples():
    I = DyadicInterval(1, 1)
    assert expand(I, 1, "left") == IntegerInterval(-1, 2)
    assert expand(I, 1, "symmetric") == IntegerInterval(-1, 4)
    assert len(expand(I, 1, "symmetric")) == 6
    R = expand(DyadicInterval(3, -2), 1, "right")
    assert R.lo == DyadicInterval(3, -2).lo and len(R) == 16


@pytest.mark.parametrize("N", [1, 2, 3, 5])
@pytest.mark.parametrize("j", [-3, 0, 1, 4])
@pytest.mark.parametrize("m", [1, 2, 3])
def test_expand_lengths_and_containment(N, j, m):
    I = DyadicInterval(N, j)
    size = 1 << N
    assert len(expand(I, m, "left")) == 2 * m * size
    assert len(expand(I, m, "right")) == 2 * m * size
    S = expand(I, m, "symmetric")
    assert len(S) == (4 * m - 1) * size
    assert I.interval in S


def test_dyadic_intervals_containing_examples():
    assert dyadic_intervals_containing(1, 2) == [DyadicInterval(1, 1), DyadicInterval(2, 1)]
    assert dyadic_intervals_containing(0, 1) == [DyadicInterval(1, 0)]
    for N in range(1, 6):
        assert dyadic_intervals_containing(1 << N, 6)[N - 1] == DyadicInterval(N, 1)


def test_same_level_partition():
    for N in range(1, 5):
        seen = {}
        for m in range(-40, 41):
            I = DyadicInterval.containing(m, N)
            assert m in I
            seen.setdefault(I, []).append(m)
        for I, pts in seen.items():
            assert pts == list(range(max(I.lo, -40), min(I.hi, 40) + 1))


def test_parent_child():
    for N in range(2, 6):
        for j in range(-5, 6):
            I = DyadicInterval(N, j)
            a, b = I.children()
            assert (a.lo, a.hi + 1, b.hi) == (I.lo, b.lo, I.hi)
            assert a.parent() == I and b.parent() == I


def test_prefix_sum_examples():
    T = prefix_sums(WindowedSequence.delta(0, F(1)))
    assert [T(k) for k in range(-3, 4)] == [0, 0, 0, 1, 1, 1, 1]
    assert prefix_sums(WindowedSequence.constant(1, 4, F(1))).interval_sum(2, 3) == 2


@settings(max_examples=200, deadline=None)
@given(exact_sequences(max_len=16, signed=True))
def test_prefix_sums_match_direct_summation(a):
    T = prefix_sums(a)
    for lo in range(a.lo - 2, a.hi + 3):
        for hi in range(lo, a.hi + 3):
            assert T.interval_sum(lo, hi) == sum((a[k] for k in range(lo, hi + 1)), F(0))
            assert T.average(lo, hi) == interval_average(a, (lo, hi))


def test_windowed_sequence_modes():
    a = WindowedSequence(0, (F(1, 3), 2))
    assert a.exact and a[1] == F(2) and a[5] == 0
    b = WindowedSequence(0, (F(1, 3), 0.5))
    assert not b.exact
    with pytest.raises(ValueError):
        WindowedSequence(0, ())
    assert a.support() == IntegerInterval(0, 1)
    assert WindowedSequence(3, (F(0), F(0))).support() is None
