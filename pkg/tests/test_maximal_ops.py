from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ergomax import oracles
from ergomax.core import IntegerInterval, WindowedSequence
from ergomax.maximal_ops import (
    OPERATORS,
    best_constant_oscillation,
    bmo_norm,
    centered_maximal,
    check_operator_comparison,
    check_sharp_equivalence,
    dyadic_maximal,
    maximal,
    sharp_maximal,
    uncentered_maximal,
)

from conftest import exact_sequences

STEP = WindowedSequence(-8, tuple(F(0) if k < 0 else F(1) for k in range(-8, 8)))


def test_centered_delta():
    d = WindowedSequence.delta(0, F(1))
    res = centered_maximal(d, eval_window=(-6, 6))
    for m in range(-6, 7):
        assert res[m] == F(1, 2 * abs(m) + 1) if m else res[m] == F(1, 3)


def test_centered_truncated_delta():
    d = WindowedSequence.delta(0, F(1))
    assert centered_maximal(d, 2, eval_window=(3, 3))[3] == 0
    with pytest.raises(ValueError):
        centered_maximal(d, 1)


def test_uncentered_and_dyadic_delta():
    d = WindowedSequence.delta(0, F(1))
    u = uncentered_maximal(d, eval_window=(-5, 5))
    assert u[0] == 1 and u[1] == F(1, 2)
    assert all(u[m] == F(1, abs(m) + 1) for m in range(-5, 6))
    d1 = WindowedSequence.delta(1, F(1))
    md = dyadic_maximal(d1, eval_window=(-4, 4))
    assert md[1] == F(1, 2) and md[0] == 0 and md[-3] == 0


def test_constant_sequences_are_fixed_interior():
    c = WindowedSequence.constant(-30, 30, F(3, 2))
    for op in ("centered", "uncentered"):
        assert maximal(c, op, eval_window=(-3, 3)).values.values == (F(3, 2),) * 7
    assert sharp_maximal(c, eval_window=(-3, 3), search_range=(-30, 30)).values.values == (0,) * 7


def test_delta_comparison_is_tight():
    d = WindowedSequence.delta(0, F(1))
    assert uncentered_maximal(d)[0] == 3 * centered_maximal(d)[0]
    rep = check_operator_comparison(d)
    assert rep.passed and rep.lhs == 3


def test_step_sharp_and_oscillation():
    assert sharp_maximal(STEP, eval_window=(0, 0), search_range=(-8, 7))[0] >= F(1, 2)
    rep = bmo_norm(STEP, search_range=(-8, 7))
    assert rep.norm == F(1, 2)
    I = rep.witness_interval
    assert sum(STEP[k] for k in I) * 2 == len(I)
    assert best_constant_oscillation(STEP, search_range=(-1, 0)) == F(1, 2)
    assert oracles.best_constant_deviation(STEP, -1, 0, grid=[F(k, 10) for k in range(11)]) == F(1, 2)


def test_bmo_shift_invariance():
    a = WindowedSequence(0, (F(1), F(3), F(0), F(2)))
    # only stored entries shift, so stay inside the window
    rng = (0, 3)
    assert bmo_norm(a.shift_values(F(5)), rng).norm == bmo_norm(a, rng).norm


def test_witnesses_attain_values():
    a = WindowedSequence(-2, (F(1), F(0), F(3), F(0), F(2)))
    for op in OPERATORS:
        res = maximal(a, op, eval_window=(-4, 4), with_witness=True)
        for k, m in enumerate(range(-4, 5)):
            I = res.witnesses[k]
            if I is None:
                continue
            assert m in I
            if op != "sharp":
                avg = sum(abs(a[n]) for n in I) / F(len(I))
                assert avg == res[m]


def test_sharp_abs_counterexample():
    a = WindowedSequence(0, (F(0), F(0), F(0), F(-1), F(1)))
    rng = a.window.pad(len(a))
    assert sharp_maximal(a, (0, 0), rng)[0] == F(2, 5)
    assert sharp_maximal(a.abs(), (0, 0), rng)[0] == F(12, 25)
    assert not check_sharp_equivalence(a).passed
    rep = check_sharp_equivalence(a, abs_constant=2)
    assert rep.passed and rep.details["absolute_raw"] >= F(6, 5)


@pytest.mark.parametrize("op", ["centered", "uncentered", "dyadic"])
@settings(max_examples=80, deadline=None)
@given(a=exact_sequences(max_len=10, signed=True))
def test_fast_operators_match_oracles(op, a):
    ev = a.window.pad(5)
    res = maximal(a, op, eval_window=ev)
    for m in ev:
        assert res[m] == oracles.operator_at(a, op, m)


@settings(max_examples=60, deadline=None)
@given(a=exact_sequences(max_len=8, signed=True), J=st.integers(2, 6))
def test_truncations_match_oracles(a, J):
    ev = a.window.pad(3)
    c = centered_maximal(a, J, eval_window=ev)
    u = uncentered_maximal(a, J, eval_window=ev)
    for m in ev:
        assert c[m] == oracles.centered_at(a, m, J)
        assert u[m] == oracles.uncentered_at(a, m, J)


@settings(max_examples=40, deadline=None)
@given(a=exact_sequences(max_len=7, signed=True))
def test_sharp_matches_oracle(a):
    res = sharp_maximal(a)
    rng = res.search_range
    for m in a.window:
        assert res[m] == oracles.sharp_at(a, m, rng.lo, rng.hi)


@settings(max_examples=60, deadline=None)
@given(a=exact_sequences(max_len=10, signed=True, nonzero=True))
def test_pointwise_relations(a):
    ev = a.window.pad(len(a))
    c = centered_maximal(a, eval_window=ev)
    u = uncentered_maximal(a, eval_window=ev)
    d = dyadic_maximal(a, eval_window=ev)
    c2, c3 = centered_maximal(a, 2, ev), centered_maximal(a, 3, ev)
    for m in ev:
        assert c[m] <= u[m] <= 3 * c[m]
        assert d[m] <= u[m]
        assert c2[m] <= c3[m] <= c[m]
        assert u[m] >= abs(a[m])
    assert check_operator_comparison(a).passed


@settings(max_examples=40, deadline=None)
@given(a=exact_sequences(max_len=8, signed=True), b=exact_sequences(max_len=8, signed=True),
       c=st.integers(0, 5).map(lambda k: F(k, 2)))
def test_sublinear_and_homogeneous(a, b, c):
    ev = a.window.hull(b.window).pad(2)
    for op in ("centered", "uncentered", "dyadic"):
        ma, mb = maximal(a, op, eval_window=ev), maximal(b, op, eval_window=ev)
        mab, mca = maximal(a + b, op, eval_window=ev), maximal(a.scale(c), op, eval_window=ev)
        for m in ev:
            assert mab[m] <= ma[m] + mb[m]
            assert mca[m] == c * ma[m]


@settings(max_examples=40, deadline=None)
@given(a=exact_sequences(max_len=8, signed=True))
def test_oscillation_between_half_norm_and_norm(a):
    norm = bmo_norm(a).norm
    osc = best_constant_oscillation(a)
    assert norm / 2 <= osc <= norm


def test_float_mode_matches_exact():
    rng = np.random.default_rng(3)
    vals = rng.integers(0, 9, size=40) / 8
    a = WindowedSequence(-20, tuple(vals))
    ae = a.to_exact()
    for op in OPERATORS:
        f, e = maximal(a, op), maximal(ae, op)
        for m in a.window:
            assert abs(f[m] - float(e[m])) <= 1e-12 * max(1.0, abs(float(e[m])))


def test_large_exact_input_falls_back_to_fractions():
    # sums too large for the scaled float kernel
    a = WindowedSequence(0, (F(10 ** 15, 7), F(1, 3), F(2 ** 40)))
    res = uncentered_maximal(a, eval_window=(-2, 4))
    for m in range(-2, 5):
        assert res[m] == oracles.uncentered_at(a, m)


def test_unknown_operator():
    with pytest.raises(ValueError):
        maximal(STEP, "median")
    with pytest.raises(ValueError):
        maximal(STEP, "dyadic", J=3)
