"""Shared strategies and helpers."""

from fractions import Fraction

import pytest
from hypothesis import strategies as st

from ergomax.core import WindowedSequence


def fractions(max_num=8, den=4, signed=False):
    lo = -max_num if signed else 0
    return st.integers(lo, max_num).map(lambda k: Fraction(k, den))


@st.composite
def exact_sequences(draw, max_len=12, signed=False, nonzero=False):
    n = draw(st.integers(1, max_len))
    offset = draw(st.integers(-6, 6))
    vals = draw(st.lists(fractions(signed=signed), min_size=n, max_size=n))
    if nonzero and all(v == 0 for v in vals):
        vals[draw(st.integers(0, n - 1))] = Fraction(1)
    return WindowedSequence(offset, tuple(vals))


@st.composite
def exact_weights(draw, max_len=10):
    n = draw(st.integers(1, max_len))
    vals = draw(st.lists(st.integers(1, 16).map(lambda k: Fraction(k, 4)), min_size=n, max_size=n))
    return WindowedSequence(draw(st.integers(-4, 4)), tuple(vals))


@pytest.fixture
def delta():
    return WindowedSequence.delta(0, Fraction(1))


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
