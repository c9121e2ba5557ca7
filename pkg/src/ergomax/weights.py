"""Muckenhoupt A_p weights on a finite window of Z.

A compactly supported weight can never be A_p on all of Z, so every constant
here is *windowed*: the supremum runs over subintervals of the weight's
window, and the window travels with the report.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .core import IntegerInterval, WindowedSequence, _interval, divide, to_fraction
from .reports import InequalityReport, compare, digest_of

__all__ = [
    "WeightSequence",
    "ApReport",
    "ap_constant",
    "ap_constant_at_most",
    "weighted_norm",
    "weighted_power_sum",
    "weight_measure",
    "check_interval_inequality_A",
    "check_interval_inequality_B",
    "interval_inequality_sweep",
    "power",
]


def power(x, p):
    """``x ** p``, kept rational when ``x`` is a Fraction and ``p`` an integer."""
    if isinstance(x, Fraction):
        if float(p).is_integer():
            return x ** int(p)
        return float(x) ** float(p)
    return x ** p


def _exact_p(p) -> bool:
    return float(p) in (1.0, 2.0)


@dataclass(frozen=True)
class WeightSequence:
    """Strictly positive sequence on its window; undefined (not zero) outside."""

    base: WindowedSequence

    def __post_init__(self):
        bad = [k for k, v in self.base.items() if not v > 0]
        if bad:
            raise ValueError(f"weights must be strictly positive; w({bad[0]}) = {self.base[bad[0]]}")

    @classmethod
    def from_values(cls, offset: int, values: Iterable) -> "WeightSequence":
        return cls(WindowedSequence(offset, tuple(values)))

    @property
    def window(self) -> IntegerInterval:
        return self.base.window

    @property
    def exact(self) -> bool:
        return self.base.exact

    def __getitem__(self, k: int):
        if k not in self.window:
            raise KeyError(f"weight undefined at {k}; window is {self.window}")
        return self.base[k]

    def __len__(self) -> int:
        return len(self.base)

    def restrict(self, window) -> "WeightSequence":
        w = _interval(window)
        if w not in self.window:
            raise ValueError(f"{w} is not inside the weight window {self.window}")
        return WeightSequence(self.base.restrict(w))

    def scale(self, c) -> "WeightSequence":
        return WeightSequence(self.base.scale(c))

    def to_exact(self) -> "WeightSequence":
        return WeightSequence(self.base.to_exact())

    def to_float(self) -> "WeightSequence":
        return WeightSequence(self.base.to_float())


@dataclass(frozen=True)
class ApReport:
    p: float
    constant: object
    witness: object
    conjugate: float
    window: object = None
    threshold_exceeded: bool | None = None

    @property
    def witness_interval(self):
        return self.witness


def conjugate_exponent(p) -> float:
    p = float(p)
    return math.inf if p == 1 else p / (p - 1)


def _better(value, size, lo, best):
    if best is None:
        return True
    bv, bs, bl = best
    return value > bv or (value == bv and (size, lo) < (bs, bl))


def _ap_scan(x: np.ndarray, p, exact: bool, threshold=None):
    """Scan every subinterval; returns ``(best_value, size, lo_index, exceeded)``."""
    if exact:
        return _ap_scan_exact(x, p, threshold)
    n = len(x)
    P = np.concatenate([[0.0], np.cumsum(x)])
    lengths = np.arange(1, n + 1)
    if float(p) > 1:
        D = np.concatenate([[0.0], np.cumsum(x ** (-1.0 / (float(p) - 1.0)))])
    best = None
    for lo in range(n):
        vals = _row_products(x, P, D if float(p) > 1 else None, lo, lengths, p)
        i = int(np.argmax(vals))
        if _better(vals[i], i + 1, lo, best):
            best = (vals[i], i + 1, lo)
            if threshold is not None and best[0] > threshold:
                return best + (True,)
    return best + (False,)


def _row_products(x, P, D, lo, lengths, p) -> np.ndarray:
    """A_p products of the intervals starting at index ``lo``, by length."""
    n = len(x)
    k = lengths[:n - lo]
    avg_w = (P[lo + 1:] - P[lo]) / k
    if D is None:
        return avg_w / np.minimum.accumulate(x[lo:])
    return avg_w * ((D[lo + 1:] - D[lo]) / k) ** (float(p) - 1.0)


def _ap_scan_exact(x: np.ndarray, p, threshold=None):
    """Exact scan: a float pass, then exact products for every interval within 1e-9 of the float best.

    Float products carry relative error near 1e-15, so the exact maximiser
    is among the candidates.  Candidates are compared through integer sums
    (weights scaled by a common denominator), and equal integer keys share
    one rational evaluation; tie-heavy weights such as constants make almost
    every interval a candidate.
    """
    xf = np.array([float(v) for v in x])
    n = len(xf)
    P = np.concatenate([[0.0], np.cumsum(xf)])
    D = None if float(p) == 1 else np.concatenate([[0.0], np.cumsum(1.0 / xf)])
    lengths = np.arange(1, n + 1)
    rows = [_row_products(xf, P, D, lo, lengths, p) for lo in range(n)]
    top = max(float(r.max()) for r in rows)
    scale = math.lcm(*(v.denominator for v in x))
    u = [int(v * scale) for v in x]
    PU = np.empty(n + 1, dtype=object)
    PU[:] = [0] + list(itertools.accumulate(u))
    if float(p) > 1:
        L = math.lcm(*u)
        PV = np.empty(n + 1, dtype=object)
        PV[:] = [0] + list(itertools.accumulate(L // k for k in u))
    # machine integers when every product U V fits
    wide = PU[-1] * (PV[-1] if float(p) > 1 else max(u)) * n >= 2 ** 62
    if not wide:
        PU = PU.astype(np.int64)
        if float(p) > 1:
            PV = PV.astype(np.int64)
    values: dict = {}
    best = None
    for lo, r in enumerate(rows):
        idx = np.nonzero(r >= top * (1 - 1e-9))[0]
        if idx.size == 0:
            continue
        U = PU[lo + 1 + idx] - PU[lo]
        if float(p) > 1:
            # avg(w) avg(1/w) = U V / (L size^2); the common 1/L is applied at the end
            V = PV[lo + 1 + idx] - PV[lo]
            num, den = U * V, (idx + 1) ** 2
        else:
            mins = np.minimum.accumulate(np.array(u[lo:], dtype=object if wide else np.int64))[idx]
            num, den = U, (idx + 1) * mins
        if not wide:
            # lowest terms, so equal products share a key
            g = np.gcd(num, den)
            num, den = num // g, den // g
        keys = list(zip(num.tolist(), den.tolist()))
        for key in set(keys) - values.keys():
            values[key] = Fraction(*key)
        row_best = max(values[k] for k in set(keys))
        # shortest interval in this row attaining the row maximum
        i = next(int(i) for i, k in zip(idx, keys) if values[k] == row_best)
        if _better(row_best, i + 1, lo, best):
            best = (row_best, i + 1, lo)
    value, size, lo = best
    value = value / L if float(p) > 1 else value
    exceeded = threshold is not None and value > threshold
    return (value, size, lo, exceeded)


def ap_constant(w: WeightSequence, p, threshold=None, exact: bool | None = None) -> ApReport:
    """Windowed A_p constant (A_1 for ``p == 1``) with its attaining interval.

    With ``threshold`` the scan stops as soon as the constant is known to
    exceed it; ``threshold_exceeded`` then says which side it fell on.
    """
    if float(p) < 1:
        raise ValueError("p must be >= 1")
    exact = w.exact if exact is None else exact
    if exact and not _exact_p(p):
        raise ValueError("exact A_p constants are available for p = 1 and p = 2 only")
    x = w.base.array(exact)
    value, size, lo, exceeded = _ap_scan(x, p, exact, threshold)
    if not exact:
        value = float(value)
    witness = IntegerInterval(w.window.lo + lo, w.window.lo + lo + size - 1)
    return ApReport(p=p, constant=value, witness=witness, conjugate=conjugate_exponent(p),
                    window=w.window, threshold_exceeded=exceeded if threshold is not None else None)


def ap_constant_at_most(w: WeightSequence, p, threshold) -> bool:
    return not ap_constant(w, p, threshold=threshold).threshold_exceeded


def _check_support(a: WindowedSequence, w: WeightSequence):
    sup = a.support()
    if sup is not None and sup not in w.window:
        raise ValueError(f"support {sup} of the sequence escapes the weight window {w.window}")


def weighted_power_sum(a: WindowedSequence, w: WeightSequence, p, window=None):
    """``sum_k |a(k)|^p w(k)``, over ``window`` if given (inside the weight window)."""
    _check_support(a, w)
    rng = w.window if window is None else _interval(window)
    total = Fraction(0) if (a.exact and w.exact) else 0.0
    for k in rng:
        v = a[k]
        if v != 0:
            total += power(abs(v), p) * w[k]
    return total


def weighted_norm(a: WindowedSequence, w: WeightSequence, p):
    if float(p) < 1:
        raise ValueError("p must be >= 1")
    s = weighted_power_sum(a, w, p)
    if float(p) == 1:
        return s
    return float(s) ** (1.0 / float(p))


def weight_measure(w: WeightSequence, S: Iterable[int]):
    S = set(S)
    outside = [k for k in S if k not in w.window]
    if outside:
        raise ValueError(f"{min(outside)} lies outside the weight window {w.window}")
    return sum((w[k] for k in sorted(S)), Fraction(0) if w.exact else 0.0)


def check_interval_inequality_A(w: WeightSequence, p, a: WindowedSequence, I,
                                constant=None) -> InequalityReport:
    """``w(I) (a(I)/|I|)^p <= C sum_I a^p w`` with ``C`` the windowed A_p constant."""
    I = _interval(I)
    if I not in w.window:
        raise ValueError(f"{I} is not inside the weight window {w.window}")
    if any(a[k] < 0 for k in I):
        raise ValueError("the sequence must be non-negative")
    if all(a[k] == 0 for k in I):
        raise ValueError("the sequence vanishes on the interval")
    if constant is None:
        constant = ap_constant(w, p, exact=w.exact and _exact_p(p)).constant
    exact = a.exact and w.exact and isinstance(constant, Fraction) and float(p).is_integer()
    if not exact:
        a, w = a.to_float(), w.to_float()
    w_I = sum((w[k] for k in I), w.base.zero)
    a_I = sum((a[k] for k in I), a.zero)
    size = Fraction(len(I)) if exact else len(I)
    lhs = w_I * power(a_I / size, p)
    rhs = sum((power(a[k], p) * w[k] for k in I), w.base.zero)
    return compare("interval_A", lhs, rhs, constant if exact else float(constant),
                   digest=digest_of(w, a, I, str(p)), witness=I, exact=exact)


def check_interval_inequality_B(w: WeightSequence, p, S: Iterable[int], I,
                                constant=None) -> InequalityReport:
    """``w(I) (|S|/|I|)^p <= C w(S)``: part A with ``a`` the indicator of ``S``."""
    I = _interval(I)
    S = sorted(set(S))
    if not S:
        raise ValueError("S must be non-empty")
    if any(k not in I for k in S):
        raise ValueError("S must be a subset of I")
    chi = WindowedSequence.indicator(S, exact=w.exact)
    rep = check_interval_inequality_A(w, p, chi, I, constant)
    return InequalityReport("interval_B", rep.lhs, rep.rhs, rep.constant, rep.ratio, rep.passed,
                            digest_of(w, S, I, str(p)), rep.witness, {"S": S})


def interval_inequality_sweep(w: WeightSequence, p, constant=None) -> InequalityReport:
    """Both interval inequalities over every subinterval of the window, at their worst cases.

    For a fixed ``I`` the worst ``a`` in part A is ``w^{-1/(p-1)}`` on ``I``
    (a point mass at the smallest weight when ``p == 1``), where the ratio
    is the A_p product of ``I``.  The worst ``S`` of a given size in part B
    takes the smallest weights of ``I``.  Checking these covers every ``a``
    and every subset.
    """
    if float(p) < 1:
        raise ValueError("p must be >= 1")
    exact = w.exact and float(p).is_integer() and _exact_p(p)
    if constant is None:
        constant = ap_constant(w, p, exact=exact).constant
    x = w.base.array(exact)
    n = len(x)
    one = Fraction(1) if exact else 1.0
    best = {"A": (0 * one, None), "B": (0 * one, None)}
    for lo in range(n):
        for hi in range(lo, n):
            seg = x[lo:hi + 1]
            size = hi - lo + 1
            w_I = seg.sum()
            if float(p) > 1:
                dual = np.array([one / v for v in seg], dtype=object) if exact else seg ** (-1.0 / (float(p) - 1.0))
                a_I = dual.sum()
                ratio_a = w_I * power(a_I / size, p) / a_I
            else:
                ratio_a = (w_I / size) / seg.min()
            if ratio_a > best["A"][0]:
                best["A"] = (ratio_a, (w.window.lo + lo, w.window.lo + hi, None))
            small = np.sort(seg)
            cum = np.cumsum(small)
            sizes = np.arange(1, size + 1)
            lhs = [w_I * power(Fraction(int(s), size) if exact else s / size, p) for s in sizes]
            ratios = [l / c for l, c in zip(lhs, cum)]
            k = int(np.argmax(np.array(ratios, dtype=object if exact else np.float64)))
            if ratios[k] > best["B"][0]:
                best["B"] = (ratios[k], (w.window.lo + lo, w.window.lo + hi, k + 1))
    part = "A" if best["A"][0] >= best["B"][0] else "B"
    value, (i_lo, i_hi, s) = best[part]
    return compare("interval_ab", value, one, constant if exact else float(constant),
                   digest=digest_of(w, str(p)), exact=exact,
                   witness={"part": part, "interval": [i_lo, i_hi], "subset_size": s},
                   details={"part_A": best["A"][0], "part_B": best["B"][0]})
