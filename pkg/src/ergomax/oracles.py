"""Brute-force reference implementations.

Each function evaluates a maximal operator straight from its definition with
nested loops and direct summation.  They share nothing with the optimized
kernels in :mod:`ergomax.maximal_ops` beyond :class:`WindowedSequence`, and
exist to check them.
"""

from __future__ import annotations

from fractions import Fraction

from .core import DyadicInterval, WindowedSequence


def _avg(a: WindowedSequence, lo: int, hi: int):
    total = a.zero
    for n in range(lo, hi + 1):
        total += abs(a[n])
    k = hi - lo + 1
    return total / Fraction(k) if a.exact else total / k


def centered_at(a: WindowedSequence, m: int, J: int | None = None, max_radius: int | None = None):
    sup = a.support()
    if sup is None:
        return a.zero
    r_max = max(m - sup.lo, sup.hi - m, 1)
    if J is not None:
        r_max = min(r_max, J - 1)
    if max_radius is not None:
        r_max = min(r_max, max_radius)
    best = a.zero
    for r in range(1, r_max + 1):
        best = max(best, _avg(a, m - r, m + r))
    return best


def uncentered_at(a: WindowedSequence, m: int, J: int | None = None):
    sup = a.support()
    if sup is None:
        return a.zero
    lo_min, hi_max = min(m, sup.lo), max(m, sup.hi)
    best = a.zero
    for lo in range(lo_min, m + 1):
        for hi in range(m, hi_max + 1):
            if J is not None and hi - lo + 1 > J:
                break
            best = max(best, _avg(a, lo, hi))
    return best


def dyadic_at(a: WindowedSequence, m: int):
    sup = a.support()
    if sup is None:
        return a.zero
    # dyadic intervals never straddle 0|1, so only the support on m's side matters
    if m <= 0:
        side = [k for k in range(sup.lo, min(sup.hi, 0) + 1) if a[k] != 0]
    else:
        side = [k for k in range(max(sup.lo, 1), sup.hi + 1) if a[k] != 0]
    lo_t, hi_t = min(side + [m]), max(side + [m])
    best = a.zero
    N = 1
    while True:
        I = DyadicInterval.containing(m, N)
        best = max(best, _avg(a, I.lo, I.hi))
        if I.lo <= lo_t and I.hi >= hi_t:
            return best
        N += 1


def _mean_dev(a: WindowedSequence, lo: int, hi: int, center):
    vals = [a[n] for n in range(lo, hi + 1)]
    k = len(vals)
    if center == "mean":
        c = sum(vals, a.zero) / (Fraction(k) if a.exact else k)
    else:
        c = center
    dev = sum((abs(v - c) for v in vals), a.zero)
    return dev / (Fraction(k) if a.exact else k)


def sharp_at(a: WindowedSequence, m: int, lo_bound: int, hi_bound: int):
    best = a.zero
    for lo in range(lo_bound, m + 1):
        for hi in range(m, hi_bound + 1):
            best = max(best, _mean_dev(a, lo, hi, "mean"))
    return best


def best_constant_deviation(a: WindowedSequence, lo: int, hi: int, grid=None):
    """Minimum over candidate constants ``b`` of the mean deviation on ``[lo, hi]``.

    Candidates are the interval's own values (a minimizer of a piecewise-linear
    convex function sits at a breakpoint) plus an optional extra grid.
    """
    candidates = {a[n] for n in range(lo, hi + 1)}
    if grid is not None:
        candidates.update(grid)
    return min(_mean_dev(a, lo, hi, b) for b in candidates)


def operator_at(a: WindowedSequence, op: str, m: int, J: int | None = None):
    if op == "centered":
        return centered_at(a, m, J)
    if op == "uncentered":
        return uncentered_at(a, m, J)
    if op == "dyadic":
        return dyadic_at(a, m)
    raise ValueError(op)
