"""Discrete maximal operators on Z: centered, uncentered, dyadic and sharp.

Every supremum over infinitely many intervals is reduced to a finite family
on a *computation domain* that covers both the support of the input and the
evaluation points.  Outside the domain the input is zero, so enlarging an
interval past the domain only lowers its average.

The ``*_values`` kernels work on arrays whose last axis is the domain; they
accept batches (leading axes) and object arrays of Fractions, which makes the
same code path serve float and exact mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .core import (
    DyadicInterval,
    IntegerInterval,
    PrefixTable,
    WindowedSequence,
    _interval,
    divide,
    zeros_like_mode,
)
from .reports import InequalityReport, compare, digest_of

__all__ = [
    "MaximalResult",
    "BmoReport",
    "centered_maximal",
    "uncentered_maximal",
    "dyadic_maximal",
    "sharp_maximal",
    "bmo_norm",
    "best_constant_oscillation",
    "centered_values",
    "uncentered_values",
    "dyadic_values",
    "sharp_values",
    "OPERATORS",
    "maximal",
    "check_operator_comparison",
    "check_sharp_equivalence",
]

OPERATORS = ("centered", "uncentered", "dyadic", "sharp")


@dataclass(frozen=True)
class MaximalResult:
    values: WindowedSequence
    operator: str
    truncation: int | None = None
    witnesses: tuple | None = None
    # l1 norm and support of the input; used for decay bounds on superlevel sets
    source_l1: object = None
    source_support: IntegerInterval | None = None
    search_range: IntegerInterval | None = None

    def __getitem__(self, m: int):
        if m not in self.values.window:
            raise KeyError(f"{m} outside the evaluation window {self.values.window}")
        return self.values[m]

    @property
    def window(self) -> IntegerInterval:
        return self.values.window


@dataclass(frozen=True)
class BmoReport:
    norm: object
    witness_interval: IntegerInterval | None
    search_range: IntegerInterval = field(default=None)


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------

def _is_exact(x: np.ndarray) -> bool:
    return x.dtype == object


# integer sums of at most this size keep every float average within a
# relative 2^-52 of the true rational, far below the gap 1/len^2 between
# distinct candidates, so the rational is recovered by limit_denominator
_SAFE_SCALED = 2 ** 48


def _scaled_exact(x: np.ndarray, max_den: int, kernel):
    """Run a float kernel on ``|x|`` scaled to integers and recover exact averages.

    Every output is an average of scaled integers over an interval of length
    at most ``max_den``.  Returns ``None`` when the scaled sums are too large
    for the recovery argument.
    """
    flat = x.ravel().tolist()
    D = math.lcm(*(v.denominator for v in flat)) if flat else 1
    ints = [abs(v.numerator) * (D // v.denominator) for v in flat]
    if sum(ints) * max_den * max_den >= _SAFE_SCALED:
        return None
    out = kernel(np.asarray(ints, dtype=np.float64).reshape(x.shape))
    rec = np.empty(out.size, dtype=object)
    rec[:] = [Fraction(v).limit_denominator(max_den) / D for v in out.ravel().tolist()]
    return rec.reshape(out.shape)


def _prefix(x: np.ndarray) -> np.ndarray:
    head = zeros_like_mode(x.shape[:-1] + (1,), _is_exact(x))
    return np.concatenate([head, np.cumsum(x, axis=-1)], axis=-1)


def centered_values(x: np.ndarray, J: int | None = None, max_radius: int | None = None) -> np.ndarray:
    """Centered maximal function of ``|x|`` at every domain point.

    Radii run over ``1 <= r < J`` (``J`` as a truncation) or ``1 <= r <= max_radius``.
    """
    x = abs(x)
    exact = _is_exact(x)
    n = x.shape[-1]
    rmax = max(n - 1, 1)
    if J is not None:
        rmax = min(rmax, J - 1)
    if max_radius is not None:
        rmax = min(rmax, max_radius)
    if exact:
        fast = _scaled_exact(x, 2 * rmax + 1, lambda y: centered_values(y, J, max_radius))
        if fast is not None:
            return fast
    P = _prefix(x)
    out = zeros_like_mode(x.shape, exact)
    idx = np.arange(n)
    for r in range(1, rmax + 1):
        lo = np.maximum(idx - r, 0)
        hi = np.minimum(idx + r, n - 1)
        avg = divide(P[..., hi + 1] - P[..., lo], 2 * r + 1, exact)
        out = np.maximum(out, avg)
    return out


def uncentered_values(x: np.ndarray, J: int | None = None) -> np.ndarray:
    """Uncentered maximal function of ``|x|``; ``J`` caps the interval length."""
    x = abs(x)
    exact = _is_exact(x)
    n = x.shape[-1]
    if exact:
        fast = _scaled_exact(x, n if J is None else min(n, J), lambda y: uncentered_values(y, J))
        if fast is not None:
            return fast
    P = _prefix(x)
    out = zeros_like_mode(x.shape, exact)
    lengths = np.arange(1, n + 1)
    for lo in range(n):
        top = n if J is None else min(n, lo + J)
        sums = P[..., lo + 1:top + 1] - P[..., lo:lo + 1]
        avg = divide(sums, lengths[:top - lo], exact)
        # best interval starting at lo and ending at or after each m
        suffix = np.maximum.accumulate(avg[..., ::-1], axis=-1)[..., ::-1]
        out[..., lo:top] = np.maximum(out[..., lo:top], suffix)
    return out


def dyadic_levels_needed(lo: int, hi: int) -> int:
    """Smallest level after which dyadic averages on ``[lo, hi]`` can only shrink.

    Points ``<= 0`` and ``>= 1`` never share a dyadic interval, so each side
    stops growing once ``I_{N,0}`` or ``I_{N,1}`` covers its half of the domain.
    """
    reach = max(hi, 1 - lo, 2)
    return max(1, (reach - 1).bit_length())


def dyadic_values(x: np.ndarray, offset: int, n_max: int | None = None) -> np.ndarray:
    """Dyadic maximal function of ``|x|`` where ``x[..., i]`` sits at ``offset + i``."""
    x = abs(x)
    exact = _is_exact(x)
    n = x.shape[-1]
    if n_max is None:
        n_max = dyadic_levels_needed(offset, offset + n - 1)
    if exact:
        fast = _scaled_exact(x, 1 << n_max, lambda y: dyadic_values(y, offset, n_max))
        if fast is not None:
            return fast
    P = _prefix(x)
    m = np.arange(offset, offset + n)
    out = zeros_like_mode(x.shape, exact)
    for N in range(1, n_max + 1):
        size = 1 << N
        j = -((-m) >> N)
        lo = np.clip((j - 1) * size + 1 - offset, 0, n)
        hi = np.clip(j * size - offset, -1, n - 1)
        avg = divide(P[..., hi + 1] - P[..., lo], size, exact)
        out = np.maximum(out, avg)
    return out


def _sliding_max(v: np.ndarray, s: int, n: int, exact: bool) -> np.ndarray:
    """``out[m] = max(v[m-s+1 .. m])`` over valid indices; values are >= 0."""
    pad = zeros_like_mode(v.shape[:-1] + (s - 1,), exact)
    padded = np.concatenate([pad, v, pad], axis=-1)
    return sliding_window_view(padded, s, axis=-1)[..., :n, :].max(axis=-1)


def _oscillations(x: np.ndarray, s: int, center: str) -> np.ndarray:
    exact = _is_exact(x)
    win = sliding_window_view(x, s, axis=-1)
    if center == "mean":
        c = divide(win.sum(axis=-1), s, exact)
    else:
        c = np.sort(win, axis=-1)[..., (s - 1) // 2]
    return divide(abs(win - c[..., None]).sum(axis=-1), s, exact)


def sharp_values(x: np.ndarray, center: str = "mean") -> np.ndarray:
    """Sharp maximal function over all intervals inside the domain.

    ``center="median"`` replaces the interval mean by a median, which gives the
    smallest mean deviation from any constant.
    """
    exact = _is_exact(x)
    n = x.shape[-1]
    out = zeros_like_mode(x.shape, exact)
    for s in range(2, n + 1):
        osc = _oscillations(x, s, center)
        out = np.maximum(out, _sliding_max(osc, s, n, exact))
    return out


def _best_interval(x: np.ndarray, center: str):
    """Largest oscillation over all subintervals, smallest then leftmost witness."""
    exact = _is_exact(x)
    n = x.shape[-1]
    best = Fraction(0) if exact else 0.0
    where = (0, 0)
    for s in range(2, n + 1):
        osc = _oscillations(x, s, center)
        i = int(np.argmax(osc))
        if osc[i] > best:
            best, where = osc[i], (i, i + s - 1)
    return best, where


# ---------------------------------------------------------------------------
# witnesses: smallest |I|, then smallest lo, among intervals attaining the value
# ---------------------------------------------------------------------------

def _attains(value, target, exact: bool) -> bool:
    if exact:
        return value == target
    return value >= target - 1e-12 * abs(target)


def _witness_centered(table: PrefixTable, m: int, target, radii: range, exact: bool):
    for r in radii:
        if _attains(table.average(m - r, m + r), target, exact):
            return IntegerInterval(m - r, m + r)
    return None


def _witness_uncentered(table: PrefixTable, m: int, target, dom: IntegerInterval, J, exact: bool):
    longest = len(dom) if J is None else min(J, len(dom))
    for s in range(1, longest + 1):
        for lo in range(max(dom.lo, m - s + 1), min(m, dom.hi - s + 1) + 1):
            if _attains(table.average(lo, lo + s - 1), target, exact):
                return IntegerInterval(lo, lo + s - 1)
    return None


def _witness_dyadic(table: PrefixTable, m: int, target, n_max: int, exact: bool):
    for N in range(1, n_max + 1):
        I = DyadicInterval.containing(m, N)
        if _attains(table.interval_sum(I.lo, I.hi) / (Fraction(len(I)) if exact else len(I)), target, exact):
            return I.interval
    return None


def _witness_sharp(a: WindowedSequence, m: int, target, rng: IntegerInterval, exact: bool):
    if target == 0:
        return IntegerInterval(m, m)
    for s in range(2, len(rng) + 1):
        for lo in range(max(rng.lo, m - s + 1), min(m, rng.hi - s + 1) + 1):
            vals = [a[k] for k in range(lo, lo + s)]
            mean = sum(vals, a.zero) / (Fraction(s) if exact else s)
            osc = sum((abs(v - mean) for v in vals), a.zero) / (Fraction(s) if exact else s)
            if _attains(osc, target, exact):
                return IntegerInterval(lo, lo + s - 1)
    return None


# ---------------------------------------------------------------------------
# public operators
# ---------------------------------------------------------------------------

def _domain(a: WindowedSequence, eval_window) -> tuple[IntegerInterval, IntegerInterval]:
    ev = a.window if eval_window is None else _interval(eval_window)
    return ev, ev.hull(a.window)


def _result(a, dom, ev, out, operator, J, witnesses=None, rng=None) -> MaximalResult:
    i0 = ev.lo - dom.lo
    vals = WindowedSequence.from_array(ev.lo, out[i0:i0 + len(ev)], exact=a.exact)
    return MaximalResult(values=vals, operator=operator, truncation=J, witnesses=witnesses,
                         source_l1=a.l1(), source_support=a.support(), search_range=rng)


def centered_maximal(a: WindowedSequence, J: int | None = None, eval_window=None,
                     with_witness: bool = False) -> MaximalResult:
    """``M'a`` (radii ``r >= 1``) or its truncation ``M'_J a`` (radii ``1 <= r < J``)."""
    if J is not None and J < 2:
        raise ValueError("truncated centered operator needs J >= 2 (radii satisfy J > r > 0)")
    ev, dom = _domain(a, eval_window)
    out = centered_values(a.on(dom), J=J)
    wit = None
    if with_witness:
        table = PrefixTable(a.abs())
        rmax = max(len(dom) - 1, 1)
        if J is not None:
            rmax = min(rmax, J - 1)
        i0 = ev.lo - dom.lo
        wit = tuple(_witness_centered(table, m, out[i0 + k], range(1, rmax + 1), a.exact)
                    for k, m in enumerate(ev))
    return _result(a, dom, ev, out, "centered", J, wit)


def uncentered_maximal(a: WindowedSequence, J: int | None = None, eval_window=None,
                       with_witness: bool = False) -> MaximalResult:
    """``Ma``, or ``M_J a`` where intervals have length at most ``J``."""
    if J is not None and J < 1:
        raise ValueError("J must be >= 1")
    ev, dom = _domain(a, eval_window)
    out = uncentered_values(a.on(dom), J=J)
    wit = None
    if with_witness:
        table = PrefixTable(a.abs())
        i0 = ev.lo - dom.lo
        wit = tuple(_witness_uncentered(table, m, out[i0 + k], dom, J, a.exact) for k, m in enumerate(ev))
    return _result(a, dom, ev, out, "uncentered", J, wit)


def dyadic_maximal(a: WindowedSequence, eval_window=None, with_witness: bool = False) -> MaximalResult:
    ev, dom = _domain(a, eval_window)
    n_max = dyadic_levels_needed(dom.lo, dom.hi)
    out = dyadic_values(a.on(dom), dom.lo, n_max)
    wit = None
    if with_witness:
        table = PrefixTable(a.abs())
        i0 = ev.lo - dom.lo
        wit = tuple(_witness_dyadic(table, m, out[i0 + k], n_max, a.exact) for k, m in enumerate(ev))
    return _result(a, dom, ev, out, "dyadic", None, wit)


def default_sharp_range(a: WindowedSequence) -> IntegerInterval:
    return a.window.pad(len(a))


def sharp_maximal(a: WindowedSequence, eval_window=None, search_range=None,
                  with_witness: bool = False) -> MaximalResult:
    """``M# a`` with the supremum over intervals inside ``search_range``.

    The range defaults to the stored window padded by its own length on each
    side and is widened to contain the evaluation window.
    """
    ev = a.window if eval_window is None else _interval(eval_window)
    rng = default_sharp_range(a) if search_range is None else _interval(search_range)
    rng = rng.hull(ev)
    out = sharp_values(a.on(rng))
    wit = None
    if with_witness:
        i0 = ev.lo - rng.lo
        wit = tuple(_witness_sharp(a, m, out[i0 + k], rng, a.exact) for k, m in enumerate(ev))
    return _result(a, rng, ev, out, "sharp", None, wit, rng)


def bmo_norm(a: WindowedSequence, search_range=None) -> BmoReport:
    """``||a||_*`` over the search range, with the attaining interval."""
    rng = default_sharp_range(a) if search_range is None else _interval(search_range)
    best, (i, k) = _best_interval(a.on(rng), "mean")
    witness = IntegerInterval(rng.lo + i, rng.lo + k) if best != 0 else None
    return BmoReport(norm=best, witness_interval=witness, search_range=rng)


def best_constant_oscillation(a: WindowedSequence, search_range=None):
    """``sup_I inf_b |I|^{-1} sum_I |a(n) - b|``; the inner infimum sits at a median."""
    rng = default_sharp_range(a) if search_range is None else _interval(search_range)
    best, _ = _best_interval(a.on(rng), "median")
    return best


def maximal(a: WindowedSequence, op: str, J: int | None = None, eval_window=None,
            with_witness: bool = False) -> MaximalResult:
    if op == "centered":
        return centered_maximal(a, J, eval_window, with_witness)
    if op == "uncentered":
        return uncentered_maximal(a, J, eval_window, with_witness)
    if J is not None:
        raise ValueError(f"the {op} operator has no truncated form")
    if op == "dyadic":
        return dyadic_maximal(a, eval_window, with_witness)
    if op == "sharp":
        return sharp_maximal(a, eval_window, with_witness=with_witness)
    raise ValueError(f"unknown operator {op!r}")


# ---------------------------------------------------------------------------
# pointwise comparisons
# ---------------------------------------------------------------------------

def _ratios(num: np.ndarray, den: np.ndarray, exact: bool) -> np.ndarray:
    """``num / den`` with ``0 / 0 = 0``; a positive numerator over zero is infinite."""
    out = []
    for x, y in zip(num.tolist(), den.tolist()):
        if y == 0:
            out.append(0 if x == 0 else float("inf"))
        else:
            out.append(x / y)
    return np.array(out, dtype=object if exact else np.float64)


def check_operator_comparison(a: WindowedSequence, eval_window=None) -> InequalityReport:
    """``M'a <= Ma <= 3 M'a`` at every point of the evaluation window.

    The window defaults to the stored window padded by its length on each side.
    ``lhs`` is the largest ``Ma / M'a``; ``details`` holds the smallest.
    """
    ev = a.window.pad(len(a)) if eval_window is None else _interval(eval_window)
    c = centered_maximal(a, eval_window=ev).values.array()
    u = uncentered_maximal(a, eval_window=ev).values.array()
    r = _ratios(u, c, a.exact)
    k_hi, k_lo = int(np.argmax(r)), int(np.argmin(r))
    low_ok = bool(np.all(c <= u))
    one = Fraction(1) if a.exact else 1.0
    rep = compare("operator_comparison", r[k_hi], one, 3, digest=digest_of(a, ev), witness={"m": ev.lo + k_hi},
                  exact=a.exact, details={"min_ratio": r[k_lo], "lower_bound_holds": low_ok})
    if low_ok:
        return rep
    return InequalityReport("operator_comparison", rep.lhs, rep.rhs, 3, rep.ratio, False, rep.digest,
                            {"m": ev.lo + k_lo, "lower": True}, rep.details)


def check_sharp_equivalence(a: WindowedSequence, search_range=None, abs_constant=1) -> InequalityReport:
    """``||a||_* / 2 <= sup_I inf_b avg_I |a - b| <= ||a||_*`` and ``M#|a| <= c M#a`` on the range.

    ``lhs`` is the largest of the three normalised ratios, so the report
    passes exactly when ``lhs <= 1``.  With ``c = 1`` the last inequality can
    fail (``a = (0, 0, 0, -1, 1)`` at 0); ``c = 2`` always holds because
    ``||a| - |b|| <= |a - b|`` and the mean is within a factor 2 of the best
    constant.  ``details["absolute_raw"]`` is the largest ``M#|a| / M#a``.
    """
    rng = default_sharp_range(a) if search_range is None else _interval(search_range)
    norm = bmo_norm(a, rng).norm
    osc = best_constant_oscillation(a, rng)
    s_a = sharp_maximal(a, eval_window=rng, search_range=rng).values.array()
    s_abs = sharp_maximal(a.abs(), eval_window=rng, search_range=rng).values.array()
    pointwise = _ratios(s_abs, s_a, a.exact)
    k = int(np.argmax(pointwise))
    parts = {
        "upper": _ratios(np.array([osc]), np.array([norm]), a.exact)[0],
        "lower": _ratios(np.array([norm / 2]), np.array([osc]), a.exact)[0],
        "absolute": pointwise[k] / abs_constant,
    }
    worst = max(parts, key=lambda key: parts[key])
    one = Fraction(1) if a.exact else 1.0
    witness = {"part": worst, "m": rng.lo + k if worst == "absolute" else None}
    return compare("sharp", parts[worst], one, 1, digest=digest_of(a, rng), witness=witness,
                   exact=a.exact, details={"bmo_norm": norm, "oscillation": osc, "absolute_raw": pointwise[k], **parts})
