"""Calderon-Zygmund decomposition on the dyadic grid of Z and the weak-type
checkers built on it.

The grid starts at level 1 (pairs); singletons are never selected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .core import DyadicInterval, IntegerInterval, PrefixTable, WindowedSequence, expand, to_fraction
from .maximal_ops import (
    MaximalResult,
    centered_maximal,
    dyadic_maximal,
    uncentered_maximal,
)
from .reports import InequalityReport, compare, digest_of
from .weights import WeightSequence, ap_constant, power, weight_measure, weighted_power_sum

__all__ = [
    "CzDecomposition",
    "WindowTooSmallError",
    "cz_decompose",
    "cz_violations",
    "superlevel_set",
    "superlevel_window",
    "verify_covering_lemma",
    "weak11_with_Mw",
    "weighted_weak_pp",
    "strong_pp_check",
    "WEAK11_CONSTANT",
]

# 12/lambda from the CZ height lambda/4 and |3I| = 3|I|, times 3 from M <= 3M'
WEAK11_CONSTANT = 36


class WindowTooSmallError(ValueError):
    """The evaluation window cannot be shown to contain the whole superlevel set."""


@dataclass(frozen=True)
class CzDecomposition:
    height: object
    intervals: tuple[DyadicInterval, ...]
    averages: tuple
    # largest average among examined dyadic intervals that were not selected
    residual_bound: object

    def covered(self) -> set[int]:
        return {m for I in self.intervals for m in range(I.lo, I.hi + 1)}

    def tripled(self) -> list[IntegerInterval]:
        return [expand(I, 1, "symmetric") for I in self.intervals]


def _positive(lam, exact: bool):
    if lam <= 0:
        raise ValueError("the height must be positive")
    return to_fraction(lam) if exact else float(lam)


def _quiet_level(l1, lam) -> int:
    """Smallest N >= 1 with ``2^N > l1 / lam``; every level-N average is then < lam."""
    N = 1
    while (1 << N) <= l1 / lam:
        N += 1
    return N


def cz_decompose(a: WindowedSequence, lam, start_level: int | None = None) -> CzDecomposition:
    """Maximal dyadic intervals on which the average of ``|a|`` exceeds ``lam``.

    The search starts from a level where no average can exceed ``lam`` and
    splits top-down, so every selected interval's parent is known to be quiet.
    """
    lam = _positive(lam, a.exact)
    b = a.abs()
    sup = b.support()
    zero = b.zero
    if sup is None:
        return CzDecomposition(lam, (), (), zero)
    table = PrefixTable(b)
    quiet = _quiet_level(b.l1(), lam)
    N0 = quiet if start_level is None else start_level

    def avg(I: DyadicInterval):
        s = table.interval_sum(I.lo, I.hi)
        return s / Fraction(len(I)) if b.exact else s / len(I)

    roots = {DyadicInterval.containing(m, N0) for m in (sup.lo, sup.hi)}
    first, last = min(r.index for r in roots), max(r.index for r in roots)
    stack = [DyadicInterval(N0, j) for j in range(first, last + 1)]
    for root in stack:
        if avg(root) > lam:
            raise ValueError(f"start level {N0} is not quiet: {root} has average above the height")
    chosen, residual = [], zero
    while stack:
        I = stack.pop()
        residual = max(residual, avg(I))
        if I.level == 1:
            continue
        for child in I.children():
            c = avg(child)
            if c > lam:
                chosen.append((child, c))
            elif table.interval_sum(child.lo, child.hi) != 0:
                stack.append(child)
            else:
                residual = max(residual, c)
    chosen.sort(key=lambda t: t[0].lo)
    return CzDecomposition(lam, tuple(I for I, _ in chosen), tuple(c for _, c in chosen), residual)


def cz_violations(a: WindowedSequence, dec: CzDecomposition) -> list[str]:
    """Structural problems with a decomposition; empty when all invariants hold."""
    problems = []
    lam = dec.height
    ivs = sorted(dec.intervals, key=lambda I: I.lo)
    for I, J in zip(ivs, ivs[1:]):
        if J.lo <= I.hi:
            problems.append(f"{I} and {J} overlap")
    table = PrefixTable(a.abs())
    for I in ivs:
        s = table.interval_sum(I.lo, I.hi)
        av = s / Fraction(len(I)) if a.exact else s / len(I)
        if not lam < av <= 2 * lam:
            problems.append(f"{I} has average {av} outside ({lam}, {2 * lam}]")
    sup = a.support()
    if sup is not None:
        window = sup.hull(IntegerInterval(min(I.lo for I in ivs), max(I.hi for I in ivs))) if ivs else sup
        md = dyadic_maximal(a, eval_window=window)
        level = {m for m in window if md[m] > lam}
        if level != dec.covered():
            problems.append(f"union of intervals differs from the dyadic superlevel set "
                            f"(symmetric difference {sorted(level ^ dec.covered())[:5]})")
    return problems


# ---------------------------------------------------------------------------
# superlevel sets
# ---------------------------------------------------------------------------

def _decay_distance(op: str, l1, lam) -> int:
    """Smallest distance d >= 1 from the support at which the operator is <= lam."""
    ratio = to_fraction(l1) / to_fraction(lam)
    if op == "centered":
        # M'a(m) <= l1 / (2d + 1)
        return max(1, math.ceil((ratio - 1) / 2))
    if op in ("uncentered", "dyadic"):
        # any interval reaching the support from distance d has >= d + 1 points
        return max(1, math.ceil(ratio - 1))
    raise WindowTooSmallError(f"no decay bound available for the {op} operator")


def superlevel_window(a: WindowedSequence, lam, op: str = "uncentered") -> IntegerInterval | None:
    """Smallest window around the support guaranteed to contain ``{op(a) > lam}``."""
    if lam <= 0:
        raise WindowTooSmallError("for lambda <= 0 the superlevel set is not finite")
    sup = a.support()
    if sup is None:
        return None
    d = _decay_distance(op, a.l1(), lam)
    return sup.pad(d - 1)


def superlevel_set(g: MaximalResult, lam) -> frozenset[int]:
    """``{m : g(m) > lam}``, after checking the window provably holds all of it."""
    if lam <= 0:
        raise WindowTooSmallError("for lambda <= 0 the superlevel set is not finite")
    sup = g.source_support
    if sup is not None:
        d = _decay_distance(g.operator, g.source_l1, lam)
        need = sup.pad(d - 1)
        if need not in g.window:
            raise WindowTooSmallError(f"window {g.window} does not contain {need}, "
                                      f"where the decay bound is still above {lam}")
    return frozenset(m for m in g.window if g.values[m] > lam)


def _level_set(a: WindowedSequence, lam, op: str, window=None) -> frozenset[int]:
    need = superlevel_window(a, lam, op)
    if need is None:
        return frozenset()
    if window is not None:
        need = need.hull(window)
    if op == "centered":
        g = centered_maximal(a, eval_window=need)
    elif op == "dyadic":
        g = dyadic_maximal(a, eval_window=need)
    else:
        g = uncentered_maximal(a, eval_window=need)
    return superlevel_set(g, lam)


# ---------------------------------------------------------------------------
# covering lemma and weak-type checkers
# ---------------------------------------------------------------------------

def verify_covering_lemma(a: WindowedSequence, lam) -> InequalityReport:
    """``|{M'a > 4 lam}| <= 3 |{M_d a > lam}|`` and ``{M'a > 4 lam}`` inside the union of ``3 I_j``."""
    if any(v < 0 for v in a.values):
        raise ValueError("the covering lemma is stated for non-negative sequences")
    lam = _positive(lam, a.exact)
    big = _level_set(a, 4 * lam, "centered")
    dyadic_level = _level_set(a, lam, "dyadic")
    dec = cz_decompose(a, lam)
    cover = set()
    for T in dec.tripled():
        cover.update(range(T.lo, T.hi + 1))
    escaped = sorted(big - cover)
    rep = compare("covering", len(big), len(dyadic_level), 3,
                  digest=digest_of(a, lam), witness=escaped[:1] or None, exact=True)
    passed = rep.passed and not escaped
    return InequalityReport("covering", rep.lhs, rep.rhs, 3, rep.ratio, passed, rep.digest,
                            None if passed else {"escaped": escaped[:5], "count": rep.witness},
                            {"containment": not escaped, "intervals": len(dec.intervals)})


def _common_mode(a: WindowedSequence, w: WeightSequence):
    if a.exact and w.exact:
        return a, w, True
    return a.to_float(), w.to_float(), False


def weak11_with_Mw(a: WindowedSequence, w: WeightSequence, lam,
                   constant=WEAK11_CONSTANT) -> InequalityReport:
    """``w({Ma > lam}) <= (C / lam) sum |a| Mw`` with ``Mw`` the uncentered maximal weight."""
    a, w, exact = _common_mode(a, w)
    lam = _positive(lam, exact)
    level = _level_set(a, lam, "uncentered")
    if level and not (min(level) in w.window and max(level) in w.window):
        raise WindowTooSmallError(f"superlevel set escapes the weight window {w.window}")
    lhs = weight_measure(w, level)
    sup = a.support()
    rhs = a.zero
    if sup is not None:
        mw = uncentered_maximal(w.base, eval_window=sup)
        rhs = sum((abs(a[n]) * mw[n] for n in sup), a.zero)
    rhs = rhs / lam
    witness = {"lambda": lam, "level_set_size": len(level)}
    return compare("weak11", lhs, rhs, constant, digest=digest_of(a, w, lam),
                   witness=witness, exact=exact, details={"level_set_size": len(level)})


def weighted_weak_pp(a: WindowedSequence, w: WeightSequence, p, lam,
                     ap=None) -> InequalityReport:
    """``w({Ma > lam}) <= (A^2 36^p / lam^p) sum |a|^p w`` with ``A`` the windowed A_p constant."""
    if float(p) < 1:
        raise ValueError("p must be >= 1")
    a, w, exact = _common_mode(a, w)
    if ap is None:
        ap = ap_constant(w, p, exact=exact and float(p) in (1.0, 2.0)).constant
    exact = exact and float(p).is_integer() and isinstance(ap, Fraction)
    if not exact:
        a, w, ap = a.to_float(), w.to_float(), float(ap)
    lam = _positive(lam, exact)
    level = _level_set(a, lam, "uncentered")
    if level and not (min(level) in w.window and max(level) in w.window):
        raise WindowTooSmallError(f"superlevel set escapes the weight window {w.window}")
    lhs = weight_measure(w, level)
    rhs = weighted_power_sum(a, w, p) / power(lam, p)
    constant = ap * ap * power(Fraction(36) if exact else 36.0, p)
    return compare("weakpp", lhs, rhs, constant, digest=digest_of(a, w, lam, str(p)),
                   witness={"lambda": lam, "level_set_size": len(level)}, exact=exact,
                   details={"ap_constant": ap, "level_set_size": len(level)})


def strong_pp_check(a: WindowedSequence, w: WeightSequence, p, cap=None) -> InequalityReport:
    """Ratio ``||Ma||_{l^p_w} / ||a||_{l^p_w}`` over the weight window.

    The strong-type constant comes from interpolation and has no closed form,
    so the report is observational unless a ``cap`` is supplied.  ``details``
    also carries ``sum (Ma)^p w / sum |a|^p Mw``.
    """
    if float(p) <= 1:
        raise ValueError("the strong-type check needs p > 1")
    a, w = a.to_float(), w.to_float()
    den = weighted_power_sum(a, w, p)
    if den == 0:
        raise ValueError("the sequence has zero weighted norm")
    ma = uncentered_maximal(a, eval_window=w.window)
    num = sum(ma[k] ** p * w[k] for k in w.window)
    mw = uncentered_maximal(w.base, eval_window=w.window)
    fs_den = sum(abs(a[k]) ** p * mw[k] for k in w.window)
    r1 = (num / den) ** (1.0 / p)
    details = {"fefferman_stein_ratio": num / fs_den, "norm_ratio": r1}
    if cap is None:
        return compare("strongpp", r1, 1.0, None, digest=digest_of(a, w, str(p)), details=details)
    return compare("strongpp", r1, 1.0, cap, digest=digest_of(a, w, str(p)), details=details)
