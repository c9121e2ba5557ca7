"""Finite measure-preserving systems and the maximal ergodic operator.

A system is a permutation ``U`` of atoms ``0..n-1`` with masses that are
constant along cycles.  ``U^{-k} x`` means applying the inverse permutation
``k`` times; for the standard cycle ``x -> x + 1 (mod n)`` this is ``x - k``.
"a.e." statements become statements about atoms of positive mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .core import IntegerInterval, WindowedSequence, as_array, divide, to_fraction, zeros_like_mode
from .cz import WEAK11_CONSTANT
from .maximal_ops import centered_maximal, uncentered_maximal
from .reports import InequalityReport, compare, digest_of
from .weights import ApReport, WeightSequence, ap_constant, conjugate_exponent, power

__all__ = [
    "InvalidSystemError",
    "FinitePermutationSystem",
    "SystemDiagnostics",
    "AtomFunction",
    "ErgodicRectangle",
    "TransferTrace",
    "TransferCheck",
    "ConverseReport",
    "validate_system",
    "is_ergodic",
    "ergodic_maximal",
    "weighted_Lp_norm",
    "weighted_Lp_power_sum",
    "ergodic_ap_constant",
    "orbit_ap_constant",
    "orbit_trace",
    "verify_transference_identity",
    "ergodic_weak_pp",
    "find_rectangle_base",
    "cover_by_rectangle_bases",
    "rectangle_test_function",
    "converse_probe",
]


class InvalidSystemError(ValueError):
    def __init__(self, message: str, atom: int | None = None):
        super().__init__(message if atom is None else f"{message} (atom {atom})")
        self.atom = atom


@dataclass(frozen=True)
class FinitePermutationSystem:
    masses: tuple
    perm: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "perm", tuple(int(p) for p in self.perm))
        masses = tuple(self.masses)
        if any(isinstance(m, Fraction) for m in masses):
            masses = tuple(to_fraction(m) for m in masses)
        object.__setattr__(self, "masses", masses)

    @classmethod
    def cycle(cls, n: int, exact: bool = True) -> "FinitePermutationSystem":
        mass = Fraction(1, n) if exact else 1.0 / n
        return cls((mass,) * n, tuple((i + 1) % n for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.perm)

    @property
    def exact(self) -> bool:
        return all(isinstance(m, Fraction) for m in self.masses)

    @cached_property
    def inverse(self) -> tuple[int, ...] | None:
        inv = [-1] * self.n
        for i, j in enumerate(self.perm):
            if not 0 <= j < self.n or inv[j] != -1:
                return None
            inv[j] = i
        return tuple(inv)

    @cached_property
    def cycles(self) -> tuple[tuple[int, ...], ...]:
        """Cycles in orbit order: ``U(c[t]) = c[t + 1]``, each starting at its smallest atom."""
        seen, out = set(), []
        for start in range(self.n):
            if start in seen:
                continue
            cyc, x = [], start
            while x not in seen:
                seen.add(x)
                cyc.append(x)
                x = self.perm[x]
            out.append(tuple(cyc))
        return tuple(out)

    @cached_property
    def position(self) -> dict[int, tuple[int, int]]:
        """Atom -> (cycle index, position along the cycle)."""
        return {x: (ci, t) for ci, cyc in enumerate(self.cycles) for t, x in enumerate(cyc)}

    def U(self, x: int, k: int = 1) -> int:
        """``U^k x`` for any integer ``k``."""
        ci, t = self.position[x]
        cyc = self.cycles[ci]
        return cyc[(t + k) % len(cyc)]

    def positive_atoms(self) -> list[int]:
        return [x for x in range(self.n) if self.masses[x] > 0]


@dataclass(frozen=True)
class SystemDiagnostics:
    cycles: tuple
    cycle_masses: tuple
    ergodic: bool
    notes: tuple = ()


def validate_system(sys: FinitePermutationSystem) -> SystemDiagnostics:
    if len(sys.masses) != sys.n:
        raise InvalidSystemError(f"{len(sys.masses)} masses for {sys.n} atoms")
    for x, m in enumerate(sys.masses):
        if m < 0:
            raise InvalidSystemError("negative mass", x)
    if sys.inverse is None:
        seen = set()
        for x, y in enumerate(sys.perm):
            if not 0 <= y < sys.n or y in seen:
                raise InvalidSystemError(f"U is not a bijection: U({x}) = {y}", x)
            seen.add(y)
    total = sum(sys.masses, Fraction(0) if sys.exact else 0.0)
    if (total != 1) if sys.exact else abs(total - 1) > 1e-12:
        raise InvalidSystemError(f"masses sum to {total}, not 1")
    for x, y in enumerate(sys.perm):
        if (sys.masses[x] != sys.masses[y]) if sys.exact else abs(sys.masses[x] - sys.masses[y]) > 1e-15:
            raise InvalidSystemError(f"U moves mass {sys.masses[x]} onto an atom of mass {sys.masses[y]}", x)
    cycle_masses = tuple(sum((sys.masses[x] for x in c), 0 * sys.masses[0]) for c in sys.cycles)
    ergodic = sum(1 for m in cycle_masses if m > 0) == 1
    notes = () if ergodic else ("not ergodic",)
    return SystemDiagnostics(sys.cycles, cycle_masses, ergodic, notes)


def is_ergodic(sys: FinitePermutationSystem) -> bool:
    """Only invariant sets of measure 0 or 1: the positive-mass atoms form one cycle."""
    return validate_system(sys).ergodic


def _main_cycle(sys: FinitePermutationSystem) -> tuple[int, ...]:
    if not is_ergodic(sys):
        raise InvalidSystemError("the system is not ergodic")
    return next(c for c in sys.cycles if sys.masses[c[0]] > 0)


@dataclass(frozen=True)
class AtomFunction:
    values: tuple

    def __post_init__(self):
        vals = tuple(self.values)
        if any(isinstance(v, Fraction) for v in vals) and all(isinstance(v, (int, Fraction)) for v in vals):
            vals = tuple(Fraction(v) for v in vals)
        else:
            vals = tuple(float(v) for v in vals)
        object.__setattr__(self, "values", vals)

    def __getitem__(self, x: int):
        return self.values[x]

    def __len__(self) -> int:
        return len(self.values)

    @property
    def exact(self) -> bool:
        return isinstance(self.values[0], Fraction)

    def array(self, exact: bool | None = None) -> np.ndarray:
        return as_array(self.values, self.exact if exact is None else exact)


def _as_function(f, n: int) -> AtomFunction:
    f = f if isinstance(f, AtomFunction) else AtomFunction(tuple(f))
    if len(f) != n:
        raise ValueError(f"function has {len(f)} values for {n} atoms")
    return f


# ---------------------------------------------------------------------------
# orbit window sums
# ---------------------------------------------------------------------------

def _window_sums(g: np.ndarray, n: int) -> np.ndarray:
    """``sum_{k=-n}^{n} g[(t - k) mod c]`` for every position ``t`` on a cycle."""
    c = len(g)
    length = 2 * n + 1
    full, rem = divmod(length, c)
    doubled = np.concatenate([g, g])
    P = np.concatenate([[g[0] * 0], np.cumsum(doubled)])
    start = (np.arange(c) - n) % c
    partial = P[start + rem] - P[start]
    return partial + full * P[c] if full else partial


def ergodic_maximal(sys: FinitePermutationSystem, f, J: int | None = None) -> AtomFunction:
    """``M~_J f(x) = max_{1 <= n <= J}`` of symmetric orbit averages of ``|f|``.

    Untruncated, the supremum over all ``n`` equals the larger of the maximum
    over ``n <= c`` (cycle length ``c``) and the cycle mean: the average at
    ``n + c`` is a mediant of the average at ``n`` and the cycle mean.
    """
    validate_system(sys)
    f = _as_function(f, sys.n)
    exact = f.exact
    if J is not None and J < 1:
        raise ValueError("J must be >= 1")
    out = zeros_like_mode(sys.n, exact)
    vals = abs(f.array())
    for cyc in sys.cycles:
        idx = np.array(cyc)
        g = vals[idx]
        c = len(cyc)
        top = c if J is None else J
        best = zeros_like_mode(c, exact)
        for n in range(1, top + 1):
            best = np.maximum(best, divide(_window_sums(g, n), 2 * n + 1, exact))
        if J is None:
            mean = divide(g.sum(), c, exact) if exact else g.sum() / c
            best = np.maximum(best, mean)
        out[idx] = best
    return AtomFunction(tuple(out.tolist()))


def weighted_Lp_power_sum(sys: FinitePermutationSystem, f, w, p):
    """``sum_x |f(x)|^p w(x) mu(x)``."""
    f = _as_function(f, sys.n)
    w = _as_function(w, sys.n)
    exact = f.exact and w.exact and sys.exact and float(p).is_integer()
    total = Fraction(0) if exact else 0.0
    for x in range(sys.n):
        if f[x] != 0 and sys.masses[x] != 0:
            term = power(abs(f[x]), p) * w[x] * sys.masses[x]
            total += term if exact else float(term)
    return total


def weighted_Lp_norm(sys: FinitePermutationSystem, f, w, p):
    if float(p) < 1:
        raise ValueError("p must be >= 1")
    w = _as_function(w, sys.n)
    bad = [x for x in sys.positive_atoms() if not w[x] > 0]
    if bad:
        raise ValueError(f"weight must be positive on atoms of positive mass (atom {bad[0]})")
    s = weighted_Lp_power_sum(sys, f, w, p)
    return s if float(p) == 1 else float(s) ** (1.0 / float(p))


# ---------------------------------------------------------------------------
# ergodic A_p
# ---------------------------------------------------------------------------

def ergodic_ap_constant(sys: FinitePermutationSystem, w, p, N_max: int | None = None) -> ApReport:
    """Largest symmetric orbit-window A_p product over positive-mass atoms and ``1 <= N <= N_max``.

    For ``p == 1`` the product is replaced by window average over window
    minimum.  The witness is ``(atom, N)``.
    """
    validate_system(sys)
    w = _as_function(w, sys.n)
    if float(p) < 1:
        raise ValueError("p must be >= 1")
    exact = w.exact and float(p) in (1.0, 2.0)
    x_all = w.array(exact)
    if N_max is None:
        N_max = max(len(c) for c in sys.cycles)
    best, witness = None, None
    for cyc in sys.cycles:
        if sys.masses[cyc[0]] == 0:
            continue
        idx = np.array(cyc)
        g = x_all[idx]
        if any(v <= 0 for v in g):
            raise ValueError("weight must be positive on atoms of positive mass")
        c = len(cyc)
        if float(p) > 1:
            dual = np.array([1 / v for v in g], dtype=object) if exact else g ** (-1.0 / (float(p) - 1.0))
        else:
            run_min = g.copy()
        for N in range(1, N_max + 1):
            avg = divide(_window_sums(g, N), 2 * N + 1, exact)
            if float(p) > 1:
                avg_d = divide(_window_sums(dual, N), 2 * N + 1, exact)
                vals = avg * avg_d if exact else avg * avg_d ** (float(p) - 1.0)
            else:
                # window of radius N: previous minimum and the two new end points
                run_min = np.minimum(run_min, np.minimum(np.roll(g, N), np.roll(g, -N)))
                vals = avg / run_min
            t = int(np.argmax(vals))
            if best is None or vals[t] > best:
                best, witness = vals[t], (cyc[t], N)
    if best is None:
        raise ValueError("no atom of positive mass")
    return ApReport(p=p, constant=best if exact else float(best), witness=witness,
                    conjugate=conjugate_exponent(p), window=("symmetric", N_max))


def orbit_ap_constant(sys: FinitePermutationSystem, w, p, x: int, radius: int) -> ApReport:
    """All-intervals A_p constant of the orbit sequence ``k -> w(U^k x)`` on ``[-radius, radius]``."""
    w = _as_function(w, sys.n)
    seq = WindowedSequence(-radius, tuple(w[sys.U(x, k)] for k in range(-radius, radius + 1)))
    return ap_constant(WeightSequence(seq), p, exact=seq.exact and float(p) in (1.0, 2.0))


# ---------------------------------------------------------------------------
# transference
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TransferTrace:
    x: int
    L: int
    J: int
    a_x: WindowedSequence
    w_x: WindowedSequence | None


def orbit_trace(sys: FinitePermutationSystem, f, w, x: int, L: int, J: int) -> TransferTrace:
    """``a_x(k) = f(U^{-k} x)`` and ``w_x(k) = w(U^{-k} x)`` for ``|k| <= L + J``, zero outside."""
    validate_system(sys)
    f = _as_function(f, sys.n)
    R = L + J
    ks = range(-R, R + 1)
    a_x = WindowedSequence(-R, tuple(f[sys.U(x, -k)] for k in ks))
    w_x = None
    if w is not None:
        w = _as_function(w, sys.n)
        w_x = WindowedSequence(-R, tuple(w[sys.U(x, -k)] for k in ks))
    return TransferTrace(x, L, J, a_x, w_x)


@dataclass(frozen=True)
class TransferCheck:
    holds: bool
    witness_m: int | None = None
    ergodic_value: object = None
    sequence_value: object = None

    def __bool__(self) -> bool:
        return self.holds


def verify_transference_identity(sys: FinitePermutationSystem, f, x: int, L: int, J: int,
                                 trace: TransferTrace | None = None) -> TransferCheck:
    """Check ``M~_J f(U^{-m} x)`` against the centered maximal function of ``a_x`` at ``m``, ``|m| <= L``.

    ``M~_J`` averages over radii ``1..J``; on the sequence side this is the
    truncation with ``J + 1`` (radii ``r < J + 1``).
    """
    if J < 1 or L < 0:
        raise ValueError("need J >= 1 and L >= 0")
    f = _as_function(f, sys.n)
    trace = orbit_trace(sys, f, None, x, L, J) if trace is None else trace
    erg = ergodic_maximal(sys, f, J)
    seq = centered_maximal(trace.a_x, J + 1, eval_window=(-L, L))
    for m in range(-L, L + 1):
        lhs, rhs = erg[sys.U(x, -m)], seq[m]
        if lhs != rhs if f.exact else abs(lhs - rhs) > 1e-12 * max(abs(lhs), 1.0):
            return TransferCheck(False, m, lhs, rhs)
    return TransferCheck(True)


def ergodic_weak_pp(sys: FinitePermutationSystem, f, w, p, lam, cap=None,
                    J: int | None = None, constant=WEAK11_CONSTANT) -> InequalityReport:
    """Weak (1,1) for ``p == 1`` with ``C = 36 A``; for ``p > 1`` the norm ratio of ``M~``.

    ``A`` is the ergodic A_p constant of ``w``; ``J`` selects the truncation
    ``M~_J`` (default: untruncated) and ``constant`` replaces the 36.  For ``p > 1`` the report is
    observational unless ``cap`` is given; the weak-type ratio at ``lam`` with
    the transferred constant ``A^2 36^p`` is kept in ``details``.
    """
    if lam <= 0:
        raise ValueError("lambda must be positive")
    validate_system(sys)
    f = _as_function(f, sys.n)
    w = _as_function(w, sys.n)
    A = ergodic_ap_constant(sys, w, p).constant
    mf = ergodic_maximal(sys, f, J)
    exact = f.exact and w.exact and sys.exact and float(p).is_integer() and isinstance(A, Fraction)
    lam = to_fraction(lam) if exact else float(lam)
    level = [x for x in range(sys.n) if mf[x] > lam and sys.masses[x] > 0]
    lhs = sum((w[x] * sys.masses[x] for x in level), Fraction(0) if exact else 0.0)
    dig = digest_of(sys, f, w, str(p), lam)
    if float(p) == 1:
        rhs = weighted_Lp_power_sum(sys, f, w, 1) / lam
        return compare("ergodic_weak11", lhs, rhs, constant * A, digest=dig,
                       witness={"lambda": lam, "level_atoms": level[:5]}, exact=exact,
                       details={"ap_constant": A})
    num = weighted_Lp_power_sum(sys, mf, w, p)
    den = weighted_Lp_power_sum(sys, f, w, p)
    if den == 0:
        raise ValueError("f has zero weighted norm")
    ratio = (float(num) / float(den)) ** (1.0 / float(p))
    weak_bound = float(A) ** 2 * 36.0 ** float(p) * float(den) / float(lam) ** float(p)
    details = {"ap_constant": A, "weak_ratio": float(lhs) / weak_bound}
    return compare("ergodic_strongpp", ratio, 1.0, cap, digest=dig, details=details)


# ---------------------------------------------------------------------------
# ergodic rectangles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ErgodicRectangle:
    base: frozenset
    K: int
    levels: tuple  # levels[i + K] = U^i E

    def union(self) -> frozenset:
        return frozenset().union(*self.levels)

    def is_disjoint(self) -> bool:
        return sum(len(L) for L in self.levels) == len(self.union())

    def measure(self, sys: FinitePermutationSystem):
        return sum((sys.masses[x] for x in self.union()), 0 * sys.masses[0])


def _rectangle(sys: FinitePermutationSystem, E: Iterable[int], K: int) -> ErgodicRectangle:
    E = frozenset(E)
    levels = tuple(frozenset(sys.U(x, i) for x in E) for i in range(-K, K + 1))
    return ErgodicRectangle(E, K, levels)


def _cycle_gap(t: int, s: int, c: int) -> int:
    d = abs(t - s) % c
    return min(d, c - d)


def find_rectangle_base(sys: FinitePermutationSystem, K: int, F: Iterable[int] | None = None) -> ErgodicRectangle:
    """A base ``E`` inside ``F`` whose translates ``U^i E``, ``|i| <= K``, are disjoint.

    Atoms of ``F`` are taken greedily along the cycle, keeping pairwise cycle
    distance at least ``2K + 1``.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    cyc = _main_cycle(sys)
    c = len(cyc)
    if 2 * K + 1 > c:
        raise ValueError(f"no rectangle of length {2 * K + 1} exists in a cycle of length {c}")
    pos = {x: t for t, x in enumerate(cyc)}
    F = set(cyc) if F is None else {x for x in F if x in pos}
    if not F:
        raise ValueError("F has no atom of positive mass")
    chosen: list[int] = []
    for t in sorted(pos[x] for x in F):
        if all(_cycle_gap(t, s, c) >= 2 * K + 1 for s in chosen):
            chosen.append(t)
    return _rectangle(sys, (cyc[t] for t in chosen), K)


def cover_by_rectangle_bases(sys: FinitePermutationSystem, K: int) -> list[frozenset]:
    """Rectangle bases of length ``2K + 1`` whose union is every positive-mass atom."""
    remaining = set(_main_cycle(sys))
    bases = []
    while remaining:
        rect = find_rectangle_base(sys, K, remaining)
        bases.append(rect.base)
        remaining -= rect.base
    return bases


def rectangle_test_function(sys: FinitePermutationSystem, E: Iterable[int], K: int,
                            a: WindowedSequence, F: Iterable[int]) -> AtomFunction:
    """``f(U^{-k} x) = a(k)`` for ``x`` in ``F`` and ``|k| <= J``, zero elsewhere.

    ``a`` lives on ``[-J, J]`` and ``E`` must be a base of length ``4J + 1``
    (``K = 2J``), which makes the prescription unambiguous.
    """
    if a.lo != -a.hi:
        raise ValueError("a must be stored on a symmetric window [-J, J]")
    J = a.hi
    if K != 2 * J:
        raise ValueError(f"the rectangle must have length 4J + 1 = {4 * J + 1}, got {2 * K + 1}")
    E, F = frozenset(E), frozenset(F)
    if not F <= E:
        raise ValueError("F must be a subset of E")
    rect = _rectangle(sys, E, K)
    if not rect.is_disjoint():
        raise ValueError(f"{sorted(E)} is not a base of an ergodic rectangle of length {2 * K + 1}")
    zero = a.zero
    vals = [zero] * sys.n
    for x in F:
        for k in range(-J, J + 1):
            vals[sys.U(x, -k)] = a[k]
    return AtomFunction(tuple(vals))


@dataclass(frozen=True)
class ConverseReport:
    n: int
    p: float
    J: int
    ap_constant: float
    operator_ratio: float
    ratios: tuple = field(default=())


def converse_probe(sys: FinitePermutationSystem, w, p, J: int, trials: int = 8, seed: int = 0) -> ConverseReport:
    """Largest ``||M~ f|| / ||f||`` in ``L^p_w`` over rectangle-built test functions, with ``A``.

    Test sequences on ``[-J, J]`` are the unit impulse, the dual power
    ``w_x^{-1/(p-1)}`` (the extremal choice for A_p), and random non-negative
    draws; bases are single atoms, the weight's minimiser among them.
    """
    if float(p) <= 1:
        raise ValueError("the converse probe needs p > 1")
    w = _as_function(w, sys.n)
    cyc = _main_cycle(sys)
    if 4 * J + 1 > len(cyc):
        raise ValueError(f"rectangles of length {4 * J + 1} do not fit in a cycle of length {len(cyc)}")
    rng = np.random.default_rng(seed)
    wf = np.array([float(v) for v in w.values])
    anchors = [int(min(cyc, key=lambda x: wf[x]))]
    anchors += [int(x) for x in rng.choice(cyc, size=min(trials, len(cyc)), replace=False)]
    fw = AtomFunction(tuple(wf))
    ratios = []
    for i, x in enumerate(anchors):
        rect = find_rectangle_base(sys, 2 * J, [x])
        w_x = [wf[sys.U(x, -k)] for k in range(-J, J + 1)]
        seqs = [WindowedSequence(-J, tuple(1.0 if k == 0 else 0.0 for k in range(-J, J + 1))),
                WindowedSequence(-J, tuple(v ** (-1.0 / (float(p) - 1.0)) for v in w_x))]
        if i > 0:
            seqs.append(WindowedSequence(-J, tuple(rng.random(2 * J + 1))))
        for a in seqs:
            f = rectangle_test_function(sys, rect.base, 2 * J, a, rect.base)
            num = weighted_Lp_power_sum(sys, ergodic_maximal(sys, f), fw, p)
            den = weighted_Lp_power_sum(sys, f, fw, p)
            ratios.append((float(num) / float(den)) ** (1.0 / float(p)))
    A = float(ergodic_ap_constant(sys, fw, p).constant)
    return ConverseReport(n=sys.n, p=float(p), J=J, ap_constant=A, operator_ratio=max(ratios),
                          ratios=tuple(ratios))
