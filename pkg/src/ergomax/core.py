"""Integer intervals, the dyadic grid on Z, and finitely supported sequences.

A sequence is stored on a finite window and is zero everywhere else.  Values
are either all floats or all :class:`fractions.Fraction` (exact mode); the
helpers below keep the two worlds from mixing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "IntegerInterval",
    "DyadicInterval",
    "WindowedSequence",
    "PrefixTable",
    "interval_average",
    "expand",
    "dyadic_intervals_containing",
    "prefix_sums",
    "to_fraction",
    "as_array",
    "divide",
]


# ---------------------------------------------------------------------------
# numeric helpers
# ---------------------------------------------------------------------------

def to_fraction(x) -> Fraction:
    """Exact rational value of ``x``; strings such as ``"1/3"`` are accepted."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, (float, np.floating)):
        if not math.isfinite(x):
            raise ValueError(f"non-finite value {x!r} has no exact form")
        return Fraction(float(x))
    if isinstance(x, np.integer):
        return Fraction(int(x))
    raise TypeError(f"cannot convert {type(x).__name__} to Fraction")


def _is_exact_value(x) -> bool:
    return isinstance(x, (Fraction, int, np.integer)) and not isinstance(x, bool)


def as_array(values: Iterable, exact: bool) -> np.ndarray:
    """Float64 array, or an object array of Fractions when ``exact``."""
    if exact:
        vals = [to_fraction(v) for v in values]
        out = np.empty(len(vals), dtype=object)
        out[:] = vals
        return out
    return np.asarray([float(v) for v in values], dtype=np.float64)


def divide(x, k, exact: bool):
    """``x / k`` that stays rational in exact mode (``k`` is an int or array of ints)."""
    if exact:
        if isinstance(k, np.ndarray):
            den = np.empty(k.size, dtype=object)
            den[:] = [Fraction(int(v)) for v in k.ravel()]
            return x / den.reshape(k.shape)
        return x / Fraction(int(k))
    return x / k


def zeros_like_mode(shape, exact: bool) -> np.ndarray:
    if exact:
        out = np.empty(shape, dtype=object)
        out.fill(Fraction(0))
        return out
    return np.zeros(shape, dtype=np.float64)


# ---------------------------------------------------------------------------
# intervals
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class IntegerInterval:
    """Finite interval ``[lo, hi]`` of integers, endpoints included."""

    lo: int
    hi: int

    def __post_init__(self):
        if self.hi < self.lo:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    def __len__(self) -> int:
        return self.hi - self.lo + 1

    def __contains__(self, m) -> bool:
        if isinstance(m, IntegerInterval):
            return self.lo <= m.lo and m.hi <= self.hi
        return self.lo <= m <= self.hi

    def __iter__(self) -> Iterator[int]:
        return iter(range(self.lo, self.hi + 1))

    def hull(self, other: "IntegerInterval") -> "IntegerInterval":
        return IntegerInterval(min(self.lo, other.lo), max(self.hi, other.hi))

    def intersect(self, other: "IntegerInterval") -> "IntegerInterval | None":
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return IntegerInterval(lo, hi) if lo <= hi else None

    def pad(self, left: int, right: int | None = None) -> "IntegerInterval":
        right = left if right is None else right
        return IntegerInterval(self.lo - left, self.hi + right)

    def __repr__(self) -> str:
        return f"[{self.lo},{self.hi}]"


def _interval(obj) -> IntegerInterval:
    if isinstance(obj, IntegerInterval):
        return obj
    lo, hi = obj
    return IntegerInterval(int(lo), int(hi))


@dataclass(frozen=True, order=True)
class DyadicInterval:
    """``I_{N,j} = [(j-1) 2^N + 1, j 2^N]`` for level ``N >= 1``."""

    level: int
    index: int

    def __post_init__(self):
        if self.level < 1:
            raise ValueError("dyadic levels start at N = 1")

    @property
    def lo(self) -> int:
        return (self.index - 1) * (1 << self.level) + 1

    @property
    def hi(self) -> int:
        return self.index * (1 << self.level)

    @property
    def interval(self) -> IntegerInterval:
        return IntegerInterval(self.lo, self.hi)

    def __len__(self) -> int:
        return 1 << self.level

    def __contains__(self, m: int) -> bool:
        return self.lo <= m <= self.hi

    @classmethod
    def containing(cls, m: int, level: int) -> "DyadicInterval":
        # j = ceil(m / 2^N), valid for negative m as well
        return cls(level, -((-m) >> level))

    def parent(self) -> "DyadicInterval":
        return DyadicInterval(self.level + 1, -((-self.index) >> 1))

    def children(self) -> tuple["DyadicInterval", "DyadicInterval"]:
        if self.level < 2:
            raise ValueError("level-1 intervals have no dyadic children")
        return (DyadicInterval(self.level - 1, 2 * self.index - 1),
                DyadicInterval(self.level - 1, 2 * self.index))

    def __repr__(self) -> str:
        return f"I({self.level},{self.index})={self.interval!r}"


def expand(I: DyadicInterval, m: int, mode: str = "symmetric") -> IntegerInterval:
    """The enlargements ``2mL I``, ``2mR I`` and ``(2m+1) I`` of a dyadic interval."""
    if m < 1:
        raise ValueError("m must be a positive integer")
    size = 1 << I.level
    j = I.index
    # length 2m * 2^N on each side, so the left end is (j - 2m) 2^N + 1
    left = IntegerInterval((j - 2 * m) * size + 1, j * size)
    right = IntegerInterval((j - 1) * size + 1, (j + (2 * m - 1)) * size)
    if mode == "left":
        return left
    if mode == "right":
        return right
    if mode == "symmetric":
        return left.hull(right)
    raise ValueError(f"unknown expansion mode {mode!r}")


def dyadic_intervals_containing(m: int, n_max: int) -> list[DyadicInterval]:
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    return [DyadicInterval.containing(m, N) for N in range(1, n_max + 1)]


# ---------------------------------------------------------------------------
# sequences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WindowedSequence:
    """Real sequence on Z stored on ``[offset, offset + len(values) - 1]``."""

    offset: int
    values: tuple

    def __post_init__(self):
        vals = tuple(self.values)
        if not vals:
            raise ValueError("a windowed sequence needs at least one stored value")
        object.__setattr__(self, "offset", int(self.offset))
        # exact iff some entry is a Fraction and none is a float
        if any(isinstance(v, Fraction) for v in vals) and all(_is_exact_value(v) for v in vals):
            vals = tuple(Fraction(v) for v in vals)
        else:
            vals = tuple(float(v) for v in vals)
        object.__setattr__(self, "values", vals)

    # construction -----------------------------------------------------------
    @classmethod
    def from_array(cls, offset: int, values, exact: bool | None = None) -> "WindowedSequence":
        vals = list(values.tolist() if isinstance(values, np.ndarray) else values)
        if exact:
            vals = [to_fraction(v) for v in vals]
        elif exact is False:
            vals = [float(v) for v in vals]
        return cls(offset, tuple(vals))

    @classmethod
    def delta(cls, m: int = 0, value=1) -> "WindowedSequence":
        return cls(m, (value,))

    @classmethod
    def constant(cls, lo: int, hi: int, c=1) -> "WindowedSequence":
        return cls(lo, (c,) * (hi - lo + 1))

    @classmethod
    def indicator(cls, points: Iterable[int], exact: bool = True) -> "WindowedSequence":
        pts = sorted(set(points))
        if not pts:
            raise ValueError("indicator of an empty set")
        one, zero = (Fraction(1), Fraction(0)) if exact else (1.0, 0.0)
        s = set(pts)
        return cls(pts[0], tuple(one if k in s else zero for k in range(pts[0], pts[-1] + 1)))

    # basic access -----------------------------------------------------------
    @property
    def lo(self) -> int:
        return self.offset

    @property
    def hi(self) -> int:
        return self.offset + len(self.values) - 1

    @property
    def window(self) -> IntegerInterval:
        return IntegerInterval(self.lo, self.hi)

    @property
    def exact(self) -> bool:
        return isinstance(self.values[0], Fraction)

    @property
    def zero(self):
        return Fraction(0) if self.exact else 0.0

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, m: int):
        i = m - self.offset
        if 0 <= i < len(self.values):
            return self.values[i]
        return self.zero

    def __call__(self, m: int):
        return self[m]

    def items(self) -> Iterator[tuple[int, object]]:
        return zip(range(self.lo, self.hi + 1), self.values)

    def support(self) -> IntegerInterval | None:
        nz = [k for k, v in self.items() if v != 0]
        return IntegerInterval(nz[0], nz[-1]) if nz else None

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.values)

    def l1(self):
        return sum((abs(v) for v in self.values), self.zero)

    def array(self, exact: bool | None = None) -> np.ndarray:
        return as_array(self.values, self.exact if exact is None else exact)

    def on(self, window) -> np.ndarray:
        """Values on ``window`` (zero-extended) as an array."""
        w = _interval(window)
        return as_array([self[k] for k in w], self.exact)

    # transformations ----------------------------------------------------------
    def to_exact(self) -> "WindowedSequence":
        return self if self.exact else WindowedSequence(self.offset, tuple(to_fraction(v) for v in self.values))

    def to_float(self) -> "WindowedSequence":
        return WindowedSequence(self.offset, tuple(float(v) for v in self.values))

    def abs(self) -> "WindowedSequence":
        return WindowedSequence(self.offset, tuple(abs(v) for v in self.values))

    def restrict(self, window) -> "WindowedSequence":
        w = _interval(window)
        return WindowedSequence(w.lo, tuple(self[k] for k in w))

    def scale(self, c) -> "WindowedSequence":
        return WindowedSequence(self.offset, tuple(c * v for v in self.values))

    def shift_values(self, c) -> "WindowedSequence":
        return WindowedSequence(self.offset, tuple(v + c for v in self.values))

    def map(self, fn) -> "WindowedSequence":
        return WindowedSequence(self.offset, tuple(fn(v) for v in self.values))

    def __add__(self, other: "WindowedSequence") -> "WindowedSequence":
        w = self.window.hull(other.window)
        return WindowedSequence(w.lo, tuple(self[k] + other[k] for k in w))

    def __repr__(self) -> str:
        body = ", ".join(str(v) for v in self.values[:8])
        more = ", ..." if len(self.values) > 8 else ""
        return f"WindowedSequence(offset={self.offset}, values=({body}{more}))"


def as_sequence(obj) -> WindowedSequence:
    if isinstance(obj, WindowedSequence):
        return obj
    if hasattr(obj, "base"):
        return obj.base
    raise TypeError(f"expected a WindowedSequence, got {type(obj).__name__}")


# ---------------------------------------------------------------------------
# sums and averages
# ---------------------------------------------------------------------------

class PrefixTable:
    """Cumulative sums ``T(k) = sum_{n <= k} a(n)`` over the stored window."""

    def __init__(self, a: WindowedSequence):
        self.offset = a.offset
        self.exact = a.exact
        acc = [a.zero]
        for v in a.values:
            acc.append(acc[-1] + v)
        self._acc = acc

    def __call__(self, k: int):
        i = k - self.offset + 1
        if i <= 0:
            return self._acc[0]
        return self._acc[min(i, len(self._acc) - 1)]

    def interval_sum(self, lo: int, hi: int):
        return self(hi) - self(lo - 1)

    def average(self, lo: int, hi: int):
        s = self.interval_sum(lo, hi)
        n = hi - lo + 1
        return s / Fraction(n) if self.exact else s / n


def prefix_sums(a: WindowedSequence) -> PrefixTable:
    return PrefixTable(a)


def interval_average(a: WindowedSequence, I) -> object:
    I = _interval(I)
    inner = I.intersect(a.window)
    total = a.zero
    if inner is not None:
        for k in inner:
            total += a[k]
    return total / Fraction(len(I)) if a.exact else total / len(I)


def interval_sum(a: WindowedSequence, I) -> object:
    I = _interval(I)
    inner = I.intersect(a.window)
    if inner is None:
        return a.zero
    return sum((a[k] for k in inner), a.zero)
