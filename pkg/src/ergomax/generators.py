"""Deterministic corpora of sequences, weights and systems.

Random values come from a counter-based hash of ``(seed, stream, index)``
rather than a stateful generator, so the value at a given integer does not
depend on the window it was drawn in: a weight on ``[-64, 64]`` is the
restriction of the same weight on ``[-512, 512]``.  Values are quantized to
multiples of ``1/denominator`` so float and exact runs see identical data.
"""

from __future__ import annotations

import hashlib
import math
from fractions import Fraction

import numpy as np

from .core import DyadicInterval, IntegerInterval, WindowedSequence
from .ergodic import AtomFunction, FinitePermutationSystem
from .weights import WeightSequence

__all__ = [
    "SEQUENCE_KINDS",
    "WEIGHT_KINDS",
    "SYSTEM_KINDS",
    "uniforms",
    "generate_sequence",
    "generate_weight",
    "weight_ap_bound",
    "generate_system",
    "generate_atom_function",
    "generate_atom_weight",
]

SEQUENCE_KINDS = ("delta", "constant", "step", "random-sparse", "random-dense", "adversarial-dyadic")
WEIGHT_KINDS = ("constant", "alternating", "power", "random-bounded-ratio")
SYSTEM_KINDS = ("cycle", "two-cycles", "cycle-with-null-atoms")

_MASK = (1 << 64) - 1


def _stream_key(stream: str) -> int:
    return int.from_bytes(hashlib.blake2b(stream.encode(), digest_size=8).digest(), "little")


def _splitmix64(z: np.ndarray) -> np.ndarray:
    z = z + np.uint64(0x9E3779B97F4A7C15)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def uniforms(seed: int, stream: str, indices) -> np.ndarray:
    """Uniform draws in ``[0, 1)``, one per integer index, fixed by ``(seed, stream, index)``."""
    idx = np.asarray(list(indices), dtype=np.int64).astype(np.uint64)
    key = np.uint64((_stream_key(stream) ^ (int(seed) * 0xD1B54A32D192ED03)) & _MASK)
    with np.errstate(over="ignore"):
        h = _splitmix64(_splitmix64(idx ^ key) + key)
    return (h >> np.uint64(11)).astype(np.float64) / float(1 << 53)


def _quantize(u: np.ndarray, scale, denominator: int, exact: bool) -> list:
    """``scale * k / denominator`` with ``k = floor(u * (denominator + 1))``."""
    ks = np.floor(u * (denominator + 1)).astype(int)
    if exact:
        s = Fraction(scale)
        return [s * Fraction(int(k), denominator) for k in ks]
    return [float(scale) * int(k) / denominator for k in ks]


def _window(params) -> IntegerInterval:
    lo = int(params.get("lo", -8))
    hi = int(params.get("hi", 8))
    return IntegerInterval(lo, hi)


def _value(x, exact: bool):
    return Fraction(x) if exact else float(x)


def generate_sequence(kind: str, params: dict | None = None, seed: int = 0,
                      exact: bool = False) -> WindowedSequence:
    """A sequence of the given kind; ``params`` holds the window ``lo``/``hi`` and kind options.

    ``random-sparse`` and ``random-dense`` take ``signed``, ``scale`` and
    ``denominator``; ``random-sparse`` also ``density``.  ``adversarial-dyadic``
    puts pairs of masses on either side of level-``level`` dyadic boundaries.
    """
    params = dict(params or {})
    if kind == "delta":
        m = int(params.get("position", 0))
        return WindowedSequence(m, (_value(params.get("value", 1), exact),))
    if kind == "constant":
        w = _window(params)
        return WindowedSequence.constant(w.lo, w.hi, _value(params.get("c", 1), exact))
    if kind == "step":
        w = _window(params)
        cut = int(params.get("cut", (w.lo + w.hi + 1) // 2))
        left, right = _value(params.get("left", 1), exact), _value(params.get("right", 0), exact)
        return WindowedSequence(w.lo, tuple(left if k < cut else right for k in w))
    if kind in ("random-sparse", "random-dense"):
        w = _window(params)
        den = int(params.get("denominator", 8))
        ks = list(w)
        vals = _quantize(uniforms(seed, kind + ":value", ks), params.get("scale", 1), den, exact)
        if params.get("signed", False):
            signs = uniforms(seed, kind + ":sign", ks) < 0.5
            vals = [-v if s else v for v, s in zip(vals, signs)]
        if kind == "random-sparse":
            keep = uniforms(seed, kind + ":keep", ks) < float(params.get("density", 0.1))
            vals = [v if k else 0 * v for v, k in zip(vals, keep)]
        return WindowedSequence(w.lo, tuple(vals))
    if kind == "adversarial-dyadic":
        w = _window(params)
        level = int(params.get("level", 2))
        size = 1 << level
        zero, one = _value(0, exact), _value(params.get("value", 1), exact)
        vals = {k: zero for k in w}
        first = DyadicInterval.containing(w.lo, level).index
        last = DyadicInterval.containing(w.hi, level).index
        draws = uniforms(seed, kind, range(first, last + 1))
        for j, u in zip(range(first, last + 1), draws):
            if u < float(params.get("density", 0.5)):
                # last point of I_{N,j} and first point of I_{N,j+1}
                for k in (j * size, j * size + 1):
                    if k in w:
                        vals[k] = one
        return WindowedSequence(w.lo, tuple(vals[k] for k in w))
    raise ValueError(f"unknown sequence kind {kind!r}; expected one of {', '.join(SEQUENCE_KINDS)}")


def generate_weight(kind: str, params: dict | None = None, seed: int = 0,
                    exact: bool = False) -> WeightSequence:
    """A strictly positive weight on ``[lo, hi]``.

    ``alternating`` is ``high`` at even and ``low`` at odd integers;
    ``power`` is ``(1 + |k|)^alpha``; ``random-bounded-ratio`` draws
    ``1 + (rho - 1) u`` so that ``max / min <= rho``.
    """
    params = dict(params or {})
    w = _window(params)
    if kind == "constant":
        c = _value(params.get("c", 1), exact)
        vals = [c] * len(w)
    elif kind == "alternating":
        low, high = _value(params.get("low", 1), exact), _value(params.get("high", 2), exact)
        vals = [high if k % 2 == 0 else low for k in w]
    elif kind == "power":
        alpha = params.get("alpha", 1)
        if exact and float(alpha).is_integer():
            vals = [Fraction(1 + abs(k)) ** int(alpha) for k in w]
        else:
            vals = [(1.0 + abs(k)) ** float(alpha) for k in w]
    elif kind == "random-bounded-ratio":
        rho = params.get("rho", 4)
        if rho < 1:
            raise ValueError("rho must be >= 1")
        den = int(params.get("denominator", 8))
        steps = _quantize(uniforms(seed, kind, list(w)), 1, den, exact)
        one = _value(1, exact)
        vals = [one + (_value(rho, exact) - one) * u for u in steps]
    else:
        raise ValueError(f"unknown weight kind {kind!r}; expected one of {', '.join(WEIGHT_KINDS)}")
    return WeightSequence(WindowedSequence(w.lo, tuple(vals)))


def weight_ap_bound(kind: str, params: dict | None = None):
    """A priori upper bound on the windowed A_p constant of a generated weight (any ``p``), or ``None``.

    Any weight with ``max / min <= rho`` has every A_p product at most ``rho``.
    """
    params = dict(params or {})
    if kind == "constant":
        return 1
    if kind == "alternating":
        low, high = params.get("low", 1), params.get("high", 2)
        return max(low, high) / min(low, high)
    if kind == "random-bounded-ratio":
        return params.get("rho", 4)
    if kind == "power" and params.get("alpha", 1) == 0:
        return 1
    return None


def generate_system(kind: str, n: int, seed: int = 0, exact: bool = True,
                    null_atoms: int = 2) -> FinitePermutationSystem:
    """``cycle``: ``x -> x + 1 (mod n)`` with masses ``1/n``.

    ``two-cycles`` splits the atoms into two cycles of positive mass (not
    ergodic); ``cycle-with-null-atoms`` appends ``null_atoms`` zero-mass fixed
    points to an ``n``-cycle.  ``seed`` is accepted for interface symmetry;
    these families are deterministic.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    mass = (lambda k: Fraction(1, k)) if exact else (lambda k: 1.0 / k)
    if kind == "cycle":
        return FinitePermutationSystem.cycle(n, exact)
    if kind == "two-cycles":
        if n < 2:
            raise ValueError("two cycles need n >= 2")
        h = n // 2
        perm = [(i + 1) % h for i in range(h)] + [h + (i + 1) % (n - h) for i in range(n - h)]
        return FinitePermutationSystem((mass(n),) * n, tuple(perm))
    if kind == "cycle-with-null-atoms":
        zero = Fraction(0) if exact else 0.0
        perm = [(i + 1) % n for i in range(n)] + list(range(n, n + null_atoms))
        return FinitePermutationSystem((mass(n),) * n + (zero,) * null_atoms, tuple(perm))
    raise ValueError(f"unknown system kind {kind!r}; expected one of {', '.join(SYSTEM_KINDS)}")


def generate_atom_function(n: int, seed: int = 0, density: float = 1.0, denominator: int = 8,
                           exact: bool = False, signed: bool = False) -> AtomFunction:
    ks = range(n)
    vals = _quantize(uniforms(seed, "atom-f", ks), 1, denominator, exact)
    if signed:
        vals = [-v if s else v for v, s in zip(vals, uniforms(seed, "atom-f:sign", ks) < 0.5)]
    if density < 1:
        keep = uniforms(seed, "atom-f:keep", ks) < density
        vals = [v if k else 0 * v for v, k in zip(vals, keep)]
    return AtomFunction(tuple(vals))


def generate_atom_weight(sys: FinitePermutationSystem, kind: str, params: dict | None = None,
                         seed: int = 0, exact: bool = False) -> AtomFunction:
    """A weight on atoms, laid out along the positive-mass cycle through atom 0.

    The profile is the ``Z`` weight of the same kind evaluated at the signed
    cycle distance from atom 0 (``power`` is ``(1 + dist)^alpha``).  Atoms off
    that cycle get weight 1.
    """
    params = dict(params or {})
    cyc = next(c for c in sys.cycles if 0 in c)
    c = len(cyc)
    dist = [t if t <= c // 2 else t - c for t in range(c)]
    base = generate_weight(kind, {**params, "lo": min(dist), "hi": max(dist)}, seed, exact)
    one = Fraction(1) if base.exact else 1.0
    vals = [one] * sys.n
    for t, x in enumerate(cyc):
        vals[x] = base[dist[t]]
    return AtomFunction(tuple(vals))
