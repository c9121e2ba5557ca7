"""JSON file formats.

Sequences and weights: ``{"offset": int, "values": [...]}``.
Systems: ``{"masses": [...], "perm": [...]}``.
Atom functions: ``{"values": [...]}`` or a bare list.

Values may be numbers or strings such as ``"1/3"``; with ``exact`` everything
is read as a Fraction.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .core import WindowedSequence, to_fraction
from .ergodic import AtomFunction, FinitePermutationSystem
from .weights import WeightSequence

__all__ = ["read_json", "read_sequence", "read_weight", "read_system", "read_atom_function",
           "sequence_to_json", "system_to_json"]


def read_json(path: str):
    with open(path) as fh:
        return json.load(fh)


def _values(raw, exact: bool) -> tuple:
    if not isinstance(raw, list) or not raw:
        raise ValueError("'values' must be a non-empty list")
    if exact or any(isinstance(v, str) for v in raw):
        return tuple(to_fraction(v) for v in raw)
    return tuple(float(v) for v in raw)


def read_sequence(path: str, exact: bool = False) -> WindowedSequence:
    doc = read_json(path)
    if not isinstance(doc, dict) or "values" not in doc:
        raise ValueError(f"{path}: expected an object with 'offset' and 'values'")
    return WindowedSequence(int(doc.get("offset", 0)), _values(doc["values"], exact))


def read_weight(path: str, exact: bool = False) -> WeightSequence:
    return WeightSequence(read_sequence(path, exact))


def read_system(path: str, exact: bool | None = None) -> FinitePermutationSystem:
    doc = read_json(path)
    if not isinstance(doc, dict) or "masses" not in doc or "perm" not in doc:
        raise ValueError(f"{path}: expected an object with 'masses' and 'perm'")
    raw = doc["masses"]
    exact = any(isinstance(m, str) for m in raw) if exact is None else exact
    masses = tuple(to_fraction(m) for m in raw) if exact else tuple(float(m) for m in raw)
    return FinitePermutationSystem(masses, tuple(int(p) for p in doc["perm"]))


def read_atom_function(path: str, exact: bool = False) -> AtomFunction:
    doc = read_json(path)
    raw = doc["values"] if isinstance(doc, dict) else doc
    return AtomFunction(_values(raw, exact))


def _num(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else int(v)
    return v


def sequence_to_json(a: WindowedSequence) -> dict:
    return {"offset": a.offset, "values": [_num(v) for v in a.values]}


def system_to_json(sys: FinitePermutationSystem) -> dict:
    return {"masses": [_num(m) for m in sys.masses], "perm": list(sys.perm)}
