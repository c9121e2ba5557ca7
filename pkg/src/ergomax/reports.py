"""Inequality reports and the tolerance policy shared by every checker."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

# relative slack for float-mode inequalities; exact mode compares with no slack
REL_TOL = 1e-9


def _is_exact(*xs) -> bool:
    return all(isinstance(x, (Fraction, int)) for x in xs if x is not None)


@dataclass(frozen=True)
class InequalityReport:
    """Outcome of checking ``lhs <= constant * rhs`` on one instance.

    ``constant`` may be ``None`` for observational checks (strong-type ratios),
    in which case ``ratio`` is ``lhs / rhs`` and the report always passes.
    """

    checker: str
    lhs: Any
    rhs: Any
    constant: Any
    ratio: Any
    passed: bool
    digest: str = ""
    witness: Any = None
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "checker": self.checker,
            "digest": self.digest,
            "lhs": jsonable(self.lhs),
            "rhs": jsonable(self.rhs),
            "constant": jsonable(self.constant),
            "ratio": jsonable(self.ratio),
            "passed": self.passed,
            "witness": jsonable(self.witness),
            "details": jsonable(self.details),
        }


def jsonable(x):
    if isinstance(x, Fraction):
        return float(x) if x.denominator != 1 else int(x)
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = sorted(x) if isinstance(x, (set, frozenset)) else x
        return [jsonable(v) for v in items]
    if hasattr(x, "lo") and hasattr(x, "hi"):
        return [x.lo, x.hi]
    if hasattr(x, "item"):
        return x.item()
    return x


def _canon(p):
    if hasattr(p, "offset") and hasattr(p, "values"):
        return {"offset": p.offset, "values": [str(v) for v in p.values]}
    if hasattr(p, "base"):
        return _canon(p.base)
    if hasattr(p, "perm") and hasattr(p, "masses"):
        return {"perm": list(p.perm), "masses": [str(v) for v in p.masses]}
    if isinstance(p, (list, tuple)):
        return [_canon(v) for v in p]
    if isinstance(p, (Fraction, float)):
        return str(p)
    return jsonable(p)


def digest_of(*parts) -> str:
    """Short stable hash identifying a checker's inputs."""
    blob = json.dumps([_canon(p) for p in parts], sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def compare(checker: str, lhs, rhs, constant, *, digest: str = "", witness=None,
            details: dict | None = None, exact: bool | None = None) -> InequalityReport:
    """Build a report for ``lhs <= constant * rhs`` under the tolerance policy."""
    details = dict(details or {})
    if constant is None:
        ratio = _safe_ratio(lhs, rhs)
        return InequalityReport(checker, lhs, rhs, None, ratio, True, digest, witness, details)
    if exact is None:
        exact = _is_exact(lhs, rhs, constant)
    bound = constant * rhs
    if exact:
        passed = lhs <= bound
    else:
        passed = float(lhs) <= float(bound) * (1 + REL_TOL)
    ratio = _safe_ratio(lhs, bound)
    return InequalityReport(checker, lhs, rhs, constant, ratio, bool(passed), digest,
                            None if passed else witness, details)


def _safe_ratio(num, den):
    if den == 0:
        return 0 if num == 0 else math.inf
    if isinstance(num, Fraction) and isinstance(den, (Fraction, int)):
        return num / den
    return float(num) / float(den)
