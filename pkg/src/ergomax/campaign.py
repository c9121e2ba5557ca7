"""Verification campaigns: build a corpus from a config, run every checker, emit one report.

A campaign is a list of tasks ``(check, instance)``; an instance is a plain
JSON-able description (generator kind, params, seed, lambda index, ...), so
tasks can be shipped to worker processes and the report identifies inputs
without depending on execution order.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from fractions import Fraction

from . import oracles
from .core import WindowedSequence, to_fraction
from .cz import (
    WEAK11_CONSTANT,
    cz_decompose,
    cz_violations,
    strong_pp_check,
    superlevel_window,
    verify_covering_lemma,
    weak11_with_Mw,
    weighted_weak_pp,
)
from .ergodic import (
    converse_probe,
    ergodic_weak_pp,
    verify_transference_identity,
)
from .generators import (
    SEQUENCE_KINDS,
    generate_atom_function,
    generate_atom_weight,
    generate_sequence,
    generate_system,
    generate_weight,
    uniforms,
)
from .maximal_ops import OPERATORS, check_operator_comparison, check_sharp_equivalence, maximal
from .reports import InequalityReport, compare, digest_of, jsonable
from .weights import interval_inequality_sweep

__all__ = [
    "CHECKS",
    "ConfigError",
    "CampaignConfig",
    "DEFAULT_CONFIG",
    "build_tasks",
    "run_task",
    "run_campaign",
    "serialize_report",
    "lambda_grid",
    "load_config",
]

CHECKS = (
    "operator_comparison",
    "oracle",
    "covering",
    "sharp",
    "cz_structure",
    "weak11",
    "interval_ab",
    "weakpp",
    "strongpp",
    "transference",
    "ergodic_weak11",
    "ergodic_strong",
    "converse",
)

# M#|a| <= 2 M#a is the provable pointwise bound; 1 is not (see check_sharp_equivalence)
SHARP_ABS_CONSTANT = 2

# checks whose reports carry a ratio but no frozen constant
OBSERVATIONAL = ("strongpp", "ergodic_strong", "converse")

DEFAULT_CONFIG = {
    "seed": 1,
    "mode": "float",
    "checks": list(CHECKS),
    "sequences": {"kinds": list(SEQUENCE_KINDS), "count": 3, "window": 16},
    "weights": {
        "window": 16,
        "kinds": [
            {"kind": "constant"},
            {"kind": "alternating", "low": 1, "high": 4},
            {"kind": "random-bounded-ratio", "rho": 4},
            {"kind": "power", "alpha": 0.25},
        ],
    },
    "systems": {"kinds": ["cycle", "cycle-with-null-atoms"], "sizes": [5, 9, 16], "count": 2},
    "atom_weights": [
        {"kind": "constant"},
        {"kind": "random-bounded-ratio", "rho": 4},
        {"kind": "power", "alpha": 1.5},
    ],
    "p_grid": [1.5, 2, 3],
    "lambda_points": 8,
    "constants": {},
}


class ConfigError(ValueError):
    """The campaign config cannot be used."""


@dataclass(frozen=True)
class CampaignConfig:
    seed: int = 1
    mode: str = "float"
    checks: tuple = CHECKS
    sequences: dict = field(default_factory=lambda: dict(DEFAULT_CONFIG["sequences"]))
    weights: dict = field(default_factory=lambda: dict(DEFAULT_CONFIG["weights"]))
    systems: dict = field(default_factory=lambda: dict(DEFAULT_CONFIG["systems"]))
    atom_weights: tuple = tuple(DEFAULT_CONFIG["atom_weights"])
    p_grid: tuple = tuple(DEFAULT_CONFIG["p_grid"])
    lambda_points: int = 8
    constants: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw: dict) -> "CampaignConfig":
        if not isinstance(raw, dict):
            raise ConfigError("the config must be a JSON object")
        known = {f for f in cls.__dataclass_fields__}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        merged = {**DEFAULT_CONFIG, **raw}
        try:
            cfg = cls(
                seed=int(merged["seed"]),
                mode=str(merged["mode"]),
                checks=tuple(merged["checks"]),
                sequences={**DEFAULT_CONFIG["sequences"], **merged["sequences"]},
                weights={**DEFAULT_CONFIG["weights"], **merged["weights"]},
                systems={**DEFAULT_CONFIG["systems"], **merged["systems"]},
                atom_weights=tuple(merged["atom_weights"]),
                p_grid=tuple(float(p) for p in merged["p_grid"]),
                lambda_points=int(merged["lambda_points"]),
                constants=dict(merged["constants"]),
            )
        except (TypeError, ValueError, KeyError) as exc:
            raise ConfigError(f"malformed config: {exc}") from exc
        if cfg.mode not in ("float", "exact"):
            raise ConfigError(f"mode must be 'float' or 'exact', got {cfg.mode!r}")
        bad = [c for c in cfg.checks if c not in CHECKS]
        if bad:
            raise ConfigError(f"unknown checks: {', '.join(bad)}")
        if any(p < 1 for p in cfg.p_grid):
            raise ConfigError("every p must be >= 1")
        if cfg.lambda_points < 0:
            raise ConfigError("lambda_points must be >= 0")
        return cfg

    def to_dict(self) -> dict:
        return jsonable(asdict(self))


def load_config(path: str | None) -> CampaignConfig:
    """Read a config file (``None`` gives the default); ``ERGOMAX_SEED`` overrides the seed."""
    raw = {}
    if path is not None:
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
    env = os.environ.get("ERGOMAX_SEED")
    if env is not None:
        try:
            raw = {**raw, "seed": int(env)}
        except ValueError as exc:
            raise ConfigError(f"ERGOMAX_SEED must be an integer, got {env!r}") from exc
    return CampaignConfig.from_dict(raw)


# ---------------------------------------------------------------------------
# corpus
# ---------------------------------------------------------------------------

def _sub_seed(seed: int, *labels) -> int:
    return int(uniforms(seed, ":".join(str(x) for x in labels), [0])[0] * (1 << 31))


def lambda_grid(a: WindowedSequence, points: int):
    """``4 max|a| / 2^i`` for ``i < points``: from empty superlevel sets down to wide ones."""
    top = 4 * max(abs(v) for v in a.values)
    if top == 0:
        return []
    two = Fraction(2) if a.exact else 2.0
    return [top / two ** i for i in range(points)]


def _sequence_specs(cfg: CampaignConfig, signed: bool = False) -> list[dict]:
    sc = cfg.sequences
    h = int(sc["window"]) // 2
    specs = []
    for kind in sc["kinds"]:
        if kind in ("delta", "constant", "step"):
            params = {"position": 0} if kind == "delta" else {"lo": -h, "hi": h - 1}
            specs.append({"kind": kind, "params": params, "seed": 0})
            continue
        for i in range(int(sc["count"])):
            params = {"lo": -h, "hi": h - 1}
            if kind == "random-sparse":
                params["density"] = 0.25
            if kind in ("random-sparse", "random-dense") and signed:
                params["signed"] = True
            specs.append({"kind": kind, "params": params, "seed": _sub_seed(cfg.seed, kind, i, signed)})
    return specs


def _make_sequence(spec: dict, exact: bool) -> WindowedSequence:
    return generate_sequence(spec["kind"], spec["params"], spec["seed"], exact=exact)


def _weight_specs(cfg: CampaignConfig) -> list[dict]:
    wc = cfg.weights
    return [{"kind": k["kind"], "params": {x: v for x, v in k.items() if x != "kind"},
             "seed": _sub_seed(cfg.seed, "weight", i)} for i, k in enumerate(wc["kinds"])]


def _make_weight(spec: dict, lo: int, hi: int, exact: bool):
    return generate_weight(spec["kind"], {**spec["params"], "lo": lo, "hi": hi}, spec["seed"], exact=exact)


def _system_specs(cfg: CampaignConfig) -> list[dict]:
    sc = cfg.systems
    return [{"kind": k, "n": int(n)} for k in sc["kinds"] for n in sc["sizes"]]


def build_tasks(cfg: CampaignConfig) -> list[tuple[str, dict]]:
    """Every ``(check, instance)`` pair the config asks for, in a fixed order."""
    tasks = []
    seqs = _sequence_specs(cfg)
    signed = _sequence_specs(cfg, signed=True)
    weights = _weight_specs(cfg)
    systems = _system_specs(cfg)
    count = int(cfg.systems.get("count", 1))
    lam_idx = list(range(cfg.lambda_points))
    for check in cfg.checks:
        if check in ("operator_comparison", "oracle"):
            tasks += [(check, {"sequence": s}) for s in seqs + [s for s in signed if s not in seqs]]
        elif check == "sharp":
            tasks += [(check, {"sequence": s}) for s in signed]
        elif check in ("covering", "cz_structure"):
            tasks += [(check, {"sequence": s, "lambda_index": i}) for s in seqs for i in lam_idx]
        elif check == "weak11":
            tasks += [(check, {"sequence": s, "weight": w, "lambda_index": i})
                      for s in seqs for w in weights for i in lam_idx]
        elif check == "interval_ab":
            tasks += [(check, {"weight": w, "p": p}) for w in weights for p in cfg.p_grid]
        elif check == "weakpp":
            tasks += [(check, {"sequence": s, "weight": w, "p": p, "lambda_index": i})
                      for s in seqs for w in weights for p in cfg.p_grid for i in lam_idx]
        elif check == "strongpp":
            tasks += [(check, {"sequence": s, "weight": w, "p": p})
                      for s in seqs for w in weights for p in cfg.p_grid if p > 1]
        elif check == "transference":
            for sys in systems:
                for i in range(count):
                    tasks.append((check, {"system": sys, "seed": _sub_seed(cfg.seed, "transfer", sys["kind"], sys["n"], i)}))
        elif check in ("ergodic_weak11", "ergodic_strong"):
            for sys in systems:
                for w in cfg.atom_weights:
                    for i in range(count):
                        inst = {"system": sys, "weight": dict(w),
                                "seed": _sub_seed(cfg.seed, check, sys["kind"], sys["n"], i)}
                        if check == "ergodic_weak11":
                            tasks += [(check, {**inst, "lambda_index": j}) for j in lam_idx]
                        else:
                            tasks.append((check, inst))
        elif check == "converse":
            for sys in systems:
                if sys["n"] >= 5:
                    tasks += [(check, {"system": sys, "weight": dict(w)}) for w in cfg.atom_weights]
    return tasks


# ---------------------------------------------------------------------------
# running one task
# ---------------------------------------------------------------------------

def _oracle_report(a: WindowedSequence) -> InequalityReport:
    """Largest relative gap between the fast operators and direct summation."""
    worst, where = 0 * a.zero, None
    for op in OPERATORS:
        # the sharp oracle is cubic per point, so it only visits the stored window
        ev = a.window if op == "sharp" else a.window.pad(len(a) // 2 + 1)
        fast = maximal(a, op, eval_window=ev)
        for m in ev:
            if op == "sharp":
                rng = fast.search_range
                slow = oracles.sharp_at(a, m, rng.lo, rng.hi)
            else:
                slow = oracles.operator_at(a, op, m)
            gap = abs(fast[m] - slow) / max(abs(slow), 1)
            if gap > worst:
                worst, where = gap, {"operator": op, "m": m}
    rhs = a.zero if a.exact else 1e-12
    return compare("oracle", worst, rhs, 1, digest=digest_of(a), witness=where, exact=a.exact)


def _lam(a: WindowedSequence, inst: dict, points: int):
    grid = lambda_grid(a, points)
    return grid[inst["lambda_index"]] if inst["lambda_index"] < len(grid) else None


def run_task(task: tuple, mode: str = "float", constants: dict | None = None,
             lambda_points: int = 8) -> dict | None:
    """Run one ``(check, instance)`` pair; ``None`` when the instance is vacuous (e.g. ``a = 0``)."""
    check, inst = task
    constants = constants or {}
    exact = mode == "exact"
    rep = None
    if "sequence" in inst:
        a = _make_sequence(inst["sequence"], exact)
        if a.is_zero() and check not in ("operator_comparison", "oracle", "sharp"):
            return None
    if check == "operator_comparison":
        rep = check_operator_comparison(a)
    elif check == "oracle":
        rep = _oracle_report(a)
    elif check == "sharp":
        rep = check_sharp_equivalence(a, abs_constant=constants.get("sharp_abs", SHARP_ABS_CONSTANT))
    elif check in ("covering", "cz_structure"):
        lam = _lam(a, inst, lambda_points)
        if lam is None:
            return None
        a = a.abs()
        if check == "covering":
            rep = verify_covering_lemma(a, lam)
        else:
            problems = cz_violations(a, cz_decompose(a, lam))
            rep = compare("cz_structure", len(problems), 0, 1, digest=digest_of(a, lam),
                          witness=problems[:3], exact=True)
    elif check in ("weak11", "weakpp"):
        lam = _lam(a, inst, lambda_points)
        if lam is None:
            return None
        need = superlevel_window(a, lam, "uncentered")
        need = a.window if need is None else need.hull(a.window)
        w = _make_weight(inst["weight"], need.lo, need.hi, exact)
        if check == "weak11":
            rep = weak11_with_Mw(a, w, lam, constant=constants.get("weak11", WEAK11_CONSTANT))
        else:
            rep = weighted_weak_pp(a, w, inst["p"], lam)
    elif check == "interval_ab":
        h = int(inst.get("window", 16)) // 2
        rep = interval_inequality_sweep(_make_weight(inst["weight"], -h, h - 1, exact), inst["p"])
    elif check == "strongpp":
        w = _make_weight(inst["weight"], a.lo - 2 * len(a), a.hi + 2 * len(a), exact)
        rep = strong_pp_check(a, w, inst["p"])
    elif check == "transference":
        rep = _transfer_report(inst)
    elif check in ("ergodic_weak11", "ergodic_strong"):
        sys = generate_system(inst["system"]["kind"], inst["system"]["n"], exact=exact)
        f = generate_atom_function(sys.n, inst["seed"], density=0.5, exact=exact)
        if not any(f.values):
            return None
        wspec = inst["weight"]
        w = generate_atom_weight(sys, wspec["kind"], {k: v for k, v in wspec.items() if k != "kind"},
                                 inst["seed"], exact=exact)
        if check == "ergodic_weak11":
            top = 4 * max(abs(v) for v in f.values)
            if inst["lambda_index"] >= lambda_points:
                return None
            lam = top / (Fraction(2) if exact else 2.0) ** inst["lambda_index"]
            rep = ergodic_weak_pp(sys, f, w, 1, lam,
                                  constant=constants.get("ergodic_weak11", WEAK11_CONSTANT))
        else:
            rep = ergodic_weak_pp(sys, f, w, 2, 1)
    elif check == "converse":
        sys = generate_system(inst["system"]["kind"], inst["system"]["n"], exact=False)
        cyc = max(len(c) for c in sys.cycles)
        wspec = inst["weight"]
        w = generate_atom_weight(sys, wspec["kind"], {k: v for k, v in wspec.items() if k != "kind"})
        probe = converse_probe(sys, w, 2, max(1, (cyc - 1) // 4), trials=4)
        rep = compare("converse", probe.operator_ratio, probe.ap_constant, None,
                      digest=digest_of(sys, w), details={"A": probe.ap_constant, "B": probe.operator_ratio})
    if rep is None:
        raise ValueError(f"unknown check {check!r}")
    out = rep.to_dict()
    out["check"] = check
    out["instance"] = jsonable(inst)
    return out


def _transfer_report(inst: dict) -> InequalityReport:
    """One random ``(f, x, L, J)`` on the given system, in exact arithmetic."""
    spec = inst["system"]
    sys = generate_system(spec["kind"], spec["n"], exact=True)
    seed = inst["seed"]
    u = uniforms(seed, "transfer", range(3))
    c = max(len(cyc) for cyc in sys.cycles)
    J = 1 + int(u[0] * min(c, 8))
    L = J * 20  # (2(L+J)+1)/(2L+1) <= 1.1
    x = int(u[1] * c)
    f = generate_atom_function(sys.n, seed, density=0.6, exact=True)
    res = verify_transference_identity(sys, f, x, L, J)
    return compare("transference", 0 if res.holds else 1, 0, 1, digest=digest_of(sys, f, x, L, J),
                   witness=None if res.holds else {"m": res.witness_m, "ergodic": res.ergodic_value,
                                                   "sequence": res.sequence_value},
                   exact=True, details={"x": x, "L": L, "J": J})


def _run_packed(args):
    task, mode, constants, points = args
    return run_task(task, mode, constants, points)


# ---------------------------------------------------------------------------
# campaign
# ---------------------------------------------------------------------------

def _sort_key(rep: dict):
    return (rep["check"], json.dumps(rep["instance"], sort_keys=True))


def run_campaign(cfg: CampaignConfig | dict, jobs: int = 1) -> dict:
    """``{"summary": ..., "reports": [...]}``; reports sorted by check and instance."""
    if isinstance(cfg, dict):
        cfg = CampaignConfig.from_dict(cfg)
    tasks = build_tasks(cfg)
    packed = [(t, cfg.mode, cfg.constants, cfg.lambda_points) for t in tasks]
    if jobs > 1 and len(packed) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_packed, packed))
    else:
        results = [_run_packed(p) for p in packed]
    reports = sorted((r for r in results if r is not None), key=_sort_key)
    checks = {}
    for r in reports:
        s = checks.setdefault(r["check"], {"count": 0, "failures": 0, "max_ratio": 0.0,
                                           "observational": r["check"] in OBSERVATIONAL})
        s["count"] += 1
        s["failures"] += 0 if r["passed"] else 1
        ratio = r["ratio"]
        ratio = float("inf") if ratio == "inf" else float(ratio)
        s["max_ratio"] = max(s["max_ratio"], ratio)
    failures = sum(s["failures"] for s in checks.values())
    summary = {
        "seed": cfg.seed,
        "mode": cfg.mode,
        "total": len(reports),
        "failures": failures,
        "passed": failures == 0,
        "checks": jsonable(checks),
    }
    return {"summary": summary, "reports": reports}


def serialize_report(report: dict) -> str:
    return json.dumps(jsonable(report), sort_keys=True, indent=1) + "\n"
