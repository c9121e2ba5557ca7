from fractions import Fraction as F

import pytest

from ergomax.core import WindowedSequence
from ergomax.ergodic import is_ergodic
from ergomax.generators import (
    SEQUENCE_KINDS,
    WEIGHT_KINDS,
    generate_atom_weight,
    generate_sequence,
    generate_system,
    generate_weight,
    uniforms,
    weight_ap_bound,
)
from ergomax.weights import ap_constant


def test_basic_sequences():
    assert generate_sequence("delta", {"position": 0}) == WindowedSequence.delta(0, 1.0)
    ones = generate_sequence("constant", {"lo": -8, "hi": 8, "c": 1})
    assert ones.values == (1.0,) * 17 and ones.lo == -8


@pytest.mark.parametrize("kind", SEQUENCE_KINDS)
def test_sequences_are_deterministic(kind):
    params = {"lo": -10, "hi": 10, "density": 0.1}
    a = generate_sequence(kind, params, seed=7)
    assert a == generate_sequence(kind, params, seed=7)
    e = generate_sequence(kind, params, seed=7, exact=True)
    assert e.exact and tuple(float(v) for v in e.values) == a.values


def test_uniforms_are_index_keyed():
    wide = uniforms(3, "s", range(-50, 51))
    narrow = uniforms(3, "s", range(-5, 6))
    assert list(wide[45:56]) == list(narrow)
    assert not (uniforms(4, "s", range(5)) == uniforms(3, "s", range(5))).all()
    assert ((wide >= 0) & (wide < 1)).all()


def test_weights_nest_across_windows():
    small = generate_weight("random-bounded-ratio", {"lo": -16, "hi": 16, "rho": 4}, seed=2)
    big = generate_weight("random-bounded-ratio", {"lo": -64, "hi": 64, "rho": 4}, seed=2)
    assert all(small[k] == big[k] for k in small.window)


def test_signed_and_sparse():
    a = generate_sequence("random-dense", {"lo": 0, "hi": 63, "signed": True}, seed=1)
    assert any(v < 0 for v in a.values) and any(v > 0 for v in a.values)
    s = generate_sequence("random-sparse", {"lo": 0, "hi": 199, "density": 0.1}, seed=1)
    assert 0 < sum(1 for v in s.values if v) < 60


def test_adversarial_dyadic_straddles_boundaries():
    a = generate_sequence("adversarial-dyadic", {"lo": -16, "hi": 16, "level": 2, "density": 1.0})
    for j in range(-3, 4):
        assert a[4 * j] == 1 and a[4 * j + 1] == 1


@pytest.mark.parametrize("kind", WEIGHT_KINDS)
def test_weights_positive_and_bounded(kind):
    params = {"lo": -12, "hi": 12, "rho": 4, "alpha": 0.5, "low": 1, "high": 3}
    w = generate_weight(kind, params, seed=3, exact=kind != "power")
    assert all(v > 0 for v in w.base.values)
    bound = weight_ap_bound(kind, params)
    if bound is not None:
        for p in (1, 2):
            assert ap_constant(w.to_float(), p).constant <= bound * (1 + 1e-12)


def test_power_zero_is_constant():
    w = generate_weight("power", {"lo": -9, "hi": 30, "alpha": 0})
    assert set(w.base.values) == {1.0}
    assert ap_constant(w, 2).constant == 1


def test_unknown_kinds():
    with pytest.raises(ValueError):
        generate_sequence("gaussian")
    with pytest.raises(ValueError):
        generate_weight("bumpy")
    with pytest.raises(ValueError):
        generate_system("torus", 5)


def test_systems():
    c5 = generate_system("cycle", 5)
    assert c5.perm == (1, 2, 3, 4, 0) and c5.masses == (F(1, 5),) * 5
    assert not is_ergodic(generate_system("two-cycles", 6))
    s = generate_system("cycle-with-null-atoms", 5)
    assert is_ergodic(s) and s.masses[5:] == (0, 0) and s.perm[5:] == (5, 6)


def test_atom_weight_profile():
    sys = generate_system("cycle", 9)
    w = generate_atom_weight(sys, "power", {"alpha": 2}, exact=True)
    assert [w[x] for x in range(9)] == [1, 4, 9, 16, 25, 25, 16, 9, 4]
    s = generate_system("cycle-with-null-atoms", 5)
    assert generate_atom_weight(s, "constant", {"c": 3}).values == (3.0,) * 5 + (1.0, 1.0)
