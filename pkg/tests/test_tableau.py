from fractions import Fraction
import random

import numpy as np
import pytest

from rkocp.acceptance import random_rational_tableau
from rkocp.exact import QuadNum
from rkocp.tableau import (
    SCHEME_NAMES,
    InvalidTableau,
    Tableau,
    UnknownScheme,
    ZeroWeight,
    adjoint_tableau,
    compute_d,
    format_tableau,
    parse_tableau,
    registry,
    registry_get,
    validate,
)

S3 = QuadNum.sqrt(3)


def test_registry_has_fourteen_valid_schemes():
    assert len(SCHEME_NAMES) == 14
    for name, t in registry().items():
        assert t.name == name
        assert validate(t) == []


def test_unknown_scheme():
    with pytest.raises(UnknownScheme):
        registry_get("rk4")


def test_compute_d_examples():
    assert compute_d(registry_get("gauss-4")) == ((3 + S3) / 12, (3 - S3) / 12)
    assert compute_d(registry_get("radau-iia-3")) == (Fraction(1, 2), 0)
    assert compute_d(registry_get("stormer-verlet")) == (Fraction(1, 4), Fraction(1, 4))


@pytest.mark.parametrize("name", SCHEME_NAMES)
def test_d_equals_b_one_minus_c_where_d1_holds(name):
    t = registry_get(name)
    holds = compute_d(t) == tuple(bi * (1 - ci) for bi, ci in zip(t.b, t.c))
    # stormer-verlet and the SDIRK scheme are the two schemes without D(1)
    assert holds == (name not in ("stormer-verlet", "sdirk-4"))


@pytest.mark.parametrize("a, b", [
    ("gauss-4", "gauss-4"), ("gauss-6", "gauss-6"),
    ("lobatto-iiia-4", "lobatto-iiib-4"), ("lobatto-iiib-4", "lobatto-iiia-4"),
    ("lobatto-iiia-6", "lobatto-iiib-6"), ("lobatto-iiib-6", "lobatto-iiia-6"),
])
def test_adjoint_pairings(a, b):
    assert adjoint_tableau(registry_get(a)) == registry_get(b)


def test_stormer_verlet_adjoint():
    adj = adjoint_tableau(registry_get("stormer-verlet"))
    half = Fraction(1, 2)
    assert adj.A == ((half, 0), (half, 0))
    assert adj.b == (half, half)


@pytest.mark.parametrize("name", SCHEME_NAMES)
def test_involution_registry(name):
    t = registry_get(name)
    assert adjoint_tableau(adjoint_tableau(t)) == t


def test_involution_random():
    rng = random.Random(1)
    for _ in range(50):
        t = random_rational_tableau(rng)
        assert adjoint_tableau(adjoint_tableau(t)) == t


def test_zero_weight():
    t = Tableau([[0, 0], [1, 0]], [1, 0])
    with pytest.raises(ZeroWeight):
        adjoint_tableau(t)


def test_validate_reports_violations():
    bad = Tableau([[0, 0], [1, 0]], [Fraction(1, 3), Fraction(1, 3)], c=[0, Fraction(1, 2)])
    kinds = sorted(v.kind for v in validate(bad))
    assert kinds == ["RowSumMismatch", "WeightSum"]


def test_shape_check():
    with pytest.raises(InvalidTableau):
        Tableau([[0, 0]], [1, 0])


@pytest.mark.parametrize("name", SCHEME_NAMES)
def test_text_round_trip(name):
    t = registry_get(name)
    assert parse_tableau(format_tableau(t)) == t


def test_parse_rejects_foreign_radicand():
    with pytest.raises(InvalidTableau):
        parse_tableau("1 3\nsqrt5\n1\n0\n")


def test_float_views_match_exact():
    t = registry_get("gauss-4")
    assert np.allclose(t.A_float, [[0.25, 0.25 - np.sqrt(3) / 6], [0.25 + np.sqrt(3) / 6, 0.25]], atol=1e-15)
    assert not t.A_float.flags.writeable
