from fractions import Fraction
import itertools

import pytest

from rkocp.conditions import (
    CONDITIONS,
    Kind,
    SumExpr,
    check_simplifying,
    classify,
    conditions_by_id,
    eval_condition,
    export_conditions,
    validate_registry,
)
from rkocp.exact import QuadNum
from rkocp.tableau import SCHEME_NAMES, Tableau, ZeroWeight, compute_d, registry_get


def brute_force(t: Tableau, expr: SumExpr):
    """Sum over every index tuple; deliberately naive."""
    vals = {"a": t.A, "b": t.b, "c": t.c, "d": compute_d(t)}
    total = QuadNum(0)
    for combo in itertools.product(range(t.s), repeat=len(expr.indices)):
        env = dict(zip(expr.indices, combo))

        def atom(at):
            v = vals[at.sym]
            x = v[env[at.idx[0]]][env[at.idx[1]]] if at.sym == "a" else v[env[at.idx[0]]]
            return x ** at.power

        term = QuadNum(1)
        for at in expr.numerator:
            term = term * atom(at)
        for at in expr.denominator:
            term = term / atom(at)
        total = total + term
    return total


def test_counts():
    assert len(CONDITIONS) == 134
    assert sum(c.order == 6 for c in CONDITIONS) == 93
    ids = [c.id for c in CONDITIONS]
    assert len(set(ids)) == len(ids)


def test_parse_expression():
    e = SumExpr.parse("b_i a_lk a_il c_i d_k / b_k")
    assert e.indices == ("i", "l", "k")
    assert str(e) == "b_i a_lk a_il c_i d_k / b_k"


@pytest.mark.parametrize("text", ["b_i a_ij / c_j", "b_i a_ij", "b_i b_j b_k b_l b_m"])
def test_parse_rejects(text):
    with pytest.raises(ValueError):
        e = SumExpr.parse(text)
        SumExpr(("i",), e.numerator, e.denominator)


@pytest.mark.parametrize("name", ["stormer-verlet", "radau-iia-3", "gauss-4", "lobatto-iiic-4", "gauss-6", "lobatto-iiia-6"])
def test_contraction_matches_brute_force(name):
    t = registry_get(name)
    for c in CONDITIONS:
        value, _ = eval_condition(t, c)
        assert value == brute_force(t, c.expr), c.id


def test_contraction_matches_brute_force_sdirk_subset():
    t = registry_get("sdirk-4")
    for c in CONDITIONS[::7]:
        assert eval_condition(t, c)[0] == brute_force(t, c.expr), c.id


@pytest.mark.parametrize("name", SCHEME_NAMES)
def test_float_agrees_with_exact(name):
    t = registry_get(name)
    for c in CONDITIONS:
        ve, oe = eval_condition(t, c, "exact")
        vf, of = eval_condition(t, c, "float", tol=1e-10)
        assert vf == pytest.approx(float(ve), abs=1e-12, rel=1e-12)
        assert oe == of, c.id


def test_sdirk_a3_value():
    a3 = conditions_by_id()["A3"]
    value, ok = eval_condition(registry_get("sdirk-4"), a3)
    assert value == Fraction(18367, 58800)
    assert not ok


CLASSIFICATION = {
    "stormer-verlet": (2, 2), "radau-ia-3": (3, 3), "radau-iia-3": (3, 3),
    "gauss-4": (4, 4), "sdirk-4": (4, 2), "lobatto-iiia-4": (4, 4), "lobatto-iiib-4": (4, 4),
    "lobatto-iiic-4": (4, 4), "radau-ia-5": (5, 5), "radau-iia-5": (5, 5), "gauss-6": (6, 6),
    "lobatto-iiia-6": (6, 6), "lobatto-iiib-6": (6, 6), "lobatto-iiic-6": (6, 6),
}


@pytest.mark.parametrize("name", SCHEME_NAMES)
def test_classification(name):
    r = classify(registry_get(name))
    assert (r.state_order, r.control_order) == CLASSIFICATION[name]


def test_classification_float_mode():
    r = classify(registry_get("sdirk-4"), mode="float")
    assert (r.state_order, r.control_order) == (4, 2)


def test_sdirk_report_lists_a3():
    r = classify(registry_get("sdirk-4"))
    assert ("A3", Fraction(18367, 58800), Fraction(1, 3)) in [(i, v, rhs) for i, v, rhs in r.failures]


SIMPLIFYING = {
    "stormer-verlet": (2, 2, 0), "radau-ia-3": (3, 1, 2), "radau-iia-3": (3, 2, 1),
    "gauss-4": (4, 2, 2), "sdirk-4": (4, 1, 0), "lobatto-iiia-4": (4, 3, 1),
    "lobatto-iiib-4": (4, 1, 3), "lobatto-iiic-4": (4, 2, 2), "radau-ia-5": (5, 2, 3),
    "radau-iia-5": (5, 3, 2), "gauss-6": (6, 3, 3), "lobatto-iiia-6": (6, 4, 2),
    "lobatto-iiib-6": (6, 2, 4), "lobatto-iiic-6": (6, 3, 3),
}


@pytest.mark.parametrize("name", SCHEME_NAMES)
def test_simplifying(name):
    assert check_simplifying(registry_get(name)) == SIMPLIFYING[name]


def test_simplifying_float_agrees():
    for name in SCHEME_NAMES:
        assert check_simplifying(registry_get(name), mode="float") == SIMPLIFYING[name]


def test_registry_validates():
    assert validate_registry() == []


def test_validate_registry_catches_corruption():
    from dataclasses import replace

    a3 = conditions_by_id()["A3"]
    broken = [replace(a3, rhs=Fraction(1, 4)) if c.id == "A3" else c for c in CONDITIONS]
    defects = validate_registry(broken, {"gauss-4": registry_get("gauss-4")})
    assert [d.condition for d in defects] == ["A3"]


def test_zero_weight_in_denominator():
    t = Tableau([[0, 0], [1, 0]], [1, 0])
    a3 = conditions_by_id()["A3"]
    with pytest.raises(ZeroWeight):
        eval_condition(t, a3)


def test_kinds_and_export():
    kinds = {c.kind for c in CONDITIONS}
    assert kinds == {Kind.STATE, Kind.ADDITIONAL}
    text = export_conditions()
    assert text.count("\n") == len(CONDITIONS) + 1
