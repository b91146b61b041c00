from fractions import Fraction

import pytest

from rkocp.tableau import registry_get
from rkocp.theorems import (
    UnsupportedOrder,
    additional_conditions_hold,
    hypothesis_for,
    implication_violations,
    sdirk_counterexample,
    verify_all,
)


def test_sdirk_counterexample_exact():
    assert sdirk_counterexample() == Fraction(18367, 58800)
    assert sdirk_counterexample() != Fraction(1, 3)


def test_counterexample_on_d1_scheme_is_one_third():
    assert sdirk_counterexample(registry_get("gauss-4")) == Fraction(1, 3)


@pytest.mark.parametrize("name, order, expected", [
    ("stormer-verlet", 2, ("None", True)),
    ("sdirk-4", 4, ("D1", False)),
    ("gauss-4", 4, ("D1", True)),
    ("radau-iia-5", 5, ("B2C2D2", True)),
    ("gauss-6", 6, ("B4C2D2", True)),
])
def test_hypothesis_for(name, order, expected):
    assert hypothesis_for(registry_get(name), order) == expected


@pytest.mark.parametrize("order", [1, 7])
def test_unsupported_order(order):
    with pytest.raises(UnsupportedOrder):
        hypothesis_for(registry_get("gauss-4"), order)


def test_verify_all_rows():
    cases = {c.scheme: c for c in verify_all()}
    assert len(cases) == 14
    assert all(c.consistent for c in cases.values())
    sdirk = cases["sdirk-4"]
    assert (sdirk.hypothesis, sdirk.hypothesis_holds, sdirk.conditions_hold) == ("D1", False, False)
    assert cases["stormer-verlet"].hypothesis == "None"


def test_no_implication_violations():
    assert implication_violations() == []


def test_additional_conditions_at_lower_order():
    # the SDIRK pairing keeps its order-2 control conditions
    assert additional_conditions_hold(registry_get("sdirk-4"), 2)
    assert not additional_conditions_hold(registry_get("sdirk-4"), 3)
