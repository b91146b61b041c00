"""Extensional checks of the sufficiency results for the additional conditions.

The results tie simplifying assumptions to the optimal-control conditions:

* order 3 or 4 and D(1)            =>  additional conditions of that order hold
* order 5 and B(2), C(2), D(2)     =>  additional order-5 conditions hold
* order 6 and B(4), C(2), D(2)     =>  additional order-6 conditions hold

Here they are checked on concrete tableaux: whenever a hypothesis holds the
additional conditions are evaluated exactly and must pass.  The converse is
never asserted.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .conditions import CONDITIONS, Kind, check_simplifying, classify, eval_condition
from .exact import QuadNum
from .tableau import Tableau, compute_d, registry, registry_get

__all__ = [
    "UnsupportedOrder",
    "TheoremCase",
    "HYPOTHESES",
    "hypothesis_for",
    "additional_conditions_hold",
    "verify_all",
    "implication_violations",
    "sdirk_counterexample",
]


class UnsupportedOrder(ValueError):
    pass


# name -> minimal (p, eta, zeta)
HYPOTHESES = {
    "None": (0, 0, 0),
    "D1": (0, 0, 1),
    "B2C2D2": (2, 2, 2),
    "B4C2D2": (4, 2, 2),
}


@dataclass(frozen=True)
class TheoremCase:
    scheme: str
    order: int
    hypothesis: str
    hypothesis_holds: bool
    conditions_hold: bool

    @property
    def consistent(self) -> bool:
        return self.conditions_hold or not self.hypothesis_holds

    def row(self) -> str:
        return (f"{self.scheme:<16} {self.order:>5}  {self.hypothesis:<7} "
                f"{str(self.hypothesis_holds):<16} {self.conditions_hold}")


def _hypothesis_name(order: int) -> str:
    if order < 2 or order > 6:
        raise UnsupportedOrder(f"no sufficiency result for order {order}")
    if order == 2:
        return "None"
    if order <= 4:
        return "D1"
    return "B2C2D2" if order == 5 else "B4C2D2"


def hypothesis_for(t: Tableau, order: int, simplifying=None) -> tuple[str, bool]:
    """Return the hypothesis name for ``order`` and whether ``t`` satisfies it."""
    name = _hypothesis_name(order)
    need = HYPOTHESES[name]
    have = check_simplifying(t) if simplifying is None else simplifying
    return name, all(h >= n for h, n in zip(have, need))


def additional_conditions_hold(t: Tableau, order: int) -> bool:
    return all(
        eval_condition(t, c)[1]
        for c in CONDITIONS
        if c.kind is Kind.ADDITIONAL and c.order <= order
    )


def verify_all(schemes: dict[str, Tableau] | None = None) -> list[TheoremCase]:
    """One case per scheme at its nominal order."""
    schemes = registry() if schemes is None else schemes
    cases = []
    for name, t in schemes.items():
        k = t.nominal_order
        hyp, holds = hypothesis_for(t, k)
        cases.append(TheoremCase(name, k, hyp, holds, additional_conditions_hold(t, k)))
    return cases


def implication_violations(schemes: dict[str, Tableau] | None = None) -> list[TheoremCase]:
    """Cases ``(scheme, k)`` with ``2 <= k <= state order`` where the hypothesis holds but conditions fail."""
    schemes = registry() if schemes is None else schemes
    bad = []
    for name, t in schemes.items():
        simp = check_simplifying(t)
        report = classify(t)
        for k in range(2, report.state_order + 1):
            hyp, holds = hypothesis_for(t, k, simp)
            if holds:
                ok = report.control_order >= k
                if not ok:
                    bad.append(TheoremCase(name, k, hyp, holds, ok))
    return bad


def sdirk_counterexample(t: Tableau | None = None) -> Fraction:
    """``sum_i d_i**2 / b_i`` computed from the tableau (SDIRK by default)."""
    t = registry_get("sdirk-4") if t is None else t
    d = compute_d(t)
    value = sum((dj * dj / bj for dj, bj in zip(d, t.b)), QuadNum(0))
    if not value.is_rational():
        raise ValueError(f"{t.name}: sum d_i^2/b_i = {value} is irrational")
    return value.a
