"""The acceptance suite as plain functions, shared by the CLI and the tests.

Each check returns a ``CheckResult``; ``run_all`` runs them in order.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import analytic, conditions, harness, ocp, tableau, theorems

__all__ = ["CheckResult", "CHECKS", "run_all", "random_rational_tableau"]


@dataclass(frozen=True)
class CheckResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.number:>2}. {self.title}: {self.detail} ({self.seconds:.3f}s)"


def _timed(fn: Callable[[], tuple[bool, str]]):
    t0 = time.perf_counter()
    ok, detail = fn()
    return ok, detail, time.perf_counter() - t0


def sdirk_value() -> tuple[bool, str]:
    t = tableau.registry_get("sdirk-4")
    theorems.sdirk_counterexample(t)  # warm caches of float views etc.
    best = float("inf")
    for _ in range(5):
        t0 = time.perf_counter()
        value = theorems.sdirk_counterexample(t)
        best = min(best, time.perf_counter() - t0)
    ok = value == Fraction(18367, 58800) and best < 1e-3
    return ok, f"sum d_i^2/b_i = {value}, {best * 1e6:.0f} us"


_PAIRS = [
    ("gauss-4", "gauss-4"),
    ("gauss-6", "gauss-6"),
    ("lobatto-iiia-4", "lobatto-iiib-4"),
    ("lobatto-iiib-4", "lobatto-iiia-4"),
    ("lobatto-iiia-6", "lobatto-iiib-6"),
    ("lobatto-iiib-6", "lobatto-iiia-6"),
]


def adjoint_pairings() -> tuple[bool, str]:
    bad = [f"{a}->{b}" for a, b in _PAIRS
           if tableau.adjoint_tableau(tableau.registry_get(a)) != tableau.registry_get(b)]
    return not bad, "all 6 pairings exact" if not bad else "mismatch: " + ", ".join(bad)


def random_rational_tableau(rng: random.Random, max_stages: int = 5) -> tableau.Tableau:
    s = rng.randint(1, max_stages)

    def frac(nonzero=False):
        while True:
            x = Fraction(rng.randint(-30, 30), rng.randint(1, 24))
            if x or not nonzero:
                return x

    A = [[frac() for _ in range(s)] for _ in range(s)]
    b = [frac(nonzero=True) for _ in range(s)]
    return tableau.Tableau(A, b, name="random")


def involution(seed: int = 20240607, n_random: int = 100) -> tuple[bool, str]:
    rng = random.Random(seed)
    cases = list(tableau.registry().values()) + [random_rational_tableau(rng) for _ in range(n_random)]
    bad = [t.name for t in cases if tableau.adjoint_tableau(tableau.adjoint_tableau(t)) != t]
    return not bad, f"{len(cases)} tableaux" if not bad else "failed: " + ", ".join(bad)


EXPECTED_CLASSIFICATION = {
    "stormer-verlet": (2, 2),
    "radau-ia-3": (3, 3), "radau-iia-3": (3, 3),
    "gauss-4": (4, 4), "lobatto-iiia-4": (4, 4), "lobatto-iiib-4": (4, 4), "lobatto-iiic-4": (4, 4),
    "sdirk-4": (4, 2),
    "radau-ia-5": (5, 5), "radau-iia-5": (5, 5),
    "gauss-6": (6, 6), "lobatto-iiia-6": (6, 6), "lobatto-iiib-6": (6, 6), "lobatto-iiic-6": (6, 6),
}


def classification() -> tuple[bool, str]:
    t0 = time.perf_counter()
    bad = []
    for name, want in EXPECTED_CLASSIFICATION.items():
        r = conditions.classify(tableau.registry_get(name))
        if (r.state_order, r.control_order) != want:
            bad.append(f"{name}=({r.state_order},{r.control_order})")
    dt = time.perf_counter() - t0
    ok = not bad and dt < 5.0
    return ok, f"14 schemes in {dt:.2f}s" if not bad else "mismatch: " + ", ".join(bad)


def implications() -> tuple[bool, str]:
    bad = theorems.implication_violations()
    return not bad, "0 violations" if not bad else f"{len(bad)} violations: {bad[0].row()}"


def simplifying() -> tuple[bool, str]:
    exact = {"gauss-4": (4, 2, 2), "gauss-6": (6, 3, 3), "radau-iia-5": (5, 3, 2)}
    got = {n: conditions.check_simplifying(tableau.registry_get(n)) for n in [*exact, "lobatto-iiic-6"]}
    ok = all(got[n] == v for n, v in exact.items())
    p, eta, zeta = got["lobatto-iiic-6"]
    ok = ok and p == 6 and eta >= 2 and zeta >= 2
    return ok, ", ".join(f"{n}={v}" for n, v in got.items())


def convergence() -> tuple[bool, str]:
    t0 = time.perf_counter()
    rows, est = harness.run_many(tableau.SCHEME_NAMES)
    dt = time.perf_counter() - t0
    bad, worst = [], []
    for name, e in est.items():
        if name == "sdirk-4":
            lo, hi = 1.7, 2.7
        else:
            q = conditions.classify(tableau.registry_get(name)).control_order
            lo, hi = q - 0.3, q + 0.7
        for label, m in (("y", e.median_y), ("p", e.median_p)):
            if not lo <= m <= hi:
                bad.append(f"{name}.{label}={m:.2f}")
        worst.append(min(e.median_y - lo, e.median_p - lo, hi - e.median_y, hi - e.median_p))
    ok = not bad and dt < 60.0
    detail = f"14 schemes in {dt:.1f}s, min margin {min(worst):.2f}" if not bad else ", ".join(bad)
    return ok, detail


LAMBDAS = (0.0, 1.0, np.pi ** 2, 4 * np.pi ** 2)
NUS = (1e-1, 1e-3, 1e-6)
DATA = ((1.0, 1.0), (0.7, -1.3))


def oracle_integrity() -> tuple[bool, str]:
    times = (0.0, 0.25, 0.5, 0.75, 1.0)
    res = bnd = shot = 0.0
    for lam, nu, (a, b) in itertools.product(LAMBDAS, NUS, DATA):
        sol = analytic.mode_coefficients(lam, a, b, nu)
        res = max(res, analytic.residual_check(sol))
        bnd = max(bnd, *analytic.boundary_defects(sol))
        ys, ps = analytic.shoot(lam, a, b, nu, times)
        yc = np.array([analytic.exact_fields([sol], t)[0][0] for t in times])
        pc = np.array([analytic.exact_fields([sol], t)[1][0] for t in times])
        scale = max(np.abs(yc).max(), np.abs(pc).max())
        shot = max(shot, max(np.abs(ys - yc).max(), np.abs(ps - pc).max()) / scale)
    ok = res <= 1e-10 and bnd <= 1e-12 and shot <= 1e-10
    return ok, f"residual {res:.1e}, boundary {bnd:.1e}, shooting {shot:.1e}"


def registry_valid() -> tuple[bool, str]:
    defects = conditions.validate_registry()
    n6 = sum(1 for c in conditions.CONDITIONS if c.order == 6)
    if defects:
        return False, f"{len(defects)} defects, first {defects[0]}"
    return True, f"no defects ({len(conditions.CONDITIONS)} conditions, {n6} of order six)"


def discrete_optimality(n_dirs: int = 20, seed: int = 7, eps: float = 1e-3) -> tuple[bool, str]:
    scheme = tableau.registry_get("gauss-4")
    problem = ocp.scalar_problem(1e-3)
    N = 16
    sol = ocp.solve(problem, scheme, N)
    U = sol.u_stages
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_dirs):
        d = rng.standard_normal(U.shape)
        d /= np.linalg.norm(d)
        jp = ocp.discrete_objective(problem, scheme, N, U + eps * d)
        jm = ocp.discrete_objective(problem, scheme, N, U - eps * d)
        worst = max(worst, abs(jp - jm) / (2 * eps))
    return worst <= 1e-8, f"max |dJ| = {worst:.1e} over {n_dirs} directions"


CHECKS: list[tuple[int, str, Callable[[], tuple[bool, str]]]] = [
    (1, "SDIRK counterexample", sdirk_value),
    (2, "adjoint pairings", adjoint_pairings),
    (3, "adjoint involution", involution),
    (4, "order classification", classification),
    (5, "theorem implications", implications),
    (6, "simplifying assumptions", simplifying),
    (7, "convergence rates", convergence),
    (8, "analytic oracle", oracle_integrity),
    (9, "registry self-validation", registry_valid),
    (10, "discrete optimality", discrete_optimality),
]


def run_check(number: int) -> CheckResult:
    for n, title, fn in CHECKS:
        if n == number:
            ok, detail, dt = _timed(fn)
            return CheckResult(n, title, ok, detail, dt)
    raise KeyError(number)


def run_all() -> list[CheckResult]:
    return [run_check(n) for n, _, _ in CHECKS]
