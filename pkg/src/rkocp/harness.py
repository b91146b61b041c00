"""Convergence experiments against the closed-form solution."""

from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from statistics import median
from typing import Iterable, Sequence

import numpy as np

from .analytic import exact_fields, mode_coefficients
from .ocp import DiscreteSolution, OcpProblem, heat_problem, solve
from .spatial import build_fem, build_modal, m_norm
from .tableau import Tableau, registry_get

__all__ = [
    "FLOOR",
    "BackendSpec",
    "ConvergenceRow",
    "OrderEstimate",
    "error_norms",
    "pairwise_rates",
    "estimate_orders",
    "run_convergence",
    "run_many",
    "emit_csv",
    "read_csv",
    "state_only_convergence",
    "thread_count",
]

FLOOR = 1e-11
CSV_HEADER = ["scheme", "backend", "nu", "N", "tau", "h", "err_y", "err_p"]


@dataclass(frozen=True)
class BackendSpec:
    """Spatial setting of an experiment; FEM couples the cell count to ``N``."""

    kind: str = "modal"
    n_modes: int = 1
    first: int = 1
    degree: int = 1

    def build(self, N: int):
        if self.kind == "modal":
            return build_modal(self.n_modes, self.first)
        if self.kind == "fem":
            return build_fem(self.degree, max(N, 2))
        raise ValueError(f"unknown backend kind {self.kind!r}")

    def describe(self) -> str:
        if self.kind == "modal":
            last = self.first + self.n_modes - 1
            return f"modal[{self.first}]" if self.n_modes == 1 else f"modal[{self.first}..{last}]"
        return f"fem[P{self.degree}]"


@dataclass(frozen=True)
class ConvergenceRow:
    scheme: str
    backend: str
    nu: float
    N: int
    tau: float
    h: float
    err_y: float
    err_p: float


@dataclass(frozen=True)
class OrderEstimate:
    rates_y: list[float]
    rates_p: list[float]
    median_y: float
    median_p: float


def error_norms(solution: DiscreteSolution, problem: OcpProblem) -> tuple[float, float]:
    """Max over time nodes of the M-norm distance to the interpolated exact fields."""
    if problem.exact is None:
        raise ValueError("problem carries no exact solution")
    backend = problem.backend
    err_y = err_p = 0.0
    for i, t in enumerate(solution.times):
        y, p = problem.exact.field(backend, min(float(t), 1.0))
        err_y = max(err_y, m_norm(backend, solution.y_nodes[i] - y))
        err_p = max(err_p, m_norm(backend, solution.p_nodes[i] - p))
    return err_y, err_p


def pairwise_rates(taus: Sequence[float], errs: Sequence[float], floor: float = FLOOR) -> list[float]:
    """Slopes between consecutive runs whose errors both exceed ``floor``."""
    out = []
    for (t0, e0), (t1, e1) in zip(zip(taus, errs), zip(taus[1:], errs[1:])):
        if e0 > floor and e1 > floor:
            out.append(float(np.log(e0 / e1) / np.log(t0 / t1)))
    return out


def estimate_orders(rows: Sequence[ConvergenceRow], floor: float = FLOOR) -> OrderEstimate:
    rows = sorted(rows, key=lambda r: r.N)
    taus = [r.tau for r in rows]
    ry = pairwise_rates(taus, [r.err_y for r in rows], floor)
    rp = pairwise_rates(taus, [r.err_p for r in rows], floor)
    nan = float("nan")
    return OrderEstimate(ry, rp, median(ry) if ry else nan, median(rp) if rp else nan)


def _check_grid(N_list: Sequence[int]):
    if len(N_list) < 3 or any(b <= a for a, b in zip(N_list, N_list[1:])):
        raise ValueError("N_list must be strictly increasing with at least three entries")


def run_convergence(scheme: Tableau | str, spec: BackendSpec = BackendSpec(), nu: float = 1e-3,
                    N_list: Sequence[int] = (10, 20, 40, 80, 160)):
    _check_grid(N_list)
    t = registry_get(scheme) if isinstance(scheme, str) else scheme
    rows = []
    for N in N_list:
        problem = heat_problem(spec.build(N), nu)
        sol = solve(problem, t, N)
        ey, ep = error_norms(sol, problem)
        rows.append(ConvergenceRow(t.name, spec.describe(), nu, N, 1.0 / N, problem.backend.h, ey, ep))
    return rows, estimate_orders(rows)


def thread_count() -> int:
    env = os.environ.get("RK_ADJOINT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def run_many(schemes: Iterable[str], spec: BackendSpec = BackendSpec(), nu: float = 1e-3,
             N_list: Sequence[int] | None = None, threads: int | None = None):
    """Run several schemes; results are returned sorted by scheme name.

    With ``N_list=None`` each scheme uses the default grid for its order.
    """
    names = sorted(schemes)

    def job(name):
        grid = N_list if N_list is not None else default_grid(registry_get(name).nominal_order)
        return run_convergence(name, spec, nu, grid)

    with ThreadPoolExecutor(max_workers=threads or thread_count()) as pool:
        results = list(pool.map(job, names))
    rows = [r for rs, _ in results for r in rs]
    estimates = {n: est for n, (_, est) in zip(names, results)}
    return rows, estimates


def default_grid(order: int) -> tuple[int, ...]:
    return (10, 20, 40, 80, 160) if order <= 4 else (4, 8, 16, 32, 64)


def _rates_path(path: Path) -> Path:
    return path.with_suffix(".rates")


def emit_csv(rows: Sequence[ConvergenceRow], estimates: dict[str, OrderEstimate], path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in rows:
            w.writerow([r.scheme, r.backend, f"{r.nu:.17g}", r.N, f"{r.tau:.17g}", f"{r.h:.17g}",
                        f"{r.err_y:.17g}", f"{r.err_p:.17g}"])
    with _rates_path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["scheme", "field", "median", "rates"])
        for name, est in estimates.items():
            for fld, rates, med in (("y", est.rates_y, est.median_y), ("p", est.rates_p, est.median_p)):
                w.writerow([name, fld, f"{med:.17g}", " ".join(f"{x:.17g}" for x in rates)])
    return path


def read_csv(path) -> list[ConvergenceRow]:
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        return [ConvergenceRow(r["scheme"], r["backend"], float(r["nu"]), int(r["N"]), float(r["tau"]),
                               float(r["h"]), float(r["err_y"]), float(r["err_p"])) for r in reader]


def state_only_convergence(scheme: Tableau | str, lam: float = np.pi ** 2, nu: float = 1e-3,
                           N_list: Sequence[int] = (10, 20, 40, 80, 160)):
    """Classical convergence of ``y' = -lam y + u(t)`` with the exact control as a known source.

    Returns ``(errors, rates)`` for the max nodal state error.
    """
    _check_grid(N_list)
    t = registry_get(scheme) if isinstance(scheme, str) else scheme
    sol = mode_coefficients(lam, 1.0, 1.0, nu)
    a, b, c = t.A_float, t.b_float, t.c_float
    s = t.s

    def source(x):
        return exact_fields([sol], x)[2][0]

    errors = []
    for N in N_list:
        tau = 1.0 / N
        lhs = np.eye(s) + tau * lam * a
        y = 1.0
        err = 0.0
        for k in range(N):
            f = np.array([source(min((k + ci) * tau, 1.0)) for ci in c])
            Y = np.linalg.solve(lhs, y + tau * a @ f)
            y = y + tau * b @ (f - lam * Y)
            err = max(err, abs(y - exact_fields([sol], min((k + 1) * tau, 1.0))[0][0]))
        errors.append(err)
    return errors, pairwise_rates([1.0 / N for N in N_list], errors)
