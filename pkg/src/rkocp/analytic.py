"""Closed-form solution of the model optimality system, mode by mode.

For one eigenpair ``(lam, e)`` of the spatial operator the optimality system
reduces to the two-point boundary value problem

    y' = -lam y + p / nu,   y(0) = a,
    p' =  lam p,            p(1) = b - y(1),

with ``u = p / nu``.  Its solution is ``y = C1 e^{lam t} + C2 e^{-lam t}``,
``p = C3 e^{lam t}``.  The coefficients are evaluated in 50-digit arithmetic.

At ``lam = 0`` the general formula is 0/0; the limit is stored as ``C1 = 0``,
``C2 = a`` and ``C3 = nu (b - a) / (nu + 1)`` (the constant adjoint), and the
state is the straight line ``a + C3 t / nu``.

``shoot`` is an independent check: it integrates the linear system with a
Taylor-series stepper and step halving, solving the boundary conditions by
superposition of two fundamental solutions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import mpmath
import numpy as np

from .spatial import SpatialBackend, cosine_mode

__all__ = [
    "DegenerateDenominator",
    "ModeSolution",
    "ExactSolution",
    "mode_coefficients",
    "exact_fields",
    "residual_check",
    "boundary_defects",
    "shoot",
]

_DPS = 50


class DegenerateDenominator(ArithmeticError):
    pass


@dataclass(frozen=True)
class ModeSolution:
    lam: float
    a: float
    b: float
    nu: float
    C1: float
    C2: float
    C3: float

    @property
    def is_constant_mode(self) -> bool:
        return self.lam == 0.0


def mode_coefficients(lam: float, a: float, b: float, nu: float, T: float = 1.0) -> ModeSolution:
    if T != 1.0:
        raise ValueError("closed form is only available for T = 1")
    if not nu > 0:
        raise ValueError("nu must be positive")
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    with mpmath.workdps(_DPS):
        L, A, B, V = (mpmath.mpf(lam), mpmath.mpf(a), mpmath.mpf(b), mpmath.mpf(nu))
        if lam == 0:
            c3 = V * (B - A) / (V + 1)
            return ModeSolution(lam, a, b, nu, 0.0, float(A), float(c3))
        ep, em = mpmath.exp(L), mpmath.exp(-L)
        den = -2 * V * L * ep - ep + em
        if abs(den) < mpmath.mpf("1e-300"):
            raise DegenerateDenominator(f"denominator {den} at lam={lam}, nu={nu}")
        c1 = (-B + A * em) / den
        c2 = -(-B + A * ep + 2 * V * L * A * ep) / den
        c3 = 2 * L * V * c1
        return ModeSolution(lam, a, b, nu, float(c1), float(c2), float(c3))


def _fields(sol: ModeSolution, t):
    t = np.asarray(t, dtype=float)
    if sol.is_constant_mode:
        p = np.full_like(t, sol.C3)
        y = sol.C2 + sol.C3 * t / sol.nu
    else:
        # C1 e^{lam t} + C2 e^{-lam t} rewritten with C1 + C2 = a; avoids
        # cancellation between large C1, C2 when lam is tiny
        y = sol.a * np.exp(-sol.lam * t) + 2.0 * sol.C1 * np.sinh(sol.lam * t)
        p = sol.C3 * np.exp(sol.lam * t)
    return y, p


def exact_fields(sols: Sequence[ModeSolution], t: float):
    """Per-mode arrays ``(y(t), p(t), u(t))``."""
    if not 0.0 <= t <= 1.0:
        raise ValueError("t must lie in [0, 1]")
    y = np.empty(len(sols))
    p = np.empty(len(sols))
    for i, s in enumerate(sols):
        y[i], p[i] = _fields(s, t)
    u = p / np.array([s.nu for s in sols]) if sols else p
    return y, p, u


def residual_check(sol: ModeSolution, samples: int = 33) -> float:
    """Max relative residual of both ODEs at ``samples`` equispaced times."""
    if samples < 2:
        raise ValueError("need at least two samples")
    t = np.linspace(0.0, 1.0, samples)
    y, p = _fields(sol, t)
    u = p / sol.nu
    if sol.is_constant_mode:
        dy = np.full_like(t, sol.C3 / sol.nu)
        dp = np.zeros_like(t)
    else:
        grow, decay = np.exp(sol.lam * t), np.exp(-sol.lam * t)
        dy = sol.lam * (sol.C1 * grow - sol.C2 * decay)
        dp = sol.lam * sol.C3 * grow
    r_state = np.abs(dy + sol.lam * y - u)
    r_adj = np.abs(dp - sol.lam * p)
    scale_state = np.maximum.reduce([np.abs(dy), np.abs(sol.lam * y), np.abs(u)])
    scale_adj = np.maximum(np.abs(dp), np.abs(sol.lam * p))
    worst = 0.0
    for r, s in ((r_state, scale_state), (r_adj, scale_adj)):
        nz = s > 0
        if np.any(r[~nz] > 0):
            return float("inf")
        if np.any(nz):
            worst = max(worst, float(np.max(r[nz] / s[nz])))
    return worst


def _rel(x: float, scale: float) -> float:
    return abs(x) / scale if scale > 0 else abs(x)


def boundary_defects(sol: ModeSolution) -> tuple[float, float]:
    """Relative defects of ``C1 + C2 = a`` and ``C3 e^lam = b - (C1 e^lam + C2 e^-lam)``."""
    init = _rel(sol.C1 + sol.C2 - sol.a, max(abs(sol.a), abs(sol.C1), abs(sol.C2)))
    if sol.is_constant_mode:
        y1, p1 = (float(v) for v in _fields(sol, 1.0))
    else:
        y1 = sol.C1 * np.exp(sol.lam) + sol.C2 * np.exp(-sol.lam)
        p1 = sol.C3 * np.exp(sol.lam)
    term = _rel(p1 - (sol.b - y1), max(abs(sol.b), abs(y1), abs(p1)))
    return float(init), float(term)


def _taylor_propagator(lam, nu, h):
    """``exp(hK)`` for ``K = [[-lam, 1/nu], [0, lam]]`` by summing the Taylor series."""
    K = mpmath.matrix([[-lam, 1 / nu], [0, lam]])
    term = mpmath.eye(2)
    total = mpmath.eye(2)
    eps = mpmath.mpf(10) ** (-mpmath.mp.dps)
    for m in range(1, 400):
        term = term * K * (h / m)
        total += term
        if mpmath.mnorm(term, 1) <= eps * mpmath.mnorm(total, 1):
            break
    return total


def _march(lam, nu, z0, n_steps, record):
    step = _taylor_propagator(lam, nu, mpmath.mpf(1) / n_steps)
    z = mpmath.matrix(z0)
    out = {0: z}
    for k in range(1, n_steps + 1):
        z = step * z
        if k in record:
            out[k] = z
    return out


def shoot(lam: float, a: float, b: float, nu: float, times: Sequence[float] = (0.0, 0.5, 1.0),
          tol: float = 1e-20, max_halvings: int = 12):
    """Integrate the boundary value problem numerically; return ``(y, p)`` at ``times``.

    ``times`` must be multiples of 1/16.  Steps are halved until successive
    answers agree to ``tol``.
    """
    base = 16
    idx = [round(t * base) for t in times]
    if any(abs(i / base - t) > 1e-15 for i, t in zip(idx, times)):
        raise ValueError("times must be multiples of 1/16")
    prev = None
    with mpmath.workdps(_DPS):
        L, V, A, B = (mpmath.mpf(lam), mpmath.mpf(nu), mpmath.mpf(a), mpmath.mpf(b))
        n = base
        for _ in range(max_halvings):
            scale = n // base
            record = {i * scale for i in idx} | {n}
            free = _march(L, V, [A, 0], n, record)  # driven by y(0) = a
            unit = _march(L, V, [0, 1], n, record)  # unit initial adjoint
            # p(1) + y(1) = b is linear in the unknown p(0)
            p0 = (B - free[n][0] - free[n][1]) / (unit[n][0] + unit[n][1])
            cur = [(free[k][0] + p0 * unit[k][0], free[k][1] + p0 * unit[k][1])
                   for k in (i * scale for i in idx)]
            if prev is not None:
                diff = max(max(abs(u[0] - v[0]), abs(u[1] - v[1])) for u, v in zip(cur, prev))
                if diff <= tol:
                    break
            prev = cur
            n *= 2
        y = np.array([float(c[0]) for c in cur])
        p = np.array([float(c[1]) for c in cur])
    return y, p


class ExactSolution:
    """Exact fields of a problem whose data live on finitely many cosine modes."""

    def __init__(self, modes: Sequence[int], a: Sequence[float], b: Sequence[float], nu: float):
        self.modes = np.asarray(modes, dtype=int)
        self.nu = nu
        self.sols = [mode_coefficients((k * np.pi) ** 2, ak, bk, nu)
                     for k, ak, bk in zip(self.modes, a, b)]

    def coefficients(self, t: float):
        y, p, _ = exact_fields(self.sols, t)
        return y, p

    def field(self, backend: SpatialBackend, t: float):
        """Interpolant of ``(y(., t), p(., t))`` in the backend's space."""
        y, p = self.coefficients(t)
        if backend.kind == "modal":
            yv = np.zeros(backend.dim)
            pv = np.zeros(backend.dim)
            where = {int(k): i for i, k in enumerate(backend.modes)}
            for k, yk, pk in zip(self.modes, y, p):
                if int(k) not in where:
                    raise ValueError(f"mode {k} is not represented by {backend.describe()}")
                yv[where[int(k)]] = yk
                pv[where[int(k)]] = pk
            return yv, pv
        basis = np.array([cosine_mode(int(k), backend.nodes) for k in self.modes])
        return y @ basis, p @ basis
