"""Coupled Runge-Kutta discretization of the linear-quadratic control problem.

Semi-discrete problem: minimize ``1/2 |y(T) - y_D|_M^2 + nu/2 int |u|_M^2``
subject to ``M y' + A y = M u``, ``y(0) = v``.  The state is advanced with a
tableau ``(A, b)``; the adjoint with its partner ``(A_hat, b)``.  Stage
controls are eliminated through ``u = p / nu``.

Unknowns, in block order (each block has ``dim`` entries)::

    y_1 .. y_N | p_0 .. p_N | Y_{k,i} (k major) | P_{k,i} (k major)

Rows, with ``tau = T / N``::

    M Y_ki = M y_k + tau sum_j a_ij (M P_kj / nu - A Y_kj)
    M y_k+1 = M y_k + tau sum_i b_i (M P_ki / nu - A Y_ki)
    M P_ki = M p_k + tau sum_j ahat_ij A P_kj
    M p_k+1 = M p_k + tau sum_i b_i A P_ki
    M p_N + M y_N = M y_D

This is exactly the stationarity system of the fully discrete objective
``discrete_objective`` (see the finite-difference tests).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .analytic import ExactSolution
from .spatial import SpatialBackend, build_modal, interpolate, cosine_mode
from .tableau import Tableau, adjoint_tableau

__all__ = [
    "SingularSystem",
    "OcpProblem",
    "DiscreteSolution",
    "LinearSystem",
    "assemble",
    "solve",
    "uncontrolled_step_check",
    "forward_state",
    "discrete_objective",
    "heat_problem",
    "scalar_problem",
]


class SingularSystem(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class OcpProblem:
    backend: SpatialBackend
    nu: float
    v: np.ndarray
    y_D: np.ndarray
    T: float = 1.0
    exact: ExactSolution | None = field(default=None, repr=False)

    def __post_init__(self):
        if not self.nu > 0:
            raise ValueError("nu must be positive")
        n = self.backend.dim
        if np.shape(self.v) != (n,) or np.shape(self.y_D) != (n,):
            raise ValueError(f"v and y_D must have {n} entries")


@dataclass(frozen=True, eq=False)
class DiscreteSolution:
    tau: float
    N: int
    y_nodes: np.ndarray  # (N+1, dim)
    p_nodes: np.ndarray  # (N+1, dim)
    y_stages: np.ndarray  # (N, s, dim)
    p_stages: np.ndarray  # (N, s, dim)
    nu: float
    residual: float = 0.0

    @property
    def u_stages(self) -> np.ndarray:
        return self.p_stages / self.nu

    @property
    def times(self) -> np.ndarray:
        return self.tau * np.arange(self.N + 1)


@dataclass(frozen=True, eq=False)
class LinearSystem:
    matrix: sp.csr_matrix
    rhs: np.ndarray
    N: int
    s: int
    dim: int

    @property
    def n_blocks(self) -> int:
        return 2 * self.N + 1 + 2 * self.N * self.s

    def unpack(self, x: np.ndarray):
        N, s, n = self.N, self.s, self.dim
        blocks = x.reshape(self.n_blocks, n)
        y = blocks[:N]
        p = blocks[N:2 * N + 1]
        Y = blocks[2 * N + 1:2 * N + 1 + N * s].reshape(N, s, n)
        P = blocks[2 * N + 1 + N * s:].reshape(N, s, n)
        return y, p, Y, P


def _block_indices(N: int, s: int):
    def yb(k):
        return k - 1

    def pb(k):
        return N + k

    def Yb(k, i):
        return 2 * N + 1 + k * s + i

    def Pb(k, i):
        return 2 * N + 1 + N * s + k * s + i

    return yb, pb, Yb, Pb


def assemble(problem: OcpProblem, scheme: Tableau, N: int) -> LinearSystem:
    if N < 1:
        raise ValueError("N must be at least 1")
    adj = adjoint_tableau(scheme)  # raises ZeroWeight
    a, b, ahat = scheme.A_float, scheme.b_float, adj.A_float
    s, nu = scheme.s, problem.nu
    tau = problem.T / N
    M, A = problem.backend.M, problem.backend.A
    n = problem.backend.dim
    nb = 2 * N + 1 + 2 * N * s
    yb, pb, Yb, Pb = _block_indices(N, s)

    # block-level coefficient patterns multiplying M and A respectively
    cm: list[tuple[int, int, float]] = []
    ca: list[tuple[int, int, float]] = []
    rhs = np.zeros((nb, n))
    Mv = M @ problem.v

    def state_node(row, k, coef):
        # coef * M y_k, with y_0 = v moved to the right-hand side
        if k == 0:
            rhs[row] -= coef * Mv
        else:
            cm.append((row, yb(k), coef))

    for k in range(N):
        for i in range(s):
            r = Yb(k, i)
            cm.append((r, Yb(k, i), 1.0))
            state_node(r, k, -1.0)
            for j in range(s):
                if a[i, j] != 0.0:
                    cm.append((r, Pb(k, j), -tau * a[i, j] / nu))
                    ca.append((r, Yb(k, j), tau * a[i, j]))
        r = yb(k + 1)
        cm.append((r, yb(k + 1), 1.0))
        state_node(r, k, -1.0)
        for i in range(s):
            cm.append((r, Pb(k, i), -tau * b[i] / nu))
            ca.append((r, Yb(k, i), tau * b[i]))
        for i in range(s):
            r = Pb(k, i)
            cm.append((r, Pb(k, i), 1.0))
            cm.append((r, pb(k), -1.0))
            for j in range(s):
                if ahat[i, j] != 0.0:
                    ca.append((r, Pb(k, j), -tau * ahat[i, j]))
        r = pb(k)
        cm.append((r, pb(k + 1), 1.0))
        cm.append((r, pb(k), -1.0))
        for i in range(s):
            ca.append((r, Pb(k, i), -tau * b[i]))
    r = pb(N)
    cm.append((r, pb(N), 1.0))
    cm.append((r, yb(N), 1.0))
    rhs[r] += M @ problem.y_D

    def pattern(entries):
        rows, cols, vals = zip(*entries) if entries else ((), (), ())
        return sp.csr_matrix((vals, (rows, cols)), shape=(nb, nb))

    K = sp.kron(pattern(cm), M, format="csr")
    if ca:
        K = K + sp.kron(pattern(ca), A, format="csr")
    return LinearSystem(K.tocsr(), rhs.ravel(), N, s, n)


def solve(problem: OcpProblem, scheme: Tableau, N: int, tol: float = 1e-10) -> DiscreteSolution:
    system = assemble(problem, scheme, N)
    try:
        lu = spla.splu(system.matrix.tocsc())
    except RuntimeError as exc:
        raise SingularSystem(str(exc)) from exc
    x = lu.solve(system.rhs)
    scale = np.max(np.abs(system.rhs))
    res = np.max(np.abs(system.matrix @ x - system.rhs))
    rel = res / scale if scale > 0 else res
    if not np.all(np.isfinite(x)) or rel > tol:
        raise SingularSystem(f"relative residual {rel:.3e} exceeds {tol:.0e}")
    y, p, Y, P = system.unpack(x)
    y_nodes = np.vstack([problem.v[None, :], y])
    return DiscreteSolution(problem.T / N, N, y_nodes, p.copy(), Y.copy(), P.copy(),
                            problem.nu, float(rel))


def uncontrolled_step_check(scheme: Tableau, lam: float, tau: float) -> float:
    """Stability function ``R(-tau lam) = 1 + z b^T (I - z A)^-1 1``."""
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    z = -tau * lam
    s = scheme.s
    stage = np.linalg.solve(np.eye(s) - z * scheme.A_float, np.ones(s))
    return float(1.0 + z * scheme.b_float @ stage)


def forward_state(problem: OcpProblem, scheme: Tableau, N: int, U: np.ndarray) -> np.ndarray:
    """State nodes ``(N+1, dim)`` driven by stage controls ``U`` of shape ``(N, s, dim)``."""
    s, n = scheme.s, problem.backend.dim
    tau = problem.T / N
    a, b = scheme.A_float, scheme.b_float
    M, A = problem.backend.M, problem.backend.A
    stage_op = (sp.kron(sp.identity(s), M) + tau * sp.kron(sp.csr_matrix(a), A)).tocsc()
    stage_lu = spla.splu(stage_op)
    mass_lu = spla.splu(M.tocsc())
    drive = sp.kron(sp.csr_matrix(a), M)
    y = np.empty((N + 1, n))
    y[0] = problem.v
    for k in range(N):
        Myk = M @ y[k]
        Y = stage_lu.solve(np.tile(Myk, s) + tau * (drive @ U[k].ravel())).reshape(s, n)
        incr = sum(b[i] * (M @ U[k, i] - A @ Y[i]) for i in range(s))
        y[k + 1] = mass_lu.solve(Myk + tau * incr)
    return y


def discrete_objective(problem: OcpProblem, scheme: Tableau, N: int, U: np.ndarray) -> float:
    """``1/2 |y_N - y_D|_M^2 + nu/2 tau sum_k sum_i b_i |U_ki|_M^2``."""
    y = forward_state(problem, scheme, N, U)
    M, b = problem.backend.M, scheme.b_float
    e = y[-1] - problem.y_D
    tau = problem.T / N
    control = sum(b[i] * float(U[k, i] @ (M @ U[k, i])) for k in range(N) for i in range(scheme.s))
    return 0.5 * float(e @ (M @ e)) + 0.5 * problem.nu * tau * control


def _mode_one(x):
    return cosine_mode(1, x)


def heat_problem(backend: SpatialBackend, nu: float = 1e-3) -> OcpProblem:
    """Data ``v = y_D = sqrt(2) cos(pi x)`` on the given backend, with exact solution."""
    if backend.kind == "modal":
        if 1 not in backend.modes:
            raise ValueError("the modal backend must contain mode 1")
        data = np.where(backend.modes == 1, 1.0, 0.0)
    else:
        data = interpolate(backend, _mode_one)
    exact = ExactSolution([1], [1.0], [1.0], nu)
    return OcpProblem(backend, nu, data.copy(), data.copy(), 1.0, exact)


def scalar_problem(nu: float = 1e-3) -> OcpProblem:
    """``y' + pi^2 y = u`` with ``a = b = 1``: the single mode ``k = 1``."""
    return heat_problem(build_modal(1, first=1), nu)
