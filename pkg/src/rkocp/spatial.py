"""Spatial discretizations of -u'' on (0, 1) with homogeneous Neumann conditions.

Two backends provide the mass matrix ``M``, stiffness matrix ``A`` and control
operator ``B = M`` of the semi-discrete system ``M y' + A y = M u``:

* ``modal``: orthonormal cosine eigenbasis ``e_0 = 1``, ``e_k = sqrt(2) cos(k pi x)``,
  so ``M = I`` and ``A = diag((k pi)^2)``;
* ``fem``: continuous Lagrange elements of degree 1-3 on a uniform mesh.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp
from numpy.polynomial import legendre

__all__ = [
    "SpatialBackend",
    "InvalidDegree",
    "InvalidMesh",
    "build_modal",
    "build_fem",
    "interpolate",
    "m_norm",
    "cosine_mode",
]


class InvalidDegree(ValueError):
    pass


class InvalidMesh(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SpatialBackend:
    kind: str  # "modal" or "fem"
    M: sp.csr_matrix
    A: sp.csr_matrix
    modes: np.ndarray | None = None  # modal: wave numbers k of the basis functions
    degree: int | None = None
    n_cells: int | None = None
    nodes: np.ndarray | None = field(default=None, repr=False)  # fem: node coordinates

    @property
    def dim(self) -> int:
        return self.M.shape[0]

    @property
    def B(self) -> sp.csr_matrix:
        return self.M

    @property
    def eigenvalues(self) -> np.ndarray:
        if self.kind != "modal":
            raise AttributeError("eigenvalues are only known for the modal backend")
        return (self.modes * np.pi) ** 2

    @property
    def h(self) -> float:
        return 0.0 if self.kind == "modal" else 1.0 / self.n_cells

    def describe(self) -> str:
        if self.kind == "modal":
            ks = self.modes
            span = f"{ks[0]}" if len(ks) == 1 else f"{ks[0]}..{ks[-1]}"
            return f"modal[{span}]"
        return f"fem[P{self.degree},{self.n_cells}]"


def cosine_mode(k: int, x):
    """Normalized Neumann eigenfunction ``e_k`` on (0, 1)."""
    x = np.asarray(x, dtype=float)
    if k == 0:
        return np.ones_like(x)
    return np.sqrt(2.0) * np.cos(k * np.pi * x)


def build_modal(n_modes: int, first: int = 0) -> SpatialBackend:
    """Cosine basis with wave numbers ``first, ..., first + n_modes - 1``."""
    if n_modes < 1 or first < 0:
        raise ValueError("need n_modes >= 1 and first >= 0")
    modes = np.arange(first, first + n_modes)
    M = sp.identity(n_modes, format="csr")
    A = sp.diags((modes * np.pi) ** 2).tocsr()
    return SpatialBackend("modal", M, A, modes=modes)


def _local_matrices(degree: int):
    """Reference-element mass and stiffness on [0, 1] with equispaced nodes."""
    xi = np.linspace(0.0, 1.0, degree + 1)
    q, w = legendre.leggauss(degree + 2)
    q = 0.5 * (q + 1.0)
    w = 0.5 * w
    phi = np.empty((degree + 1, q.size))
    dphi = np.empty_like(phi)
    for a in range(degree + 1):
        others = np.delete(xi, a)
        coeffs = np.poly(others) / np.prod(xi[a] - others)
        phi[a] = np.polyval(coeffs, q)
        dphi[a] = np.polyval(np.polyder(coeffs), q)
    mass = (phi * w) @ phi.T
    stiff = (dphi * w) @ dphi.T
    return mass, stiff


def build_fem(degree: int, n_cells: int) -> SpatialBackend:
    if degree not in (1, 2, 3):
        raise InvalidDegree(f"degree must be 1, 2 or 3, got {degree}")
    if n_cells < 2:
        raise InvalidMesh(f"need at least two cells, got {n_cells}")
    h = 1.0 / n_cells
    mass, stiff = _local_matrices(degree)
    n = degree * n_cells + 1
    rows, cols, mv, av = [], [], [], []
    for e in range(n_cells):
        dofs = e * degree + np.arange(degree + 1)
        r, c = np.meshgrid(dofs, dofs, indexing="ij")
        rows.append(r.ravel())
        cols.append(c.ravel())
        mv.append((h * mass).ravel())
        av.append((stiff / h).ravel())
    rows, cols = np.concatenate(rows), np.concatenate(cols)
    M = sp.csr_matrix((np.concatenate(mv), (rows, cols)), shape=(n, n))
    A = sp.csr_matrix((np.concatenate(av), (rows, cols)), shape=(n, n))
    # symmetrize away assembly roundoff
    M = ((M + M.T) * 0.5).tocsr()
    A = ((A + A.T) * 0.5).tocsr()
    nodes = np.linspace(0.0, 1.0, n)
    return SpatialBackend("fem", M, A, degree=degree, n_cells=n_cells, nodes=nodes)


_QX, _QW = legendre.leggauss(40)


def _cell_quadrature(n_cells: int = 32):
    edges = np.linspace(0.0, 1.0, n_cells + 1)
    x = (0.5 * (_QX[None, :] + 1.0) * np.diff(edges)[:, None] + edges[:-1, None]).ravel()
    w = (0.5 * _QW[None, :] * np.diff(edges)[:, None]).ravel()
    return x, w


def interpolate(backend: SpatialBackend, f: Callable) -> np.ndarray:
    """Modal: L2 projection onto the cosine modes; FEM: nodal interpolation."""
    if backend.kind == "fem":
        return np.asarray(np.broadcast_to(f(backend.nodes), backend.nodes.shape), dtype=float).copy()
    x, w = _cell_quadrature()
    fx = np.broadcast_to(np.asarray(f(x), dtype=float), x.shape)
    return np.array([np.dot(w, fx * cosine_mode(int(k), x)) for k in backend.modes])


def m_norm(backend: SpatialBackend, v) -> float:
    v = np.asarray(v, dtype=float)
    return float(np.sqrt(max(v @ (backend.M @ v), 0.0)))
