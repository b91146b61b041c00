import numpy as np
import pytest
from scipy.linalg import eigh

from rkocp.spatial import InvalidDegree, InvalidMesh, build_fem, build_modal, interpolate, m_norm


def test_modal_operators():
    b = build_modal(2)
    assert np.allclose(b.A.toarray(), np.diag([0.0, np.pi ** 2]))
    assert np.array_equal(b.M.toarray(), np.eye(2))
    assert b.B is b.M
    assert build_modal(1).A.toarray().tolist() == [[0.0]]


def test_modal_projection():
    assert np.allclose(interpolate(build_modal(2), lambda x: np.sqrt(2) * np.cos(np.pi * x)), [0, 1], atol=1e-14)
    assert np.allclose(interpolate(build_modal(3), lambda x: np.ones_like(x)), [1, 0, 0], atol=1e-14)


def test_modal_first_offset():
    b = build_modal(1, first=1)
    assert b.modes.tolist() == [1]
    assert b.eigenvalues[0] == pytest.approx(np.pi ** 2)


def test_p1_rows():
    b = build_fem(1, 2)
    h = 0.5
    assert np.allclose(b.M.toarray()[1], h / 6 * np.array([1, 4, 1]))
    assert np.allclose(b.A.toarray()[1], 1 / h * np.array([-1, 2, -1]))


def test_fem_interpolation_is_nodal():
    assert np.allclose(interpolate(build_fem(1, 4), lambda x: x), [0, 0.25, 0.5, 0.75, 1])


@pytest.mark.parametrize("degree", [1, 2, 3])
@pytest.mark.parametrize("cells", [2, 5, 16])
def test_fem_structure(degree, cells):
    b = build_fem(degree, cells)
    M, A = b.M.toarray(), b.A.toarray()
    assert b.dim == degree * cells + 1
    assert np.max(np.abs(M - M.T)) == 0
    assert np.max(np.abs(A - A.T)) <= 1e-12
    assert M.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(A @ np.ones(b.dim))) <= 1e-10
    assert eigh(A, eigvals_only=True)[0] >= -1e-10
    assert eigh(M, eigvals_only=True)[0] > 0


@pytest.mark.parametrize("degree", [1, 2, 3])
def test_fem_exact_on_polynomials(degree):
    # x^degree is reproduced exactly; its mass and energy are then exact
    b = build_fem(degree, 3)
    v = interpolate(b, lambda x: x ** degree)
    assert v @ b.M @ v == pytest.approx(1 / (2 * degree + 1), rel=1e-12)
    assert v @ b.A @ v == pytest.approx(degree ** 2 / (2 * degree - 1), rel=1e-12)


def test_fem_eigenvalues_converge():
    b = build_fem(2, 32)
    lam = eigh(b.A.toarray(), b.M.toarray(), eigvals_only=True)
    assert lam[1] == pytest.approx(np.pi ** 2, rel=1e-6)


def test_m_norm():
    assert m_norm(build_modal(2), [0, 1]) == 1
    assert m_norm(build_fem(2, 3), np.zeros(7)) == 0
    assert m_norm(build_fem(1, 2), [1, 1, 1]) == pytest.approx(1.0)


@pytest.mark.parametrize("degree, cells, exc", [(0, 4, InvalidDegree), (4, 4, InvalidDegree), (1, 1, InvalidMesh)])
def test_fem_errors(degree, cells, exc):
    with pytest.raises(exc):
        build_fem(degree, cells)
