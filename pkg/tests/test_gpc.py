import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from sgtraffic.errors import ContractError, DomainError, ResourceError
from sgtraffic.gpc import (MAX_LEVEL, build_haar_basis, compute_triple_products, galerkin_diagonal,
                           galerkin_matrix, galerkin_product, gpc_mean, gpc_variance,
                           project_nonlinear, reconstruct)

from conftest import haar_phi

finite = st.floats(-10, 10, allow_nan=False)


def test_level_zero_is_constant():
    b = build_haar_basis(0)
    assert b.size == 1
    np.testing.assert_array_equal(b.synthesis, [[1.0]])


def test_level_one_mother_wavelet():
    b = build_haar_basis(1)
    assert b.evaluate(1, 0.25) == 1.0
    assert b.evaluate(1, 0.75) == -1.0


@pytest.mark.parametrize("L", range(6))
def test_synthesis_matches_direct_formula(L):
    b = build_haar_basis(L)
    for i in range(b.size):
        np.testing.assert_array_equal(b.synthesis[:, i], haar_phi(i, b.nodes))


def test_orthonormal_under_fine_quadrature():
    b = build_haar_basis(4)
    xi, w = b.quadrature(4 * b.size)
    Phi = np.stack([haar_phi(i, xi) for i in range(b.size)])
    np.testing.assert_allclose((Phi * w) @ Phi.T, np.eye(b.size), atol=1e-12)


def test_level_guard():
    with pytest.raises(ResourceError):
        build_haar_basis(MAX_LEVEL + 1)
    with pytest.raises(ContractError):
        build_haar_basis(-1)


def test_tensor_guard():
    with pytest.raises(ResourceError):
        compute_triple_products(build_haar_basis(9))


@pytest.mark.parametrize("L", range(5))
def test_tensor_matches_quadrature_oracle(L):
    b = build_haar_basis(L)
    T = compute_triple_products(b)
    xi, w = b.quadrature(2 * b.size)
    Phi = np.stack([haar_phi(i, xi) for i in range(b.size)])
    oracle = np.einsum("ln,in,jn,n->lij", Phi, Phi, Phi, w)
    np.testing.assert_allclose(T.matrices, oracle, atol=1e-13)


def test_level_one_tensor(tensors):
    M = tensors[1].matrices
    np.testing.assert_allclose(M[0], np.eye(2), atol=1e-15)
    np.testing.assert_allclose(M[1], [[0, 1], [1, 0]], atol=1e-15)


def test_level_one_product():
    T = compute_triple_products(build_haar_basis(1))
    a, b, c, d = 0.3, -1.2, 2.0, 0.7
    np.testing.assert_allclose(galerkin_product([a, b], [c, d], T), [a * c + b * d, a * d + b * c])


def test_size_mismatch(tensors):
    with pytest.raises(ContractError):
        galerkin_product(np.ones(3), np.ones(4), tensors[2])


@settings(max_examples=50, deadline=None)
@given(arrays(float, 8, elements=finite), arrays(float, 8, elements=finite))
def test_product_symmetric_and_matrix_form(u, z):
    T = compute_triple_products(build_haar_basis(3))
    uz = galerkin_product(u, z, T)
    np.testing.assert_allclose(uz, galerkin_product(z, u, T), atol=1e-12)
    np.testing.assert_allclose(uz, galerkin_matrix(u, T) @ z, atol=1e-11)


@settings(max_examples=30, deadline=None)
@given(arrays(float, 8, elements=finite), arrays(float, 8, elements=finite), arrays(float, 8, elements=finite))
def test_haar_product_associative(u, z, y):
    # products of piecewise constants stay in the span, so the truncation is exact
    T = compute_triple_products(build_haar_basis(3))
    lhs = galerkin_product(galerkin_product(u, z, T), y, T)
    rhs = galerkin_product(u, galerkin_product(z, y, T), T)
    np.testing.assert_allclose(lhs, rhs, atol=1e-9)


def test_identity_element(tensors, rng):
    T = tensors[4]
    u = rng.normal(size=T.size)
    e0 = np.eye(T.size)[0]
    np.testing.assert_allclose(galerkin_product(u, e0, T), u, atol=1e-14)
    np.testing.assert_allclose(galerkin_matrix(e0, T), np.eye(T.size), atol=1e-14)


def test_matrices_commute_and_share_eigenvectors(tensors, rng):
    T = tensors[3]
    u, z = rng.normal(size=(2, T.size))
    Pu, Pz = galerkin_matrix(u, T), galerkin_matrix(z, T)
    np.testing.assert_allclose(Pu @ Pz, Pz @ Pu, atol=1e-12)
    V = T.eigenvectors
    D = V.T @ Pu @ V
    np.testing.assert_allclose(D, np.diag(np.diag(D)), atol=1e-12)


def test_eigenvalues_are_nodal_values(tensors, rng):
    T = tensors[3]
    u = rng.normal(size=T.size)
    nodal = reconstruct(u, T.basis.nodes, T.basis)
    np.testing.assert_allclose(galerkin_diagonal(u, T), nodal, atol=1e-12)
    level1 = compute_triple_products(build_haar_basis(1))
    np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(galerkin_matrix([2.0, 0.5], level1))), [1.5, 2.5])


def test_transform_round_trip(rng):
    b = build_haar_basis(5)
    vals = rng.normal(size=(3, b.size))
    np.testing.assert_allclose(b.to_nodal(b.to_modal(vals)), vals, atol=1e-13)
    np.testing.assert_allclose(reconstruct(b.to_modal(vals[0]), b.nodes, b), vals[0], atol=1e-13)


def test_reconstruct_examples():
    b = build_haar_basis(1)
    assert reconstruct([0.4, 0.1], 0.25, b) == pytest.approx(0.5)
    # half-open cells: the breakpoint belongs to the right cell
    assert reconstruct([0.4, 0.1], 0.5, b) == pytest.approx(0.3)
    assert np.all(reconstruct([0.7, 0, 0, 0], np.linspace(0.01, 0.99, 7), build_haar_basis(2)) == 0.7)
    with pytest.raises(ContractError):
        reconstruct([0.4, 0.1], 1.0, b)


def test_project_nonlinear(tensors, rng):
    T = tensors[1]
    a, b = 0.8, 0.3
    np.testing.assert_allclose(project_nonlinear(np.square, [a, b], T.basis), [a * a + b * b, 2 * a * b])
    u = rng.normal(size=16)
    np.testing.assert_allclose(project_nonlinear(lambda x: x, u, tensors[4].basis), u, atol=1e-13)
    np.testing.assert_allclose(project_nonlinear(np.exp, [0.5, 0, 0, 0], tensors[2].basis),
                               [np.exp(0.5), 0, 0, 0], atol=1e-14)


def test_project_nonlinear_domain_error(tensors):
    with pytest.raises(DomainError, match="index"):
        project_nonlinear(np.sqrt, [0.1, 0.5], tensors[1].basis)


def test_nonlinear_matches_eigen_identity(tensors, rng):
    # P(f(u)) = V diag(f(nodal u)) V^T
    T = tensors[3]
    u = rng.uniform(0.2, 0.8, size=T.size) * np.r_[1, 0.1 * np.ones(T.size - 1)]
    V = T.eigenvectors
    lhs = galerkin_matrix(project_nonlinear(np.sin, u, T.basis), T)
    rhs = V @ np.diag(np.sin(T.basis.to_nodal(u))) @ V.T
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_moments(rng):
    b = build_haar_basis(4)
    u = rng.normal(size=b.size)
    xi, w = b.quadrature(64)
    vals = reconstruct(u, xi, b)
    assert gpc_mean(u) == pytest.approx(vals @ w, abs=1e-13)
    assert gpc_variance(u) == pytest.approx(((vals - vals @ w) ** 2) @ w, abs=1e-12)
    assert gpc_variance(np.array([0.3, 0.2])) == pytest.approx(0.04)
