"""Tests for the Hermitian matrix kernel."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from steercert import matcore
from steercert.matcore import (
    I2,
    PAULIS,
    SX,
    SY,
    SZ,
    SpectralDecomposition,
    eigh,
    is_psd,
    kron,
    partial_trace,
    partial_transpose,
    require_hermitian,
    sqrt_psd,
    support_ops,
)


def bell_phi_plus() -> np.ndarray:
    vec = np.zeros(4, dtype=complex)
    vec[0] = vec[3] = 1.0 / np.sqrt(2.0)
    return np.outer(vec, vec.conj())


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    raw = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (raw + raw.conj().T)


def random_psd(rng: np.random.Generator, dim: int) -> np.ndarray:
    raw = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return raw @ raw.conj().T


def test_pauli_constants():
    assert np.allclose(SX @ SX, I2)
    assert np.allclose(SY @ SY, I2)
    assert np.allclose(SZ @ SZ, I2)
    assert np.allclose(SX @ SY, 1j * SZ)
    for pauli in PAULIS:
        assert abs(np.trace(pauli)) < 1e-15


def test_kron_z_z_is_diagonal_signs():
    assert np.allclose(kron(SZ, SZ), np.diag([1.0, -1.0, -1.0, 1.0]))


def test_kron_accepts_many_factors():
    out = kron(I2, SZ, SX)
    assert out.shape == (8, 8)
    assert np.allclose(out, np.kron(I2, np.kron(SZ, SX)))


def test_kron_needs_a_factor():
    with pytest.raises(ValueError):
        kron()


def test_partial_trace_projected_bell_state():
    projector = np.diag([1.0, 0.0]).astype(complex)
    post = kron(projector, I2) @ bell_phi_plus()
    reduced = partial_trace(post, (2, 2), keep=1)
    assert np.allclose(reduced, 0.5 * np.diag([1.0, 0.0]))


def test_partial_trace_keep_first():
    rho = np.kron(np.diag([0.25, 0.75]), np.diag([0.5, 0.5])).astype(complex)
    assert np.allclose(partial_trace(rho, (2, 2), keep=0), np.diag([0.25, 0.75]))


def test_partial_trace_keep_both_is_identity_map():
    rng = np.random.default_rng(5)
    rho = random_psd(rng, 4)
    assert np.allclose(partial_trace(rho, (2, 2), keep=(0, 1)), rho)


def test_partial_trace_three_factors():
    rng = np.random.default_rng(6)
    a, b, c = random_psd(rng, 2), random_psd(rng, 3), random_psd(rng, 2)
    rho = kron(a, b, c)
    reduced = partial_trace(rho, (2, 3, 2), keep=1)
    assert np.allclose(reduced, b * np.trace(a) * np.trace(c))


def test_partial_trace_shape_mismatch():
    with pytest.raises(ValueError):
        partial_trace(np.eye(3), (2, 2), keep=0)


def test_partial_transpose_bell_eigenvalues():
    swapped = partial_transpose(bell_phi_plus(), (2, 2), which=1)
    values = np.sort(np.linalg.eigvalsh(swapped))
    assert np.allclose(values, [-0.5, 0.5, 0.5, 0.5], atol=1e-12)


def test_partial_transpose_is_involution():
    rng = np.random.default_rng(7)
    rho = random_hermitian(rng, 4)
    double = partial_transpose(partial_transpose(rho, (2, 2), 0), (2, 2), 0)
    assert np.allclose(double, rho)


def test_partial_transpose_both_factors_is_full_transpose():
    rng = np.random.default_rng(8)
    rho = random_hermitian(rng, 4)
    assert np.allclose(partial_transpose(rho, (2, 2), (0, 1)), rho.T)


def test_eigh_sorted_ascending():
    decomposition = eigh(SZ)
    assert isinstance(decomposition, SpectralDecomposition)
    assert np.allclose(decomposition.eigenvalues, [-1.0, 1.0])
    recon = (
        decomposition.eigenvectors
        @ np.diag(decomposition.eigenvalues)
        @ decomposition.eigenvectors.conj().T
    )
    assert np.allclose(recon, SZ)


def test_require_hermitian_symmetrizes_roundoff():
    noisy = SX + 1e-14 * np.array([[0.0, 1.0], [0.0, 0.0]])
    fixed = require_hermitian(noisy)
    assert np.allclose(fixed, fixed.conj().T)


def test_require_hermitian_rejects_large_residue():
    with pytest.raises(ValueError):
        require_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex))


def test_support_ops_diagonal_example():
    ops = support_ops(np.diag([0.75, 0.25]).astype(complex))
    assert np.allclose(ops.sqrt_pinv, np.diag([2.0 / np.sqrt(3.0), 2.0]))
    assert np.allclose(ops.support, np.eye(2))
    assert np.allclose(ops.kernel, np.zeros((2, 2)))


def test_support_ops_rank_deficient():
    ops = support_ops(np.diag([0.5, 0.0]).astype(complex))
    assert np.allclose(ops.support, np.diag([1.0, 0.0]))
    assert np.allclose(ops.kernel, np.diag([0.0, 1.0]))
    assert np.allclose(ops.sqrt_pinv, np.diag([np.sqrt(2.0), 0.0]))


def test_support_ops_whitening_identity():
    rng = np.random.default_rng(11)
    vec = rng.normal(size=3) + 1j * rng.normal(size=3)
    rank_two = np.outer(vec, vec.conj()) + np.diag([0.3, 0.0, 0.0])
    herm = require_hermitian(rank_two, tol=1e-9)
    ops = support_ops(herm)
    assert np.linalg.norm(ops.sqrt_pinv @ herm @ ops.sqrt_pinv - ops.support) < 1e-9


def test_support_ops_rejects_negative_eigenvalue():
    with pytest.raises(ValueError):
        support_ops(np.diag([1.0, -0.1]).astype(complex))


def test_sqrt_psd_squares_back():
    rng = np.random.default_rng(12)
    rho = random_psd(rng, 3)
    root = sqrt_psd(rho)
    assert np.allclose(root @ root, rho)
    assert is_psd(root)


def test_is_psd_boundary():
    assert is_psd(np.zeros((2, 2)))
    assert is_psd(np.diag([1.0, 0.0]))
    assert not is_psd(np.diag([1.0, -1e-6]))
    assert is_psd(np.diag([1.0, -1e-12]))


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=2, max_value=4))
def test_partial_trace_preserves_trace(seed, dim):
    rng = np.random.default_rng(seed)
    rho = random_psd(rng, 2 * dim)
    reduced = partial_trace(rho, (2, dim), keep=1)
    assert abs(np.trace(reduced) - np.trace(rho)) < 1e-9 * max(1.0, abs(np.trace(rho)))


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_partial_transpose_preserves_spectrum_sum(seed):
    rng = np.random.default_rng(seed)
    rho = random_hermitian(rng, 4)
    swapped = partial_transpose(rho, (2, 2), 1)
    assert abs(np.trace(swapped) - np.trace(rho)) < 1e-10
    assert np.allclose(swapped, swapped.conj().T)


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_support_ops_projector_algebra(seed):
    rng = np.random.default_rng(seed)
    dim = 4
    vecs = rng.normal(size=(dim, 2)) + 1j * rng.normal(size=(dim, 2))
    rho = vecs @ vecs.conj().T
    ops = support_ops(rho)
    assert np.allclose(ops.support + ops.kernel, np.eye(dim), atol=1e-10)
    assert np.allclose(ops.support @ ops.support, ops.support, atol=1e-10)
    assert np.allclose(ops.kernel @ rho, np.zeros((dim, dim)), atol=1e-8)
