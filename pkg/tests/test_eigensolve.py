import numpy as np
import pytest

from sykmagic.eigensolve import eig_hermitian, energy, evolve, ground_state, lowest_eigenpairs
from sykmagic.errors import DimensionError, NumericalConsistencyError
from sykmagic.fock import enumerate_sector, half_filling
from sykmagic.hamiltonians import build_sector_matrix, sample_syk2, sample_syk4


def test_diagonal_and_pauli_x():
    assert eig_hermitian(np.diag([3.0, 1.0, 2.0])).eigenvalues.tolist() == [1, 2, 3]
    dec = eig_hermitian(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose(dec.eigenvalues, [-1, 1])
    assert np.isclose(abs(dec.eigenvectors[:, 0] @ np.array([1, -1]) / np.sqrt(2)), 1)


def test_random_reconstruction_and_residuals():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((70, 70)) + 1j * rng.standard_normal((70, 70))
    h = a + a.conj().T
    dec = eig_hermitian(h)
    norm = np.linalg.norm(h, 2)
    assert np.linalg.norm(dec.reconstruct() - h) < 1e-10 * norm
    u = dec.eigenvectors
    assert np.max(np.abs(u.conj().T @ u - np.eye(70))) < 1e-12
    assert np.max(np.linalg.norm(h @ u - u * dec.eigenvalues, axis=0)) < 1e-10 * norm
    part = lowest_eigenpairs(h, 3)
    assert np.allclose(part.eigenvalues, dec.eigenvalues[:3])
    with pytest.raises(DimensionError):
        part.reconstruct()


def test_rejects_bad_input():
    with pytest.raises(NumericalConsistencyError):
        eig_hermitian(np.array([[0, 1], [0, 0]], dtype=float))
    with pytest.raises(DimensionError):
        eig_hermitian(np.zeros((2, 3)))


def test_ground_state_tie_break():
    basis = enumerate_sector(2, 1)
    gs = ground_state(eig_hermitian(np.diag([1.0, 2.0])), basis)
    assert np.allclose(np.abs(gs.amplitudes), [0, 1, 0, 0])
    deg = ground_state(eig_hermitian(np.diag([1.0, 1.0])), basis)
    assert deg.meta["degenerate"] and np.allclose(np.abs(deg.amplitudes), [0, 1, 0, 0])
    with pytest.raises(DimensionError):
        ground_state(eig_hermitian(np.eye(3)), basis)


def test_two_site_free_fermion_ground_state():
    m = sample_syk2(2, seed=9)
    (a, b), (_, c) = m.couplings
    e0 = 0.5 * (a.real + c.real) - np.sqrt(0.25 * (a.real - c.real) ** 2 + abs(b) ** 2)
    gs = ground_state(eig_hermitian(build_sector_matrix(m, enumerate_sector(2, 1))), enumerate_sector(2, 1))
    assert abs(gs.meta["energy"] - e0) < 1e-14


def test_evolution():
    basis = half_filling(8)
    h = build_sector_matrix(sample_syk4(8, seed=2), basis)
    dec = eig_hermitian(h)
    rng = np.random.default_rng(1)
    psi0 = rng.standard_normal(basis.dim) + 1j * rng.standard_normal(basis.dim)
    psi0 /= np.linalg.norm(psi0)
    assert np.allclose(evolve(dec, psi0, 0.0), psi0, atol=1e-14)
    assert abs(np.linalg.norm(evolve(dec, psi0, 10.0)) - 1) < 1e-12
    e = [energy(h, evolve(dec, psi0, t)) for t in np.linspace(0, 12, 25)]
    assert np.ptp(e) < 1e-10
    v = dec.eigenvectors[:, 3]
    out = evolve(dec, v, 2.5)
    assert np.allclose(out, np.exp(-2.5j * dec.eigenvalues[3]) * v, atol=1e-12)
    with pytest.raises(DimensionError):
        evolve(dec, psi0[:-1], 1.0)
