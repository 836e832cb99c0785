import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import jacobi_eigenvalues, partial_trace_loops
from qae_lab.models import tfim_hamiltonian, thermal_state, werner_state
from qae_lab.qstate import (
    X,
    Z,
    Bipartition,
    InvalidStateError,
    apply_unitary,
    expectation,
    fidelity,
    ket,
    kron,
    partial_trace,
    pure,
    random_density_matrix,
    random_unitary,
    spectral_decomposition,
    sqrtm_psd,
    validate_density_matrix,
    von_neumann_entropy,
    z_expectations,
)

PLUS = np.array([1, 1]) / np.sqrt(2)
BELL = np.array([1, 0, 0, 1]) / np.sqrt(2)


def test_bipartition_validation():
    part = Bipartition(2, 3)
    assert (part.d_a, part.d_b, part.dim, part.n_qubits) == (4, 8, 32, 5)
    with pytest.raises(ValueError):
        Bipartition(0, 3)
    with pytest.raises(ValueError):
        Bipartition(2, 0)


def test_kron_examples():
    assert np.array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))
    assert np.array_equal(np.diagonal(kron(Z, Z)).real, [1, -1, -1, 1])
    assert np.array_equal(kron(pure(ket("0")), pure(ket("1"))), pure(ket("01")))


def test_kron_mixed_product(rng):
    a, b, c, d = (rng.standard_normal((2, 2)) for _ in range(4))
    assert np.allclose(kron(a, b) @ kron(c, d), kron(a @ c, b @ d))


def test_partial_trace_product_and_bell(rng):
    part = Bipartition(1, 2)
    ra, rb = random_density_matrix(2, rng), random_density_matrix(4, rng)
    assert np.max(np.abs(partial_trace(kron(ra, rb), part, "A") - ra)) <= 1e-10
    assert np.max(np.abs(partial_trace(kron(ra, rb), part, "B") - rb)) <= 1e-10
    assert np.allclose(partial_trace(pure(BELL), Bipartition(1, 1), "A"), np.eye(2) / 2)


def test_partial_trace_matches_index_loops():
    part = Bipartition(2, 3)
    rho = thermal_state(tfim_hamiltonian(5), 1.0)
    for keep in "AB":
        ref = partial_trace_loops(rho, part.d_a, part.d_b, keep)
        assert np.max(np.abs(partial_trace(rho, part, keep) - ref)) <= 1e-9


def test_partial_trace_dimension_mismatch():
    with pytest.raises(ValueError):
        partial_trace(np.eye(8) / 8, Bipartition(2, 2))


def test_fidelity_examples():
    rho = pure(BELL)
    assert fidelity(rho, rho) == pytest.approx(1, abs=1e-10)
    assert fidelity(pure(ket("0")), pure(PLUS)) == pytest.approx(0.5, abs=1e-12)
    assert fidelity(np.eye(4) / 4, pure(BELL)) == pytest.approx(0.25, abs=1e-12)


def test_fidelity_pure_state_formula(rng):
    psi = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    psi /= np.linalg.norm(psi)
    sigma = random_density_matrix(8, rng)
    assert fidelity(pure(psi), sigma) == pytest.approx(np.real(psi.conj() @ sigma @ psi), abs=1e-9)


def test_fidelity_rejects_negative_state():
    bad = np.diag([1.1, -0.1])
    with pytest.raises(InvalidStateError):
        fidelity(bad, np.eye(2) / 2)


@pytest.mark.parametrize("d", [2, 4, 8])
def test_fidelity_range_and_symmetry(d, rng):
    for _ in range(100):
        rho = random_density_matrix(d, rng, rank=rng.integers(1, d + 1))
        sigma = random_density_matrix(d, rng, rank=rng.integers(1, d + 1))
        f = fidelity(rho, sigma)
        assert 0 <= f <= 1
        assert f == pytest.approx(fidelity(sigma, rho), abs=1e-7)


def test_entropy_examples():
    assert von_neumann_entropy(pure(ket("0"))) == pytest.approx(0, abs=1e-12)
    assert von_neumann_entropy(np.eye(32) / 32) == pytest.approx(5, abs=1e-12)
    # -(3/4) log2(3/4) - (1/4) log2(1/4)
    assert von_neumann_entropy(np.diag([0.75, 0.25])) == pytest.approx(0.8112781244591328, abs=1e-12)


def test_entropy_additive_on_products(rng):
    for _ in range(20):
        ra, rb = random_density_matrix(2, rng), random_density_matrix(4, rng)
        total = von_neumann_entropy(kron(ra, rb))
        assert total == pytest.approx(von_neumann_entropy(ra) + von_neumann_entropy(rb), abs=1e-8)


def test_spectral_decomposition_examples():
    spec = spectral_decomposition(np.eye(2) / 2)
    assert np.allclose(spec.eigenvalues, [0.5, 0.5])
    spec = spectral_decomposition(np.diag([0.1, 0.9]))
    assert np.allclose(spec.eigenvalues, [0.9, 0.1])
    assert np.allclose(np.abs(spec.eigenvectors), [[0, 1], [1, 0]])


def test_spectral_decomposition_matches_jacobi():
    rho = werner_state(8, 0.5)
    ours = spectral_decomposition(rho)
    assert np.max(np.abs(ours.eigenvalues - jacobi_eigenvalues(rho))) <= 1e-9
    assert np.max(np.abs(ours.reconstruct() - rho)) <= 1e-9
    v = ours.eigenvectors
    assert np.allclose(v.conj().T @ v, np.eye(64), atol=1e-10)


def test_apply_unitary_examples(rng):
    rho = random_density_matrix(4, rng)
    assert np.allclose(apply_unitary(rho, np.eye(4)), rho)
    assert np.allclose(apply_unitary(pure(ket("0")), X), pure(ket("1")))
    with pytest.raises(ValueError):
        apply_unitary(rho, 2 * np.eye(4))


def test_apply_unitary_invariants(rng):
    for _ in range(100):
        rho = random_density_matrix(8, rng)
        out = apply_unitary(rho, random_unitary(8, rng))
        assert von_neumann_entropy(out) == pytest.approx(von_neumann_entropy(rho), abs=1e-10)
        assert np.allclose(
            spectral_decomposition(out).eigenvalues, spectral_decomposition(rho).eigenvalues, atol=1e-9
        )


def test_expectation_examples():
    assert expectation(pure(ket("0")), Z) == pytest.approx(1)
    assert expectation(np.eye(2) / 2, Z) == pytest.approx(0)
    assert expectation(pure(ket("1")), Z) == pytest.approx(-1)
    with pytest.raises(ValueError):
        expectation(np.eye(4) / 4, Z)


def test_z_expectations_per_qubit():
    rho = kron(pure(ket("0")), np.eye(2) / 2, pure(ket("1")))
    assert np.allclose(z_expectations(rho), [1, 0, -1])


def test_sqrtm_squares_back(rng):
    for _ in range(20):
        sigma = random_density_matrix(8, rng, rank=rng.integers(1, 9))
        s = sqrtm_psd(sigma)
        assert np.max(np.abs(s @ s - sigma)) <= 1e-8


def test_validate_density_matrix():
    validate_density_matrix(np.eye(4) / 4)
    with pytest.raises(InvalidStateError):
        validate_density_matrix(np.eye(4))
    with pytest.raises(InvalidStateError):
        validate_density_matrix(np.array([[0.5, 0.5j], [0.5, 0.5]]))
    with pytest.raises(ValueError):
        validate_density_matrix(np.eye(3) / 3)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([(1, 1), (1, 2), (2, 1)]))
def test_partial_trace_keeps_unit_trace(seed, split):
    rng = np.random.default_rng(seed)
    part = Bipartition(*split)
    rho = random_density_matrix(part.dim, rng)
    for keep in "AB":
        assert abs(np.trace(partial_trace(rho, part, keep)) - 1) <= 1e-10
