"""Dense density-matrix algebra.

States are plain ``complex128`` numpy arrays. Qubit 0 is the most significant
bit of the computational-basis index, and in a bipartition the latent
subsystem A occupies the leading qubits, so ``rho_AB = kron(rho_A, rho_B)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

# eigenvalues in [-EIG_TOL, 0) are floating-point drift and get clipped to 0
EIG_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)


class InvalidStateError(ValueError):
    """Raised when a matrix is not a valid density matrix within tolerance."""


@dataclass(frozen=True)
class Bipartition:
    """Split of ``n_a + n_b`` qubits into latent A (leading) and trash B."""

    n_a: int
    n_b: int

    def __post_init__(self):
        if self.n_a < 1 or self.n_b < 1:
            raise ValueError(f"n_a and n_b must be >= 1, got {self.n_a}, {self.n_b}")

    @property
    def d_a(self) -> int:
        return 2**self.n_a

    @property
    def d_b(self) -> int:
        return 2**self.n_b

    @property
    def n_qubits(self) -> int:
        return self.n_a + self.n_b

    @property
    def dim(self) -> int:
        return self.d_a * self.d_b


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues sorted descending with matching eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T

    def rank(self, tol: float = 1e-9) -> int:
        return int(np.sum(self.eigenvalues > tol))


def num_qubits(dim: int) -> int:
    n = int(round(np.log2(dim)))
    if 2**n != dim:
        raise ValueError(f"dimension {dim} is not a power of 2")
    return n


def validate_density_matrix(rho, atol: float = EIG_TOL) -> np.ndarray:
    """Return ``rho`` as a complex array, raising if it is not a valid state."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidStateError(f"expected a square matrix, got shape {rho.shape}")
    num_qubits(rho.shape[0])
    if np.max(np.abs(rho - rho.conj().T)) > atol:
        raise InvalidStateError("matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > atol:
        raise InvalidStateError(f"trace is {np.trace(rho).real:.3g}, expected 1")
    if np.linalg.eigvalsh(rho)[0] < -atol:
        raise InvalidStateError("matrix has a negative eigenvalue")
    return rho


def is_density_matrix(rho, atol: float = EIG_TOL) -> bool:
    try:
        validate_density_matrix(rho, atol)
    except (InvalidStateError, ValueError):
        return False
    return True


def kron(*ops) -> np.ndarray:
    """Tensor product of any number of operators, left factor most significant."""
    return reduce(np.kron, [np.asarray(op, dtype=complex) for op in ops])


def ket(bits: str) -> np.ndarray:
    """Computational basis vector for a bit string such as ``"010"``."""
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int(bits, 2)] = 1
    return v


def pure(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def embed(op, qubit: int, n: int) -> np.ndarray:
    """Lift a single-qubit operator to act on ``qubit`` of an ``n``-qubit register."""
    return kron(np.eye(2**qubit), op, np.eye(2 ** (n - qubit - 1)))


def partial_trace(rho, part: Bipartition, keep: str = "A") -> np.ndarray:
    """Reduced state on subsystem ``keep`` ("A" or "B")."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (part.dim, part.dim):
        raise ValueError(f"state of shape {rho.shape} does not match {part}")
    t = rho.reshape(part.d_a, part.d_b, part.d_a, part.d_b)
    if keep == "A":
        return np.einsum("ijkj->ik", t)
    if keep == "B":
        return np.einsum("ijil->jl", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def reduce_to_qubit(rho, qubit: int) -> np.ndarray:
    """2x2 marginal of a single qubit."""
    rho = np.asarray(rho)
    n = num_qubits(rho.shape[0])
    a, b = 2**qubit, 2 ** (n - qubit - 1)
    return np.einsum("iajibj->ab", rho.reshape(a, 2, b, a, 2, b))


def z_expectations(rho) -> np.ndarray:
    """``tr(rho Z_j)`` for every qubit j, read off the diagonal."""
    rho = np.asarray(rho)
    n = num_qubits(rho.shape[0])
    probs = np.real(np.diagonal(rho)).reshape((2,) * n)
    out = np.empty(n)
    for j in range(n):
        marg = np.moveaxis(probs, j, 0).reshape(2, -1).sum(axis=1)
        out[j] = marg[0] - marg[1]
    return out


def _clip_eigenvalues(w: np.ndarray) -> np.ndarray:
    if w.size and w.min() < -EIG_TOL:
        raise InvalidStateError(f"eigenvalue {w.min():.3g} below -{EIG_TOL}")
    return np.clip(w, 0.0, None)


def sqrtm_psd(sigma, cutoff: float = 0.0) -> np.ndarray:
    """Principal square root of a PSD matrix via its eigendecomposition.

    Eigenvalues at or below ``cutoff`` are treated as zero.
    """
    w, v = np.linalg.eigh(np.asarray(sigma, dtype=complex))
    w = _clip_eigenvalues(w)
    w[w <= cutoff] = 0.0
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity ``(tr sqrt(sqrt(sigma) rho sqrt(sigma)))**2``.

    Evaluated as the squared trace norm of ``sqrt(rho) sqrt(sigma)``, which avoids
    square roots of the near-zero eigenvalues that low-rank inputs produce.
    Eigenvalues below 1e-14 are rounding noise and are dropped.
    """
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise ValueError(f"shape mismatch {rho.shape} vs {sigma.shape}")
    sv = np.linalg.svd(sqrtm_psd(rho, 1e-14) @ sqrtm_psd(sigma, 1e-14), compute_uv=False)
    return float(min(np.sum(sv) ** 2, 1.0))


def von_neumann_entropy(rho, base: float = 2.0) -> float:
    w = _clip_eigenvalues(np.linalg.eigvalsh(np.asarray(rho, dtype=complex)))
    w = w[w > 0]
    return float(max(-np.sum(w * np.log(w)) / np.log(base), 0.0))


def purity(rho) -> float:
    rho = np.asarray(rho)
    return float(np.real(np.trace(rho @ rho)))


def spectral_decomposition(rho) -> Spectrum:
    w, v = np.linalg.eigh(np.asarray(rho, dtype=complex))
    order = np.argsort(w)[::-1]
    return Spectrum(eigenvalues=w[order], eigenvectors=v[:, order])


def check_unitary(u, atol: float = 1e-9) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {u.shape}")
    if np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0]))) > atol:
        raise ValueError("matrix is not unitary")
    return u


def apply_unitary(rho, u) -> np.ndarray:
    u = check_unitary(u)
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != u.shape:
        raise ValueError(f"shape mismatch {rho.shape} vs {u.shape}")
    return u @ rho @ u.conj().T


def expectation(rho, obs) -> float:
    rho = np.asarray(rho, dtype=complex)
    obs = np.asarray(obs, dtype=complex)
    if rho.shape != obs.shape:
        raise ValueError(f"shape mismatch {rho.shape} vs {obs.shape}")
    # tr(rho obs) without forming the product
    return float(np.real(np.sum(rho * obs.T)))


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a complex Ginibre matrix."""
    g = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(g)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def random_pure_state(d: int, rng: np.random.Generator) -> np.ndarray:
    psi = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return psi / np.linalg.norm(psi)


def random_density_matrix(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random state with Haar eigenbasis and flat-Dirichlet spectrum of the given rank."""
    rank = d if rank is None else rank
    p = np.zeros(d)
    p[:rank] = rng.dirichlet(np.ones(rank))
    u = random_unitary(d, rng)
    return (u * p) @ u.conj().T
