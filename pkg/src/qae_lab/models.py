"""Hamiltonians and state families: TFIM, Gibbs states, Werner states, cost observables."""

from __future__ import annotations

import numpy as np

from .qstate import X, Z, embed, kron


def hermitian_function(h, fn) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix through its eigendecomposition."""
    w, v = np.linalg.eigh(np.asarray(h, dtype=complex))
    return (v * fn(w)) @ v.conj().T


def tfim_hamiltonian(n: int, j_coupling: float = 1.0, g_field: float = 1.0) -> np.ndarray:
    """Open-chain H = -J (sum_j Z_j Z_{j+1} + g sum_j X_j)."""
    if n < 2:
        raise ValueError(f"TFIM needs at least 2 sites, got {n}")
    h = np.zeros((2**n, 2**n), dtype=complex)
    for j in range(n - 1):
        h -= j_coupling * embed(Z, j, n) @ embed(Z, j + 1, n)
    for j in range(n):
        h -= j_coupling * g_field * embed(X, j, n)
    return h


def thermal_state(h, beta: float) -> np.ndarray:
    """Gibbs state exp(-beta H) / Z, stabilised by shifting the ground energy to zero."""
    if not (np.isfinite(beta) and beta >= 0):
        raise ValueError(f"beta must be finite and non-negative, got {beta}")
    w, v = np.linalg.eigh(np.asarray(h, dtype=complex))
    weights = np.exp(-beta * (w - w.min()))
    weights /= weights.sum()
    rho = (v * weights) @ v.conj().T
    return (rho + rho.conj().T) / 2


def default_weights(n_b: int) -> np.ndarray:
    return 1.0 / 2.0 ** np.arange(n_b)


def cost_hamiltonian(n_b: int, r=None) -> np.ndarray:
    """Diagonal H_cost = 1 - sum_j r_j Z_j on the trash register."""
    r = default_weights(n_b) if r is None else np.asarray(r, dtype=float)
    if r.shape != (n_b,):
        raise ValueError(f"need {n_b} weights, got shape {r.shape}")
    idx = np.arange(2**n_b)
    diag = np.ones(2**n_b)
    for j in range(n_b):
        z = 1 - 2 * ((idx >> (n_b - 1 - j)) & 1)
        diag -= r[j] * z
    return np.diag(diag).astype(complex)


def latent_hamiltonian(n_a: int, n_b: int, r=None, kind: str = "field") -> np.ndarray:
    """I_A tensor a trash-register Hamiltonian.

    ``kind="field"`` uses H_cost; ``kind="zz"`` uses -sum_j Z_j - sum_j Z_j Z_{j+1}.
    """
    if kind == "field":
        hb = cost_hamiltonian(n_b, r)
    elif kind == "zz":
        hb = np.zeros((2**n_b, 2**n_b), dtype=complex)
        for j in range(n_b):
            hb -= embed(Z, j, n_b)
        for j in range(n_b - 1):
            hb -= embed(Z, j, n_b) @ embed(Z, j + 1, n_b)
    else:
        raise ValueError(f"unknown latent Hamiltonian kind {kind!r}")
    return kron(np.eye(2**n_a), hb)


def swap_operator(d: int) -> np.ndarray:
    """F = sum_{kj} |kj><jk| on C^d tensor C^d."""
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    f = np.zeros((d * d, d * d), dtype=complex)
    for k in range(d):
        for j in range(d):
            f[k * d + j, j * d + k] = 1
    return f


def werner_state(d: int, alpha: float) -> np.ndarray:
    if not -1 <= alpha <= 1:
        raise ValueError(f"alpha must lie in [-1, 1], got {alpha}")
    return (np.eye(d * d) - alpha * swap_operator(d)) / (d * d - d * alpha)


def werner_log_hamiltonian(d: int, alpha: float) -> np.ndarray:
    """H_alpha = -log rho_W(alpha), so that exp(-H_alpha) is the Werner state."""
    if not -1 < alpha < 1:
        raise ValueError(f"alpha must lie strictly inside (-1, 1), got {alpha}")
    h = hermitian_function(werner_state(d, alpha), lambda w: -np.log(w))
    return (h + h.conj().T) / 2
