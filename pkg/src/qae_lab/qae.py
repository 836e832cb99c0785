"""Standard and noise-assisted quantum autoencoders.

Standard QAE trains the encoder on the trash-state cost and decodes from
``rho_A_out x |0..0><0..0|``. The noise-assisted variant trains on the
diagonalisation cost ``tr[rho_B_out H_cost]``, reads per-qubit noise rates off
the trash marginal and decodes from a product of diagonal mixed qubits.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .circuit import ParamCircuit, circuit_unitary, value_and_grad
from .models import cost_hamiltonian
from .qstate import (
    X,
    Bipartition,
    fidelity,
    kron,
    partial_trace,
    spectral_decomposition,
    von_neumann_entropy,
    z_expectations,
)
from .training import TrainConfig, TrainReport, train_circuit

log = logging.getLogger(__name__)

VARIANTS = ("qae", "nqae")


@dataclass(frozen=True)
class NoiseSchedule:
    epsilon: np.ndarray

    def __post_init__(self):
        eps = np.asarray(self.epsilon, dtype=float)
        if eps.ndim != 1 or np.any(eps < 0) or np.any(eps > 0.5 + 1e-9):
            raise ValueError(f"noise rates must lie in [0, 1/2], got {eps}")
        object.__setattr__(self, "epsilon", eps)


def trash_projector(part: Bipartition) -> np.ndarray:
    """I_A x |0..0><0..0|_B."""
    p0 = np.zeros((part.d_b, part.d_b), dtype=complex)
    p0[0, 0] = 1
    return kron(np.eye(part.d_a), p0)


def _encoded(rho_in, c: ParamCircuit, theta) -> np.ndarray:
    u = circuit_unitary(c, theta)
    return u @ np.asarray(rho_in, dtype=complex) @ u.conj().T


def trash_cost(rho_in, part: Bipartition, c: ParamCircuit, theta) -> float:
    """L_d = 1 - tr[(I_A x |0><0|_B) U rho U^dag]."""
    rho_out = _encoded(rho_in, c, theta)
    return float(1 - np.real(np.trace(trash_projector(part) @ rho_out)))


def diag_cost(rho_in, part: Bipartition, c: ParamCircuit, theta, h_cost=None) -> float:
    h_cost = cost_hamiltonian(part.n_b) if h_cost is None else np.asarray(h_cost)
    rho_b = partial_trace(_encoded(rho_in, c, theta), part, keep="B")
    return float(np.real(np.trace(rho_b @ h_cost)))


def _objective(rho_in, part: Bipartition, variant: str, h_cost=None):
    if variant == "qae":
        obs = -trash_projector(part)
        offset = 1.0
    elif variant == "nqae":
        h_cost = cost_hamiltonian(part.n_b) if h_cost is None else np.asarray(h_cost)
        obs = kron(np.eye(part.d_a), h_cost)
        offset = 0.0
    else:
        raise ValueError(f"unknown variant {variant!r}, expected one of {VARIANTS}")
    rho_in = np.asarray(rho_in, dtype=complex)

    def head(outs):
        return offset + float(np.real(np.sum(outs[0] * obs.T))), [obs]

    def make(c: ParamCircuit):
        return lambda theta: value_and_grad(c, theta, [rho_in], head)

    return make


def train_encoder(
    rho_in, part: Bipartition, variant: str = "qae", config: TrainConfig = TrainConfig(), h_cost=None
) -> TrainReport:
    """Adam-train the encoder on L_d (``qae``) or on the diagonalisation cost (``nqae``)."""
    if np.asarray(rho_in).shape != (part.dim, part.dim):
        raise ValueError(f"state of shape {np.shape(rho_in)} does not match {part}")
    return train_circuit(part.n_qubits, _objective(rho_in, part, variant, h_cost), config)


def optimal_trash_cost(rho_in, part: Bipartition) -> float:
    """Best achievable L_d: one minus the d_A largest eigenvalues."""
    return 1 - qae_fidelity_bound(rho_in, part)


def optimal_diag_cost(rho_in, part: Bipartition, h_cost=None) -> float:
    """Best achievable diagonalisation cost, pairing the spectrum with I_A x H_cost levels."""
    h_cost = cost_hamiltonian(part.n_b) if h_cost is None else np.asarray(h_cost)
    levels = np.sort(np.repeat(np.real(np.diagonal(h_cost)), part.d_a))
    p = spectral_decomposition(rho_in).eigenvalues
    return float(np.dot(p, levels))


def noise_rates(rho_b_out) -> NoiseSchedule:
    """eps_j = 1/2 - tr[rho_B Z_j] / 2, clamped to [0, 1/2]."""
    eps = 0.5 - 0.5 * z_expectations(rho_b_out)
    if np.any(eps > 0.5 + 1e-9):
        log.warning("noise rates %s exceed 1/2; encoder left an inverted trash qubit", eps)
    return NoiseSchedule(np.clip(eps, 0.0, 0.5))


def noise_input_state(sched: NoiseSchedule) -> np.ndarray:
    return kron(*[np.diag([1 - e, e]) for e in sched.epsilon])


def amplitude_damping(rho, t_over_t1: float) -> np.ndarray:
    """Single-qubit amplitude damping with decay probability 1 - exp(-t/T1)."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise ValueError(f"amplitude damping acts on one qubit, got shape {rho.shape}")
    if t_over_t1 < 0:
        raise ValueError("t/T1 must be non-negative")
    gamma = -np.expm1(-t_over_t1)
    k0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=complex)
    k1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=complex)
    return k0 @ rho @ k0.conj().T + k1 @ rho @ k1.conj().T


def damping_time(eps: float) -> float:
    """t/T1 for which X N(|1><1|) X equals diag(1 - eps, eps)."""
    return float(-np.log1p(-eps))


def damped_noise_input(sched: NoiseSchedule) -> np.ndarray:
    """Prepare the decoder input physically: damp |1><1| for t_j, then flip with X."""
    one = np.diag([0, 1]).astype(complex)
    qubits = [X @ amplitude_damping(one, damping_time(e)) @ X for e in sched.epsilon]
    return kron(*qubits)


def decode(rho_a_out, b_prime_in, c: ParamCircuit, theta) -> np.ndarray:
    """U^dag (rho_A_out x rho_B'_in) U."""
    joint = kron(rho_a_out, b_prime_in)
    if joint.shape != (c.dim, c.dim):
        raise ValueError(f"decoder input of dimension {joint.shape[0]} does not match circuit {c.dim}")
    u = circuit_unitary(c, theta)
    return u.conj().T @ joint @ u


def qae_fidelity_bound(rho_in, part: Bipartition) -> float:
    """Sum of the d_A largest eigenvalues, the reconstruction-fidelity ceiling of standard QAE."""
    p = spectral_decomposition(rho_in).eigenvalues
    return float(min(np.sum(p[: part.d_a]), 1.0))


@dataclass
class PipelineReport:
    variant: str
    fidelity: float
    input_entropy: float
    output_entropy: float
    epsilons: np.ndarray
    train: TrainReport
    decoupling_fidelity: float = field(default=float("nan"))

    @property
    def final_loss(self) -> float:
        return self.train.final_loss


def reconstruct(rho_in, part: Bipartition, variant: str, c: ParamCircuit, theta):
    """Compress with a trained encoder and decode; returns (rho_rec, schedule, rho_out)."""
    rho_out = _encoded(rho_in, c, theta)
    rho_a = partial_trace(rho_out, part, keep="A")
    sched = noise_rates(partial_trace(rho_out, part, keep="B"))
    if variant == "nqae":
        b_in = damped_noise_input(sched)
    else:
        b_in = noise_input_state(NoiseSchedule(np.zeros(part.n_b)))
    return decode(rho_a, b_in, c, theta), sched, rho_out


def run_pipeline(
    rho_in, part: Bipartition, variant: str = "qae", config: TrainConfig = TrainConfig(), h_cost=None
) -> tuple[np.ndarray, PipelineReport]:
    """Train, compress, measure the trash, prepare the decoder input and decode."""
    train = train_encoder(rho_in, part, variant, config, h_cost)
    rho_rec, sched, rho_out = reconstruct(rho_in, part, variant, train.circuit, train.final_theta)
    product = kron(partial_trace(rho_out, part, "A"), partial_trace(rho_out, part, "B"))
    report = PipelineReport(
        variant=variant,
        fidelity=fidelity(rho_in, rho_rec),
        input_entropy=von_neumann_entropy(rho_in),
        output_entropy=von_neumann_entropy(rho_rec),
        epsilons=sched.epsilon,
        train=train,
        decoupling_fidelity=fidelity(rho_out, product),
    )
    return rho_rec, report
