"""Projected quantum autoencoder for ensembles of pure states.

The encoder is trained so that every trash marginal is close to a
computational-basis string. Each state is then decoded from the top
eigenvector of its compressed state together with its own most probable
trash string, so the reconstruction is always pure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circuit import ParamCircuit, build_ansatz, circuit_unitary, value_and_grad, value_and_grad_pure
from .qstate import Bipartition, kron, num_qubits, partial_trace, pure, random_pure_state, spectral_decomposition
from .training import TrainConfig, TrainReport, adam_minimize, train_circuit


@dataclass(frozen=True)
class PureEnsemble:
    """States as rows of ``states``; ``weights`` default to uniform."""

    states: np.ndarray
    weights: np.ndarray | None = None

    def __post_init__(self):
        states = np.atleast_2d(np.asarray(self.states, dtype=complex))
        norms = np.linalg.norm(states, axis=1)
        if np.any(np.abs(norms - 1) > 1e-10):
            raise ValueError("ensemble states must be unit vectors")
        num_qubits(states.shape[1])
        w = np.full(len(states), 1 / len(states)) if self.weights is None else np.asarray(self.weights, float)
        if w.shape != (len(states),) or np.any(w < 0) or abs(w.sum() - 1) > 1e-10:
            raise ValueError("weights must be non-negative, one per state, and sum to 1")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return len(self.states)

    def density_matrix(self) -> np.ndarray:
        return (self.states.T * self.weights) @ self.states.conj()

    @classmethod
    def haar_random(cls, size: int, n_qubits: int, rng: np.random.Generator) -> "PureEnsemble":
        return cls(np.array([random_pure_state(2**n_qubits, rng) for _ in range(size)]))


@dataclass
class ProjectionResult:
    state: np.ndarray
    overlap: float
    theta_w: np.ndarray | None = None
    converged: bool = True
    exact_overlap: float = float("nan")


@dataclass
class PQAEReport:
    fidelities: np.ndarray
    qae_fidelities: np.ndarray
    strings: list[str]
    purities: np.ndarray
    train: TrainReport
    projections: list[ProjectionResult] = field(repr=False, default_factory=list)
    mixture: np.ndarray | None = field(repr=False, default=None)

    @property
    def mean_fidelity(self) -> float:
        return float(np.mean(self.fidelities))

    @property
    def mean_qae_fidelity(self) -> float:
        return float(np.mean(self.qae_fidelities))


def _trash_z_diagonals(part: Bipartition) -> np.ndarray:
    """Row j is the diagonal of Z on trash qubit j, lifted to the full register."""
    idx = np.arange(part.dim) % part.d_b
    return np.array([1 - 2 * ((idx >> (part.n_b - 1 - j)) & 1) for j in range(part.n_b)], dtype=float)


def _lp_head(part: Bipartition, weights: np.ndarray):
    zd = _trash_z_diagonals(part)

    def head(psi):
        z = zd @ np.abs(psi) ** 2  # (n_b, N)
        loss = float(np.dot(weights, 1 - np.sum(z**2, axis=0)))
        coeff = -2 * weights * z  # O_s = sum_j coeff[j, s] Z_j
        return loss, (zd.T @ coeff) * psi

    return head


def pqae_cost(ensemble: PureEnsemble, part: Bipartition, c: ParamCircuit, theta) -> float:
    """Weight-averaged L_p = 1 - sum_j tr(rho_B Z_j)^2 over the ensemble."""
    psi = circuit_unitary(c, theta) @ ensemble.states.T
    return _lp_head(part, ensemble.weights)(psi)[0]


def train_pqae(ensemble: PureEnsemble, part: Bipartition, config: TrainConfig = TrainConfig()) -> TrainReport:
    psis = ensemble.states.T
    head = _lp_head(part, ensemble.weights)
    return train_circuit(part.n_qubits, lambda c: lambda th: value_and_grad_pure(c, th, psis, head), config)


def train_qae_ensemble(ensemble: PureEnsemble, part: Bipartition, config: TrainConfig = TrainConfig()) -> TrainReport:
    """Standard QAE on an ensemble: the weight-averaged trash-state cost."""
    psis = ensemble.states.T
    keep = (np.arange(part.dim) % part.d_b) == 0
    w = ensemble.weights

    def head(psi):
        loss = 1 - float(np.dot(w, np.sum(np.abs(psi[keep]) ** 2, axis=0)))
        return loss, -(keep[:, None] * psi) * w

    return train_circuit(part.n_qubits, lambda c: lambda th: value_and_grad_pure(c, th, psis, head), config)


def most_probable_string(rho_b, tol: float = 1e-12) -> str:
    """Most likely computational-basis outcome; ties go to the smallest string."""
    p = np.real(np.diagonal(np.asarray(rho_b)))
    n = num_qubits(p.size)
    k = int(np.flatnonzero(p >= p.max() - tol)[0])
    return format(k, f"0{n}b")


def project_max_eigenstate(
    rho_a, mode: str = "exact", config: TrainConfig | None = None
) -> ProjectionResult:
    """Top eigenvector of ``rho_a``, exactly or by maximising <0|W rho W^dag|0>."""
    rho_a = np.asarray(rho_a, dtype=complex)
    spec = spectral_decomposition(rho_a)
    exact = float(spec.eigenvalues[0])
    if mode == "exact":
        v = spec.eigenvectors[:, 0]
        return ProjectionResult(v, float(np.real(v.conj() @ rho_a @ v)), exact_overlap=exact)
    if mode != "variational":
        raise ValueError(f"unknown projection mode {mode!r}")
    config = config or TrainConfig(depth_p=2)
    n = num_qubits(rho_a.shape[0])
    c = build_ansatz(n, config.depth_p)
    obs = np.zeros_like(rho_a)
    obs[0, 0] = -1

    def head(outs):
        return 1 - float(np.real(outs[0][0, 0])), [obs]

    rep = adam_minimize(
        lambda th: value_and_grad(c, th, [rho_a], head),
        c.init_params(np.random.default_rng(config.seed)),
        config,
    )
    v = circuit_unitary(c, rep.final_theta).conj().T[:, 0]
    overlap = float(np.real(v.conj() @ rho_a @ v))
    return ProjectionResult(v, overlap, rep.final_theta, rep.converged, exact)


@dataclass
class Reconstruction:
    """Per-state P-QAE and plain-QAE results for a fixed encoder.

    ``pqae_mixture`` and ``qae_mixture`` are the weighted ensemble averages of
    the reconstructed states.
    """

    fidelities: np.ndarray
    qae_fidelities: np.ndarray
    strings: list[str]
    purities: np.ndarray
    projections: list[ProjectionResult]
    pqae_mixture: np.ndarray
    qae_mixture: np.ndarray


def pqae_reconstruct(
    ensemble: PureEnsemble,
    part: Bipartition,
    c: ParamCircuit,
    theta,
    projection: str = "exact",
    projection_config: TrainConfig | None = None,
) -> Reconstruction:
    u = circuit_unitary(c, theta)
    zero_b = np.zeros((part.d_b, part.d_b), dtype=complex)
    zero_b[0, 0] = 1
    fids, qae_fids, strings, purities, projections = [], [], [], [], []
    pqae_mix = np.zeros((part.dim, part.dim), dtype=complex)
    qae_mix = np.zeros_like(pqae_mix)
    for psi, w in zip(ensemble.states, ensemble.weights):
        out = u @ psi
        rho_out = pure(out)
        rho_a = partial_trace(rho_out, part, "A")
        m = most_probable_string(partial_trace(rho_out, part, "B"))
        proj = project_max_eigenstate(rho_a, projection, projection_config)
        m_vec = np.zeros(part.d_b, dtype=complex)
        m_vec[int(m, 2)] = 1
        rec = u.conj().T @ np.kron(proj.state, m_vec)
        compressed = kron(rho_a, zero_b)
        fids.append(abs(np.vdot(psi, rec)) ** 2)
        qae_fids.append(float(np.real(out.conj() @ compressed @ out)))
        strings.append(m)
        purities.append(float(np.linalg.norm(rec) ** 4))
        projections.append(proj)
        pqae_mix += w * pure(rec)
        qae_mix += w * (u.conj().T @ compressed @ u)
    return Reconstruction(
        np.array(fids), np.array(qae_fids), strings, np.array(purities), projections, pqae_mix, qae_mix
    )


def pqae_pipeline(
    ensemble: PureEnsemble,
    part: Bipartition,
    config: TrainConfig = TrainConfig(),
    projection: str = "exact",
    projection_config: TrainConfig | None = None,
) -> PQAEReport:
    """Train on the averaged L_p, then compress, project and decode each state."""
    train = train_pqae(ensemble, part, config)
    rec = pqae_reconstruct(ensemble, part, train.circuit, train.final_theta, projection, projection_config)
    return PQAEReport(
        rec.fidelities, rec.qae_fidelities, rec.strings, rec.purities, train, rec.projections, rec.pqae_mixture
    )


def qae_ensemble_run(
    ensemble: PureEnsemble, part: Bipartition, config: TrainConfig = TrainConfig()
) -> tuple[Reconstruction, TrainReport]:
    """Standard QAE trained on the ensemble; fidelities are in ``qae_fidelities``."""
    train = train_qae_ensemble(ensemble, part, config)
    return pqae_reconstruct(ensemble, part, train.circuit, train.final_theta), train
