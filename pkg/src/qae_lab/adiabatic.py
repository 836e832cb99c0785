"""Adiabatic (and noise-assisted adiabatic) quantum autoencoders.

The encoder anneals H -> H_l, the decoder anneals H_l -> H. Both use a
piecewise-constant midpoint propagator, so every step is exactly unitary and
the spectrum of the evolved state is preserved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .models import latent_hamiltonian, thermal_state
from .qae import NoiseSchedule, damped_noise_input, noise_input_state, noise_rates
from .qstate import Bipartition, fidelity, kron, partial_trace, von_neumann_entropy

VARIANTS = ("aqae", "naqae")


@dataclass(frozen=True)
class AnnealSchedule:
    h_start: np.ndarray
    h_end: np.ndarray
    t_a: float
    dt: float = 0.1

    def __post_init__(self):
        if np.shape(self.h_start) != np.shape(self.h_end):
            raise ValueError("start and end Hamiltonians differ in dimension")
        if not (self.t_a > 0 and self.dt > 0):
            raise ValueError("t_a and dt must be positive")
        if self.dt > self.t_a:
            raise ValueError(f"dt={self.dt} exceeds t_a={self.t_a}")

    @property
    def n_steps(self) -> int:
        # tolerate t_a/dt landing a hair above an integer
        return max(1, math.ceil(self.t_a / self.dt - 1e-9))

    def reversed(self) -> "AnnealSchedule":
        return AnnealSchedule(self.h_end, self.h_start, self.t_a, self.dt)


def interpolate(sched: AnnealSchedule, t: float) -> np.ndarray:
    """(1 - t/t_a) h_start + (t/t_a) h_end."""
    if not 0 <= t <= sched.t_a:
        raise ValueError(f"t={t} outside [0, {sched.t_a}]")
    s = t / sched.t_a
    return (1 - s) * np.asarray(sched.h_start) + s * np.asarray(sched.h_end)


def step_unitary(h, tau: float) -> np.ndarray:
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * tau)) @ v.conj().T


def anneal_unitary(sched: AnnealSchedule) -> np.ndarray:
    """Time-ordered product of midpoint step propagators.

    ``n_steps = ceil(t_a / dt)`` equal steps of length ``t_a / n_steps``.
    """
    n = sched.n_steps
    tau = sched.t_a / n
    u = np.eye(np.shape(sched.h_start)[0], dtype=complex)
    for k in range(n):
        u = step_unitary(interpolate(sched, (k + 0.5) * tau), tau) @ u
    return u


def evolve(rho, sched: AnnealSchedule) -> np.ndarray:
    u = anneal_unitary(sched)
    return u @ np.asarray(rho, dtype=complex) @ u.conj().T


@dataclass
class AnnealReport:
    variant: str
    fidelity: float
    input_entropy: float
    output_entropy: float
    epsilons: np.ndarray
    n_steps: int
    t_a: float


def anneal_pair(h, h_l, t_a: float, dt: float = 0.1) -> tuple[np.ndarray, np.ndarray, int]:
    """Encoder and decoder propagators for the H -> H_l -> H round trip."""
    enc = AnnealSchedule(h, h_l, t_a, dt)
    return anneal_unitary(enc), anneal_unitary(enc.reversed()), enc.n_steps


def aqae_run(
    h,
    beta: float,
    part: Bipartition,
    h_l=None,
    t_a: float = 1000.0,
    variant: str = "aqae",
    dt: float = 0.1,
    unitaries: tuple[np.ndarray, np.ndarray, int] | None = None,
    rho_in=None,
) -> tuple[np.ndarray, AnnealReport]:
    """Anneal the thermal state of ``h`` into ``h_l``, compress, and anneal back.

    ``unitaries`` may carry a precomputed ``anneal_pair`` so that both variants
    share one integration. ``rho_in`` overrides the thermal input state.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}, expected one of {VARIANTS}")
    h = np.asarray(h, dtype=complex)
    h_l = latent_hamiltonian(part.n_a, part.n_b) if h_l is None else np.asarray(h_l)
    if h.shape != (part.dim, part.dim):
        raise ValueError(f"Hamiltonian of shape {h.shape} does not match {part}")
    enc, dec, n_steps = unitaries if unitaries is not None else anneal_pair(h, h_l, t_a, dt)
    rho = thermal_state(h, beta) if rho_in is None else np.asarray(rho_in, dtype=complex)
    rho_out = enc @ rho @ enc.conj().T
    rho_a = partial_trace(rho_out, part, keep="A")
    sched = noise_rates(partial_trace(rho_out, part, keep="B"))
    if variant == "naqae":
        b_in = damped_noise_input(sched)
    else:
        b_in = noise_input_state(NoiseSchedule(np.zeros(part.n_b)))
    rho_rec = dec @ kron(rho_a, b_in) @ dec.conj().T
    report = AnnealReport(
        variant=variant,
        fidelity=fidelity(rho, rho_rec),
        input_entropy=von_neumann_entropy(rho),
        output_entropy=von_neumann_entropy(rho_rec),
        epsilons=sched.epsilon,
        n_steps=n_steps,
        t_a=t_a,
    )
    return rho_rec, report
