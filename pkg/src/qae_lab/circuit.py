"""Layered rotation/CNOT ansatz, its gradients, and the Adam optimizer.

Layout of ``build_ansatz(n, p)``: an R_Y layer and an R_Z layer on every
qubit, then ``p`` blocks of (CNOT ladder, R_Z layer, R_Y layer, R_Z layer).
The CNOT ladder acts on neighbouring pairs (0,1), (1,2), ... with the lower
index as control. Rotations use half-angle generators, R(t) = exp(-i t P / 2).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, NamedTuple, Sequence

import numpy as np



class Gate(NamedTuple):
    name: str  # "ry", "rz" or "cnot"
    qubits: tuple[int, ...]
    param: int | None = None


def ry(t: float) -> np.ndarray:
    c, s = np.cos(t / 2), np.sin(t / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz(t: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)])


ROTATIONS = {"ry": ry, "rz": rz}


def cnot(control: int, target: int, n: int) -> np.ndarray:
    dim = 2**n
    idx = np.arange(dim)
    cbit = (idx >> (n - 1 - control)) & 1
    flipped = idx ^ (cbit << (n - 1 - target))
    u = np.zeros((dim, dim), dtype=complex)
    u[flipped, idx] = 1
    return u


@dataclass(frozen=True)
class ParamCircuit:
    n_qubits: int
    depth_p: int
    layout: tuple[Gate, ...] = field(repr=False)

    @property
    def param_count(self) -> int:
        return sum(g.param is not None for g in self.layout)

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    def init_params(self, rng: np.random.Generator, spread: float = 2 * np.pi) -> np.ndarray:
        """Angles uniform on an arc of width ``spread`` centred on 0, wrapped into [0, 2 pi).

        The default is uniform on [0, 2 pi). Losses are 2 pi periodic in every
        angle (a shift flips only the global phase), so narrow arcs start near
        the identity circuit.
        """
        return np.mod(rng.uniform(-spread / 2, spread / 2, self.param_count), 2 * np.pi)


def build_ansatz(n_qubits: int, depth_p: int) -> ParamCircuit:
    if n_qubits < 1 or depth_p < 0:
        raise ValueError(f"need n_qubits >= 1 and depth_p >= 0, got {n_qubits}, {depth_p}")
    gates: list[Gate] = []
    k = 0

    def rotation_layer(name):
        nonlocal k
        for q in range(n_qubits):
            gates.append(Gate(name, (q,), k))
            k += 1

    rotation_layer("ry")
    rotation_layer("rz")
    for _ in range(depth_p):
        for q in range(n_qubits - 1):
            gates.append(Gate("cnot", (q, q + 1)))
        rotation_layer("rz")
        rotation_layer("ry")
        rotation_layer("rz")
    return ParamCircuit(n_qubits, depth_p, tuple(gates))


class Layer(NamedTuple):
    unitary: np.ndarray
    kind: str  # "ry", "rz" or "cnot"
    params: tuple[int, ...]  # parameter index per qubit, -1 where the qubit is idle
    diagonal: np.ndarray | None = None  # set for R_Z layers, which are diagonal


def _group(c: ParamCircuit) -> list[tuple[str, list[Gate]]]:
    groups: list[tuple[str, list[Gate]]] = []
    for g in c.layout:
        if groups and groups[-1][0] == g.name and (
            g.name == "cnot" or g.qubits[0] not in {h.qubits[0] for h in groups[-1][1]}
        ):
            groups[-1][1].append(g)
        else:
            groups.append((g.name, [g]))
    return groups


@lru_cache(maxsize=64)
def _structure(c: ParamCircuit):
    """Per layer: kind, parameter index per qubit, and the fixed CNOT unitary if any."""
    out = []
    for name, gates in _group(c):
        if name == "cnot":
            u = np.eye(c.dim, dtype=complex)
            for g in gates:
                u = cnot(*g.qubits, c.n_qubits) @ u
            out.append((name, (), u))
        else:
            params = [-1] * c.n_qubits
            for g in gates:
                params[g.qubits[0]] = g.param
            out.append((name, tuple(params), None))
    return out


@lru_cache(maxsize=16)
def _z_signs(n: int) -> np.ndarray:
    idx = np.arange(2**n)
    return np.array([1 - 2 * ((idx >> (n - 1 - q)) & 1) for q in range(n)], dtype=float)


def _kron_list(factors) -> np.ndarray:
    out = factors[0]
    for f in factors[1:]:
        d = out.shape[0]
        out = (out[:, None, :, None] * f[None, :, None, :]).reshape(2 * d, 2 * d)
    return out


def circuit_layers(c: ParamCircuit, theta) -> list[Layer]:
    """Split the circuit into layers of mutually commuting gates."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (c.param_count,):
        raise ValueError(f"expected {c.param_count} parameters, got shape {theta.shape}")
    layers = []
    for name, params, fixed in _structure(c):
        if name == "cnot":
            layers.append(Layer(fixed, name, params))
            continue
        angles = np.array([theta[k] if k >= 0 else 0.0 for k in params])
        if name == "rz":
            phase = np.exp(-0.5j * (angles @ _z_signs(c.n_qubits)))
            layers.append(Layer(np.diag(phase), name, params, phase))
        else:
            layers.append(Layer(_kron_list([ry(a) for a in angles]), name, params))
    return layers


def _forward(layer: Layer, rho: np.ndarray) -> np.ndarray:
    if layer.diagonal is not None:
        d = layer.diagonal
        return d[:, None] * rho * d.conj()[None, :]
    return layer.unitary @ rho @ layer.unitary.conj().T


def _backward(layer: Layer, obs: np.ndarray) -> np.ndarray:
    if layer.diagonal is not None:
        d = layer.diagonal
        return d.conj()[:, None] * obs * d[None, :]
    return layer.unitary.conj().T @ obs @ layer.unitary


def circuit_unitary(c: ParamCircuit, theta) -> np.ndarray:
    u = np.eye(c.dim, dtype=complex)
    for layer in circuit_layers(c, theta):
        u = layer.unitary @ u
    return u


# Head: maps the list of output states to (loss, dloss/drho for each state).
# The derivative is returned as a Hermitian O_s with dloss = sum_s tr(O_s drho_s).
Head = Callable[[list[np.ndarray]], tuple[float, list[np.ndarray]]]


def _pauli_tables(n: int) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    """Index and phase tables so that tr(P_q M) = sum_x phase[q, x] M[src[q, x], x]."""
    idx = np.arange(2**n)
    bits = np.array([(idx >> (n - 1 - q)) & 1 for q in range(n)])
    flip = idx[None, :] ^ (1 << (n - 1 - np.arange(n)))[:, None]
    # (Y_q)_{x, x^q}: -i when bit q of x is 0, +i when it is 1
    return {
        "rz": (np.broadcast_to(idx, (n, idx.size)), (1 - 2 * bits).astype(complex)),
        "ry": (flip, np.where(bits == 0, -1j, 1j)),
    }


_TABLES: dict[int, dict] = {}


def _pauli_traces(m: np.ndarray, kind: str, n: int) -> np.ndarray:
    """tr(P_q M) for every qubit q, P = Z or Y."""
    if n not in _TABLES:
        _TABLES[n] = _pauli_tables(n)
    src, phase = _TABLES[n][kind]
    cols = np.arange(m.shape[0])
    return np.sum(phase * m[src, cols], axis=1)


def _accumulate(grad: np.ndarray, layer: Layer, per_qubit: np.ndarray) -> None:
    for q, k in enumerate(layer.params):
        if k >= 0:
            grad[k] += per_qubit[q]


def value_and_grad(c: ParamCircuit, theta, states: Sequence[np.ndarray], head: Head):
    """Loss and exact gradient by back-propagating the observable through the layers.

    Each input state is pushed through U(theta); ``head`` turns the outputs into
    a loss. For a rotation on qubit q in a layer whose output is rho, with the
    back-propagated observable O at that point, d loss / d theta = -i/2 tr(P_q [rho, O]).
    """
    layers = circuit_layers(c, theta)
    n = c.n_qubits
    trajectories = []
    for rho in states:
        traj = []
        for layer in layers:
            rho = _forward(layer, rho)
            traj.append(rho)
        trajectories.append(traj)
    loss, observables = head([t[-1] for t in trajectories])
    grad = np.zeros(c.param_count)
    for traj, obs in zip(trajectories, observables):
        for layer, rho in zip(reversed(layers), reversed(traj)):
            if layer.kind != "cnot":
                comm = rho @ obs
                comm = comm - comm.conj().T
                _accumulate(grad, layer, np.real(-0.5j * _pauli_traces(comm, layer.kind, n)))
            obs = _backward(layer, obs)
    return float(loss), grad


def value_and_grad_pure(c: ParamCircuit, theta, psis, head):
    """Batched state-vector counterpart of :func:`value_and_grad`.

    ``psis`` holds one input state per column. ``head`` maps the output columns
    to ``(loss, phis)`` where column s of ``phis`` is ``O_s psi_s`` and the loss
    varies as ``sum_s <psi_s|O_s|psi_s>``.
    """
    layers = circuit_layers(c, theta)
    n = c.n_qubits
    psi = np.asarray(psis, dtype=complex)
    traj = []
    for layer in layers:
        psi = layer.diagonal[:, None] * psi if layer.diagonal is not None else layer.unitary @ psi
        traj.append(psi)
    loss, phi = head(psi)
    grad = np.zeros(c.param_count)
    for layer, psi in zip(reversed(layers), reversed(traj)):
        if layer.kind != "cnot":
            m = psi @ phi.conj().T
            _accumulate(grad, layer, np.real(-1j * _pauli_traces(m, layer.kind, n)))
        if layer.diagonal is not None:
            phi = layer.diagonal.conj()[:, None] * phi
        else:
            phi = layer.unitary.conj().T @ phi
    return float(loss), grad


def gradient(cost: Callable, theta, scheme: str = "parameter-shift", h: float = 1e-5) -> np.ndarray:
    """Gradient of ``cost`` by parameter shift or central differences.

    ``cost`` may return a scalar or an array; the result has the derivative with
    respect to ``theta[i]`` in row ``i``. Parameter shift is exact only when the
    output is an expectation value of a fixed observable after the circuit.
    """
    theta = np.asarray(theta, dtype=float)
    if scheme == "parameter-shift":
        shift, scale = np.pi / 2, 0.5
    elif scheme == "central-difference":
        shift, scale = h, 1 / (2 * h)
    else:
        raise ValueError(f"unknown gradient scheme {scheme!r}")
    rows = []
    for i in range(theta.size):
        e = np.zeros_like(theta)
        e[i] = shift
        rows.append(scale * (np.asarray(cost(theta + e)) - np.asarray(cost(theta - e))))
    return np.array(rows)


@dataclass(frozen=True)
class OptimizerState:
    first_moment: np.ndarray
    second_moment: np.ndarray
    step_count: int = 0
    learning_rate: float = 0.05
    beta1: float = 0.9
    beta2: float = 0.999
    eps_adam: float = 1e-8

    @classmethod
    def zeros(cls, size: int, **kwargs) -> "OptimizerState":
        return cls(np.zeros(size), np.zeros(size), **kwargs)


def adam_step(state: OptimizerState, theta, grad) -> tuple[OptimizerState, np.ndarray]:
    theta = np.asarray(theta, dtype=float)
    grad = np.asarray(grad, dtype=float)
    if not (theta.shape == grad.shape == state.first_moment.shape):
        raise ValueError("theta, grad and optimizer moments must have equal length")
    t = state.step_count + 1
    m = state.beta1 * state.first_moment + (1 - state.beta1) * grad
    v = state.beta2 * state.second_moment + (1 - state.beta2) * grad**2
    m_hat = m / (1 - state.beta1**t)
    v_hat = v / (1 - state.beta2**t)
    new_theta = theta - state.learning_rate * m_hat / (np.sqrt(v_hat) + state.eps_adam)
    return replace(state, first_moment=m, second_moment=v, step_count=t), new_theta
