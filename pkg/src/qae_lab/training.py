"""Adam training loop with the convergence rule and adaptive depth schedule."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .circuit import OptimizerState, ParamCircuit, adam_step, build_ansatz

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    """Hyper-parameters of one variational training run.

    Training stops when ``|loss[i] - loss[i - window]| < tolerance`` or after
    ``max_iters`` evaluations. With ``adaptive`` set, the ansatz is retrained at
    depth ``depth_p + depth_step`` (up to ``depth_max``) while the converged loss
    exceeds ``loss_threshold`` and deeper circuits keep improving it. Each
    depth is trained ``restarts`` times from angles uniform on an arc of width
    ``init_spread`` around 0 and the lowest final loss is kept.
    """

    max_iters: int = 2000
    tolerance: float = 1e-5
    window: int = 25
    learning_rate: float = 0.05
    seed: int = 0
    depth_p: int = 2
    adaptive: bool = False
    depth_step: int = 2
    depth_max: int = 8
    loss_threshold: float | None = None
    restarts: int = 1
    init_spread: float = 2 * np.pi

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.depth_p < 0 or self.depth_max < self.depth_p:
            raise ValueError("need 0 <= depth_p <= depth_max")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if not 0 < self.init_spread <= 2 * np.pi:
            raise ValueError("init_spread must lie in (0, 2 pi]")


@dataclass
class TrainReport:
    final_theta: np.ndarray
    loss_history: list[float]
    converged: bool
    iterations_used: int
    circuit: ParamCircuit | None = None
    depth_history: list[tuple[int, float]] = field(default_factory=list)

    @property
    def final_loss(self) -> float:
        return self.loss_history[-1]


Objective = Callable[[np.ndarray], tuple[float, np.ndarray]]


def adam_minimize(objective: Objective, theta0, config: TrainConfig) -> TrainReport:
    theta = np.array(theta0, dtype=float)
    state = OptimizerState.zeros(theta.size, learning_rate=config.learning_rate)
    history: list[float] = []
    converged = False
    for i in range(config.max_iters):
        loss, grad = objective(theta)
        history.append(loss)
        if i >= config.window and abs(loss - history[i - config.window]) < config.tolerance:
            converged = True
            break
        if i == config.max_iters - 1:
            break
        state, theta = adam_step(state, theta, grad)
    return TrainReport(theta, history, converged, len(history))


def train_circuit(
    n_qubits: int, make_objective: Callable[[ParamCircuit], Objective], config: TrainConfig
) -> TrainReport:
    """Train a fresh ansatz, following the depth schedule and keeping the best run."""
    depths = [config.depth_p]
    if config.adaptive:
        depths = list(range(config.depth_p, config.depth_max + 1, max(config.depth_step, 1)))
    best: TrainReport | None = None
    trail: list[tuple[int, float]] = []
    for p in depths:
        c = build_ansatz(n_qubits, p)
        objective = make_objective(c)
        depth_best = None
        for r in range(config.restarts):
            rng = np.random.default_rng([config.seed, p, r])
            rep = adam_minimize(objective, c.init_params(rng, config.init_spread), config)
            rep.circuit = c
            if depth_best is None or rep.final_loss < depth_best.final_loss:
                depth_best = rep
        trail.append((p, depth_best.final_loss))
        improved = best is None or depth_best.final_loss < best.final_loss - 1e-4
        if best is None or depth_best.final_loss < best.final_loss:
            best = depth_best
        if config.loss_threshold is not None and best.final_loss <= config.loss_threshold:
            break
        if not improved:
            break
    if config.adaptive and config.loss_threshold is not None and best.final_loss > config.loss_threshold:
        log.info("loss %.4g above threshold at depth cap", best.final_loss)
        best.converged = False
    best.depth_history = trail
    return best
