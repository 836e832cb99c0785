import numpy as np
import pytest

from qae_lab.circuit import (
    OptimizerState,
    adam_step,
    build_ansatz,
    circuit_unitary,
    gradient,
    ry,
    value_and_grad,
    value_and_grad_pure,
)
from qae_lab.qstate import Z, embed, expectation, fidelity, ket, pure, random_density_matrix
from qae_lab.training import TrainConfig, adam_minimize


def test_param_counts():
    assert build_ansatz(5, 0).param_count == 10
    assert build_ansatz(5, 4).param_count == 70
    for n, p in [(1, 0), (3, 2), (6, 5)]:
        c = build_ansatz(n, p)
        assert c.param_count == 2 * n + 3 * n * p
        assert sorted(g.param for g in c.layout if g.param is not None) == list(range(c.param_count))


def test_layout_order():
    c = build_ansatz(3, 1)
    names = [g.name for g in c.layout]
    assert names == ["ry"] * 3 + ["rz"] * 3 + ["cnot"] * 2 + ["rz"] * 3 + ["ry"] * 3 + ["rz"] * 3
    assert [g.qubits for g in c.layout if g.name == "cnot"] == [(0, 1), (1, 2)]


def test_single_qubit_has_no_cnot():
    c = build_ansatz(1, 3)
    assert all(g.name != "cnot" for g in c.layout)
    assert c.param_count == 11


def test_zero_angles_give_identity():
    c = build_ansatz(3, 0)
    assert np.allclose(circuit_unitary(c, np.zeros(c.param_count)), np.eye(8))


def test_pi_rotation_flips_qubit():
    u = circuit_unitary(build_ansatz(1, 0), [np.pi, 0.0])
    assert abs(u[1, 0]) == pytest.approx(1, abs=1e-12)


def test_length_mismatch():
    with pytest.raises(ValueError):
        circuit_unitary(build_ansatz(2, 1), np.zeros(3))


def test_unitary_for_random_angles(rng):
    c = build_ansatz(5, 4)
    for _ in range(100):
        u = circuit_unitary(c, c.init_params(rng))
        assert np.max(np.abs(u @ u.conj().T - np.eye(32))) <= 1e-9
    assert np.allclose(np.abs(np.linalg.eigvals(u)), 1, atol=1e-9)


def test_gradient_of_cosine():
    def cost(theta):
        psi = ry(theta[0]) @ ket("0")
        return expectation(pure(psi), Z)

    for scheme in ("parameter-shift", "central-difference"):
        g = gradient(cost, np.array([np.pi / 2]), scheme)
        assert g[0] == pytest.approx(-1, abs=1e-8)
    assert np.allclose(gradient(lambda t: 3.0, np.ones(4)), 0)


def test_adjoint_gradient_matches_shift_rules(rng):
    c = build_ansatz(3, 2)
    rho = random_density_matrix(8, rng)
    obs = embed(Z, 2, 3) + 0.5 * embed(Z, 0, 3)

    def cost(theta):
        u = circuit_unitary(c, theta)
        return expectation(u @ rho @ u.conj().T, obs)

    def head(outs):
        return expectation(outs[0], obs), [obs]

    for _ in range(5):
        theta = c.init_params(rng)
        value, g = value_and_grad(c, theta, [rho], head)
        assert value == pytest.approx(cost(theta), abs=1e-12)
        assert np.allclose(g, gradient(cost, theta), atol=1e-10)
        assert np.allclose(g, gradient(cost, theta, "central-difference"), atol=1e-6)


def test_pure_path_matches_density_path(rng):
    c = build_ansatz(3, 1)
    psis = np.array([np.linalg.qr(rng.standard_normal((8, 8)))[0][:, k] for k in range(3)]).T.astype(complex)
    diag = np.real(np.diagonal(embed(Z, 1, 3)))

    def head_pure(psi):
        return float(np.sum(diag[:, None] * np.abs(psi) ** 2)), diag[:, None] * psi

    def head_dm(outs):
        return sum(float(np.real(np.sum(np.diagonal(r) * diag))) for r in outs), [np.diag(diag)] * len(outs)

    theta = c.init_params(rng)
    v1, g1 = value_and_grad_pure(c, theta, psis, head_pure)
    v2, g2 = value_and_grad(c, theta, [pure(p) for p in psis.T], head_dm)
    assert v1 == pytest.approx(v2, abs=1e-12)
    assert np.allclose(g1, g2, atol=1e-12)


def test_adam_zero_gradient_keeps_theta():
    state = OptimizerState.zeros(3)
    theta = np.array([0.1, 0.2, 0.3])
    state, new = adam_step(state, theta, np.zeros(3))
    assert np.array_equal(new, theta)
    assert state.step_count == 1


def test_adam_first_step_is_signed_learning_rate():
    state = OptimizerState.zeros(3)
    grad = np.array([1.0, -2.0, 0.5])
    _, new = adam_step(state, np.zeros(3), grad)
    assert np.allclose(new, -0.05 * np.sign(grad), atol=1e-6)


def test_adam_converges_on_parabola():
    state = OptimizerState.zeros(1)
    theta = np.array([1.0])
    for _ in range(500):
        state, theta = adam_step(state, theta, 2 * theta)
    assert abs(theta[0]) <= 1e-3
    assert state.step_count == 500


def test_adam_length_mismatch():
    with pytest.raises(ValueError):
        adam_step(OptimizerState.zeros(2), np.zeros(3), np.zeros(3))


def test_bell_state_is_reachable():
    c = build_ansatz(2, 1)
    target = pure(np.array([1, 0, 0, 1]) / np.sqrt(2))
    start = pure(ket("00"))
    obs = -target

    def objective(theta):
        return value_and_grad(c, theta, [start], lambda outs: (expectation(outs[0], obs), [obs]))

    best = max(
        fidelity(circuit_unitary(c, r.final_theta) @ start @ circuit_unitary(c, r.final_theta).conj().T, target)
        for r in (
            adam_minimize(objective, c.init_params(np.random.default_rng(s)), TrainConfig(tolerance=1e-9))
            for s in range(3)
        )
    )
    assert best >= 0.999
