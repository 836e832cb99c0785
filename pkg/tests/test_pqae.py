import numpy as np
import pytest

from qae_lab.circuit import build_ansatz, circuit_unitary, gradient
from qae_lab.pqae import (
    PureEnsemble,
    most_probable_string,
    pqae_cost,
    pqae_pipeline,
    pqae_reconstruct,
    project_max_eigenstate,
    qae_ensemble_run,
    train_pqae,
)
from qae_lab.qstate import (
    Bipartition,
    ket,
    partial_trace,
    pure,
    random_density_matrix,
    random_pure_state,
    z_expectations,
)
from qae_lab.training import TrainConfig

WORKED = np.sqrt(2 / 3) * ket("00") + np.sqrt(1 / 3) * ket("11")


def test_worked_example_fidelities():
    c = build_ansatz(2, 0)
    rec = pqae_reconstruct(PureEnsemble([WORKED]), Bipartition(1, 1), c, np.zeros(c.param_count))
    assert rec.qae_fidelities[0] == pytest.approx(4 / 9, abs=1e-9)
    assert rec.fidelities[0] == pytest.approx(2 / 3, abs=1e-9)
    assert rec.strings == ["0"]
    assert rec.purities[0] == pytest.approx(1, abs=1e-9)
    assert np.allclose(rec.pqae_mixture, pure(ket("00")))


def test_ensemble_validation(rng):
    ens = PureEnsemble.haar_random(3, 2, rng)
    assert np.allclose(ens.weights, 1 / 3)
    assert np.trace(ens.density_matrix()).real == pytest.approx(1)
    with pytest.raises(ValueError):
        PureEnsemble([np.array([1, 1, 0, 0])])
    with pytest.raises(ValueError):
        PureEnsemble([ket("00"), ket("01")], weights=[0.5, 0.6])
    with pytest.raises(ValueError):
        PureEnsemble([np.ones(3) / np.sqrt(3)])


def test_lp_examples():
    c = build_ansatz(4, 0)
    zero = np.zeros(c.param_count)
    assert pqae_cost(PureEnsemble([ket("0000")]), Bipartition(1, 3), c, zero) == pytest.approx(-2)
    bell = (ket("00") + ket("11")) / np.sqrt(2)
    c2 = build_ansatz(2, 0)
    assert pqae_cost(PureEnsemble([bell]), Bipartition(1, 1), c2, np.zeros(c2.param_count)) == pytest.approx(1)
    # trash marginal |0><0| x I/2 x |1><1|
    psi = (ket("0001") + ket("1011")) / np.sqrt(2)
    assert pqae_cost(PureEnsemble([psi]), Bipartition(1, 3), c, zero) == pytest.approx(-1)


def test_lp_is_weighted_average():
    c = build_ansatz(2, 0)
    zero = np.zeros(c.param_count)
    bell = (ket("00") + ket("11")) / np.sqrt(2)
    ens = PureEnsemble([ket("00"), bell], weights=[0.25, 0.75])
    assert pqae_cost(ens, Bipartition(1, 1), c, zero) == pytest.approx(0.25 * 0 + 0.75 * 1)


def test_lp_gradient_shift_vs_difference(rng):
    part = Bipartition(1, 2)
    c = build_ansatz(3, 2)
    ens = PureEnsemble.haar_random(2, 3, rng)

    def trash_z(theta):
        u = circuit_unitary(c, theta)
        return np.array(
            [z_expectations(partial_trace(pure(u @ psi), part, "B")) for psi in ens.states]
        ).ravel()

    for _ in range(10):
        theta = c.init_params(rng)
        z = trash_z(theta)
        # L_p = mean_s (1 - sum_j z_sj^2); shift each expectation, then chain rule
        shift = gradient(trash_z, theta) @ (-2 * z / len(ens))
        diff = gradient(lambda t: pqae_cost(ens, part, c, t), theta, "central-difference")
        assert np.max(np.abs(shift - diff)) <= 1e-4


def test_most_probable_string_examples():
    assert most_probable_string(pure(ket("101"))) == "101"
    assert most_probable_string(np.diag([0.5, 0.5])) == "0"
    assert most_probable_string(0.6 * pure(ket("01")) + 0.4 * pure(ket("10"))) == "01"


def test_most_probable_string_scale_invariant(rng):
    for _ in range(20):
        rho = random_density_matrix(8, rng)
        assert most_probable_string(rho) == most_probable_string(rng.uniform(0.1, 10) * rho)


def test_projection_examples(rng):
    v = random_pure_state(4, rng)
    res = project_max_eigenstate(pure(v))
    assert abs(np.vdot(v, res.state)) == pytest.approx(1, abs=1e-10)
    assert res.overlap == pytest.approx(1, abs=1e-10)
    res = project_max_eigenstate(np.diag([2 / 3, 1 / 3]))
    assert np.allclose(np.abs(res.state), [1, 0])
    assert res.overlap == pytest.approx(2 / 3)
    assert project_max_eigenstate(np.eye(2) / 2).overlap == pytest.approx(0.5)
    with pytest.raises(ValueError):
        project_max_eigenstate(np.eye(2) / 2, mode="power")


def test_exact_projection_overlap_is_top_eigenvalue(rng):
    for _ in range(20):
        rho = random_density_matrix(4, rng)
        res = project_max_eigenstate(rho)
        assert res.overlap == pytest.approx(np.linalg.eigvalsh(rho)[-1], abs=1e-10)
        assert res.overlap == pytest.approx(res.exact_overlap, abs=1e-10)


def test_variational_projection(rng):
    config = TrainConfig(depth_p=2, depth_max=2, tolerance=1e-9)
    for _ in range(3):
        rho = random_density_matrix(4, rng)
        res = project_max_eigenstate(rho, "variational", config)
        assert res.overlap == pytest.approx(np.real(res.state.conj() @ rho @ res.state), abs=1e-8)
        if res.converged:
            assert res.overlap >= res.exact_overlap - 0.01
    worked = project_max_eigenstate(np.diag([2 / 3, 1 / 3]), "variational", config)
    assert worked.overlap == pytest.approx(2 / 3, abs=1e-4)


def constructed_ensemble(rng, part, strings):
    target = build_ansatz(part.n_qubits, 1)
    u0 = circuit_unitary(target, target.init_params(rng))
    return PureEnsemble([u0 @ np.kron(random_pure_state(part.d_a, rng), ket(b)) for b in strings])


SMALL_CONFIG = TrainConfig(depth_p=3, depth_max=3, restarts=4, tolerance=1e-9, max_iters=3000)


def test_decoupled_ensemble_is_recovered(rng):
    part = Bipartition(1, 2)
    ens = constructed_ensemble(rng, part, ["00"] * 4)
    report = pqae_pipeline(ens, part, SMALL_CONFIG)
    assert report.mean_fidelity >= 0.999
    assert np.allclose(report.purities, 1, atol=1e-9)


def test_subspace_ensembles_are_recovered_when_converged():
    part = Bipartition(1, 2)
    optimum = 1 - part.n_b
    converged = 0
    for seed in range(4):
        rng = np.random.default_rng(200 + seed)
        ens = constructed_ensemble(rng, part, ["00", "01", "10", "11", "01", "10"])
        report = pqae_pipeline(ens, part, SMALL_CONFIG)
        assert report.train.final_loss >= optimum - 1e-9
        if report.train.final_loss <= optimum + 1e-3:
            converged += 1
            assert np.all(report.fidelities >= 0.99)
    # the property is only meaningful if training reaches the optimum
    assert converged >= 2


def test_outputs_are_pure_and_beat_plain_qae(rng):
    part = Bipartition(2, 3)
    ens = PureEnsemble.haar_random(4, 5, rng)
    config = TrainConfig(depth_p=2, depth_max=2, max_iters=300)
    report = pqae_pipeline(ens, part, config)
    assert np.allclose(report.purities, 1, atol=1e-9)
    assert len(report.strings) == 4 and all(len(s) == 3 for s in report.strings)
    qae_rec, _ = qae_ensemble_run(ens, part, config)
    assert report.mean_fidelity >= np.mean(qae_rec.qae_fidelities)
    assert np.trace(report.mixture).real == pytest.approx(1)


def test_train_pqae_history(rng):
    part = Bipartition(1, 1)
    rep = train_pqae(PureEnsemble.haar_random(2, 2, rng), part, TrainConfig(depth_p=1, depth_max=1))
    assert rep.final_loss == rep.loss_history[-1]
    assert rep.final_loss >= 1 - part.n_b - 1e-12
