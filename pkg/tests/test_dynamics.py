import numpy as np
import pytest

from phformation.dynamics import (
    AgentParams,
    AgentState,
    SystemState,
    agent_hamiltonian,
    momentum_gradient,
    open_loop_vector_field,
    total_kinetic_energy,
)
from phformation.integrator import rk4_step


def make_params(mass=1.0, diag=(0.0, 0.0)):
    return AgentParams(mass=mass, dissipation=np.diag(diag))


def test_hamiltonian_values():
    assert agent_hamiltonian(AgentState([0, 0], [0, 0]), make_params()) == 0.0
    assert agent_hamiltonian(AgentState([3, 7], [1, 0]), make_params()) == 0.5
    # (9 + 16) / (2 * 2)
    assert agent_hamiltonian(AgentState([0, 0], [3, 4]), make_params(mass=2.0)) == 6.25


def test_momentum_gradient_values():
    assert np.array_equal(
        momentum_gradient(AgentState([0, 0], [0, 0]), make_params()), [0.0, 0.0]
    )
    assert np.array_equal(
        momentum_gradient(AgentState([0, 0], [2, -1]), make_params(mass=2.0)),
        [1.0, -0.5],
    )
    assert np.array_equal(
        momentum_gradient(AgentState([1, 1], [0.5, 0.5]), make_params()), [0.5, 0.5]
    )


def test_rest_is_open_loop_equilibrium():
    state = SystemState(positions=[[1.0, 1.0]], momenta=[[0.0, 0.0]])
    dq, dp = open_loop_vector_field(state, [make_params(diag=(1.0, 0.8))], np.zeros(2))
    assert np.array_equal(dq, np.zeros((1, 2)))
    assert np.array_equal(dp, np.zeros((1, 2)))


def test_friction_acts_on_velocity():
    state = SystemState(positions=[[0.0, 0.0]], momenta=[[1.0, 1.0]])
    dq, dp = open_loop_vector_field(state, [make_params(diag=(1.0, 0.8))], np.zeros(2))
    assert np.allclose(dq, [[1.0, 1.0]])
    assert np.allclose(dp, [[-1.0, -0.8]])


def test_input_passes_through_momentum_row():
    state = SystemState(positions=[[0.0, 0.0]], momenta=[[1.0, 0.0]])
    dq, dp = open_loop_vector_field(state, [make_params()], np.array([0.0, 2.0]))
    assert np.allclose(dq, [[1.0, 0.0]])
    assert np.allclose(dp, [[0.0, 2.0]])


def test_input_shape_validation():
    state = SystemState(positions=[[0.0, 0.0]], momenta=[[0.0, 0.0]])
    with pytest.raises(ValueError):
        open_loop_vector_field(state, [make_params()], np.zeros(3))
    with pytest.raises(ValueError):
        open_loop_vector_field(state, [make_params(), make_params()], np.zeros(2))


def test_output_equals_velocity_everywhere():
    rng = np.random.default_rng(3)
    for _ in range(25):
        mass = float(rng.uniform(0.2, 5.0))
        params = make_params(mass=mass)
        p = rng.normal(size=4)
        agent = AgentState(rng.normal(size=4), p)
        assert np.allclose(momentum_gradient(agent, params), p / mass, rtol=1e-15)


def test_translation_invariance_of_momentum_dynamics():
    rng = np.random.default_rng(4)
    params = [make_params(diag=(1.0, 0.8)), make_params(mass=2.0, diag=(0.3, 0.3))]
    q = rng.normal(size=(2, 2))
    p = rng.normal(size=(2, 2))
    u = rng.normal(size=(2, 2))
    _, dp_a = open_loop_vector_field(SystemState(q, p), params, u)
    _, dp_b = open_loop_vector_field(SystemState(q + 17.3, p), params, u)
    assert np.array_equal(dp_a, dp_b)


def test_params_validation():
    with pytest.raises(ValueError):
        AgentParams(mass=0.0, dissipation=np.eye(2))
    with pytest.raises(ValueError):
        AgentParams(mass=1.0, dissipation=np.array([[0.0, 1.0], [-1.0, 0.0]]))
    with pytest.raises(ValueError):
        AgentParams(mass=1.0, dissipation=-np.eye(2))
    with pytest.raises(ValueError):
        AgentState([0.0, np.nan], [0.0, 0.0])


def _flat_field(params, u):
    count = len(params)

    def field(t, y):
        q, p = y[: 2 * count].reshape(count, 2), y[2 * count :].reshape(count, 2)
        dq, dp = open_loop_vector_field(SystemState(q, p), params, u)
        return np.concatenate([dq.ravel(), dp.ravel()])

    return field


def test_frictionless_energy_is_conserved():
    rng = np.random.default_rng(5)
    params = [make_params(), make_params(mass=2.0)]
    q = rng.normal(size=(2, 2))
    p = rng.normal(size=(2, 2))
    start = total_kinetic_energy(SystemState(q, p), params)
    y = np.concatenate([q.ravel(), p.ravel()])
    field = _flat_field(params, np.zeros((2, 2)))
    for step in range(1000):
        y = rk4_step(field, y, step * 1e-3, 1e-3)
    final = SystemState(y[:4].reshape(2, 2), y[4:].reshape(2, 2))
    assert abs(total_kinetic_energy(final, params) - start) <= 1e-9 * start


def test_friction_dissipates_energy_monotonically():
    params = [make_params(diag=(1.0, 0.8)), make_params(diag=(1.0, 0.8))]
    q = np.zeros((2, 2))
    p = np.array([[1.0, -2.0], [0.5, 0.25]])
    y = np.concatenate([q.ravel(), p.ravel()])
    field = _flat_field(params, np.zeros((2, 2)))
    previous = total_kinetic_energy(SystemState(q, p), params)
    for step in range(2000):
        y = rk4_step(field, y, step * 1e-3, 1e-3)
        current = total_kinetic_energy(
            SystemState(y[:4].reshape(2, 2), y[4:].reshape(2, 2)), params
        )
        assert current <= previous + 1e-10
        previous = current
