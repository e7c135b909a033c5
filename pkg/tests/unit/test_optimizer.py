import numpy as np
import pytest

from app.errors import ContractError, DimensionError
from app.network import ParameterStore
from app.tensor import backward, parameter, precision, tensor_sum
from app.training import OptimizerState, adam_step


@pytest.fixture
def store():
    return ParameterStore({"a": parameter([1.0, -2.0, 3.0]), "b": parameter([[0.5, 0.25]])})


def quadratic_grads(store):
    return backward(tensor_sum(store["a"] * store["a"]) + tensor_sum(store["b"] * store["b"]))


def test_first_step_moves_by_lr_against_gradient_sign(store):
    state = OptimizerState.zeros(store)
    adam_step(store, quadratic_grads(store), state, lr=0.01)
    np.testing.assert_allclose(store["a"].data, [0.99, -1.99, 2.99], rtol=1e-6)
    np.testing.assert_allclose(store["b"].data, [[0.49, 0.24]], rtol=1e-5)
    assert state.step == 1


def test_moments_follow_the_recurrence(store):
    state = OptimizerState.zeros(store)
    adam_step(store, quadratic_grads(store), state, lr=0.01, beta1=0.9, beta2=0.999)
    np.testing.assert_allclose(state.first["a"], 0.1 * np.array([2.0, -4.0, 6.0]), rtol=1e-6)
    np.testing.assert_allclose(state.second["a"], 0.001 * np.array([4.0, 16.0, 36.0]), rtol=1e-5)
    assert state.first["a"].dtype == np.float32


def test_repeated_steps_descend(store):
    state = OptimizerState.zeros(store)
    for _ in range(200):
        adam_step(store, quadratic_grads(store), state, lr=0.05)
    assert np.abs(store["a"].data).max() < 0.1


def test_missing_gradient_is_a_contract_error(store):
    grads = backward(tensor_sum(store["a"] * store["a"]))
    with pytest.raises(ContractError, match="'b'"):
        adam_step(store, grads, OptimizerState.zeros(store), lr=0.01)


def test_restore_round_trip(store):
    state = OptimizerState.zeros(store)
    adam_step(store, quadratic_grads(store), state, lr=0.01)
    restored = OptimizerState.restore(store, state.first, state.second, state.step)
    assert restored.step == 1
    np.testing.assert_array_equal(restored.second["b"], state.second["b"])


def test_restore_rejects_foreign_moments(store):
    with pytest.raises(ContractError):
        OptimizerState.restore(store, {"c": np.zeros(1)}, {}, 0)
    with pytest.raises(DimensionError):
        OptimizerState.restore(store, {"a": np.zeros(4)}, {}, 0)


def square_grads(store):
    return backward(tensor_sum(store["w"] * store["w"]))


def test_ten_steps_match_scalar_recurrence():
    with precision(np.float64):
        store = ParameterStore({"w": parameter([1.0])})
        state = OptimizerState.zeros(store)
        w, m, v = 1.0, 0.0, 0.0
        for t in range(1, 11):
            adam_step(store, square_grads(store), state, lr=0.1)
            g = 2.0 * w
            m = 0.9 * m + 0.1 * g
            v = 0.999 * v + 0.001 * g * g
            w -= 0.1 * (m / (1 - 0.9**t)) / (np.sqrt(v / (1 - 0.999**t)) + 1e-8)
            assert store["w"].data[0] == pytest.approx(w, abs=1e-7)


def test_mirrored_start_gives_mirrored_trajectory():
    start = np.array([0.8, -1.5, 2.25])
    with precision(np.float64):
        stores = [ParameterStore({"w": parameter(sign * start)}) for sign in (1.0, -1.0)]
        states = [OptimizerState.zeros(s) for s in stores]
        for _ in range(10):
            for s, st in zip(stores, states):
                adam_step(s, square_grads(s), st, lr=0.05)
            np.testing.assert_array_equal(stores[1]["w"].data, -stores[0]["w"].data)
