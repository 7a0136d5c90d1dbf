import numpy as np
import pytest

from lbkan.dnn import (
    DEFAULT_WIDTHS,
    MlpApproximator,
    MlpParams,
    mlp_forward,
    mlp_jacobian,
    mlp_param_count,
)
from lbkan.kan import StaleEvalError

from helpers import central_diff_param_jacobian, jacobian_close, mlp_forward_scalar


def test_param_count_default_widths():
    # [4,5,5,5,4] with a bias row per layer.
    assert mlp_param_count() == 5 * 5 + 6 * 5 + 6 * 5 + 6 * 4


def test_zero_weights_zero_output():
    y, _ = mlp_forward(MlpParams.zeros(), np.array([1.0, -2.0, 3.0, 0.5]))
    assert np.all(y == 0.0)


def test_single_linear_layer_identity():
    W = np.hstack([np.eye(4), np.zeros((4, 1))])
    params = MlpParams((4, 4), [W])
    x = np.array([0.3, -1.2, 2.0, 0.0])
    y, _ = mlp_forward(params, x)
    assert np.array_equal(y, x)


def test_forward_matches_scalar_loop_oracle():
    rng = np.random.default_rng(0)
    for _ in range(50):
        params = MlpParams.from_flat(DEFAULT_WIDTHS, rng.uniform(-1, 1, mlp_param_count()))
        x = rng.uniform(-8, 8, 4)
        y, _ = mlp_forward(params, x)
        assert np.max(np.abs(y - mlp_forward_scalar(DEFAULT_WIDTHS, params, x))) <= 1e-12


def test_forward_dimension_mismatch():
    with pytest.raises(ValueError):
        mlp_forward(MlpParams.zeros(), np.array([1.0, 2.0]))


def test_single_linear_layer_jacobian_is_kron():
    rng = np.random.default_rng(1)
    params = MlpParams.from_flat((4, 4), rng.uniform(-1, 1, mlp_param_count((4, 4))))
    x = rng.uniform(-2, 2, 4)
    _, cache = mlp_forward(params, x)
    J = mlp_jacobian(params, cache)
    z = np.concatenate([x, [1.0]])
    assert np.allclose(J, np.kron(z[None, :], np.eye(4)), atol=1e-14)


def test_jacobian_finite_difference():
    rng = np.random.default_rng(2)
    for _ in range(20):
        flat = rng.uniform(-1, 1, mlp_param_count())
        params = MlpParams.from_flat(DEFAULT_WIDTHS, flat)
        x = rng.uniform(-8, 8, 4)
        _, cache = mlp_forward(params, x)
        J = mlp_jacobian(params, cache)

        def f(v):
            y, _ = mlp_forward(MlpParams.from_flat(DEFAULT_WIDTHS, v), x)
            return y

        assert jacobian_close(J, central_diff_param_jacobian(f, flat))


def test_zero_input_zero_bias_first_layer_columns():
    rng = np.random.default_rng(3)
    flat = rng.uniform(-1, 1, mlp_param_count())
    params = MlpParams.from_flat(DEFAULT_WIDTHS, flat)
    x = np.zeros(4)
    _, cache = mlp_forward(params, x)
    J = mlp_jacobian(params, cache)
    # First-layer columns multiplying the zero input entries vanish;
    # vec ordering puts column c of W_1 at flat indices c*5 .. c*5+4.
    for c in range(4):
        assert np.all(J[:, c * 5 : (c + 1) * 5] == 0.0)
    assert np.any(J[:, 4 * 5 : 5 * 5] != 0.0)  # bias column survives


def test_stale_cache_rejected():
    rng = np.random.default_rng(4)
    params = MlpParams.from_flat(DEFAULT_WIDTHS, rng.uniform(-1, 1, mlp_param_count()))
    _, cache = mlp_forward(params, rng.uniform(-1, 1, 4))
    other = MlpParams.from_flat(DEFAULT_WIDTHS, rng.uniform(-1, 1, mlp_param_count()))
    with pytest.raises(StaleEvalError):
        mlp_jacobian(other, cache)


def test_flat_roundtrip():
    rng = np.random.default_rng(5)
    flat = rng.uniform(-1, 1, mlp_param_count())
    assert np.array_equal(MlpParams.from_flat(DEFAULT_WIDTHS, flat).flat(), flat)


def test_batched_approximator_matches_single():
    rng = np.random.default_rng(6)
    approx = MlpApproximator()
    theta = rng.uniform(-1, 1, (4, approx.param_count))
    xs = rng.uniform(-8, 8, (4, 4))
    out, jac = approx.forward_jacobian(theta, xs)
    for i in range(4):
        params = MlpParams.from_flat(DEFAULT_WIDTHS, theta[i])
        y, cache = mlp_forward(params, xs[i])
        assert np.allclose(out[i], y, atol=1e-14)
        assert np.allclose(jac[i], mlp_jacobian(params, cache), atol=1e-14)
