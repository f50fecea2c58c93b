"""Forward-op contracts of the tensor core."""

import numpy as np
import pytest

from pdetext import tensor as T
from pdetext.errors import DegenerateTargetError, ShapeError
from pdetext.tensor import adam_step, init_adam_state


def test_matmul_identity():
    a = np.arange(9.0).reshape(3, 3)
    out = T.matmul(T.Tensor(np.eye(3)), T.Tensor(a))
    np.testing.assert_allclose(out.data, a.astype(np.float32))


def test_matmul_hand_contraction():
    out = T.matmul(T.Tensor([[1.0, 2.0], [3.0, 4.0]]), T.Tensor([[0.0], [1.0]]))
    np.testing.assert_allclose(out.data, [[2.0], [4.0]])


def test_matmul_shape_error():
    with pytest.raises(ShapeError):
        T.matmul(T.Tensor(np.ones((2, 3))), T.Tensor(np.ones((2, 3))))


def test_matmul_grad_is_ones_times_bt():
    with T.precision64():
        rng = np.random.default_rng(0)
        a = T.Tensor(rng.standard_normal((3, 4)), requires_grad=True)
        b = T.Tensor(rng.standard_normal((4, 5)), requires_grad=True)
        T.tsum(T.matmul(a, b)).backward()
        expected = np.ones((3, 5)) @ b.data.T
        np.testing.assert_allclose(a.grad, expected, rtol=1e-12)


def test_conv2d_identity_kernel():
    rng = np.random.default_rng(1)
    x = rng.standard_normal((2, 3, 5, 5))
    k = np.zeros((3, 3, 1, 1))
    for c in range(3):
        k[c, c, 0, 0] = 1.0
    out = T.conv2d(T.Tensor(x), T.Tensor(k), stride=1)
    np.testing.assert_allclose(out.data, x.astype(np.float32), rtol=1e-6)


def test_conv2d_hand_sum():
    x = T.Tensor(np.ones((1, 1, 4, 4)))
    k = T.Tensor(np.ones((1, 1, 2, 2)))
    out = T.conv2d(x, k, stride=2)
    assert out.shape == (1, 1, 2, 2)
    np.testing.assert_allclose(out.data, 4.0)


def test_conv2d_kernel_larger_than_input():
    with pytest.raises(ShapeError):
        T.conv2d(T.Tensor(np.ones((1, 1, 3, 3))), T.Tensor(np.ones((1, 1, 4, 4))), 1)


def test_conv_transpose_identity():
    rng = np.random.default_rng(2)
    x = rng.standard_normal((1, 2, 5, 5))
    k = np.zeros((2, 2, 1, 1))
    k[0, 0, 0, 0] = k[1, 1, 0, 0] = 1.0
    out = T.conv_transpose2d(T.Tensor(x), T.Tensor(k), stride=1)
    np.testing.assert_allclose(out.data, x.astype(np.float32), rtol=1e-6)


def test_conv_transpose_adjoint_identity():
    """<conv(x), y> == <x, convT(y)> on random 8x8 inputs."""
    with T.precision64():
        rng = np.random.default_rng(3)
        x = T.Tensor(rng.standard_normal((2, 3, 8, 8)))
        k = rng.standard_normal((4, 3, 4, 4))  # windows tile the 8x8 input exactly
        y = T.conv2d(x, T.Tensor(k), stride=2)
        z = rng.standard_normal(y.shape)
        lhs = float(np.vdot(y.data, z))
        # convT takes the kernel in (c_in, c_out, k, k) layout = same array here
        back = T.conv_transpose2d(T.Tensor(z), T.Tensor(k), stride=2)
        rhs = float(np.vdot(x.data, back.data))
        assert abs(lhs - rhs) < 1e-6 * max(1.0, abs(lhs))


def test_conv_transpose_grid_restoration():
    """15x15 tokens, kernel 8, stride 4 -> 64x64 grid."""
    x = T.Tensor(np.ones((1, 2, 15, 15)))
    k = T.Tensor(np.ones((2, 3, 8, 8)))
    out = T.conv_transpose2d(x, k, stride=4)
    assert out.shape == (1, 3, 64, 64)


def test_softmax_symmetry():
    out = T.softmax(T.Tensor([0.0, 0.0]))
    np.testing.assert_allclose(out.data, [0.5, 0.5])


def test_softmax_closed_form():
    x = np.log(np.array([1.0, 2.0, 3.0]))
    out = T.softmax(T.Tensor(x, dtype=np.float64))
    np.testing.assert_allclose(out.data, [1 / 6, 2 / 6, 3 / 6], rtol=1e-12)


def test_softmax_shift_invariance():
    rng = np.random.default_rng(4)
    x = rng.standard_normal((3, 7))
    a = T.softmax(T.Tensor(x, dtype=np.float64)).data
    b = T.softmax(T.Tensor(x + 13.7, dtype=np.float64)).data
    np.testing.assert_allclose(a, b, atol=1e-7)


def test_softmax_rows_sum_to_one():
    rng = np.random.default_rng(5)
    out = T.softmax(T.Tensor(rng.standard_normal((4, 9)) * 10.0), axis=-1)
    np.testing.assert_allclose(out.data.sum(axis=-1), 1.0, atol=1e-6)


def test_gelu_tanh_approximation_values():
    xs = np.array([-2.0, -0.5, 0.0, 0.5, 2.0])
    expected = 0.5 * xs * (1 + np.tanh(np.sqrt(2 / np.pi) * (xs + 0.044715 * xs**3)))
    out = T.gelu(T.Tensor(xs, dtype=np.float64))
    np.testing.assert_allclose(out.data, expected, rtol=1e-12)
    assert out.data[2] == 0.0


def test_layer_norm_normalizes_last_axis():
    rng = np.random.default_rng(6)
    x = rng.standard_normal((5, 16)) * 3 + 2
    out = T.layer_norm(
        T.Tensor(x, dtype=np.float64),
        T.Tensor(np.ones(16), dtype=np.float64),
        T.Tensor(np.zeros(16), dtype=np.float64),
    )
    np.testing.assert_allclose(out.data.mean(axis=-1), 0.0, atol=1e-12)
    np.testing.assert_allclose(out.data.std(axis=-1), 1.0, atol=1e-4)


def test_relative_l2_identity_and_unit():
    rng = np.random.default_rng(7)
    x = rng.standard_normal((3, 10))
    assert T.relative_l2(T.Tensor(x), T.Tensor(x)).item() == 0.0
    out = T.relative_l2(T.Tensor(np.zeros_like(x)), T.Tensor(x))
    np.testing.assert_allclose(out.item(), 1.0, rtol=1e-6)


def test_relative_l2_degenerate_target():
    with pytest.raises(DegenerateTargetError):
        T.relative_l2(T.Tensor(np.ones((2, 4))), T.Tensor(np.zeros((2, 4))))


def test_adam_first_step_matches_hand_iteration():
    """Two-parameter case, recurrences evaluated by hand."""
    p = [np.array([1.0, -2.0], dtype=np.float64)]
    g = [np.array([0.5, 0.1], dtype=np.float64)]
    state = init_adam_state(p)
    adam_step(p, g, state, lr=0.1)
    m = 0.1 * g[0]
    v = 0.001 * g[0] ** 2
    expected = np.array([1.0, -2.0]) - 0.1 * (m / 0.1) / (np.sqrt(v / 0.001) + 1e-8)
    np.testing.assert_allclose(p[0], expected, rtol=1e-12)


def test_adam_two_steps_track_recurrences():
    p = [np.array([0.5], dtype=np.float64)]
    state = init_adam_state(p)
    theta, m, v = 0.5, 0.0, 0.0
    for t, grad in enumerate([0.3, -0.2], start=1):
        adam_step(p, [np.array([grad])], state, lr=0.05)
        m = 0.9 * m + 0.1 * grad
        v = 0.999 * v + 0.001 * grad * grad
        theta -= 0.05 * (m / (1 - 0.9**t)) / (np.sqrt(v / (1 - 0.999**t)) + 1e-8)
    np.testing.assert_allclose(p[0], [theta], rtol=1e-12)
