"""Reverse-mode correctness: finite-difference checks and graph semantics."""

import numpy as np
import pytest

from pdetext import tensor as T
from pdetext.errors import NonFiniteError
from pdetext.tensor.gradcheck import check_gradients

TRIALS = 10
TOL = 1e-5


def _rands(rng, *shapes):
    return [rng.standard_normal(s) for s in shapes]


CASES = {
    "add": lambda ts: T.tsum(T.square(T.add(ts[0], ts[1]))),
    "sub": lambda ts: T.tsum(T.square(T.sub(ts[0], ts[1]))),
    "mul": lambda ts: T.tsum(T.mul(ts[0], ts[1])),
    "div": lambda ts: T.tsum(T.div(ts[0], T.add(T.square(ts[1]), 1.0))),
    "neg": lambda ts: T.tsum(T.square(T.neg(ts[0]))),
    "sqrt": lambda ts: T.tsum(T.sqrt(T.add(T.square(ts[0]), 0.5))),
    "square": lambda ts: T.tsum(T.square(ts[0])),
    "sum_axis": lambda ts: T.tsum(T.square(T.tsum(ts[0], axis=1))),
    "mean": lambda ts: T.tsum(T.square(T.tmean(ts[0], axis=0))),
    "reshape": lambda ts: T.tsum(T.square(T.reshape(ts[0], (2, -1)))),
    "transpose": lambda ts: T.tsum(T.mul(T.transpose(ts[0], (1, 0)), ts[1])),
    "softmax": lambda ts: T.tsum(T.mul(T.softmax(ts[0], axis=-1), ts[1])),
    "gelu": lambda ts: T.tsum(T.square(T.gelu(ts[0]))),
    "mse": lambda ts: T.mse(ts[0], ts[1]),
}


@pytest.mark.parametrize("name", sorted(CASES))
def test_elementwise_ops_pass_fd_check(name):
    rng = np.random.default_rng(hash(name) % 2**32)
    build = CASES[name]
    for _ in range(TRIALS):
        if name == "transpose":
            arrays = [rng.standard_normal((3, 4)), rng.standard_normal((4, 3))]
        elif name in ("add", "sub", "mul", "div", "softmax", "mse"):
            arrays = _rands(rng, (4, 5), (4, 5))[: 2]
        else:
            arrays = _rands(rng, (4, 6))
        assert check_gradients(build, arrays) < TOL


def test_matmul_fd_check_batched_and_plain():
    rng = np.random.default_rng(11)
    for _ in range(TRIALS):
        err = check_gradients(
            lambda ts: T.tsum(T.square(T.matmul(ts[0], ts[1]))),
            _rands(rng, (3, 4), (4, 2)),
        )
        assert err < 1e-6
        err = check_gradients(
            lambda ts: T.tsum(T.square(T.matmul(ts[0], ts[1]))),
            _rands(rng, (2, 2, 3, 4), (2, 2, 4, 2)),
        )
        assert err < TOL


def test_conv_ops_fd_check():
    rng = np.random.default_rng(12)
    for _ in range(TRIALS):
        err = check_gradients(
            lambda ts: T.tsum(T.square(T.conv2d(ts[0], ts[1], 2))),
            _rands(rng, (1, 2, 6, 6), (3, 2, 2, 2)),
        )
        assert err < 1e-6
        err = check_gradients(
            lambda ts: T.tsum(T.square(T.conv_transpose2d(ts[0], ts[1], 2))),
            _rands(rng, (1, 2, 3, 3), (2, 3, 2, 2)),
        )
        assert err < 1e-6


def test_layer_norm_fd_check():
    rng = np.random.default_rng(13)
    for _ in range(TRIALS):
        err = check_gradients(
            lambda ts: T.tsum(T.mul(T.layer_norm(ts[0], ts[1], ts[2]), ts[3])),
            _rands(rng, (3, 8), (8,), (8,), (3, 8)),
        )
        assert err < TOL


def test_relative_l2_fd_check():
    rng = np.random.default_rng(14)
    for _ in range(TRIALS):
        target = rng.standard_normal((3, 10))
        err = check_gradients(
            lambda ts: T.relative_l2(ts[0], T.Tensor(target)), [rng.standard_normal((3, 10))]
        )
        assert err < TOL


def test_bag_mean_fd_check_and_sparsity():
    rng = np.random.default_rng(15)
    bags = [np.array([0, 2, 2]), np.array([1])]
    err = check_gradients(
        lambda ts: T.tsum(T.square(T.bag_mean(ts[0], bags))), [rng.standard_normal((5, 3))]
    )
    assert err < TOL
    with T.precision64():
        table = T.Tensor(rng.standard_normal((5, 3)), requires_grad=True)
        T.tsum(T.bag_mean(table, bags)).backward()
        assert np.all(table.grad[[3, 4]] == 0.0)
        assert np.all(table.grad[[0, 1, 2]] != 0.0)


def test_shared_subexpression_accumulates_like_unrolled_graph():
    """Gradient through a reused node equals the fully duplicated graph."""
    with T.precision64():
        rng = np.random.default_rng(16)
        x_val = rng.standard_normal((4, 4))

        x1 = T.Tensor(x_val, requires_grad=True)
        shared = T.gelu(x1)
        out1 = T.tsum(T.add(T.mul(shared, shared), shared))
        out1.backward()

        x2 = T.Tensor(x_val, requires_grad=True)
        a = T.gelu(x2)
        b = T.gelu(x2)
        c = T.gelu(x2)
        out2 = T.tsum(T.add(T.mul(a, b), c))
        out2.backward()

        np.testing.assert_allclose(out1.data, out2.data, rtol=1e-12)
        np.testing.assert_allclose(x1.grad, x2.grad, rtol=1e-12)


def test_nan_from_finite_inputs_aborts_naming_op():
    x = T.Tensor([1.0, 0.0])
    y = T.Tensor([0.0, 0.0])
    with pytest.raises(NonFiniteError, match="div"):
        T.div(x, y)


def test_no_grad_skips_recording():
    x = T.Tensor([1.0, 2.0], requires_grad=True)
    with T.no_grad():
        y = T.square(x)
    assert y.node is None and not y.requires_grad


def test_backward_requires_scalar_without_seed_grad():
    x = T.Tensor(np.ones((2, 2)), requires_grad=True)
    y = T.square(x)
    with pytest.raises(Exception):
        y.backward()


def test_precision_mode_is_scoped():
    assert T.default_dtype() == np.dtype(np.float32)
    with T.precision64():
        assert T.default_dtype() == np.dtype(np.float64)
        assert T.Tensor([1.0]).dtype == np.float64
    assert T.default_dtype() == np.dtype(np.float32)
