"""Dense tensors with reverse-mode automatic differentiation.

Deliberately small: exactly the ops the surrogate model needs, on top of
numpy arrays. Graphs are recorded eagerly as a DAG of ``OpNode`` records and
walked once, in reverse topological order, by :meth:`Tensor.backward`.
Gradients of shared subexpressions accumulate by summation.

Training runs in float32. ``precision64()`` switches the default dtype to
float64 for finite-difference gradient checks; nothing else should use it.

Every forward op validates that its output is finite and aborts with the op
name otherwise - NaNs never propagate silently.
"""

from __future__ import annotations

import contextlib
import math

import numpy as np

from .. import kernels
from ..errors import (
    DegenerateInputError,
    DegenerateTargetError,
    NonFiniteError,
    ShapeError,
)

_DEFAULT_DTYPE = np.dtype(np.float32)
_GRAD_ENABLED = True

_GELU_C = math.sqrt(2.0 / math.pi)


def set_default_dtype(dtype):
    global _DEFAULT_DTYPE
    dt = np.dtype(dtype)
    if dt not in (np.dtype(np.float32), np.dtype(np.float64)):
        raise ValueError("only float32 and float64 are supported")
    _DEFAULT_DTYPE = dt


def default_dtype():
    return _DEFAULT_DTYPE


@contextlib.contextmanager
def precision64():
    """Run in float64; exists for gradient checking, not training."""
    global _DEFAULT_DTYPE
    saved = _DEFAULT_DTYPE
    _DEFAULT_DTYPE = np.dtype(np.float64)
    try:
        yield
    finally:
        _DEFAULT_DTYPE = saved


@contextlib.contextmanager
def no_grad():
    """Skip graph recording (evaluation / rollout)."""
    global _GRAD_ENABLED
    saved = _GRAD_ENABLED
    _GRAD_ENABLED = False
    try:
        yield
    finally:
        _GRAD_ENABLED = saved


class OpNode:
    """One recorded op: kind, input tensors, and the vjp closure.

    The closure returns one gradient array per input (or None for inputs
    that do not need one); saved activations live in the closure.
    """

    __slots__ = ("op", "inputs", "vjp")

    def __init__(self, op, inputs, vjp):
        self.op = op
        self.inputs = inputs
        self.vjp = vjp


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "node")

    def __init__(self, data, requires_grad=False, dtype=None):
        self.data = np.asarray(data, dtype=dtype or _DEFAULT_DTYPE)
        self.grad = None
        self.requires_grad = bool(requires_grad)
        self.node = None

    @classmethod
    def _wrap(cls, data, requires_grad):
        t = cls.__new__(cls)
        t.data = data
        t.grad = None
        t.requires_grad = requires_grad
        t.node = None
        return t

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    @property
    def dtype(self):
        return self.data.dtype

    def item(self):
        return float(self.data)

    def numpy(self):
        return self.data

    def detach(self):
        return Tensor._wrap(self.data, False)

    def zero_grad(self):
        self.grad = None

    def __repr__(self):
        return f"Tensor(shape={self.shape}, dtype={self.dtype.name}, grad={self.requires_grad})"

    # -- graph traversal ----------------------------------------------------

    def backward(self, grad=None):
        if grad is None:
            if self.size != 1:
                raise ShapeError("backward() without an explicit gradient needs a scalar")
            grad = np.ones_like(self.data)
        else:
            grad = np.asarray(grad, dtype=self.dtype)

        order = []
        seen = set()
        stack = [(self, False)]
        while stack:
            t, expanded = stack.pop()
            if expanded:
                order.append(t)
                continue
            if id(t) in seen or t.node is None:
                continue
            seen.add(id(t))
            stack.append((t, True))
            for p in t.node.inputs:
                stack.append((p, False))

        self.grad = grad if self.grad is None else self.grad + grad
        for t in reversed(order):
            node = t.node
            grads = node.vjp(t.grad)
            for parent, g in zip(node.inputs, grads):
                if g is None:
                    continue
                if not (parent.requires_grad or parent.node is not None):
                    continue
                if g.dtype != parent.dtype:
                    g = g.astype(parent.dtype)
                parent.grad = g if parent.grad is None else parent.grad + g

    # -- operator sugar -----------------------------------------------------

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return neg(self)

    def __matmul__(self, other):
        return matmul(self, other)

    def reshape(self, shape):
        return reshape(self, shape)

    def transpose(self, axes):
        return transpose(self, axes)

    def sum(self, axis=None, keepdims=False):
        return tsum(self, axis, keepdims)

    def mean(self, axis=None, keepdims=False):
        return tmean(self, axis, keepdims)

    def sqrt(self):
        return sqrt(self)


def _lift(x):
    if isinstance(x, Tensor):
        return x
    return Tensor(x)


def _check_finite(op, data):
    # One-pass check: the sum is finite iff no NaN/Inf is present (any Inf
    # either survives or cancels to NaN; float sums of finite inputs at our
    # magnitudes cannot overflow).
    if not np.isfinite(np.sum(data)):
        raise NonFiniteError(f"op '{op}' produced non-finite values")


def _make(op, data, inputs, vjp):
    _check_finite(op, data)
    req = _GRAD_ENABLED and any(t.requires_grad or t.node is not None for t in inputs)
    out = Tensor._wrap(data, req)
    if req:
        out.node = OpNode(op, tuple(inputs), vjp)
    return out


def _needs_grad(t):
    return t.requires_grad or t.node is not None


def _unbroadcast(g, shape):
    """Sum g down to `shape` (inverse of numpy broadcasting)."""
    if g.shape == shape:
        return g
    extra = g.ndim - len(shape)
    if extra > 0:
        g = g.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and g.shape[i] != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g


# -- arithmetic --------------------------------------------------------------


def add(a, b):
    a, b = _lift(a), _lift(b)
    data = a.data + b.data

    def vjp(g):
        return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)

    return _make("add", data, (a, b), vjp)


def sub(a, b):
    a, b = _lift(a), _lift(b)
    data = a.data - b.data

    def vjp(g):
        return _unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)

    return _make("sub", data, (a, b), vjp)


def mul(a, b):
    a, b = _lift(a), _lift(b)
    data = a.data * b.data

    def vjp(g):
        ga = _unbroadcast(g * b.data, a.shape) if _needs_grad(a) else None
        gb = _unbroadcast(g * a.data, b.shape) if _needs_grad(b) else None
        return ga, gb

    return _make("mul", data, (a, b), vjp)


def div(a, b):
    a, b = _lift(a), _lift(b)
    with np.errstate(divide="ignore", invalid="ignore"):
        data = a.data / b.data  # non-finite results abort in _make

    def vjp(g):
        ga = _unbroadcast(g / b.data, a.shape) if _needs_grad(a) else None
        gb = None
        if _needs_grad(b):
            gb = _unbroadcast(-g * a.data / (b.data * b.data), b.shape)
        return ga, gb

    return _make("div", data, (a, b), vjp)


def neg(a):
    a = _lift(a)

    def vjp(g):
        return (-g,)

    return _make("neg", -a.data, (a,), vjp)


def sqrt(a):
    a = _lift(a)
    with np.errstate(invalid="ignore"):
        data = np.sqrt(a.data)  # negative inputs abort in _make

    def vjp(g):
        return (g / (2.0 * data),)

    return _make("sqrt", data, (a,), vjp)


def square(a):
    a = _lift(a)

    def vjp(g):
        return (g * (2.0 * a.data),)

    return _make("square", a.data * a.data, (a,), vjp)


# -- shape ops ---------------------------------------------------------------


def reshape(a, shape):
    a = _lift(a)
    data = a.data.reshape(shape)

    def vjp(g):
        return (g.reshape(a.shape),)

    return _make("reshape", data, (a,), vjp)


def transpose(a, axes):
    a = _lift(a)
    axes = tuple(axes)
    inv = tuple(np.argsort(axes))
    data = a.data.transpose(axes)  # view; numpy copies downstream only if needed

    def vjp(g):
        return (g.transpose(inv),)

    return _make("transpose", data, (a,), vjp)


def tsum(a, axis=None, keepdims=False):
    a = _lift(a)
    data = a.data.sum(axis=axis, keepdims=keepdims)

    def vjp(g):
        if axis is None:
            return (np.broadcast_to(g, a.shape).astype(a.dtype, copy=True),)
        if not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, a.shape).astype(a.dtype, copy=True),)

    return _make("sum", np.asarray(data), (a,), vjp)


def tmean(a, axis=None, keepdims=False):
    a = _lift(a)
    if axis is None:
        count = a.size
    else:
        count = a.shape[axis]
    return mul(tsum(a, axis, keepdims), 1.0 / count)


# -- linear algebra ----------------------------------------------------------


def matmul(a, b):
    a, b = _lift(a), _lift(b)
    if a.ndim < 2 or b.ndim < 2:
        raise ShapeError("matmul needs tensors with at least 2 dims")
    if a.shape[-1] != b.shape[-2]:
        raise ShapeError(f"matmul inner extents differ: {a.shape} x {b.shape}")
    fold = b.ndim == 2 and a.ndim > 2  # linear-layer case: one GEMM, no slice loop
    if fold:
        lead = a.shape[:-1]
        data = (a.data.reshape(-1, a.shape[-1]) @ b.data).reshape(*lead, b.shape[-1])
    else:
        data = np.matmul(a.data, b.data)

    def vjp(g):
        ga = gb = None
        if fold:
            g2 = g.reshape(-1, g.shape[-1])
            if _needs_grad(a):
                ga = (g2 @ b.data.T).reshape(a.shape)
            if _needs_grad(b):
                gb = a.data.reshape(-1, a.shape[-1]).T @ g2
            return ga, gb
        if _needs_grad(a):
            ga = _unbroadcast(np.matmul(g, np.swapaxes(b.data, -1, -2)), a.shape)
        if _needs_grad(b):
            gb = _unbroadcast(np.matmul(np.swapaxes(a.data, -1, -2), g), b.shape)
        return ga, gb

    return _make("matmul", data, (a, b), vjp)


# -- convolutions ------------------------------------------------------------


def conv2d(x, kernel, stride):
    """Valid cross-correlation. x: (b,c,h,w), kernel: (o,c,k,k)."""
    x, kernel = _lift(x), _lift(kernel)
    if x.ndim != 4 or kernel.ndim != 4:
        raise ShapeError("conv2d expects 4-d input and kernel")
    b, c, h, w = x.shape
    o, ck, k, k2 = kernel.shape
    if k != k2:
        raise ShapeError("conv2d kernel must be square")
    if ck != c:
        raise ShapeError(f"conv2d channel mismatch: input {c}, kernel {ck}")
    if k > h or k > w:
        raise ShapeError(f"conv2d kernel {k} larger than input {h}x{w}")
    data = kernels.conv2d_fwd(x.data, kernel.data, stride)

    def vjp(g):
        gx = kernels.conv2d_bwd_x(g, kernel.data, stride, h, w) if _needs_grad(x) else None
        gw = kernels.conv2d_bwd_w(g, x.data, stride, k) if _needs_grad(kernel) else None
        return gx, gw

    return _make("conv2d", data, (x, kernel), vjp)


def conv_transpose2d(x, kernel, stride):
    """Adjoint of conv2d. x: (b,c,h',w'), kernel: (c,o,k,k) -> (b,o,h,w)."""
    x, kernel = _lift(x), _lift(kernel)
    if x.ndim != 4 or kernel.ndim != 4:
        raise ShapeError("conv_transpose2d expects 4-d input and kernel")
    b, c, hp, wp = x.shape
    ck, o, k, k2 = kernel.shape
    if k != k2:
        raise ShapeError("conv_transpose2d kernel must be square")
    if ck != c:
        raise ShapeError(f"conv_transpose2d channel mismatch: input {c}, kernel {ck}")
    h = (hp - 1) * stride + k
    w = (wp - 1) * stride + k
    data = kernels.conv2d_bwd_x(x.data, kernel.data, stride, h, w)

    def vjp(g):
        gx = kernels.conv2d_fwd(g, kernel.data, stride) if _needs_grad(x) else None
        gw = kernels.conv2d_bwd_w(x.data, g, stride, k) if _needs_grad(kernel) else None
        return gx, gw

    return _make("conv_transpose2d", data, (x, kernel), vjp)


# -- nonlinearities ----------------------------------------------------------


def softmax(a, axis=-1):
    """Max-subtracted softmax along `axis`; slices sum to one."""
    a = _lift(a)
    data = a.data - a.data.max(axis=axis, keepdims=True)
    np.exp(data, out=data)
    data /= data.sum(axis=axis, keepdims=True)

    def vjp(g):
        dot = (g * data).sum(axis=axis, keepdims=True)
        return ((g - dot) * data,)

    return _make("softmax", data, (a,), vjp)


def gelu(a):
    """tanh-approximation GELU: 0.5*x*(1 + tanh(sqrt(2/pi)*(x + 0.044715*x^3)))."""
    a = _lift(a)
    x = a.data
    t = x * x
    t *= x
    t *= 0.044715
    t += x
    t *= _GELU_C
    np.tanh(t, out=t)
    data = t + 1.0
    data *= x
    data *= 0.5

    def vjp(g):
        # d/dx, built in place: 0.5*(1+t) + 0.5*x*(1-t^2)*C*(1+3*0.044715*x^2)
        d = t * t
        np.subtract(1.0, d, out=d)
        d *= x
        d *= 0.5
        q = x * x
        q *= 3.0 * 0.044715
        q += 1.0
        q *= _GELU_C
        d *= q
        d += 0.5
        q = None
        d += 0.5 * t
        d *= g
        return (d,)

    return _make("gelu", data, (a,), vjp)


def layer_norm(x, gain, bias, eps=1e-5):
    """Normalize the last axis to zero mean / unit variance, then affine."""
    x, gain, bias = _lift(x), _lift(gain), _lift(bias)
    n = x.shape[-1]
    mu = x.data.mean(axis=-1, keepdims=True)
    xc = x.data - mu
    var = (xc * xc).mean(axis=-1, keepdims=True)
    inv_std = 1.0 / np.sqrt(var + eps)
    xhat = xc * inv_std
    data = xhat * gain.data + bias.data

    def vjp(g):
        reduce_axes = tuple(range(g.ndim - 1))
        dgain = (g * xhat).sum(axis=reduce_axes)
        dbias = g.sum(axis=reduce_axes)
        dxhat = g * gain.data
        dx = (
            inv_std
            / n
            * (
                n * dxhat
                - dxhat.sum(axis=-1, keepdims=True)
                - xhat * (dxhat * xhat).sum(axis=-1, keepdims=True)
            )
        )
        return dx, dgain, dbias

    return _make("layer_norm", data, (x, gain, bias), vjp)


def bag_mean(table, bags):
    """Mean of table rows per bag of indices -> (len(bags), d).

    Bags are sorted before summation so the result is exactly invariant to
    token order. Gradients flow only to rows that appear in some bag.
    """
    table = _lift(table)
    bags = [np.sort(np.asarray(b, dtype=np.intp)) for b in bags]
    for i, b in enumerate(bags):
        if b.size == 0:
            raise DegenerateInputError(f"bag {i} is empty; cannot average zero rows")
    data = np.stack([table.data[b].mean(axis=0) for b in bags])

    def vjp(g):
        gt = np.zeros_like(table.data)
        for i, b in enumerate(bags):
            np.add.at(gt, b, g[i] / b.size)
        return (gt,)

    return _make("bag_mean", data, (table,), vjp)


# -- losses ------------------------------------------------------------------


def mse(pred, target):
    pred, target = _lift(pred), _lift(target)
    d = sub(pred, target)
    return tmean(square(d))


def relative_l2(pred, target):
    """Mean over samples of ||pred - true||_2 / ||true||_2 (per-sample flatten)."""
    pred, target = _lift(pred), _lift(target)
    if pred.shape != target.shape:
        raise ShapeError(f"relative_l2 shape mismatch: {pred.shape} vs {target.shape}")
    b = pred.shape[0]
    p = reshape(pred, (b, -1))
    t = reshape(target, (b, -1))
    den_sq = (t.data * t.data).sum(axis=1)
    if np.any(den_sq == 0.0):
        bad = int(np.flatnonzero(den_sq == 0.0)[0])
        raise DegenerateTargetError(f"sample {bad} has an all-zero target")
    num = sqrt(tsum(square(sub(p, t)), axis=1))
    den = Tensor(np.sqrt(den_sq), dtype=num.dtype)
    return tmean(div(num, den))
