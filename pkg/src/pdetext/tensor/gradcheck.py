"""Central finite-difference gradient checking (float64 only)."""

import numpy as np

from .core import Tensor, precision64


def numeric_gradient(f, x, eps=1e-6):
    """Central differences of scalar-valued f at array x, element by element."""
    x = np.asarray(x, dtype=np.float64)
    g = np.zeros_like(x)
    flat = x.ravel()
    gf = g.ravel()
    for i in range(flat.size):
        saved = flat[i]
        flat[i] = saved + eps
        fp = f(x)
        flat[i] = saved - eps
        fm = f(x)
        flat[i] = saved
        gf[i] = (fp - fm) / (2.0 * eps)
    return g


def max_rel_err(analytic, numeric):
    """max |a - n| / max(1, |a|, |n|); tiny gradients compare absolutely."""
    a = np.asarray(analytic, dtype=np.float64)
    n = np.asarray(numeric, dtype=np.float64)
    scale = np.maximum(1.0, np.maximum(np.abs(a), np.abs(n)))
    return float(np.max(np.abs(a - n) / scale)) if a.size else 0.0


def check_gradients(build, arrays, eps=1e-6):
    """Check d(build)/d(array) for every input against finite differences.

    ``build`` maps a list of Tensors to a scalar Tensor. Returns the worst
    relative error across all inputs. Runs under the float64 mode.
    """
    with precision64():
        arrays = [np.asarray(a, dtype=np.float64) for a in arrays]
        tensors = [Tensor(a, requires_grad=True) for a in arrays]
        out = build(tensors)
        out.backward()
        worst = 0.0
        for i, t in enumerate(tensors):

            def scalar(x, i=i):
                probe = [Tensor(a) for a in arrays]
                probe[i] = Tensor(x)
                return float(build(probe).data)

            num = numeric_gradient(scalar, arrays[i], eps)
            worst = max(worst, max_rel_err(t.grad, num))
    return worst
