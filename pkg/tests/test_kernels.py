"""Backend parity: the compiled extension must match the numpy fallback."""

import subprocess
import sys

import numpy as np
import pytest

from pdetext import kernels
from pdetext.kernels import pykernels

compiled = pytest.mark.skipif(
    kernels.BACKEND != "compiled", reason="compiled extension not built"
)


@compiled
@pytest.mark.parametrize("dtype", [np.float32, np.float64])
@pytest.mark.parametrize("stride", [1, 2, 4])
def test_conv_kernels_match_python(dtype, stride):
    from pdetext.kernels import _ckernels

    rng = np.random.default_rng(0)
    x = rng.standard_normal((2, 3, 16, 16)).astype(dtype)
    w = rng.standard_normal((5, 3, 4, 4)).astype(dtype)
    tol = 1e-5 if dtype == np.float32 else 1e-12
    y_c = _ckernels.conv2d_fwd(x, w, stride)
    y_p = pykernels.conv2d_fwd(x, w, stride)
    np.testing.assert_allclose(y_c, y_p, rtol=tol, atol=tol)
    gy = rng.standard_normal(y_p.shape).astype(dtype)
    np.testing.assert_allclose(
        _ckernels.conv2d_bwd_w(gy, x, stride, 4), pykernels.conv2d_bwd_w(gy, x, stride, 4),
        rtol=tol, atol=tol,
    )
    np.testing.assert_allclose(
        _ckernels.conv2d_bwd_x(gy, w, stride, 16, 16),
        pykernels.conv2d_bwd_x(gy, w, stride, 16, 16),
        rtol=tol, atol=tol,
    )
    # the dispatch layer (tensordot + col2im) must agree too
    np.testing.assert_allclose(
        kernels.conv2d_bwd_x(gy, w, stride, 16, 16),
        pykernels.conv2d_bwd_x(gy, w, stride, 16, 16),
        rtol=tol, atol=tol,
    )


@compiled
@pytest.mark.parametrize("bc", [0, 1, 2])
def test_stepper_matches_python(bc):
    from pdetext.kernels import _ckernels

    rng = np.random.default_rng(1)
    u = rng.standard_normal((32, 32))
    args = (0.006, 0.4, -0.7, bc, 0.05, 1 / 32, 1e-4, 80)
    np.testing.assert_allclose(
        _ckernels.advance_diffuse_advect(u, *args),
        pykernels.advance_diffuse_advect(u, *args),
        rtol=1e-12, atol=1e-13,
    )


def test_python_backend_forced_by_env():
    code = (
        "import os, pdetext.kernels as k; "
        "assert k.BACKEND == 'python', k.BACKEND; print('ok')"
    )
    out = subprocess.run(
        [sys.executable, "-c", code],
        env={"PATH": "/usr/bin:/bin", "PDETEXT_KERNELS": "python"},
        capture_output=True,
        text=True,
    )
    assert out.returncode == 0 and "ok" in out.stdout, out.stderr


def test_backend_reports_a_known_name():
    assert kernels.BACKEND in ("compiled", "python")
