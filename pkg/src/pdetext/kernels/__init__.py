"""Kernel backend selection.

The compiled extension is preferred when available; the pure-numpy module is
a drop-in fallback. ``PDETEXT_KERNELS=python`` or ``=compiled`` forces the
choice (the latter raises if the extension was never built). The selection
happens once, at import.

``benchmarks/bench_kernels.py`` times the two backends side by side.
"""

import ctypes
import ctypes.util
import os

from . import pykernels


def _tune_malloc():
    """Keep large blocks on the heap for reuse instead of mmap/munmap cycles;
    the page-fault churn of fresh 10-100 MB temporaries otherwise dominates
    elementwise work on this class of machine. Best effort."""
    try:
        libc = ctypes.CDLL(ctypes.util.find_library("c") or "libc.so.6", use_errno=True)
        libc.mallopt(-3, 1 << 30)  # M_MMAP_THRESHOLD
        libc.mallopt(-1, 1 << 30)  # M_TRIM_THRESHOLD
    except (OSError, AttributeError):
        pass


if os.environ.get("PDETEXT_MALLOC_TUNING", "1") != "0":
    _tune_malloc()

_requested = os.environ.get("PDETEXT_KERNELS", "auto")
if _requested not in ("auto", "compiled", "python"):
    raise ValueError(f"PDETEXT_KERNELS must be auto|compiled|python, got {_requested!r}")

_impl = None
if _requested in ("auto", "compiled"):
    try:
        from . import _ckernels as _impl
    except ImportError:
        if _requested == "compiled":
            raise
        _impl = None

BACKEND = "python" if _impl is None else "compiled"

# The matmul-shaped kernels (conv forward / kernel gradient) go through
# BLAS-backed im2col even on the compiled backend: measured ~6-10x faster
# than the scalar loops at model shapes. The compiled extension keeps the
# kernels where C wins: the col2im scatter-add and the FD stepper.
_stepper = pykernels if _impl is None else _impl

import numpy as _np


def _c4(a):
    return _np.ascontiguousarray(a)


def conv2d_fwd(x, w, stride):
    return pykernels.conv2d_fwd(_c4(x), _c4(w), stride)


def conv2d_bwd_w(gy, x, stride, k):
    return pykernels.conv2d_bwd_w(_c4(gy), _c4(x), stride, k)


def conv2d_bwd_x(gy, w, stride, h, width):
    if _impl is None:
        return pykernels.conv2d_bwd_x(_c4(gy), _c4(w), stride, h, width)
    t = _np.ascontiguousarray(_np.tensordot(gy, w, axes=([1], [0])))
    gx = _np.zeros((gy.shape[0], w.shape[1], h, width), dtype=gy.dtype)
    _impl.col2im_add(t, stride, gx)
    return gx


def advance_diffuse_advect(u, beta, ax, ay, bc, bc_value, dx, dt, nsteps):
    return _stepper.advance_diffuse_advect(
        _c4(u), beta, ax, ay, bc, bc_value, dx, dt, nsteps
    )
