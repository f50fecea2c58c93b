from .core import (
    OpNode,
    Tensor,
    add,
    bag_mean,
    conv2d,
    conv_transpose2d,
    default_dtype,
    div,
    gelu,
    layer_norm,
    matmul,
    mse,
    mul,
    neg,
    no_grad,
    precision64,
    relative_l2,
    reshape,
    set_default_dtype,
    softmax,
    sqrt,
    square,
    sub,
    tmean,
    transpose,
    tsum,
)
from .checkpoint import load_checkpoint, save_checkpoint
from .optim import Adam, adam_step, init_adam_state

__all__ = [
    "OpNode",
    "Tensor",
    "add",
    "bag_mean",
    "conv2d",
    "conv_transpose2d",
    "default_dtype",
    "div",
    "gelu",
    "layer_norm",
    "matmul",
    "mse",
    "mul",
    "neg",
    "no_grad",
    "precision64",
    "relative_l2",
    "reshape",
    "set_default_dtype",
    "softmax",
    "sqrt",
    "square",
    "sub",
    "tmean",
    "transpose",
    "tsum",
    "load_checkpoint",
    "save_checkpoint",
    "Adam",
    "adam_step",
    "init_adam_state",
]
