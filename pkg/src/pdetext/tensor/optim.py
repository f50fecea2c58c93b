"""Adam with standard bias correction.

``adam_step`` is the functional core (operates on raw arrays); ``Adam``
wraps a named parameter collection for the training loop.
"""

import numpy as np


def init_adam_state(params):
    return {
        "step": 0,
        "m": [np.zeros_like(p) for p in params],
        "v": [np.zeros_like(p) for p in params],
    }


def adam_step(params, grads, state, lr, betas=(0.9, 0.999), eps=1e-8, weight_decay=0.0):
    """One bias-corrected Adam update; params are updated in place and returned."""
    b1, b2 = betas
    t = state["step"] + 1
    state["step"] = t
    c1 = 1.0 - b1**t
    c2 = 1.0 - b2**t
    for p, g, m, v in zip(params, grads, state["m"], state["v"]):
        if g is None:
            g = np.zeros_like(p)
        if weight_decay:
            g = g + weight_decay * p
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * (g * g)
        p -= lr * (m / c1) / (np.sqrt(v / c2) + eps)
    return params


class Adam:
    def __init__(self, params, lr=1e-3, betas=(0.9, 0.999), eps=1e-8, weight_decay=0.0):
        """params: dict name -> Tensor (declaration order is preserved)."""
        self.tensors = list(params.values())
        self.lr = lr
        self.betas = betas
        self.eps = eps
        self.weight_decay = weight_decay
        self.state = init_adam_state([t.data for t in self.tensors])

    def zero_grad(self):
        for t in self.tensors:
            t.grad = None

    def step(self):
        adam_step(
            [t.data for t in self.tensors],
            [t.grad for t in self.tensors],
            self.state,
            self.lr,
            self.betas,
            self.eps,
            self.weight_decay,
        )
