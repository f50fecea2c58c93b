"""Text-conditioned PDE surrogate toolkit.

Trajectory generation for three 2-D flow problems, templated
natural-language system descriptions, embedding plumbing, a small
factorized-attention operator with optional cross-attention text
conditioning, and the training/evaluation harness gluing them together.
"""

from . import embed, errors, harness, kernels, model, pde, tensor, text

__version__ = "0.1.0"

__all__ = ["embed", "errors", "harness", "kernels", "model", "pde", "tensor", "text", "__version__"]
