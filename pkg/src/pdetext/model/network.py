"""The factorized-attention surrogate and its text-conditioned variant.

The data path lifts the input field (plus normalized coordinate channels) to
``hidden_dim`` grid features, runs ``depth`` axial attention blocks, and
projects back to one channel. The conditioned variant inserts a
cross-attention block before and after the backbone: grid features are
patch-embedded (kernel 8, stride 4 -> 15x15 tokens at the 64 grid), the
projected sentence embedding attends over those tokens as queries, and the
result is deconvolved back to grid resolution, passed through a 128-wide
GELU MLP, and added residually.

Everything downstream of the cross-attention output projection is bias-free
on purpose: with that projection zeroed the conditioning branch vanishes
identically and the model reproduces the unconditioned path exactly.
"""

import math

import numpy as np

from ..errors import ConfigError, ShapeError
from ..tensor import (
    Tensor,
    add,
    conv2d,
    conv_transpose2d,
    default_dtype,
    gelu,
    layer_norm,
    matmul,
    mul,
    reshape,
    softmax,
    transpose,
)
from ..tensor.checkpoint import load_checkpoint, save_checkpoint
from .config import ArchConfig


class ParamBank:
    """Declares parameters in a fixed order from a counter-based RNG, so two
    models built with equal seeds are bit-identical."""

    def __init__(self, seed):
        self.seed = int(seed)
        self.rng = np.random.Generator(np.random.Philox(self.seed))
        self.params = {}

    def uniform(self, name, shape, fan_in):
        bound = 1.0 / math.sqrt(fan_in)
        data = self.rng.uniform(-bound, bound, size=shape)
        t = Tensor(data.astype(default_dtype()), requires_grad=True)
        self._register(name, t)
        return t

    def constant(self, name, shape, value):
        t = Tensor(np.full(shape, value, dtype=default_dtype()), requires_grad=True)
        self._register(name, t)
        return t

    def _register(self, name, t):
        if name in self.params:
            raise ConfigError(f"duplicate parameter name {name}")
        self.params[name] = t


class Linear:
    def __init__(self, bank, name, d_in, d_out, bias=True):
        self.w = bank.uniform(f"{name}.w", (d_in, d_out), fan_in=d_in)
        self.b = bank.uniform(f"{name}.b", (d_out,), fan_in=d_in) if bias else None

    def __call__(self, x):
        y = matmul(x, self.w)
        if self.b is not None:
            y = add(y, self.b)
        return y


class LayerNorm:
    def __init__(self, bank, name, dim):
        self.g = bank.constant(f"{name}.g", (dim,), 1.0)
        self.b = bank.constant(f"{name}.b", (dim,), 0.0)

    def __call__(self, x):
        return layer_norm(x, self.g, self.b)


class AxialAttention:
    """Multi-head scaled-dot-product attention along one grid axis, with
    two-layer query/key networks and a wider latent value path."""

    def __init__(self, bank, name, cfg: ArchConfig):
        h = cfg.hidden_dim
        qk_hidden = cfg.kernel_multiplier * h
        latent = cfg.latent_multiplier * h
        self.heads = cfg.heads
        self.head_dim = cfg.head_dim
        self.value_dim = latent // cfg.heads
        self.q1 = Linear(bank, f"{name}.q1", h, qk_hidden)
        self.q2 = Linear(bank, f"{name}.q2", qk_hidden, cfg.heads * cfg.head_dim)
        self.k1 = Linear(bank, f"{name}.k1", h, qk_hidden)
        self.k2 = Linear(bank, f"{name}.k2", qk_hidden, cfg.heads * cfg.head_dim)
        self.v = Linear(bank, f"{name}.v", h, latent)
        self.out = Linear(bank, f"{name}.out", latent, h)

    def __call__(self, z, identity_attention=False):
        b, s, n, _ = z.shape
        q = self._split(self.q2(gelu(self.q1(z))), b, s, n, self.head_dim)
        k = self._split(self.k2(gelu(self.k1(z))), b, s, n, self.head_dim)
        v = self._split(self.v(z), b, s, n, self.value_dim)
        # scale q (small) rather than the n x n score tensor (large)
        q = mul(q, 1.0 / math.sqrt(self.head_dim))
        scores = matmul(q, transpose(k, (0, 1, 2, 4, 3)))
        if identity_attention:
            mask = np.full((n, n), -1e30, dtype=scores.dtype)
            np.fill_diagonal(mask, 0.0)
            scores = add(scores, Tensor(mask, dtype=scores.dtype))
        attn = softmax(scores, axis=-1)
        o = matmul(attn, v)
        o = reshape(transpose(o, (0, 1, 3, 2, 4)), (b, s, n, self.heads * self.value_dim))
        return self.out(o)

    def _split(self, t, b, s, n, d):
        return transpose(reshape(t, (b, s, n, self.heads, d)), (0, 1, 3, 2, 4))


class AxialBlock:
    """Pre-norm row attention, column attention, then a pointwise MLP, each
    with a residual connection."""

    def __init__(self, bank, name, cfg: ArchConfig):
        h = cfg.hidden_dim
        self.ln1 = LayerNorm(bank, f"{name}.ln1", h)
        self.attn_x = AxialAttention(bank, f"{name}.attn_x", cfg)
        self.ln2 = LayerNorm(bank, f"{name}.ln2", h)
        self.attn_y = AxialAttention(bank, f"{name}.attn_y", cfg)
        self.ln3 = LayerNorm(bank, f"{name}.ln3", h)
        self.ff1 = Linear(bank, f"{name}.ff1", h, cfg.kernel_multiplier * h)
        self.ff2 = Linear(bank, f"{name}.ff2", cfg.kernel_multiplier * h, h)

    def __call__(self, z, identity_attention=False):
        z = add(z, self.attn_x(self.ln1(z), identity_attention))
        zt = transpose(z, (0, 2, 1, 3))
        zt = self.attn_y(self.ln2(zt), identity_attention)
        z = add(z, transpose(zt, (0, 2, 1, 3)))
        return add(z, self.ff2(gelu(self.ff1(self.ln3(z)))))


class CrossAttention:
    """Sentence tokens as queries, data tokens as keys/values (all
    projections bias-free)."""

    def __init__(self, bank, name, h, heads, head_dim):
        self.heads = heads
        self.head_dim = head_dim
        self.wq = Linear(bank, f"{name}.wq", h, heads * head_dim, bias=False)
        self.wk = Linear(bank, f"{name}.wk", h, heads * head_dim, bias=False)
        self.wv = Linear(bank, f"{name}.wv", h, heads * head_dim, bias=False)
        self.wo = Linear(bank, f"{name}.wo", heads * head_dim, h, bias=False)

    def __call__(self, z_sentence, z_data, return_attention=False):
        b, p, _ = z_data.shape
        q = self._split(self.wq(z_sentence), b, p)
        k = self._split(self.wk(z_data), b, p)
        v = self._split(self.wv(z_data), b, p)
        q = mul(q, 1.0 / math.sqrt(self.head_dim))
        scores = matmul(q, transpose(k, (0, 1, 3, 2)))
        attn = softmax(scores, axis=-1)
        o = matmul(attn, v)
        o = reshape(transpose(o, (0, 2, 1, 3)), (b, p, self.heads * self.head_dim))
        o = self.wo(o)
        if return_attention:
            return o, attn
        return o

    def _split(self, t, b, p):
        return transpose(reshape(t, (b, p, self.heads, self.head_dim)), (0, 2, 1, 3))


class ConditioningBranch:
    """Deconvolve tokens back to grid resolution and refine pointwise.

    Bias-free end to end so a zero input maps to an exactly-zero output.
    """

    FC_WIDTH = 128

    def __init__(self, bank, name, cfg: ArchConfig):
        h = cfg.hidden_dim
        k = cfg.patch_kernel
        self.cfg = cfg
        self.deconv = bank.uniform(f"{name}.deconv.w", (h, h, k, k), fan_in=h * k * k)
        self.fc1 = Linear(bank, f"{name}.fc1", h, self.FC_WIDTH, bias=False)
        self.fc2 = Linear(bank, f"{name}.fc2", self.FC_WIDTH, h, bias=False)

    def __call__(self, tokens):
        cfg = self.cfg
        b = tokens.shape[0]
        grid = transpose(tokens, (0, 2, 1))
        grid = reshape(grid, (b, cfg.hidden_dim, cfg.patch_side, cfg.patch_side))
        grid = conv_transpose2d(grid, self.deconv, cfg.patch_stride)
        grid = transpose(grid, (0, 2, 3, 1))
        return self.fc2(gelu(self.fc1(grid)))


class SentenceProjector:
    """Text embedding -> per-patch channel: one GELU hidden layer down to the
    patch count, then a 1 -> hidden_dim lift at every patch position."""

    def __init__(self, bank, name, cfg: ArchConfig):
        self.cfg = cfg
        self.l1 = Linear(bank, f"{name}.l1", cfg.llm_dim, cfg.llm_dim)
        self.l2 = Linear(bank, f"{name}.l2", cfg.llm_dim, cfg.patch_count)
        self.l3 = Linear(bank, f"{name}.l3", 1, cfg.hidden_dim)

    def __call__(self, e):
        b = e.shape[0]
        z = self.l2(gelu(self.l1(e)))
        z = reshape(z, (b, self.cfg.patch_count, 1))
        return self.l3(z)


def _coords(grid, dtype):
    line = np.linspace(0.0, 1.0, grid, dtype=dtype)
    x = np.broadcast_to(line[None, :], (grid, grid))
    y = np.broadcast_to(line[:, None], (grid, grid))
    return x, y


class Surrogate:
    """Field-to-field operator, optionally conditioned on a text embedding.

    ``token_vocab`` attaches a trainable token table (for the tokenizer text
    path); it is optimized and checkpointed with the rest of the model.
    """

    def __init__(self, config: ArchConfig, seed, token_vocab=None):
        self.config = config
        self.seed = int(seed)
        self.token_vocab = token_vocab
        bank = ParamBank(seed)
        h = config.hidden_dim
        self.lift = Linear(bank, "lift", 3, h)
        if config.multimodal:
            self.sentence = SentenceProjector(bank, "sentence", config)
            k = config.patch_kernel
            self.patch_w = bank.uniform("patch.w", (h, h, k, k), fan_in=h * k * k)
            self.patch_b = bank.uniform("patch.b", (h,), fan_in=h * k * k)
            self.cross1 = CrossAttention(bank, "mm1.attn", h, config.heads, config.head_dim)
            self.branch1 = ConditioningBranch(bank, "mm1.branch", config)
            self.cross2 = CrossAttention(bank, "mm2.attn", h, config.heads, config.head_dim)
            self.branch2 = ConditioningBranch(bank, "mm2.branch", config)
        self.blocks = [AxialBlock(bank, f"blocks.{i}", config) for i in range(config.depth)]
        self.out = Linear(bank, "out", h, 1)
        self.token_table = None
        if token_vocab:
            from ..embed.tokenizer import TOKEN_DIM

            if config.multimodal and config.llm_dim != TOKEN_DIM:
                raise ConfigError(
                    f"token table is {TOKEN_DIM}-dim but llm_dim is {config.llm_dim}"
                )
            bound = 1.0 / math.sqrt(TOKEN_DIM)
            self.token_table = bank.uniform("token_table", (token_vocab, TOKEN_DIM), fan_in=TOKEN_DIM)
        self._params = bank.params

    # -- parameters ----------------------------------------------------------

    def params(self):
        return self._params

    def param_count(self):
        return int(sum(t.size for t in self._params.values()))

    def state_arrays(self):
        return {k: t.data.copy() for k, t in self._params.items()}

    def load_state_arrays(self, arrays):
        for name, t in self._params.items():
            arr = arrays[name]
            if tuple(arr.shape) != t.shape:
                raise ConfigError(f"shape mismatch for {name}: {arr.shape} vs {t.shape}")
            t.data = np.asarray(arr, dtype=t.dtype)

    # -- forward -------------------------------------------------------------

    def _input_tensor(self, fields):
        fields = np.asarray(fields)
        if fields.ndim != 3 or fields.shape[1] != self.config.grid or fields.shape[2] != self.config.grid:
            raise ShapeError(
                f"expected fields (b, {self.config.grid}, {self.config.grid}), got {fields.shape}"
            )
        dtype = default_dtype()
        x, y = _coords(self.config.grid, dtype)
        b = fields.shape[0]
        stacked = np.empty((b, self.config.grid, self.config.grid, 3), dtype=dtype)
        stacked[..., 0] = fields
        stacked[..., 1] = x
        stacked[..., 2] = y
        return Tensor(stacked)

    def patch_tokens(self, g):
        """Grid features (b,H,W,h) -> patch tokens (b,p,h) with the shared
        patch-embedding weights."""
        b = g.shape[0]
        cfg = self.config
        z = transpose(g, (0, 3, 1, 2))
        z = conv2d(z, self.patch_w, cfg.patch_stride)
        z = add(z, reshape(self.patch_b, (1, cfg.hidden_dim, 1, 1)))
        z = reshape(z, (b, cfg.hidden_dim, cfg.patch_count))
        return transpose(z, (0, 2, 1))

    def patch_embed(self, fields_with_coords):
        """(b, grid, grid, 3) raw input -> (b, p, hidden) tokens."""
        x = fields_with_coords if isinstance(fields_with_coords, Tensor) else Tensor(fields_with_coords)
        return self.patch_tokens(self.lift(x))

    def project_sentence(self, embedding):
        if not self.config.multimodal:
            raise ConfigError("baseline model has no sentence projector")
        e = embedding if isinstance(embedding, Tensor) else Tensor(embedding)
        if e.shape[-1] != self.config.llm_dim:
            raise ConfigError(f"embedding dim {e.shape[-1]} != llm_dim {self.config.llm_dim}")
        return self.sentence(e)

    def forward(self, fields, embedding=None, identity_attention=False):
        cfg = self.config
        if cfg.multimodal and embedding is None:
            raise ConfigError("multimodal model requires a sentence embedding")
        x = self._input_tensor(fields)
        g = self.lift(x)
        if cfg.multimodal:
            zs = self.project_sentence(embedding)
            t = self.patch_tokens(g)
            g = add(g, self.branch1(self.cross1(zs, t)))
        for blk in self.blocks:
            g = blk(g, identity_attention)
        if cfg.multimodal:
            t = self.patch_tokens(g)
            g = add(g, self.branch2(self.cross2(zs, t)))
        y = self.out(g)
        return reshape(y, (y.shape[0], cfg.grid, cfg.grid))

    __call__ = forward

    # -- persistence ----------------------------------------------------------

    def save(self, path):
        meta = {
            "config": self.config.to_dict(),
            "seed": self.seed,
            "token_vocab": self.token_vocab,
        }
        save_checkpoint(path, self._params, meta)

    @classmethod
    def load(cls, path):
        meta, arrays = load_checkpoint(path)
        model = cls(
            ArchConfig.from_dict(meta["config"]),
            seed=meta["seed"],
            token_vocab=meta.get("token_vocab"),
        )
        if set(arrays) != set(model._params):
            raise ConfigError("checkpoint parameter names do not match the architecture")
        model.load_state_arrays(arrays)
        return model
