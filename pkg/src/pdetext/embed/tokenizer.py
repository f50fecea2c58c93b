"""Hash-bucket tokenizer and the trainable mean-pooled token table.

This is a deliberately semantics-free text path: lowercase, split on
whitespace and punctuation (punctuation characters are their own tokens),
then FNV-1a 64 of the token bytes modulo the vocabulary size. Pure byte
hashing keeps the id stream identical across platforms.
"""

import re

import numpy as np

from ..errors import DegenerateInputError
from ..tensor import Tensor, bag_mean

VOCAB_SIZE = 4096
TOKEN_DIM = 384

_TOKEN_RE = re.compile(r"\w+|[^\w\s]")

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


def fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


def tokenize(description, vocab_size=VOCAB_SIZE):
    """Token-id sequence for a description (or raw string)."""
    text = getattr(description, "text", description)
    return [
        fnv1a64(tok.encode("utf-8")) % vocab_size for tok in _TOKEN_RE.findall(text.lower())
    ]


def make_token_table(seed, vocab_size=VOCAB_SIZE, dim=TOKEN_DIM, dtype=None):
    """Trainable embedding table, uniform(-1/sqrt(dim), 1/sqrt(dim))."""
    rng = np.random.Generator(np.random.Philox(seed))
    bound = 1.0 / np.sqrt(dim)
    data = rng.uniform(-bound, bound, size=(vocab_size, dim))
    return Tensor(data, requires_grad=True, dtype=dtype)


def embed_tokens(tokens, table: Tensor) -> Tensor:
    """Mean of the table rows for one token sequence -> (dim,)."""
    if len(tokens) == 0:
        raise DegenerateInputError("cannot embed an empty token sequence")
    return bag_mean(table, [np.asarray(tokens)]).reshape((table.shape[1],))


def token_histogram(tokens, vocab_size=VOCAB_SIZE):
    """Mean one-hot (bag-of-tokens) vector of dim vocab_size; the fixed,
    training-free representation used when dumping tokenizer embeddings."""
    if len(tokens) == 0:
        raise DegenerateInputError("cannot embed an empty token sequence")
    h = np.zeros(vocab_size, dtype=np.float32)
    np.add.at(h, np.asarray(tokens), 1.0 / len(tokens))
    return h
