from .store import (
    EmbeddingStore,
    EmbeddingVector,
    dump_embeddings,
    load_store,
    lookup,
    read_embedding_dump,
    save_store,
    sentence_digest,
)
from .tokenizer import (
    TOKEN_DIM,
    VOCAB_SIZE,
    embed_tokens,
    fnv1a64,
    make_token_table,
    token_histogram,
    tokenize,
)

__all__ = [
    "EmbeddingStore",
    "EmbeddingVector",
    "dump_embeddings",
    "load_store",
    "lookup",
    "read_embedding_dump",
    "save_store",
    "sentence_digest",
    "TOKEN_DIM",
    "VOCAB_SIZE",
    "embed_tokens",
    "fnv1a64",
    "make_token_table",
    "token_histogram",
    "tokenize",
]
