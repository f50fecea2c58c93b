"""Precomputed embedding stores ("EMB1") and the matrix-dump file.

A store maps SHA-256(sentence UTF-8 bytes) -> one fixed-length float32
vector. Lookups are exact-hash only: a template drift anywhere upstream
surfaces as a loud miss, never as a silently wrong vector.

Store file layout: magic ``EMB1``, version u32 LE, dim u32 LE, count u64 LE,
then count records of (32-byte hash || dim float32 LE).
"""

import hashlib
import json
import struct
from dataclasses import dataclass

import numpy as np

from ..errors import FormatError, StoreMissError

STORE_MAGIC = b"EMB1"
STORE_VERSION = 1

DUMP_MAGIC = b"EMBM"
DUMP_VERSION = 1


def sentence_digest(text: str) -> bytes:
    return hashlib.sha256(text.encode("utf-8")).digest()


@dataclass(frozen=True)
class EmbeddingVector:
    values: np.ndarray
    provider: str

    @property
    def dim(self):
        return int(self.values.shape[0])


@dataclass
class EmbeddingStore:
    dim: int
    entries: dict  # 32-byte hash -> float32 ndarray (dim,)

    def __len__(self):
        return len(self.entries)


def save_store(store: EmbeddingStore, path):
    with open(path, "wb") as f:
        f.write(STORE_MAGIC)
        f.write(struct.pack("<I", STORE_VERSION))
        f.write(struct.pack("<I", store.dim))
        f.write(struct.pack("<Q", len(store.entries)))
        for digest, vec in store.entries.items():
            if len(digest) != 32:
                raise FormatError("store keys must be 32-byte digests")
            arr = np.ascontiguousarray(vec, dtype="<f4")
            if arr.shape != (store.dim,):
                raise FormatError(f"vector shape {arr.shape} does not match dim {store.dim}")
            f.write(digest)
            f.write(arr.tobytes())


def load_store(path) -> EmbeddingStore:
    with open(path, "rb") as f:
        data = f.read()
    if len(data) < 20:
        raise FormatError("store shorter than the fixed header", offset=len(data))
    if data[:4] != STORE_MAGIC:
        raise FormatError(f"bad store magic {data[:4]!r}", offset=0)
    (version,) = struct.unpack_from("<I", data, 4)
    if version != STORE_VERSION:
        raise FormatError(f"unsupported store version {version}", offset=4)
    (dim,) = struct.unpack_from("<I", data, 8)
    (count,) = struct.unpack_from("<Q", data, 12)
    record = 32 + dim * 4
    if len(data) != 20 + count * record:
        raise FormatError(
            f"store declares {count} records of {record} bytes; file size is {len(data)}",
            offset=min(20 + count * record, len(data)),
        )
    entries = {}
    off = 20
    for _ in range(count):
        digest = data[off : off + 32]
        vec = np.frombuffer(data, dtype="<f4", count=dim, offset=off + 32).copy()
        entries[digest] = vec
        off += record
    return EmbeddingStore(dim=int(dim), entries=entries)


def lookup(store: EmbeddingStore, description) -> EmbeddingVector:
    """description: SystemDescription or raw sentence string."""
    text = getattr(description, "text", description)
    digest = sentence_digest(text)
    vec = store.entries.get(digest)
    if vec is None:
        raise StoreMissError(digest.hex())
    return EmbeddingVector(values=vec, provider="store")


def dump_embeddings(labeled_vectors, dim, path):
    """Write a labeled embedding matrix for external visualization.

    labeled_vectors: iterable of (label_dict, vector). Layout: magic EMBM,
    version u32, header length u64, JSON header (dim, count, labels), then
    count*dim float32 LE.
    """
    labels = []
    rows = []
    for label, vec in labeled_vectors:
        arr = np.ascontiguousarray(vec, dtype="<f4")
        if arr.shape != (dim,):
            raise FormatError(f"vector shape {arr.shape} does not match dim {dim}")
        labels.append(label)
        rows.append(arr)
    header = json.dumps({"dim": dim, "count": len(rows), "labels": labels}).encode("utf-8")
    with open(path, "wb") as f:
        f.write(DUMP_MAGIC)
        f.write(struct.pack("<I", DUMP_VERSION))
        f.write(struct.pack("<Q", len(header)))
        f.write(header)
        for r in rows:
            f.write(r.tobytes())


def read_embedding_dump(path):
    with open(path, "rb") as f:
        data = f.read()
    if data[:4] != DUMP_MAGIC:
        raise FormatError(f"bad dump magic {data[:4]!r}", offset=0)
    (hlen,) = struct.unpack_from("<Q", data, 8)
    header = json.loads(data[16 : 16 + hlen].decode("utf-8"))
    n, dim = header["count"], header["dim"]
    mat = np.frombuffer(data, dtype="<f4", count=n * dim, offset=16 + hlen).reshape(n, dim)
    return header["labels"], mat.copy()
