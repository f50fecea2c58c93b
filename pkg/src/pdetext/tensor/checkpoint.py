"""Parameter checkpoint file.

Layout: magic ``CKPT``, version u32 LE, header length u64 LE, JSON header,
then all parameters as little-endian float32 in declaration order. The JSON
header records the caller's metadata (architecture config, seed, ...) plus
the name/shape of every tensor, so files are self-describing.
"""

import json
import struct

import numpy as np

from ..errors import FormatError

MAGIC = b"CKPT"
VERSION = 1


def save_checkpoint(path, params, meta):
    """params: dict name -> Tensor (or ndarray), in declaration order."""
    tensors = []
    blobs = []
    for name, t in params.items():
        arr = np.ascontiguousarray(getattr(t, "data", t), dtype="<f4")
        tensors.append({"name": name, "shape": list(arr.shape)})
        blobs.append(arr.tobytes())
    header = dict(meta)
    header["tensors"] = tensors
    header["tensor_count"] = len(tensors)
    header["param_count"] = int(sum(np.prod(t["shape"], dtype=np.int64) for t in tensors))
    raw = json.dumps(header).encode("utf-8")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<I", VERSION))
        f.write(struct.pack("<Q", len(raw)))
        f.write(raw)
        for blob in blobs:
            f.write(blob)


def load_checkpoint(path):
    """Returns (meta, dict name -> float32 ndarray)."""
    with open(path, "rb") as f:
        data = f.read()
    if data[:4] != MAGIC:
        raise FormatError(f"bad checkpoint magic {data[:4]!r}", offset=0)
    (version,) = struct.unpack_from("<I", data, 4)
    if version != VERSION:
        raise FormatError(f"unsupported checkpoint version {version}", offset=4)
    (hlen,) = struct.unpack_from("<Q", data, 8)
    if 16 + hlen > len(data):
        raise FormatError("truncated checkpoint header", offset=16)
    header = json.loads(data[16 : 16 + hlen].decode("utf-8"))
    out = {}
    off = 16 + hlen
    for spec in header["tensors"]:
        n = int(np.prod(spec["shape"], dtype=np.int64))
        nbytes = n * 4
        if off + nbytes > len(data):
            raise FormatError(f"truncated payload for tensor {spec['name']}", offset=off)
        out[spec["name"]] = np.frombuffer(data, dtype="<f4", count=n, offset=off).reshape(
            spec["shape"]
        ).copy()
        off += nbytes
    if off != len(data):
        raise FormatError("trailing bytes after last tensor", offset=off)
    return header, out
