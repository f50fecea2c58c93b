"""Binary trajectory dataset file ("PDET").

Layout: magic ``PDET``, version u32 LE, header length u64 LE, JSON header,
then the payload as contiguous little-endian float32 laid out
[n_traj, 101, grid, grid]. The header carries per-trajectory SystemParams
records (JSON floats round-trip doubles exactly), so write -> read is
bit-exact including all metadata.
"""

import json
import struct
from collections import Counter

import numpy as np

from ..errors import FormatError
from .params import SystemParams
from .trajectory import FRAME_COUNT, Trajectory

MAGIC = b"PDET"
VERSION = 1


def write_dataset(trajectories, path):
    if not trajectories:
        raise FormatError("refusing to write an empty dataset")
    grid = trajectories[0].grid
    for t in trajectories:
        if t.grid != grid:
            raise FormatError(f"mixed grid sizes: {grid} and {t.grid}")
    counts = Counter(t.params.equation.value for t in trajectories)
    header = {
        "format_version": VERSION,
        "grid": grid,
        "frame_count": FRAME_COUNT,
        "counts": dict(counts),
        "trajectories": [
            {
                "params": t.params.to_dict(),
                "domain": [list(t.domain[0]), list(t.domain[1])],
                "dt_out": t.dt_out,
            }
            for t in trajectories
        ],
    }
    raw = json.dumps(header).encode("utf-8")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<I", VERSION))
        f.write(struct.pack("<Q", len(raw)))
        f.write(raw)
        for t in trajectories:
            f.write(np.ascontiguousarray(t.frames, dtype="<f4").tobytes())


def read_dataset(path):
    with open(path, "rb") as f:
        data = f.read()
    if len(data) < 16:
        raise FormatError("file shorter than the fixed header", offset=len(data))
    if data[:4] != MAGIC:
        raise FormatError(f"bad magic {data[:4]!r}", offset=0)
    (version,) = struct.unpack_from("<I", data, 4)
    if version != VERSION:
        raise FormatError(f"unsupported version {version}", offset=4)
    (hlen,) = struct.unpack_from("<Q", data, 8)
    if 16 + hlen > len(data):
        raise FormatError("truncated JSON header", offset=16)
    try:
        header = json.loads(data[16 : 16 + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as err:
        raise FormatError(f"unparseable header: {err}", offset=16) from err
    records = header["trajectories"]
    grid = int(header["grid"])
    frame_count = int(header["frame_count"])
    if frame_count != FRAME_COUNT:
        raise FormatError(f"expected {FRAME_COUNT} frames per trajectory", offset=16)
    frame_bytes = frame_count * grid * grid * 4
    expected = 16 + hlen + len(records) * frame_bytes
    if len(data) != expected:
        raise FormatError(
            f"payload size mismatch: header declares {len(records)} trajectories "
            f"({expected} bytes total), file has {len(data)}",
            offset=min(expected, len(data)),
        )
    out = []
    off = 16 + hlen
    for rec in records:
        frames = (
            np.frombuffer(data, dtype="<f4", count=frame_count * grid * grid, offset=off)
            .reshape(frame_count, grid, grid)
            .copy()
        )
        off += frame_bytes
        dom = rec["domain"]
        out.append(
            Trajectory(
                params=SystemParams.from_dict(rec["params"]),
                frames=frames,
                domain=(tuple(dom[0]), tuple(dom[1])),
                dt_out=float(rec["dt_out"]),
            )
        )
    return out
