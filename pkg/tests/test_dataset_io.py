"""Dataset file format: roundtrip exactness and corruption detection."""

import json
import struct

import numpy as np
import pytest

from pdetext.errors import FormatError
from pdetext.pde import (
    BCType,
    Equation,
    SystemParams,
    Trajectory,
    read_dataset,
    sample_system,
    solve_heat,
    write_dataset,
)


@pytest.fixture(scope="module")
def heat_trajs():
    return [solve_heat(sample_system(Equation.HEAT, s)) for s in (0, 1, 2)]


def test_roundtrip_is_bit_exact(tmp_path, heat_trajs):
    path = tmp_path / "heat.pdet"
    write_dataset(heat_trajs, path)
    back = read_dataset(path)
    assert len(back) == 3
    for a, b in zip(heat_trajs, back):
        assert np.array_equal(a.frames, b.frames)
        assert a.params == b.params
        assert a.domain == b.domain
        assert a.dt_out == b.dt_out


def test_double_roundtrip_preserves_bytes(tmp_path, heat_trajs):
    p1 = tmp_path / "a.pdet"
    p2 = tmp_path / "b.pdet"
    write_dataset(heat_trajs, p1)
    write_dataset(read_dataset(p1), p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_bad_magic_reports_offset_zero(tmp_path, heat_trajs):
    path = tmp_path / "x.pdet"
    write_dataset(heat_trajs[:1], path)
    raw = bytearray(path.read_bytes())
    raw[:4] = b"NOPE"
    path.write_bytes(raw)
    with pytest.raises(FormatError) as err:
        read_dataset(path)
    assert err.value.offset == 0


def test_bad_version_reports_offset(tmp_path, heat_trajs):
    path = tmp_path / "x.pdet"
    write_dataset(heat_trajs[:1], path)
    raw = bytearray(path.read_bytes())
    raw[4:8] = struct.pack("<I", 99)
    path.write_bytes(raw)
    with pytest.raises(FormatError) as err:
        read_dataset(path)
    assert err.value.offset == 4


def test_truncated_payload_detected(tmp_path, heat_trajs):
    path = tmp_path / "x.pdet"
    write_dataset(heat_trajs[:2], path)
    raw = path.read_bytes()
    path.write_bytes(raw[: len(raw) - 100])
    with pytest.raises(FormatError, match="size mismatch"):
        read_dataset(path)


def test_header_count_mismatch_detected(tmp_path, heat_trajs):
    """Drop one trajectory record from the header but keep the payload."""
    path = tmp_path / "x.pdet"
    write_dataset(heat_trajs[:2], path)
    raw = path.read_bytes()
    (hlen,) = struct.unpack_from("<Q", raw, 8)
    header = json.loads(raw[16 : 16 + hlen])
    header["trajectories"] = header["trajectories"][:1]
    new_header = json.dumps(header).encode()
    patched = raw[:8] + struct.pack("<Q", len(new_header)) + new_header + raw[16 + hlen :]
    path.write_bytes(patched)
    with pytest.raises(FormatError, match="size mismatch"):
        read_dataset(path)


def test_empty_dataset_rejected(tmp_path):
    with pytest.raises(FormatError):
        write_dataset([], tmp_path / "nothing.pdet")


def test_shallow_water_tagged_file_reads_back(tmp_path):
    """A converted dam-break file: 101 frames of water height, Neumann walls."""
    xs = np.linspace(-2.5, 2.5, 64)
    r = np.hypot(xs[None, :], xs[:, None])
    frames = np.stack(
        [1.0 + 0.5 * np.exp(-((r - 0.02 * t) ** 2)) for t in range(101)]
    ).astype(np.float32)
    params = SystemParams(
        equation=Equation.SHALLOW_WATER, bc_type=BCType.NEUMANN, bc_value=0.0, seed=0
    )
    traj = Trajectory(
        params=params, frames=frames, domain=((-2.5, 2.5), (-2.5, 2.5)), dt_out=0.01
    )
    path = tmp_path / "sw.pdet"
    write_dataset([traj], path)
    back = read_dataset(path)[0]
    assert back.params.equation is Equation.SHALLOW_WATER
    assert back.frames.shape == (101, 64, 64)
    assert back.params.bc_type is BCType.NEUMANN
