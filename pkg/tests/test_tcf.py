"""TCF1 persistence format."""

import struct

import numpy as np
import pytest

from torusctl import SpatialField, TorusGeometry, load_field, save_field
from torusctl.errors import TorusError


def test_round_trip(tmp_path, rng):
    geo = TorusGeometry(dim=2, periods=(2.0, 3.0), grid=(8, 6))
    vals = rng.standard_normal((8, 6)) + 1j * rng.standard_normal((8, 6))
    field = SpatialField(geo, vals)
    path = tmp_path / "field.tcf1"
    save_field(field, path)
    back = load_field(path)
    assert back.geometry == geo
    assert np.array_equal(back.values, field.values)


def test_header_layout(tmp_path):
    geo = TorusGeometry(dim=2, periods=(1.0, 1.0), grid=(4, 4))
    field = SpatialField(geo, np.zeros((4, 4)))
    path = tmp_path / "f.tcf1"
    save_field(field, path)
    raw = path.read_bytes()
    assert raw[:4] == b"TCF1"
    assert len(raw) == 64 + 4 * 4 * 16
    dim, nx, ny = struct.unpack_from("<3I", raw, 4)
    assert (dim, nx, ny) == (2, 4, 4)
    a, b = struct.unpack_from("<2d", raw, 16)
    assert (a, b) == (1.0, 1.0)


def test_payload_order_is_row_major_y_fastest(tmp_path):
    geo = TorusGeometry(dim=2, periods=(1.0, 1.0), grid=(4, 4))
    vals = np.arange(16, dtype=float).reshape(4, 4)
    save_field(SpatialField(geo, vals), tmp_path / "f.tcf1")
    raw = (tmp_path / "f.tcf1").read_bytes()
    flat = np.frombuffer(raw, dtype="<f8", offset=64)
    assert np.array_equal(flat[0::2], np.arange(16, dtype=float))  # re parts
    assert np.array_equal(flat[1::2], np.zeros(16))  # im parts


def test_bad_magic_rejected(tmp_path):
    path = tmp_path / "bad.tcf1"
    path.write_bytes(b"NOPE" + b"\0" * 60)
    with pytest.raises(TorusError, match="magic"):
        load_field(path)


def test_size_mismatch_rejected(tmp_path):
    geo = TorusGeometry(dim=2, periods=(1.0, 1.0), grid=(4, 4))
    field = SpatialField(geo, np.zeros((4, 4)))
    path = tmp_path / "f.tcf1"
    save_field(field, path)
    path.write_bytes(path.read_bytes()[:-16])
    with pytest.raises(TorusError, match="size"):
        load_field(path)


def test_one_dimensional_field(tmp_path, rng):
    geo = TorusGeometry.circle(a=2 * np.pi, n=16)
    field = SpatialField(geo, rng.standard_normal((16, 1)) + 0j)
    path = tmp_path / "c.tcf1"
    save_field(field, path)
    back = load_field(path)
    assert back.geometry.dim == 1
    assert np.array_equal(back.values, field.values)
