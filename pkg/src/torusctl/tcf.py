"""TCF1 field persistence.

Layout: a 64-byte header followed by the grid samples.

* header: magic ``b"TCF1"``, then ``dim, Nx, Ny`` as little-endian u32,
  then ``A, B`` as little-endian f64, zero-padded to 64 bytes;
* payload: ``Nx*Ny`` interleaved little-endian f64 (re, im) pairs in
  row-major order with y fastest (``values.ravel()``).
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import TorusError
from .geometry import SpatialField, TorusGeometry

MAGIC = b"TCF1"
_HEADER = struct.Struct("<4s3I2d32x")
assert _HEADER.size == 64


def save_field(field: SpatialField, path) -> None:
    geo = field.geometry
    a, b = geo.periods
    header = _HEADER.pack(MAGIC, geo.dim, geo.nx, geo.ny, a, b)
    payload = np.ascontiguousarray(field.values, dtype="<c16").tobytes()
    Path(path).write_bytes(header + payload)


def load_field(path, role: str = "state") -> SpatialField:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise TorusError(f"{path}: truncated TCF1 header ({len(raw)} bytes)")
    magic, dim, nx, ny, a, b = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise TorusError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    if dim not in (1, 2):
        raise TorusError(f"{path}: bad dim {dim}")
    expected = _HEADER.size + nx * ny * 16
    if len(raw) != expected:
        raise TorusError(
            f"{path}: payload size mismatch, expected {expected} bytes for "
            f"{nx}x{ny} grid, got {len(raw)}"
        )
    geometry = TorusGeometry(dim=dim, periods=(a, b), grid=(nx, ny))
    values = np.frombuffer(raw, dtype="<c16", offset=_HEADER.size).reshape(nx, ny)
    return SpatialField(geometry, values.astype(np.complex128), role=role)
