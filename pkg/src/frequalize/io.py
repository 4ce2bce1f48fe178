"""Flat binary container for field dumps.

Layout: a 32-byte header followed by the raw float64 samples in C order,
little endian, shape (components, N, ..., N).

Header (little endian, 32 bytes):
    bytes 0-3    magic "FQLZ"
    bytes 4-7    format version (u32, currently 1)
    bytes 8-11   spatial dimension (u32)
    bytes 12-15  points per axis N (u32)
    bytes 16-23  box length L (f64)
    bytes 24-27  number of components (u32)
    bytes 28-31  reserved (zero)
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .grid import PhysicalField, TorusGrid

MAGIC = b"FQLZ"
VERSION = 1
_HEADER = struct.Struct("<4sIIIdI4x")
HEADER_SIZE = _HEADER.size  # 32


def dump_field(field: PhysicalField, path: str | Path) -> None:
    grid = field.grid
    header = _HEADER.pack(
        MAGIC, VERSION, grid.dim, grid.points_per_axis, grid.box_length, field.components
    )
    data = np.ascontiguousarray(field.values, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(data.tobytes())


def load_field(path: str | Path) -> PhysicalField:
    raw = Path(path).read_bytes()
    if len(raw) < HEADER_SIZE:
        raise ConfigError(f"{path}: truncated header ({len(raw)} bytes)")
    magic, version, dim, n, length, components = _HEADER.unpack(raw[:HEADER_SIZE])
    if magic != MAGIC:
        raise ConfigError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise ConfigError(f"{path}: unsupported container version {version}")
    grid = TorusGrid(dim=dim, box_length=length, points_per_axis=n)
    expected = components * n**dim
    payload = np.frombuffer(raw, dtype="<f8", offset=HEADER_SIZE)
    if payload.size != expected:
        raise ConfigError(
            f"{path}: payload holds {payload.size} samples, expected {expected}"
        )
    values = payload.reshape((components,) + grid.shape).astype(float)
    return PhysicalField(grid, values)
