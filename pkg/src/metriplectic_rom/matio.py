"""Binary matrix persistence: magic "MPLX", u32 version, u32 rows, u32 cols,
then the row-major little-endian float64 payload."""

import struct
from pathlib import Path

import numpy as np

MAGIC = b"MPLX"
VERSION = 1
_HEADER = struct.Struct("<4sIII")


def write_matrix(path, matrix: np.ndarray) -> Path:
    path = Path(path)
    matrix = np.ascontiguousarray(np.asarray(matrix, dtype="<f8"))
    if matrix.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {matrix.shape}")
    rows, cols = matrix.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, rows, cols))
        fh.write(matrix.tobytes(order="C"))
    return path


def read_matrix(path) -> np.ndarray:
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: truncated matrix file")
    magic, version, rows, cols = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise ValueError(f"{path}: unsupported version {version}")
    expected = _HEADER.size + 8 * rows * cols
    if len(raw) != expected:
        raise ValueError(f"{path}: payload size {len(raw)} != expected {expected}")
    data = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    return data.reshape(rows, cols).astype(float)
