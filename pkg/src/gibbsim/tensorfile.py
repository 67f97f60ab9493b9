"""The on-disk / on-pipe tensor format and count-prefixed streams.

Byte layout (all integers little-endian), pinned by golden-file tests:

* preamble, 16 bytes: magic ``GBS1`` (4), ndim as uint32 (4), dtype
  code as one byte (0 = float32 real, 1 = interleaved float32 complex),
  7 reserved zero bytes;
* dims: ndim uint32 values;
* payload length: uint64, exactly ``prod(dims) * itemsize`` (4 real,
  8 complex) -- no trailing bytes are allowed after the payload;
* payload: row-major samples.

A 100 x 100 complex image is therefore 16 + 8 + 8 + 80000 = 80032
bytes.  Streams exchange a uint32 tensor count followed by that many
back-to-back tensors.  Internal computation is 64-bit; values are
rounded to 32-bit once, on write.
"""

from __future__ import annotations

import io
import os
import struct
from typing import BinaryIO

import numpy as np

from .errors import FormatError

__all__ = [
    "MAGIC",
    "DTYPE_REAL",
    "DTYPE_COMPLEX",
    "write_tensor",
    "read_tensor",
    "save_tensor",
    "load_tensor",
    "write_stream",
    "read_stream",
    "pack_stream",
    "unpack_stream",
]

MAGIC = b"GBS1"
DTYPE_REAL = 0
DTYPE_COMPLEX = 1
_MAX_NDIM = 8

_PREAMBLE = struct.Struct("<4sIB7x")
_COUNT = struct.Struct("<I")
_PAYLOAD_LEN = struct.Struct("<Q")


def _storage_dtype(arr: np.ndarray) -> tuple[int, np.ndarray]:
    if np.iscomplexobj(arr):
        return DTYPE_COMPLEX, np.ascontiguousarray(arr, dtype="<c8")
    return DTYPE_REAL, np.ascontiguousarray(arr, dtype="<f4")


def write_tensor(fp: BinaryIO, arr: np.ndarray) -> None:
    """Serialize one array to a binary stream."""
    arr = np.asarray(arr)
    if arr.ndim < 1 or arr.ndim > _MAX_NDIM:
        raise FormatError(f"tensor rank must be 1..{_MAX_NDIM}, got {arr.ndim}")
    code, data = _storage_dtype(arr)
    fp.write(_PREAMBLE.pack(MAGIC, arr.ndim, code))
    fp.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
    fp.write(_PAYLOAD_LEN.pack(data.nbytes))
    fp.write(data.tobytes())


def _read_exact(fp: BinaryIO, n: int, what: str) -> bytes:
    buf = fp.read(n)
    if len(buf) != n:
        raise FormatError(f"truncated tensor: expected {n} bytes of {what}, got {len(buf)}")
    return buf


def read_tensor(fp: BinaryIO) -> np.ndarray:
    """Parse one array from a binary stream, validating every field."""
    preamble = _read_exact(fp, _PREAMBLE.size, "preamble")
    magic, ndim, code = _PREAMBLE.unpack(preamble)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if not 1 <= ndim <= _MAX_NDIM:
        raise FormatError(f"bad ndim {ndim}, expected 1..{_MAX_NDIM}")
    if code not in (DTYPE_REAL, DTYPE_COMPLEX):
        raise FormatError(f"bad dtype code {code}")
    dims = struct.unpack(f"<{ndim}I", _read_exact(fp, 4 * ndim, "dims"))
    if any(d < 1 for d in dims):
        raise FormatError(f"bad dims {dims}: all must be >= 1")
    (payload_len,) = _PAYLOAD_LEN.unpack(_read_exact(fp, 8, "payload length"))
    itemsize = 8 if code == DTYPE_COMPLEX else 4
    expected = int(np.prod(dims, dtype=np.int64)) * itemsize
    if payload_len != expected:
        raise FormatError(
            f"payload length {payload_len} does not match dims {dims} "
            f"(expected {expected})"
        )
    payload = _read_exact(fp, payload_len, "payload")
    dt = "<c8" if code == DTYPE_COMPLEX else "<f4"
    return np.frombuffer(payload, dtype=dt).reshape(dims).copy()


def save_tensor(path: str | os.PathLike, arr: np.ndarray) -> None:
    """Write one tensor file atomically (temp file + rename)."""
    path = os.fspath(path)
    tmp = path + ".tmp"
    with open(tmp, "wb") as fp:
        write_tensor(fp, arr)
    os.replace(tmp, path)


def load_tensor(path: str | os.PathLike) -> np.ndarray:
    """Read one tensor file, rejecting trailing bytes."""
    with open(path, "rb") as fp:
        arr = read_tensor(fp)
        if fp.read(1):
            raise FormatError(f"trailing bytes after payload in {path}")
    return arr


def write_stream(fp: BinaryIO, tensors: list[np.ndarray]) -> None:
    """Write a count-prefixed tensor stream."""
    fp.write(_COUNT.pack(len(tensors)))
    for t in tensors:
        write_tensor(fp, t)


def read_stream(fp: BinaryIO) -> list[np.ndarray]:
    """Read one count-prefixed tensor stream."""
    (count,) = _COUNT.unpack(_read_exact(fp, _COUNT.size, "stream count"))
    return [read_tensor(fp) for _ in range(count)]


def pack_stream(tensors: list[np.ndarray]) -> bytes:
    buf = io.BytesIO()
    write_stream(buf, tensors)
    return buf.getvalue()


def unpack_stream(data: bytes) -> list[np.ndarray]:
    buf = io.BytesIO(data)
    tensors = read_stream(buf)
    if buf.read(1):
        raise FormatError("trailing bytes after tensor stream")
    return tensors
