"""Binary model files.

Layout (all integers unsigned 32-bit little-endian)::

    b"HTRC"  version  json_len  json_bytes
    repeated until EOF:
        name_len  name_bytes  rank  dim_0 .. dim_{rank-1}  float32-LE data (row-major)

The JSON object is the :class:`ModelConfig`.  Every tensor named by the
config must appear exactly once; anything else (unknown names, duplicates,
truncated records, trailing bytes) is rejected.
"""

from __future__ import annotations

import io
import json
import struct
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, ModelFormatError
from .model import ModelConfig, TruecaserModel, parameter_shapes

MAGIC = b"HTRC"
FORMAT_VERSION = 1
_U32 = struct.Struct("<I")


def dumps(model: TruecaserModel) -> bytes:
    buf = io.BytesIO()
    buf.write(MAGIC)
    buf.write(_U32.pack(FORMAT_VERSION))
    cfg = json.dumps(model.config.to_dict(), sort_keys=True, ensure_ascii=False).encode("utf-8")
    buf.write(_U32.pack(len(cfg)))
    buf.write(cfg)
    for name in parameter_shapes(model.config):
        arr = np.ascontiguousarray(model.params[name], dtype="<f4")
        raw = name.encode("utf-8")
        buf.write(_U32.pack(len(raw)))
        buf.write(raw)
        buf.write(_U32.pack(arr.ndim))
        for d in arr.shape:
            buf.write(_U32.pack(d))
        buf.write(arr.tobytes(order="C"))
    return buf.getvalue()


class _Reader:
    def __init__(self, data: bytes):
        self.data = memoryview(data)
        self.pos = 0

    def take(self, n: int, what: str) -> bytes:
        if self.pos + n > len(self.data):
            raise ModelFormatError(f"truncated model file while reading {what}")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return bytes(out)

    def u32(self, what: str) -> int:
        return _U32.unpack(self.take(4, what))[0]

    @property
    def done(self) -> bool:
        return self.pos == len(self.data)


def loads(data: bytes) -> TruecaserModel:
    r = _Reader(data)
    if r.take(4, "magic") != MAGIC:
        raise ModelFormatError("not a model file (bad magic bytes)")
    version = r.u32("version")
    if version != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported format version {version}")
    try:
        cfg = ModelConfig.from_dict(json.loads(r.take(r.u32("config length"), "config").decode("utf-8")))
    except (ValueError, TypeError) as exc:
        raise ModelFormatError(f"bad config block: {exc}") from exc
    shapes = parameter_shapes(cfg)
    params = {}
    while not r.done:
        try:
            name = r.take(r.u32("tensor name length"), "tensor name").decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ModelFormatError("tensor name is not UTF-8") from exc
        if name not in shapes:
            raise ModelFormatError(f"unexpected tensor {name!r} (or trailing bytes)")
        if name in params:
            raise ModelFormatError(f"duplicate tensor {name!r}")
        rank = r.u32("rank")
        dims = tuple(r.u32("dims") for _ in range(rank))
        if dims != shapes[name]:
            raise ModelFormatError(f"tensor {name!r} has shape {dims}, config implies {shapes[name]}")
        count = int(np.prod(dims, dtype=np.int64))
        arr = np.frombuffer(r.take(4 * count, f"data of {name}"), dtype="<f4").reshape(dims)
        params[name] = arr.astype(np.float32)
    missing = sorted(set(shapes) - set(params))
    if missing:
        raise ModelFormatError(f"missing tensors: {missing}")
    try:
        return TruecaserModel(cfg, params)
    except DimensionMismatch as exc:
        raise ModelFormatError(str(exc)) from exc


def save_model(model: TruecaserModel, path: str | Path) -> None:
    Path(path).write_bytes(dumps(model))


def load_model(path: str | Path) -> TruecaserModel:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise ModelFormatError(f"cannot read model file {path}: {exc}") from exc
    return loads(data)
