"""Configuration files and PGM frames.

A configuration file has two lines::

    torus <n> <d>
    <hex>

where ``<hex>`` is the state vector read as one unsigned integer, vertex 0 in
the least-significant bit, written with exactly ``ceil(n**d / 4)`` lowercase
hex digits.
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .torus import Configuration, TorusShape, VertexSet

_PGM_HEADER = re.compile(rb"P5\s+(\d+)\s+(\d+)\s+(\d+)\s")


class ConfigFormatError(ValueError):
    pass


def encode_config(config: Configuration) -> str:
    shape = config.shape
    digits = -(-shape.vertex_count // 4)
    packed = np.packbits(config.bits, bitorder="little").tobytes()
    value = int.from_bytes(packed, "little")
    return f"torus {shape.n} {shape.d}\n{value:0{digits}x}\n"


def decode_config(text: str) -> Configuration:
    lines = text.splitlines()
    if len(lines) != 2:
        raise ConfigFormatError(f"expected 2 lines, found {len(lines)}")
    header = lines[0].split()
    if len(header) != 3 or header[0] != "torus":
        raise ConfigFormatError(f"bad header {lines[0]!r}; expected 'torus <n> <d>'")
    try:
        n, d = int(header[1]), int(header[2])
        shape = TorusShape(n, d)
    except ValueError as exc:
        raise ConfigFormatError(f"bad header {lines[0]!r}: {exc}") from None
    body = lines[1].strip()
    digits = -(-shape.vertex_count // 4)
    if len(body) != digits:
        raise ConfigFormatError(f"expected {digits} hex digits for T_{n}^{d}, found {len(body)}")
    try:
        value = int(body, 16)
    except ValueError:
        raise ConfigFormatError("state line is not hexadecimal") from None
    if value >> shape.vertex_count:
        raise ConfigFormatError(f"bits set beyond vertex {shape.vertex_count - 1}")
    raw = value.to_bytes(-(-shape.vertex_count // 8), "little")
    bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")
    return VertexSet(shape, bits[:shape.vertex_count].astype(bool))


def write_config(path, config: Configuration) -> None:
    Path(path).write_text(encode_config(config))


def read_config(path) -> Configuration:
    return decode_config(Path(path).read_text())


def pgm_bytes(shape: TorusShape, bits: np.ndarray) -> bytes:
    """Binary PGM of a 2-d state: active black, inactive white, row x_2, column x_1."""
    if shape.d != 2:
        raise ValueError(f"only 2-dimensional tori can be rendered, got d={shape.d}")
    image = np.where(np.asarray(bits, dtype=bool).reshape(shape.n, shape.n), 0, 255)
    return f"P5\n{shape.n} {shape.n}\n255\n".encode() + image.astype(np.uint8).tobytes()


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    match = _PGM_HEADER.match(data)
    if match is None:
        raise ValueError("not a binary PGM")
    width, height, maxval = (int(g) for g in match.groups())
    if maxval != 255:
        raise ValueError(f"unsupported maxval {maxval}")
    pixels = np.frombuffer(data[match.end():], dtype=np.uint8)
    return pixels.reshape(height, width)
