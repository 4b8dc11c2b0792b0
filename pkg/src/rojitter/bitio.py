"""Bit stream file formats.

``ascii01``
    characters ``0``/``1``; whitespace is ignored.
``packed``
    eight bits per byte, least significant bit first. There is no header;
    a partial final byte is zero-padded and the true length must be
    supplied separately (default: all ``8 * size`` bits).
``byteper``
    one sample per byte, ``0x00`` or ``0x01``; the raw sample layout read
    by common entropy-assessment tools.
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

from .params import as_bits

FORMATS = ("ascii01", "packed", "byteper")


def encode_bits(bits, fmt: str) -> bytes:
    z = as_bits(bits)
    if fmt == "ascii01":
        return (z + ord("0")).astype(np.uint8).tobytes() + b"\n"
    if fmt == "packed":
        return np.packbits(z, bitorder="little").tobytes()
    if fmt == "byteper":
        return z.tobytes()
    raise ValueError(f"unknown bit format {fmt!r}; expected one of {FORMATS}")


def decode_bits(data: bytes, fmt: str, nbits: int | None = None) -> np.ndarray:
    raw = np.frombuffer(data, dtype=np.uint8)
    if fmt == "ascii01":
        raw = raw[~np.isin(raw, np.frombuffer(b" \t\r\n\v\f", dtype=np.uint8))]
        if raw.size and not np.isin(raw, (ord("0"), ord("1"))).all():
            raise ValueError("ascii01 input contains characters other than 0, 1 and whitespace")
        z = raw - ord("0")
    elif fmt == "packed":
        z = np.unpackbits(raw, bitorder="little")
        if nbits is not None:
            if not 0 < nbits <= z.size:
                raise ValueError(f"--nbits {nbits} does not fit in {raw.size} bytes")
            if nbits <= z.size - 8:
                raise ValueError(f"--nbits {nbits} leaves whole trailing bytes unused")
            z = z[:nbits]
    elif fmt == "byteper":
        if raw.size and raw.max() > 1:
            raise ValueError("byteper input contains bytes other than 0x00 and 0x01")
        z = raw
    else:
        raise ValueError(f"unknown bit format {fmt!r}; expected one of {FORMATS}")
    if nbits is not None and fmt != "packed" and nbits != z.size:
        raise ValueError(f"expected {nbits} bits, read {z.size}")
    return as_bits(z)


def read_bits(path: str | Path, fmt: str, nbits: int | None = None) -> np.ndarray:
    """Read a bit file; ``-`` reads standard input."""
    if str(path) == "-":
        data = sys.stdin.buffer.read()
    else:
        data = Path(path).read_bytes()
    return decode_bits(data, fmt, nbits)


def write_bits(bits, path: str | Path, fmt: str) -> None:
    data = encode_bits(bits, fmt)
    if str(path) == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        Path(path).write_bytes(data)
