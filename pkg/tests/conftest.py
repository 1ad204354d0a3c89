"""Shared fixtures: hand-built PGM/PNG bytes and the 4x4 logo stand-in.

The PNG builder here is written against the file-format documents, not
against the package decoder, so decode tests check two independent
implementations against each other.
"""

import struct
import zlib

import numpy as np
import pytest


def make_pgm(arr, maxval=255, ascii_format=False) -> bytes:
    """Encode a 2-D uint array as P2 (ascii_format) or P5 bytes."""
    arr = np.asarray(arr)
    h, w = arr.shape
    if ascii_format:
        body = "\n".join(" ".join(str(int(v)) for v in row) for row in arr)
        return f"P2\n{w} {h}\n{maxval}\n{body}\n".encode()
    header = f"P5\n{w} {h}\n{maxval}\n".encode()
    if maxval < 256:
        payload = arr.astype(np.uint8).tobytes()
    else:
        payload = arr.astype(">u2").tobytes()
    return header + payload


def _chunk(ctype: bytes, body: bytes) -> bytes:
    return (
        struct.pack(">I", len(body))
        + ctype
        + body
        + struct.pack(">I", zlib.crc32(ctype + body) & 0xFFFFFFFF)
    )


def make_png(pixels, color_type: int, bit_depth: int = 8) -> bytes:
    """Encode (h, w, ch) uint8 pixels as a filter-0 PNG."""
    pixels = np.asarray(pixels, dtype=np.uint8)
    if pixels.ndim == 2:
        pixels = pixels[:, :, None]
    h, w, _ = pixels.shape
    ihdr = struct.pack(">IIBBBBB", w, h, bit_depth, color_type, 0, 0, 0)
    raw = b"".join(b"\x00" + pixels[r].tobytes() for r in range(h))
    return (
        b"\x89PNG\r\n\x1a\n"
        + _chunk(b"IHDR", ihdr)
        + _chunk(b"IDAT", zlib.compress(raw))
        + _chunk(b"IEND", b"")
    )


def make_png_filtered(width: int, height: int, color_type: int, rows) -> bytes:
    """PNG from explicit (filter_type, stored_bytes) per-row pairs."""
    ihdr = struct.pack(">IIBBBBB", width, height, 8, color_type, 0, 0, 0)
    raw = b"".join(bytes([ftype]) + stored for ftype, stored in rows)
    return (
        b"\x89PNG\r\n\x1a\n"
        + _chunk(b"IHDR", ihdr)
        + _chunk(b"IDAT", zlib.compress(raw))
        + _chunk(b"IEND", b"")
    )


def logo_pixels() -> np.ndarray:
    """4x4 stand-in logo: light plate border, dark 2x2 glyph block."""
    px = np.full((4, 4), 255, dtype=np.uint8)
    px[1:3, 1:3] = 0
    return px


@pytest.fixture
def logo_pgm_bytes() -> bytes:
    return make_pgm(logo_pixels())


@pytest.fixture
def logo_pgm(tmp_path, logo_pgm_bytes):
    path = tmp_path / "logo.pgm"
    path.write_bytes(logo_pgm_bytes)
    return path
