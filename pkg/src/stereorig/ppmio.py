"""Binary PPM (P6, maxval 255) reading/writing and stream manifests.

A stream manifest is a text file with one `<timestamp_ms> <ppm_path>` line
per frame; relative paths resolve against the manifest's directory.
"""

from __future__ import annotations

import os

import numpy as np


class PpmError(ValueError):
    """Raised for malformed PPM files or manifests."""


def _next_token(data: bytes, pos: int) -> tuple[bytes, int]:
    n = len(data)
    while pos < n:
        c = data[pos : pos + 1]
        if c == b"#":
            while pos < n and data[pos : pos + 1] != b"\n":
                pos += 1
        elif c.isspace():
            pos += 1
        else:
            break
    start = pos
    while pos < n and not data[pos : pos + 1].isspace():
        pos += 1
    if start == pos:
        raise PpmError("truncated header")
    return data[start:pos], pos


def read_ppm(path: str) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    try:
        magic, pos = _next_token(data, 0)
        if magic != b"P6":
            raise PpmError(f"unsupported magic {magic!r}; only binary P6 is handled")
        w_tok, pos = _next_token(data, pos)
        h_tok, pos = _next_token(data, pos)
        max_tok, pos = _next_token(data, pos)
        w, h, maxval = int(w_tok), int(h_tok), int(max_tok)
    except PpmError:
        raise
    except ValueError as exc:
        raise PpmError(f"malformed header in {path}: {exc}") from exc
    if w <= 0 or h <= 0:
        raise PpmError(f"bad dimensions {w}x{h} in {path}")
    if maxval != 255:
        raise PpmError(f"maxval {maxval} unsupported; expected 255")
    pos += 1  # single whitespace byte after the header
    need = w * h * 3
    raster = data[pos : pos + need]
    if len(raster) != need:
        raise PpmError(f"{path}: expected {need} raster bytes, got {len(raster)}")
    return np.frombuffer(raster, dtype=np.uint8).reshape(h, w, 3).copy()


def write_ppm(path: str, pixels: np.ndarray) -> None:
    if pixels.ndim != 3 or pixels.shape[2] != 3 or pixels.dtype != np.uint8:
        raise PpmError(f"pixels must be (h, w, 3) uint8, got {pixels.shape} {pixels.dtype}")
    h, w = pixels.shape[:2]
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(np.ascontiguousarray(pixels).tobytes())


def read_manifest(path: str) -> list[tuple[float, str]]:
    """(timestamp_ms, absolute ppm path) per line, in file order."""
    base = os.path.dirname(os.path.abspath(path))
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(maxsplit=1)
            if len(parts) != 2:
                raise PpmError(f"{path}:{lineno}: expected '<timestamp_ms> <ppm_path>'")
            try:
                ts = float(parts[0])
            except ValueError as exc:
                raise PpmError(f"{path}:{lineno}: bad timestamp {parts[0]!r}") from exc
            p = parts[1]
            if not os.path.isabs(p):
                p = os.path.join(base, p)
            entries.append((ts, p))
    return entries


def write_manifest(path: str, entries: list[tuple[float, str]]) -> None:
    base = os.path.dirname(os.path.abspath(path))
    with open(path, "w", encoding="utf-8") as fh:
        for ts, p in entries:
            rel = os.path.relpath(p, base)
            fh.write(f"{ts:g} {rel}\n")
