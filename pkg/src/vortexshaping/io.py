"""File formats: CSV tables, 16-bit binary PGM images, JSON documents.

CSV values are written with a fixed ``.10g`` format so that identical
inputs give byte-identical files.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

__all__ = ["format_value", "write_csv", "read_csv", "write_pgm", "read_pgm", "scale_to_uint16", "write_json",
           "atomic_write"]

PGM_MAXVAL = 65535


def format_value(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.10g}"


def atomic_write(path, data: bytes):
    """Write ``data`` to ``path`` via a temporary file and rename."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)


def write_csv(path, header, rows):
    """Comma-separated table with a header row."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    atomic_write(path, ("\n".join(lines) + "\n").encode("ascii"))


def read_csv(path):
    """Return (header, float array) of a table written by :func:`write_csv`.

    Text cells (sweep labels, ``none``) come back as NaN.
    """
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    data = np.genfromtxt(path, delimiter=",", skip_header=1, ndmin=2)
    return header, data


def scale_to_uint16(image, vmax=None) -> np.ndarray:
    """Map [0, vmax] linearly onto 0..65535 (clipping outside, NaN -> 0)."""
    img = np.nan_to_num(np.asarray(image, dtype=float), nan=0.0)
    if vmax is None:
        vmax = img.max()
    if not vmax > 0:
        return np.zeros(img.shape, dtype=np.uint16)
    return np.clip(np.rint(img / vmax * PGM_MAXVAL), 0, PGM_MAXVAL).astype(np.uint16)


def write_pgm(path, image):
    """Binary P5 PGM, 16-bit big-endian, maxval 65535, first row on top."""
    img = np.asarray(image)
    if img.ndim != 2:
        raise ValueError("PGM images must be 2D")
    if img.dtype != np.uint16:
        img = scale_to_uint16(img)
    h, w = img.shape
    header = f"P5\n{w} {h}\n{PGM_MAXVAL}\n".encode("ascii")
    atomic_write(path, header + img.astype(">u2").tobytes())


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        raw = fh.read()
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while raw[pos:pos + 1].isspace():
            pos += 1
        if raw[pos:pos + 1] == b"#":
            pos = raw.index(b"\n", pos) + 1
            continue
        start = pos
        while not raw[pos:pos + 1].isspace():
            pos += 1
        tokens.append(raw[start:pos].decode("ascii"))
    pos += 1
    if tokens[0] != "P5":
        raise ValueError("not a binary PGM file")
    w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    dtype = ">u2" if maxval > 255 else "u1"
    return np.frombuffer(raw[pos:], dtype=dtype, count=w * h).reshape(h, w).astype(np.uint16)


def write_json(path, obj):
    atomic_write(path, (json.dumps(obj, indent=2, sort_keys=True) + "\n").encode("utf-8"))
