"""EMB1/PRB1 writers matching the toolkit's byte layouts exactly.

Both files start with a 4-byte magic, a version byte, and two u32 LE
dimensions, followed by row-major float32 LE values. Writes go through a
temp file and an atomic rename.
"""

from __future__ import annotations

import os
import struct
from pathlib import Path

import numpy as np

_VERSION = 1


def _atomic_write(path, payload: bytes) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(payload)
    os.replace(tmp, path)


def write_emb1(matrix: np.ndarray, path, labels=None) -> None:
    m = np.ascontiguousarray(matrix, dtype="<f4")
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"embedding matrix must be 2-D and non-empty, got shape {m.shape}")
    payload = b"EMB1" + struct.pack("<BII", _VERSION, m.shape[0], m.shape[1]) + m.tobytes()
    if labels is not None:
        lab = np.ascontiguousarray(labels, dtype="<u4")
        if lab.shape != (m.shape[0],):
            raise ValueError("labels must align with embedding rows")
        payload += struct.pack("<I", m.shape[0]) + lab.tobytes()
    _atomic_write(path, payload)


def write_prb1(matrix: np.ndarray, path) -> None:
    m = np.ascontiguousarray(matrix, dtype="<f4")
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 2:
        raise ValueError(f"probability matrix must be n x C with C >= 2, got shape {m.shape}")
    sums = m.astype(np.float64).sum(axis=1)
    if np.any(np.abs(sums - 1.0) > 1e-4):
        raise ValueError("probability rows must sum to 1 within 1e-4")
    payload = b"PRB1" + struct.pack("<BII", _VERSION, m.shape[0], m.shape[1]) + m.tobytes()
    _atomic_write(path, payload)
