"""Representation tensors and the bit-exact RTEN file format."""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

# Fixed representation order; doubles as the RTEN repr_id enum (0..6).
REPRESENTATIONS = ("waveform", "complex", "mag-if", "cq-nsgt", "cqt", "mel", "mfcc")

# (channels, bins, frames) per representation for 1 s / 16 kHz clips.
REP_SHAPES = {
    "waveform": (1, 1, 16000),
    "complex": (2, 512, 64),
    "mag-if": (2, 512, 64),
    "cq-nsgt": (4, 97, 948),
    "cqt": (2, 84, 256),
    "mel": (1, 128, 64),
    "mfcc": (1, 128, 64),
}

_RTEN_MAGIC = b"RTEN"
_RTEN_VERSION = 1


class FormatError(ValueError):
    """Malformed binary file; the message carries the failing byte offset."""


@dataclass(frozen=True)
class RepTensor:
    """channels x bins x frames float32 tensor for one representation."""

    repr_id: str
    data: np.ndarray

    def __post_init__(self):
        if self.repr_id not in REP_SHAPES:
            raise ValueError(
                f"unknown representation {self.repr_id!r}; valid: {', '.join(REPRESENTATIONS)}"
            )
        d = np.ascontiguousarray(self.data, dtype=np.float32)
        expected = REP_SHAPES[self.repr_id]
        if d.shape != expected:
            raise ValueError(
                f"{self.repr_id} tensor must have shape {expected}, got {d.shape}"
            )
        if not np.all(np.isfinite(d)):
            raise ValueError(f"{self.repr_id} tensor contains non-finite entries")
        object.__setattr__(self, "data", d)

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.data.shape


def tensor_to_bytes(tensor: RepTensor) -> bytes:
    """Serialize: magic, version u8, repr u8, dims u32 LE, float32 LE payload."""
    c, b, f = tensor.shape
    header = _RTEN_MAGIC + struct.pack(
        "<BBIII", _RTEN_VERSION, REPRESENTATIONS.index(tensor.repr_id), c, b, f
    )
    return header + tensor.data.astype("<f4").tobytes()


def tensor_from_bytes(blob: bytes) -> RepTensor:
    if len(blob) < 4 or blob[:4] != _RTEN_MAGIC:
        raise FormatError(f"bad magic at byte 0: expected {_RTEN_MAGIC!r}")
    if len(blob) < 18:
        raise FormatError(f"truncated header: {len(blob)} bytes, need 18")
    version, rep_code, c, b, f = struct.unpack("<BBIII", blob[4:18])
    if version != _RTEN_VERSION:
        raise FormatError(f"unsupported RTEN version {version} at byte 4")
    if rep_code >= len(REPRESENTATIONS):
        raise FormatError(f"unknown repr code {rep_code} at byte 5")
    repr_id = REPRESENTATIONS[rep_code]
    count = c * b * f
    if count > 1 << 28:
        raise FormatError(f"implausible element count {count} in header")
    expected = 18 + 4 * count
    if len(blob) != expected:
        raise FormatError(
            f"payload length mismatch at byte 18: expected {expected} total bytes, got {len(blob)}"
        )
    data = np.frombuffer(blob, dtype="<f4", offset=18).reshape(c, b, f)
    return RepTensor(repr_id, data)


def write_rten(tensor: RepTensor, path) -> None:
    Path(path).write_bytes(tensor_to_bytes(tensor))


def read_rten(path) -> RepTensor:
    return tensor_from_bytes(Path(path).read_bytes())
