"""Embedding and probability file I/O, plus a dependency-free baseline embedder.

EMB1 and PRB1 are little-endian float32 formats shared with external
feature extractors; round trips through them are bitwise lossless. The
baseline embedder summarizes a clip's 128-band log-mel spectrogram with
per-band means and standard deviations (256 dims), so KID/FAD pipelines
run end-to-end without any neural network.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from audiorep.codecs import CodecConfig, MelCodec, get_codec
from audiorep.dsp import AudioBuffer
from audiorep.metrics import EmbeddingSet, ProbMatrix
from audiorep.tensors import FormatError

_EMB_MAGIC = b"EMB1"
_PRB_MAGIC = b"PRB1"
_VERSION = 1
_PRB_LOAD_TOL = 1e-4


def write_embeddings(embeddings: EmbeddingSet, path) -> None:
    """EMB1: magic, version u8, n u32, d u32, row-major float32, optional labels."""
    payload = _EMB_MAGIC + struct.pack("<BII", _VERSION, embeddings.n, embeddings.d)
    payload += embeddings.data.astype("<f4").tobytes()
    if embeddings.labels is not None:
        payload += struct.pack("<I", embeddings.n)
        payload += embeddings.labels.astype("<u4").tobytes()
    Path(path).write_bytes(payload)


def read_embeddings(path) -> EmbeddingSet:
    blob = Path(path).read_bytes()
    n, d, offset = _read_matrix_header(blob, _EMB_MAGIC, "EMB1")
    data, offset = _read_matrix_payload(blob, n, d, offset)
    labels = None
    if offset < len(blob):
        if len(blob) < offset + 4:
            raise FormatError(f"truncated label block header at byte {offset}")
        (count,) = struct.unpack_from("<I", blob, offset)
        offset += 4
        if count != n:
            raise FormatError(f"label count {count} at byte {offset - 4} does not match n={n}")
        end = offset + 4 * count
        if len(blob) != end:
            raise FormatError(
                f"label block length mismatch at byte {offset}: expected {end} total bytes, got {len(blob)}"
            )
        labels = np.frombuffer(blob, dtype="<u4", offset=offset, count=count)
    return EmbeddingSet(data, labels)


def write_probs(probs: ProbMatrix, path) -> None:
    """PRB1: magic, version u8, n u32, C u32, row-major float32 rows."""
    payload = _PRB_MAGIC + struct.pack("<BII", _VERSION, probs.n, probs.n_classes)
    payload += probs.data.astype("<f4").tobytes()
    Path(path).write_bytes(payload)


def read_probs(path) -> ProbMatrix:
    blob = Path(path).read_bytes()
    n, n_classes, offset = _read_matrix_header(blob, _PRB_MAGIC, "PRB1")
    data, offset = _read_matrix_payload(blob, n, n_classes, offset)
    if offset != len(blob):
        raise FormatError(f"unexpected {len(blob) - offset} trailing bytes at byte {offset}")
    sums = data.sum(axis=1)
    bad = np.abs(sums - 1.0) > _PRB_LOAD_TOL
    if np.any(bad):
        row = int(np.argmax(bad))
        raise FormatError(
            f"row {row} sums to {sums[row]:.6f}, outside 1 +/- {_PRB_LOAD_TOL}"
        )
    # float32 storage can nudge sums past the strict in-memory tolerance;
    # renormalize only when that happens so honest files round-trip bitwise.
    if np.any(np.abs(sums - 1.0) > 1e-6):
        data = data / sums[:, None]
    return ProbMatrix(data)


def _read_matrix_header(blob: bytes, magic: bytes, name: str) -> tuple[int, int, int]:
    if len(blob) < 4 or blob[:4] != magic:
        raise FormatError(f"bad magic at byte 0: expected {magic!r}")
    if len(blob) < 13:
        raise FormatError(f"truncated {name} header: {len(blob)} bytes, need 13")
    version, rows, cols = struct.unpack_from("<BII", blob, 4)
    if version != _VERSION:
        raise FormatError(f"unsupported {name} version {version} at byte 4")
    if rows < 1:
        raise FormatError(f"row count must be positive, got {rows} at byte 5")
    if cols < 1:
        raise FormatError(f"column count must be positive, got {cols} at byte 9")
    if rows * cols > 1 << 28:
        raise FormatError(f"implausible element count {rows * cols} in header")
    return rows, cols, 13


def _read_matrix_payload(blob: bytes, rows: int, cols: int, offset: int):
    end = offset + 4 * rows * cols
    if len(blob) < end:
        raise FormatError(
            f"truncated payload at byte {offset}: expected {end - offset} bytes, got {len(blob) - offset}"
        )
    data = np.frombuffer(blob, dtype="<f4", offset=offset, count=rows * cols)
    return data.reshape(rows, cols).astype(np.float64), end


def baseline_embed(audio: AudioBuffer, config: CodecConfig = CodecConfig()) -> np.ndarray:
    """256-dim embedding: per-band mean and std of the log-mel spectrogram.

    Deterministic and cheap; not comparable in scale to deep-model
    embeddings, but sensitive to the same spectral structure.
    """
    codec: MelCodec = get_codec("mel", config)
    log_mel = codec.log_mel(audio)
    return np.concatenate([log_mel.mean(axis=1), log_mel.std(axis=1)])


def embed_clips(clips, config: CodecConfig = CodecConfig(), embedder=None) -> EmbeddingSet:
    """Stack per-clip embeddings (default: :func:`baseline_embed`) into a set."""
    if embedder is None:
        rows = [baseline_embed(clip, config) for clip in clips]
    else:
        rows = [np.asarray(embedder(clip), dtype=np.float64) for clip in clips]
    if not rows:
        raise ValueError("no clips to embed")
    return EmbeddingSet(np.vstack(rows))
