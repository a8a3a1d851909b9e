"""Feature extraction and dataset loading for the classifier models.

Self-contained: talks to the toolkit only through its file formats
(16 kHz WAV clips and JSON-lines metadata).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from scipy.io import wavfile

SAMPLE_RATE = 16000
CLIP_SAMPLES = 16000
FFT_SIZE = 1024
HOP = 256
LOG_FLOOR = 1e-6

N_FRAMES = (CLIP_SAMPLES + (FFT_SIZE - HOP) - FFT_SIZE) // HOP + 1  # 61
N_BINS = FFT_SIZE // 2 + 1

PITCH_RANGE = list(range(44, 71))


def load_wav(path) -> np.ndarray:
    rate, data = wavfile.read(path)
    if rate != SAMPLE_RATE:
        raise ValueError(f"{path}: expected {SAMPLE_RATE} Hz, got {rate}")
    if data.ndim != 1:
        raise ValueError(f"{path}: expected mono audio")
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / 32768.0
    elif data.dtype == np.float32:
        samples = data.astype(np.float64)
    else:
        raise ValueError(f"{path}: unsupported sample format {data.dtype}")
    out = np.zeros(CLIP_SAMPLES)
    out[: min(samples.size, CLIP_SAMPLES)] = samples[:CLIP_SAMPLES]
    return out


def log_magnitude_stft(samples: np.ndarray) -> np.ndarray:
    """(513, 61) log-magnitude spectrogram of a 1 s clip."""
    padded = np.zeros(CLIP_SAMPLES + FFT_SIZE - HOP)
    padded[:CLIP_SAMPLES] = samples
    window = np.hanning(FFT_SIZE)
    starts = HOP * np.arange(N_FRAMES)
    idx = starts[:, None] + np.arange(FFT_SIZE)[None, :]
    spectra = np.fft.rfft(padded[idx] * window, axis=1)
    return np.log(np.abs(spectra).T + LOG_FLOOR).astype(np.float32)


def read_index(metadata_path, root=None) -> list[dict]:
    """Parse JSON-lines metadata into records with resolved WAV paths."""
    meta = Path(metadata_path)
    base = Path(root) if root is not None else meta.parent
    records = []
    for line in meta.read_text().splitlines():
        if not line.strip():
            continue
        record = json.loads(line)
        record["wav_path"] = base / record["wav"]
        records.append(record)
    if not records:
        raise ValueError(f"no records in {meta}")
    return records


def target_classes(records: list[dict], target: str) -> list:
    if target == "pitch":
        return sorted({int(r["pitch"]) for r in records})
    if target == "instrument":
        return sorted({str(r["instrument_family"]) for r in records})
    raise ValueError(f"unknown target {target!r}; use pitch or instrument")


def target_label(record: dict, target: str):
    return int(record["pitch"]) if target == "pitch" else str(record["instrument_family"])
