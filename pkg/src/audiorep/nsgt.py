"""Constant-Q nonstationary Gabor transform with painless-case perfect reconstruction.

193 frequency bands tile the full complex-signal spectrum: a DC band, 96
log-spaced positive bands, and their negative-frequency mirrors. Band
windows are cosine bumps spanning their neighbors' centers, so the frame
operator is diagonal and strictly positive (painless case) and synthesis
through the dual windows reconstructs exactly. Every band uses the same
948 coefficient slots, which keeps the painless condition (window support
never exceeds the per-band FFT length) and yields a rectangular matrix.

The stored tensor folds magnitude and phase of the two spectral halves
into 4 channels of 97 rows: row r of the negative-half channels mirrors
row r of the positive-half channels, the DC band is discarded (restored
as zero when unfolding), and row 96 is zero padding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from audiorep.dsp import AudioBuffer
from audiorep.tensors import RepTensor


@dataclass(frozen=True)
class NsgtFrame:
    """Immutable analysis/synthesis frame data; build once via :func:`nsgt_build`."""

    centers: np.ndarray            # band center bins on the signal-length grid
    windows: tuple                 # per-band cosine bumps
    offsets: tuple                 # per-band bin offsets relative to the center
    frame_diagonal: np.ndarray     # frame operator diagonal, > 0 everywhere
    signal_length: int
    n_frames: int
    half_bands: int


def nsgt_build(config) -> NsgtFrame:
    length = config.clip_samples
    sr = config.sample_rate
    half = (config.nsgt_n_bins - 1) // 2
    if config.nsgt_n_bins != 2 * half + 1:
        raise ValueError("nsgt_n_bins must be odd: DC plus mirrored halves")
    if not 0.0 < config.nsgt_fmin < config.nsgt_fmax < sr / 2.0:
        raise ValueError("need 0 < fmin < fmax < Nyquist")

    ratio = (config.nsgt_fmax / config.nsgt_fmin) ** (1.0 / (half - 1))
    pos_hz = config.nsgt_fmin * ratio ** np.arange(half)
    pos = np.round(pos_hz * length / sr).astype(int)
    if np.any(np.diff(pos) < 1) or pos[0] < 1:
        raise ValueError("band centers collapse onto the same bin; raise fmin or the signal length")
    centers = np.concatenate(([0], pos, length - pos[::-1]))

    n_bands = centers.size
    widths = np.empty(n_bands, dtype=int)
    for k in range(n_bands):
        nxt = centers[k + 1] if k + 1 < n_bands else centers[0] + length
        prv = centers[k - 1] if k >= 1 else centers[-1] - length
        widths[k] = nxt - prv
    if widths.max() > config.nsgt_frames:
        raise ValueError(
            f"painless condition violated: band support {widths.max()} exceeds "
            f"{config.nsgt_frames} time slots"
        )

    windows = []
    offsets = []
    diagonal = np.zeros(length)
    for k in range(n_bands):
        width = widths[k]
        offset = np.arange(-(width // 2), width - width // 2)
        bump = 0.5 + 0.5 * np.cos(2.0 * np.pi * offset / width)
        windows.append(bump)
        offsets.append(offset)
        diagonal[(centers[k] + offset) % length] += bump * bump
    if diagonal.min() <= 1e-12 * diagonal.max():
        raise ValueError("frequency coverage has a gap; frame operator is singular")

    return NsgtFrame(
        centers=centers,
        windows=tuple(windows),
        offsets=tuple(offsets),
        frame_diagonal=diagonal,
        signal_length=length,
        n_frames=config.nsgt_frames,
        half_bands=half,
    )


def nsgt_forward(x: np.ndarray, frame: NsgtFrame) -> np.ndarray:
    """All-band complex coefficient matrix (n_bands x n_frames)."""
    length = frame.signal_length
    spectrum = np.fft.fft(x)
    coeffs = np.empty((frame.centers.size, frame.n_frames), dtype=np.complex128)
    slots = np.zeros(frame.n_frames, dtype=np.complex128)
    for k, (center, window, offset) in enumerate(
        zip(frame.centers, frame.windows, frame.offsets)
    ):
        slots[:] = 0.0
        slots[offset % frame.n_frames] = spectrum[(center + offset) % length] * window
        coeffs[k] = np.fft.ifft(slots)
    return coeffs


def nsgt_inverse(coeffs: np.ndarray, frame: NsgtFrame) -> np.ndarray:
    length = frame.signal_length
    accumulator = np.zeros(length, dtype=np.complex128)
    for k, (center, window, offset) in enumerate(
        zip(frame.centers, frame.windows, frame.offsets)
    ):
        band = np.fft.fft(coeffs[k])
        accumulator[(center + offset) % length] += band[offset % frame.n_frames] * window
    return np.fft.ifft(accumulator / frame.frame_diagonal).real


def nsgt_fold(coeffs: np.ndarray, frame: NsgtFrame) -> RepTensor:
    """Magnitude/phase of both halves as 4 channels; DC dropped, row 96 zero."""
    half = frame.half_bands
    pos = coeffs[1 : half + 1]
    neg = coeffs[half + 1 :][::-1]  # aligned: row r mirrors pos row r in |frequency|
    rows = half + 1
    data = np.zeros((4, rows, frame.n_frames), dtype=np.float64)
    data[0, :half] = np.abs(pos)
    data[1, :half] = np.angle(pos)
    data[2, :half] = np.abs(neg)
    data[3, :half] = np.angle(neg)
    return RepTensor("cq-nsgt", data)


def nsgt_unfold(tensor: RepTensor, frame: NsgtFrame) -> np.ndarray:
    if tensor.repr_id != "cq-nsgt":
        raise ValueError(f"expected a cq-nsgt tensor, got {tensor.repr_id}")
    half = frame.half_bands
    d = tensor.data.astype(np.float64)
    pos = d[0, :half] * np.exp(1j * d[1, :half])
    neg = (d[2, :half] * np.exp(1j * d[3, :half]))[::-1]
    coeffs = np.zeros((frame.centers.size, frame.n_frames), dtype=np.complex128)
    coeffs[1 : half + 1] = pos
    coeffs[half + 1 :] = neg
    return coeffs


def nsgt_encode(audio: AudioBuffer, frame: NsgtFrame, config) -> RepTensor:
    from audiorep.codecs import _prepare_clip

    x = _prepare_clip(audio, config)
    return nsgt_fold(nsgt_forward(x, frame), frame)


def nsgt_decode(tensor: RepTensor, frame: NsgtFrame, config) -> AudioBuffer:
    samples = nsgt_inverse(nsgt_unfold(tensor, frame), frame)
    return AudioBuffer(samples, config.sample_rate)


class NsgtCodec:
    repr_id = "cq-nsgt"

    def __init__(self, config):
        self.config = config
        self.frame = nsgt_build(config)

    def encode(self, audio: AudioBuffer) -> RepTensor:
        return nsgt_encode(audio, self.frame, self.config)

    def decode(self, tensor: RepTensor) -> AudioBuffer:
        return nsgt_decode(tensor, self.frame, self.config)
