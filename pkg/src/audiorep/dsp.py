"""Deterministic spectral primitives: FFT, circular STFT/iSTFT, mel filterbank, DCT.

All transforms run in double precision and are pure functions of their
inputs, so they are safe to call concurrently. The STFT uses circular
framing over the zero-padded clip, which makes weighted overlap-add an
exact inverse (the window-square sum is a constant) and reproduces the
expected 64-frame layout for 1 s clips.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

DEFAULT_SAMPLE_RATE = 16000


def _as_float_vector(samples) -> np.ndarray:
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError(f"expected a 1-D sample sequence, got shape {x.shape}")
    return x


@dataclass(frozen=True)
class AudioBuffer:
    """Fixed-rate mono signal; samples are dimensionless amplitudes."""

    samples: np.ndarray
    sample_rate: int = DEFAULT_SAMPLE_RATE

    def __post_init__(self):
        x = _as_float_vector(self.samples)
        if x.size == 0:
            raise ValueError("AudioBuffer requires at least one sample")
        if not np.all(np.isfinite(x)):
            raise ValueError("AudioBuffer samples must be finite")
        if int(self.sample_rate) <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        object.__setattr__(self, "samples", x)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate


@functools.lru_cache(maxsize=8)
def hann_periodic(length: int) -> np.ndarray:
    """Periodic Hann window (DFT-even), cached and read-only."""
    w = 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(length) / length)
    w.flags.writeable = False
    return w


@functools.lru_cache(maxsize=8)
def _cola_constant(fft_size: int, hop: int) -> float:
    # Circular sum of squared windows at the configured hop; must be flat.
    env = np.zeros(fft_size)
    w2 = hann_periodic(fft_size) ** 2
    for shift in range(0, fft_size, hop):
        env += np.roll(w2, shift)
    if np.ptp(env) > 1e-10 * env.max():
        raise ValueError(f"window does not satisfy COLA at hop {hop}")
    return float(env[0])


@dataclass(frozen=True)
class FrameParams:
    """STFT framing: 1024-point Hann at 75% overlap over a 16384-sample grid."""

    fft_size: int = 1024
    hop: int = 256
    padded_length: int = 16384

    def __post_init__(self):
        if self.fft_size <= 0 or self.fft_size & (self.fft_size - 1):
            raise ValueError(f"fft_size must be a power of two, got {self.fft_size}")
        if self.hop <= 0 or self.hop > self.fft_size:
            raise ValueError("hop must satisfy 0 < hop <= fft_size")
        if self.fft_size % self.hop:
            raise ValueError("hop must divide fft_size")
        if self.padded_length % self.hop:
            raise ValueError("hop must divide padded_length")
        if self.padded_length < self.fft_size:
            raise ValueError("padded_length must be at least fft_size")
        _cola_constant(self.fft_size, self.hop)

    @property
    def bins(self) -> int:
        return self.fft_size // 2 + 1

    @property
    def n_frames(self) -> int:
        return self.padded_length // self.hop

    @property
    def window(self) -> np.ndarray:
        return hann_periodic(self.fft_size)

    @property
    def cola(self) -> float:
        return _cola_constant(self.fft_size, self.hop)


@dataclass(frozen=True)
class ComplexSpectrogram:
    """bins x frames complex STFT matrix."""

    data: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.data, dtype=np.complex128)
        if d.ndim != 2:
            raise ValueError(f"spectrogram must be 2-D, got shape {d.shape}")
        if not np.all(np.isfinite(d)):
            raise ValueError("spectrogram entries must be finite")
        object.__setattr__(self, "data", d)

    @property
    def bins(self) -> int:
        return self.data.shape[0]

    @property
    def frames(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class MelFilterbank:
    """n_mels x bins matrix of non-negative, area-normalized triangle weights."""

    matrix: np.ndarray
    fmin: float
    fmax: float

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.float64)
        if m.ndim != 2:
            raise ValueError("filterbank matrix must be 2-D")
        if np.any(m < 0):
            raise ValueError("filterbank weights must be non-negative")
        if np.any(m.max(axis=1) <= 0):
            raise ValueError("every mel filter needs at least one positive weight")
        object.__setattr__(self, "matrix", m)

    @property
    def n_mels(self) -> int:
        return self.matrix.shape[0]

    @property
    def bins(self) -> int:
        return self.matrix.shape[1]


def fft_forward(x) -> np.ndarray:
    """DFT of a power-of-two-length sequence: X[k] = sum_n x[n] exp(-2*pi*i*k*n/N)."""
    v = np.asarray(x, dtype=np.complex128)
    if v.ndim != 1:
        raise ValueError("fft_forward expects a 1-D sequence")
    n = v.size
    if n == 0 or n & (n - 1):
        raise ValueError(f"length must be a power of two, got {n}")
    if not np.all(np.isfinite(v)):
        raise ValueError("fft_forward requires finite entries")
    return np.fft.fft(v)


def fft_inverse(x) -> np.ndarray:
    """Inverse of :func:`fft_forward` (1/N-normalized)."""
    v = np.asarray(x, dtype=np.complex128)
    if v.ndim != 1:
        raise ValueError("fft_inverse expects a 1-D sequence")
    n = v.size
    if n == 0 or n & (n - 1):
        raise ValueError(f"length must be a power of two, got {n}")
    if not np.all(np.isfinite(v)):
        raise ValueError("fft_inverse requires finite entries")
    return np.fft.ifft(v)


def stft(audio: AudioBuffer, params: FrameParams = FrameParams()) -> ComplexSpectrogram:
    """Hann-windowed circular STFT of the clip zero-padded to ``padded_length``.

    Frames start every ``hop`` samples and wrap around the padded grid, so
    the frame count is exactly ``padded_length / hop`` (64 with defaults).
    """
    return ComplexSpectrogram(stft_array(audio.samples, params))


def stft_array(x: np.ndarray, params: FrameParams) -> np.ndarray:
    if x.size > params.padded_length:
        raise ValueError(
            f"audio length {x.size} exceeds padded_length {params.padded_length}"
        )
    buf = np.zeros(params.padded_length)
    buf[: x.size] = x
    starts = params.hop * np.arange(params.n_frames)
    idx = (starts[:, None] + np.arange(params.fft_size)[None, :]) % params.padded_length
    segments = buf[idx] * params.window
    return np.fft.rfft(segments, axis=1).T


def istft(
    spec: ComplexSpectrogram,
    params: FrameParams = FrameParams(),
    out_length: int | None = None,
    sample_rate: int = DEFAULT_SAMPLE_RATE,
) -> AudioBuffer:
    """Weighted overlap-add inverse of :func:`stft`.

    Exact inverse (least-squares optimal) because the circular
    window-square sum is constant; ``out_length`` trims the result.
    """
    samples = istft_array(np.asarray(spec.data), params, out_length)
    return AudioBuffer(samples, sample_rate)


def istft_array(data: np.ndarray, params: FrameParams, out_length: int | None = None) -> np.ndarray:
    if out_length is None:
        out_length = params.padded_length
    if data.shape != (params.bins, params.n_frames):
        raise ValueError(
            f"spectrogram shape {data.shape} does not match params "
            f"({params.bins}, {params.n_frames})"
        )
    if out_length <= 0 or out_length > params.padded_length:
        raise ValueError(f"out_length must be in [1, {params.padded_length}]")
    frames = np.fft.irfft(data.T, n=params.fft_size, axis=1) * params.window
    per_frame = params.fft_size // params.hop
    n_frames = params.n_frames
    stacked = frames.reshape(n_frames, per_frame, params.hop)
    staging = np.zeros((n_frames + per_frame - 1, params.hop))
    for j in range(per_frame):
        staging[j : j + n_frames] += stacked[:, j, :]
    out = staging[:n_frames]
    out[: per_frame - 1] += staging[n_frames:]
    return (out.ravel() / params.cola)[:out_length]


def _hz_to_mel(freq) -> np.ndarray:
    # Break-frequency mel scale: linear below 1 kHz, logarithmic above.
    f = np.asarray(freq, dtype=np.float64)
    f_sp = 200.0 / 3.0
    brk = 1000.0
    logstep = np.log(6.4) / 27.0
    return np.where(f < brk, f / f_sp, 15.0 + np.log(np.maximum(f, 1e-300) / brk) / logstep)


def _mel_to_hz(mels) -> np.ndarray:
    m = np.asarray(mels, dtype=np.float64)
    f_sp = 200.0 / 3.0
    logstep = np.log(6.4) / 27.0
    return np.where(m < 15.0, m * f_sp, 1000.0 * np.exp(logstep * (m - 15.0)))


def mel_filterbank(
    n_mels: int,
    bins: int,
    sample_rate: int = DEFAULT_SAMPLE_RATE,
    fmin: float = 0.0,
    fmax: float | None = None,
) -> MelFilterbank:
    """Triangular filters with centers uniform on the mel scale, area-normalized."""
    if fmax is None:
        fmax = sample_rate / 2.0
    if n_mels < 1:
        raise ValueError("n_mels must be at least 1")
    if bins < 2:
        raise ValueError("need at least 2 frequency bins")
    if fmax > sample_rate / 2.0:
        raise ValueError(f"fmax {fmax} exceeds Nyquist {sample_rate / 2.0}")
    if not 0.0 <= fmin < fmax:
        raise ValueError("need 0 <= fmin < fmax")
    edges = _mel_to_hz(np.linspace(_hz_to_mel(fmin), _hz_to_mel(fmax), n_mels + 2))
    freqs = np.arange(bins) * (sample_rate / 2.0) / (bins - 1)
    lower, center, upper = edges[:-2], edges[1:-1], edges[2:]
    up = (freqs[None, :] - lower[:, None]) / np.maximum(center - lower, 1e-12)[:, None]
    down = (upper[:, None] - freqs[None, :]) / np.maximum(upper - center, 1e-12)[:, None]
    weights = np.maximum(0.0, np.minimum(up, down))
    weights *= (2.0 / (upper - lower))[:, None]
    return MelFilterbank(weights, float(fmin), float(fmax))


def _dct_basis(n: int) -> np.ndarray:
    # Orthonormal DCT-II basis; its transpose is the exact DCT-III inverse.
    k = np.arange(n)[:, None]
    m = np.arange(n)[None, :]
    basis = np.cos(np.pi * k * (2 * m + 1) / (2.0 * n)) * np.sqrt(2.0 / n)
    basis[0] *= np.sqrt(0.5)
    return basis


def dct_ii(x) -> np.ndarray:
    """Orthonormal type-II DCT of a 1-D sequence."""
    v = _as_float_vector(x)
    if v.size == 0:
        raise ValueError("dct_ii requires a non-empty sequence")
    return _dct_basis(v.size) @ v


def dct_iii(x) -> np.ndarray:
    """Orthonormal type-III DCT; exact inverse of :func:`dct_ii`."""
    v = _as_float_vector(x)
    if v.size == 0:
        raise ValueError("dct_iii requires a non-empty sequence")
    return _dct_basis(v.size).T @ v


def princarg(phase):
    """Wrap phase to the principal interval (-pi, pi]."""
    p = np.asarray(phase, dtype=np.float64)
    wrapped = np.mod(p, 2.0 * np.pi)
    wrapped = np.where(wrapped > np.pi, wrapped - 2.0 * np.pi, wrapped)
    if np.isscalar(phase) or np.ndim(phase) == 0:
        return float(wrapped)
    return wrapped


def snr_db(reference: np.ndarray, estimate: np.ndarray) -> float:
    """10*log10(signal energy / error energy); +inf for an exact match."""
    ref = np.asarray(reference, dtype=np.float64)
    err = ref - np.asarray(estimate, dtype=np.float64)
    num = float(np.sum(ref * ref))
    den = float(np.sum(err * err))
    if den == 0.0:
        return float("inf")
    return 10.0 * np.log10(num / den)
