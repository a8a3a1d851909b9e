"""The seven representation codecs: paired encode/decode transforms.

Each codec maps a 1 s / 16 kHz clip to its fixed tensor layout and back.
waveform, complex, mag-if, and cq-nsgt invert essentially losslessly;
cqt uses a dual-kernel projection, and mel/mfcc recover phase with
Griffin-Lim. Codec objects precompute their kernels once and are
immutable afterwards, so encode/decode are safe to call concurrently.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from audiorep.dsp import (
    AudioBuffer,
    ComplexSpectrogram,
    FrameParams,
    dct_ii,
    dct_iii,
    istft_array,
    mel_filterbank,
    princarg,
    stft,
    stft_array,
)
from audiorep.tensors import REPRESENTATIONS, RepTensor

C1_HZ = 440.0 * 2.0 ** (-45.0 / 12.0)  # 32.703 Hz


@dataclass(frozen=True)
class CodecConfig:
    """Shared codec parameters; defaults reproduce the standard tensor layouts."""

    frame: FrameParams = FrameParams()
    sample_rate: int = 16000
    clip_samples: int = 16000
    log_offset: float = 1e-6
    griffin_lim_iters: int = 60
    griffin_lim_seed: int = 0
    n_mels: int = 128
    mel_nnls_iters: int = 150
    cqt_bins_per_octave: int = 12
    cqt_n_bins: int = 84
    cqt_fmin: float = C1_HZ
    cqt_hop: int = 64
    nsgt_n_bins: int = 193
    nsgt_fmin: float = C1_HZ
    nsgt_fmax: float = 7800.0
    nsgt_frames: int = 948

    def __post_init__(self):
        if self.log_offset <= 0:
            raise ValueError("log_offset must be positive")
        if self.griffin_lim_iters < 1:
            raise ValueError("griffin_lim_iters must be at least 1")
        if (self.cqt_bins_per_octave, self.cqt_n_bins) != (12, 84):
            raise ValueError("cqt layout is fixed at 12 bins/octave, 84 bins")
        if self.nsgt_n_bins != 193:
            raise ValueError("nsgt layout is fixed at 193 bins")


def _validate_nonnegative_magnitude(mag: np.ndarray) -> np.ndarray:
    m = np.asarray(mag, dtype=np.float64)
    if np.any(m < 0):
        raise ValueError("magnitude entries must be non-negative")
    if not np.all(np.isfinite(m)):
        raise ValueError("magnitude entries must be finite")
    return m


def griffin_lim(
    mag,
    params: FrameParams = FrameParams(),
    iters: int = 60,
    seed: int = 0,
    out_length: int | None = None,
    return_errors: bool = False,
):
    """Recover a signal whose STFT magnitude approximates ``mag``.

    Iterates x <- istft(mag * exp(i * angle(stft(x)))) from a seeded
    uniform random-phase start. With this module's exact-inverse iSTFT
    the spectral error ||  |stft(x_k)| - mag ||_F is non-increasing.
    """
    m = _validate_nonnegative_magnitude(mag)
    if m.shape != (params.bins, params.n_frames):
        raise ValueError(
            f"magnitude shape {m.shape} does not match params "
            f"({params.bins}, {params.n_frames})"
        )
    if iters < 1:
        raise ValueError("iters must be at least 1")
    rng = np.random.default_rng(seed)
    phase = rng.uniform(-np.pi, np.pi, m.shape)
    x = istft_array(m * np.exp(1j * phase), params)
    errors = []
    for _ in range(iters):
        spec = stft_array(x, params)
        if return_errors:
            errors.append(float(np.linalg.norm(np.abs(spec) - m)))
        x = istft_array(m * np.exp(1j * np.angle(spec)), params)
    if return_errors:
        spec = stft_array(x, params)
        errors.append(float(np.linalg.norm(np.abs(spec) - m)))
    out = x[: out_length if out_length is not None else params.padded_length]
    if return_errors:
        return out, np.asarray(errors)
    return out


def complex_pack(spec: ComplexSpectrogram) -> RepTensor:
    """Real/imaginary channels of bins 0..511; the Nyquist bin is dropped."""
    _check_spec_shape(spec)
    d = spec.data[:512]
    return RepTensor("complex", np.stack([d.real, d.imag]))


def complex_unpack(tensor: RepTensor) -> ComplexSpectrogram:
    """Inverse of :func:`complex_pack`; the Nyquist bin is restored as zero."""
    if tensor.repr_id != "complex":
        raise ValueError(f"expected a complex tensor, got {tensor.repr_id}")
    d = tensor.data.astype(np.float64)
    full = np.zeros((513, d.shape[2]), dtype=np.complex128)
    full[:512] = d[0] + 1j * d[1]
    return ComplexSpectrogram(full)


def _check_spec_shape(spec: ComplexSpectrogram) -> None:
    if spec.bins != 513 or spec.frames != 64:
        raise ValueError(f"expected a 513x64 spectrogram, got {spec.bins}x{spec.frames}")


def magif_encode(spec: ComplexSpectrogram, log_offset: float = 1e-6) -> RepTensor:
    """Channel 0: log(|S| + eps); channel 1: wrapped phase increment / pi.

    The frame before the first is assigned phase 0, so IF[:, 0] encodes the
    absolute phase of frame 0 and the cumulative sum in the decoder is exact.
    """
    _check_spec_shape(spec)
    d = spec.data[:512]
    mag = np.abs(d)
    phase = np.angle(d)
    dphi = np.empty_like(phase)
    dphi[:, 0] = phase[:, 0]
    dphi[:, 1:] = phase[:, 1:] - phase[:, :-1]
    inst_freq = princarg(dphi) / np.pi
    return RepTensor("mag-if", np.stack([np.log(mag + log_offset), inst_freq]))


def magif_decode(tensor: RepTensor, log_offset: float = 1e-6) -> ComplexSpectrogram:
    if tensor.repr_id != "mag-if":
        raise ValueError(f"expected a mag-if tensor, got {tensor.repr_id}")
    d = tensor.data.astype(np.float64)
    mag = np.maximum(np.exp(d[0]) - log_offset, 0.0)
    phase = np.cumsum(np.pi * d[1], axis=1)
    full = np.zeros((513, d.shape[2]), dtype=np.complex128)
    full[:512] = mag * np.exp(1j * phase)
    return ComplexSpectrogram(full)


class WaveformCodec:
    repr_id = "waveform"

    def __init__(self, config: CodecConfig):
        self.config = config

    def encode(self, audio: AudioBuffer) -> RepTensor:
        x = _prepare_clip(audio, self.config)
        return RepTensor("waveform", x.reshape(1, 1, -1))

    def decode(self, tensor: RepTensor) -> AudioBuffer:
        return AudioBuffer(tensor.data.reshape(-1).astype(np.float64), self.config.sample_rate)


class ComplexCodec:
    repr_id = "complex"

    def __init__(self, config: CodecConfig):
        self.config = config

    def encode(self, audio: AudioBuffer) -> RepTensor:
        x = _prepare_clip(audio, self.config)
        return complex_pack(stft(AudioBuffer(x, self.config.sample_rate), self.config.frame))

    def decode(self, tensor: RepTensor) -> AudioBuffer:
        samples = istft_array(
            complex_unpack(tensor).data, self.config.frame, self.config.clip_samples
        )
        return AudioBuffer(samples, self.config.sample_rate)


class MagIfCodec:
    repr_id = "mag-if"

    def __init__(self, config: CodecConfig):
        self.config = config

    def encode(self, audio: AudioBuffer) -> RepTensor:
        x = _prepare_clip(audio, self.config)
        spec = stft(AudioBuffer(x, self.config.sample_rate), self.config.frame)
        return magif_encode(spec, self.config.log_offset)

    def decode(self, tensor: RepTensor) -> AudioBuffer:
        spec = magif_decode(tensor, self.config.log_offset)
        samples = istft_array(spec.data, self.config.frame, self.config.clip_samples)
        return AudioBuffer(samples, self.config.sample_rate)


class MelCodec:
    """Log-mel magnitude; inversion by NNLS to linear magnitude plus Griffin-Lim."""

    repr_id = "mel"

    def __init__(self, config: CodecConfig):
        self.config = config
        fb = mel_filterbank(
            config.n_mels, config.frame.bins, config.sample_rate, 0.0, config.sample_rate / 2.0
        )
        self.filterbank = fb
        self._pinv = np.linalg.pinv(fb.matrix)
        self._gram = fb.matrix.T @ fb.matrix
        self._gram_norm = float(np.linalg.norm(self._gram, 2))

    def log_mel(self, audio: AudioBuffer) -> np.ndarray:
        """n_mels x frames log-compressed mel magnitudes, double precision."""
        x = _prepare_clip(audio, self.config)
        spec = stft(AudioBuffer(x, self.config.sample_rate), self.config.frame)
        mel = self.filterbank.matrix @ np.abs(spec.data)
        return np.log(mel + self.config.log_offset)

    def encode(self, audio: AudioBuffer) -> RepTensor:
        return RepTensor("mel", self.log_mel(audio)[None, :, :])

    def decode(self, tensor: RepTensor) -> AudioBuffer:
        if tensor.repr_id != "mel":
            raise ValueError(f"expected a mel tensor, got {tensor.repr_id}")
        return self._decode_log_mel(tensor.data[0].astype(np.float64))

    def _decode_log_mel(self, log_mel: np.ndarray) -> AudioBuffer:
        mel = np.maximum(np.exp(log_mel) - self.config.log_offset, 0.0)
        mag = self._mel_to_magnitude(mel)
        samples = griffin_lim(
            mag,
            self.config.frame,
            self.config.griffin_lim_iters,
            self.config.griffin_lim_seed,
            self.config.clip_samples,
        )
        return AudioBuffer(samples, self.config.sample_rate)

    def _mel_to_magnitude(self, mel: np.ndarray) -> np.ndarray:
        # Non-negative least squares via accelerated projected gradient,
        # started from the clamped pseudo-inverse solution.
        target = self.filterbank.matrix.T @ mel
        sol = np.clip(self._pinv @ mel, 0.0, None)
        momentum = sol.copy()
        t_k = 1.0
        step = 1.0 / self._gram_norm
        for _ in range(self.config.mel_nnls_iters):
            grad = self._gram @ momentum - target
            nxt = np.clip(momentum - step * grad, 0.0, None)
            t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t_k * t_k))
            momentum = nxt + ((t_k - 1.0) / t_next) * (nxt - sol)
            sol, t_k = nxt, t_next
        return sol


class MfccCodec:
    """Orthonormal DCT-II of the log-mel; all coefficients retained."""

    repr_id = "mfcc"

    def __init__(self, config: CodecConfig):
        self.config = config
        self._mel = MelCodec(config)

    def encode(self, audio: AudioBuffer) -> RepTensor:
        log_mel = self._mel.log_mel(audio)
        coeffs = np.empty_like(log_mel)
        for t in range(log_mel.shape[1]):
            coeffs[:, t] = dct_ii(log_mel[:, t])
        return RepTensor("mfcc", coeffs[None, :, :])

    def decode(self, tensor: RepTensor) -> AudioBuffer:
        if tensor.repr_id != "mfcc":
            raise ValueError(f"expected an mfcc tensor, got {tensor.repr_id}")
        coeffs = tensor.data[0].astype(np.float64)
        log_mel = np.empty_like(coeffs)
        for t in range(coeffs.shape[1]):
            log_mel[:, t] = dct_iii(coeffs[:, t])
        return self._mel._decode_log_mel(log_mel)


def _prepare_clip(audio: AudioBuffer, config: CodecConfig) -> np.ndarray:
    if audio.sample_rate != config.sample_rate:
        raise ValueError(
            f"expected {config.sample_rate} Hz audio, got {audio.sample_rate} Hz"
        )
    x = audio.samples
    if x.size > config.clip_samples:
        raise ValueError(f"audio length {x.size} exceeds {config.clip_samples} samples")
    if x.size < config.clip_samples:
        padded = np.zeros(config.clip_samples)
        padded[: x.size] = x
        return padded
    return x


@functools.lru_cache(maxsize=16)
def get_codec(repr_id: str, config: CodecConfig):
    """Codec instance for a representation; cached since construction precomputes kernels."""
    from audiorep.cqt import CqtCodec
    from audiorep.nsgt import NsgtCodec

    classes = {
        "waveform": WaveformCodec,
        "complex": ComplexCodec,
        "mag-if": MagIfCodec,
        "cq-nsgt": NsgtCodec,
        "cqt": CqtCodec,
        "mel": MelCodec,
        "mfcc": MfccCodec,
    }
    if repr_id not in classes:
        raise ValueError(
            f"unknown representation {repr_id!r}; valid: {', '.join(REPRESENTATIONS)}"
        )
    return classes[repr_id](config)


def encode(repr_id: str, audio: AudioBuffer, config: CodecConfig = CodecConfig()) -> RepTensor:
    """Encode a clip into the named representation tensor."""
    return get_codec(repr_id, config).encode(audio)


def decode(tensor: RepTensor, config: CodecConfig = CodecConfig()) -> AudioBuffer:
    """Invert a representation tensor back to a 16000-sample clip."""
    return get_codec(tensor.repr_id, config).decode(tensor)
