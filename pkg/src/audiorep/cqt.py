"""Pseudo-invertible constant-Q transform (12 bins/octave, 84 bins).

Analysis correlates the clip with Hann-windowed complex exponentials whose
length scales with 1/frequency (constant Q), hopped every 64 samples: 251
frames for a 16000-sample clip, zero-padded to 256 on the time axis.
Synthesis projects coefficients back through the conjugate kernels with a
diagonal frequency-response equalizer; inversion is approximate, but pure
tones keep their dominant frequency.
"""

from __future__ import annotations

import numpy as np

from audiorep.dsp import AudioBuffer
from audiorep.tensors import RepTensor


class CqtCodec:
    repr_id = "cqt"

    def __init__(self, config):
        self.config = config
        sr = config.sample_rate
        n_bins = config.cqt_n_bins
        bpo = config.cqt_bins_per_octave
        top_edge = config.cqt_fmin * 2.0 ** (n_bins / bpo)
        if top_edge > sr / 2.0:
            raise ValueError(
                f"cqt band edge {top_edge:.1f} Hz exceeds Nyquist {sr / 2.0:.1f} Hz"
            )
        self.freqs = config.cqt_fmin * 2.0 ** (np.arange(n_bins) / bpo)
        q_factor = 1.0 / (2.0 ** (1.0 / bpo) - 1.0)
        lengths = np.ceil(q_factor * sr / self.freqs).astype(int)

        fft_len = 1
        while fft_len < config.clip_samples + lengths.max():
            fft_len *= 2
        self._fft_len = fft_len

        kernels = np.zeros((n_bins, fft_len), dtype=np.complex128)
        for k, (f_k, n_k) in enumerate(zip(self.freqs, lengths)):
            n = np.arange(n_k)
            window = np.hanning(n_k)
            atom = window * np.exp(2j * np.pi * f_k * (n - (n_k - 1) / 2.0) / sr)
            atom /= window.sum()
            kernels[k, (n - n_k // 2) % fft_len] = atom
        self._spectra = np.fft.fft(kernels, axis=1)
        self._spectra_conj = np.conj(self._spectra)

        response = np.sum(np.abs(self._spectra) ** 2, axis=0)
        # Clamp keeps out-of-band content attenuated instead of amplified.
        self._equalizer = config.cqt_hop / np.maximum(response, 1e-3 * response.max())

        self.hop = config.cqt_hop
        self.raw_frames = config.clip_samples // self.hop + 1  # 251
        self._centers = self.hop * np.arange(self.raw_frames)
        self.frames = 256

    def coefficients(self, audio: AudioBuffer) -> np.ndarray:
        """Complex CQT matrix (84 x 251), atoms centered at multiples of the hop."""
        from audiorep.codecs import _prepare_clip

        x = _prepare_clip(audio, self.config)
        buf = np.zeros(self._fft_len)
        buf[: x.size] = x
        spectrum = np.fft.fft(buf)
        correlation = np.fft.ifft(spectrum[None, :] * self._spectra_conj, axis=1)
        return correlation[:, self._centers]

    def encode(self, audio: AudioBuffer) -> RepTensor:
        coeffs = self.coefficients(audio)
        n_bins = coeffs.shape[0]
        data = np.zeros((2, n_bins, self.frames), dtype=np.float64)
        data[0, :, : self.raw_frames] = coeffs.real
        data[1, :, : self.raw_frames] = coeffs.imag
        return RepTensor("cqt", data)

    def decode(self, tensor: RepTensor) -> AudioBuffer:
        if tensor.repr_id != "cqt":
            raise ValueError(f"expected a cqt tensor, got {tensor.repr_id}")
        d = tensor.data.astype(np.float64)
        coeffs = d[0, :, : self.raw_frames] + 1j * d[1, :, : self.raw_frames]
        carrier = np.zeros((coeffs.shape[0], self._fft_len), dtype=np.complex128)
        carrier[:, self._centers] = coeffs
        spectrum = np.sum(np.fft.fft(carrier, axis=1) * self._spectra, axis=0)
        analytic = np.fft.ifft(spectrum * self._equalizer)
        samples = 2.0 * analytic.real[: self.config.clip_samples]
        return AudioBuffer(samples, self.config.sample_rate)
