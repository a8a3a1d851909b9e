"""Model architectures: a compact spectrogram classifier and VGGish for embeddings."""

from __future__ import annotations

import numpy as np
import torch
from torch import nn

from audiorep_extractor.features import N_BINS


class SpectrogramClassifier(nn.Module):
    """Small CNN over (1, 513, T) log-magnitude STFTs.

    Convolutions stride only along time and pooling averages time out, so
    full frequency resolution reaches the head; pitch classes a semitone
    apart stay separable. The penultimate linear layer is the embedding.
    """

    def __init__(self, n_classes: int, embed_dim: int = 128):
        super().__init__()
        self.n_classes = n_classes
        self.embed_dim = embed_dim
        self.conv = nn.Sequential(
            nn.Conv2d(1, 8, kernel_size=(5, 5), stride=(1, 2), padding=(2, 2)),
            nn.ReLU(),
            nn.Conv2d(8, 16, kernel_size=(3, 5), stride=(1, 2), padding=(1, 2)),
            nn.ReLU(),
        )
        self.fc_embed = nn.Linear(16 * N_BINS, embed_dim)
        self.fc_out = nn.Linear(embed_dim, n_classes)

    def embed(self, x: torch.Tensor) -> torch.Tensor:
        h = self.conv(x)
        h = h.mean(dim=3)  # average over time
        h = h.flatten(1)
        return torch.relu(self.fc_embed(h))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.fc_out(self.embed(x))


class VGGish(nn.Module):
    """VGGish trunk producing 128-d embeddings from (1, 96, 64) log-mel patches.

    Matches the reference FAD feature extractor's layout so its published
    checkpoint can be loaded; this module ships no weights.
    """

    def __init__(self):
        super().__init__()
        self.features = nn.Sequential(
            nn.Conv2d(1, 64, 3, padding=1), nn.ReLU(True), nn.MaxPool2d(2),
            nn.Conv2d(64, 128, 3, padding=1), nn.ReLU(True), nn.MaxPool2d(2),
            nn.Conv2d(128, 256, 3, padding=1), nn.ReLU(True),
            nn.Conv2d(256, 256, 3, padding=1), nn.ReLU(True), nn.MaxPool2d(2),
            nn.Conv2d(256, 512, 3, padding=1), nn.ReLU(True),
            nn.Conv2d(512, 512, 3, padding=1), nn.ReLU(True), nn.MaxPool2d(2),
        )
        self.embeddings = nn.Sequential(
            nn.Linear(512 * 6 * 4, 4096), nn.ReLU(True),
            nn.Linear(4096, 4096), nn.ReLU(True),
            nn.Linear(4096, 128), nn.ReLU(True),
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        h = self.features(x)
        h = h.permute(0, 2, 3, 1).flatten(1)  # reference layout: (T, F, C)
        return self.embeddings(h)


def vggish_log_mel(samples: np.ndarray, sample_rate: int = 16000) -> np.ndarray:
    """Reference-style (96, 64) log-mel patch: 25 ms frames, 10 ms hop, HTK mel."""
    win = int(0.025 * sample_rate)
    hop = int(0.010 * sample_rate)
    n_frames = 1 + (len(samples) - win) // hop
    window = np.hanning(win)
    idx = hop * np.arange(n_frames)[:, None] + np.arange(win)[None, :]
    fft_size = 1
    while fft_size < win:
        fft_size *= 2
    spectra = np.abs(np.fft.rfft(samples[idx] * window, n=fft_size, axis=1))

    def hz_to_htk_mel(f):
        return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=float) / 700.0)

    def htk_mel_to_hz(m):
        return 700.0 * (10.0 ** (np.asarray(m, dtype=float) / 2595.0) - 1.0)

    n_mels, fmin, fmax = 64, 125.0, 7500.0
    edges = htk_mel_to_hz(np.linspace(hz_to_htk_mel(fmin), hz_to_htk_mel(fmax), n_mels + 2))
    freqs = np.arange(fft_size // 2 + 1) * sample_rate / fft_size
    lower, center, upper = edges[:-2], edges[1:-1], edges[2:]
    up = (freqs[None, :] - lower[:, None]) / np.maximum(center - lower, 1e-12)[:, None]
    down = (upper[:, None] - freqs[None, :]) / np.maximum(upper - center, 1e-12)[:, None]
    weights = np.maximum(0.0, np.minimum(up, down))
    mel = spectra @ weights.T
    patch = np.log(mel + 0.01)[:96]
    if patch.shape[0] < 96:
        patch = np.vstack([patch, np.tile(patch[-1:], (96 - patch.shape[0], 1))])
    return patch.astype(np.float32)
