"""Shared signal builders and independent oracles for the test suite."""

import numpy as np

from audiorep.dsp import AudioBuffer

SR = 16000
N = 16000


def band_limited_signal(seed: int, lo_hz: int = 120, hi_hz: int = 5000) -> AudioBuffer:
    """Random band-limited noise with a smooth onset/offset envelope.

    Spectral content sits strictly inside [lo_hz, hi_hz] on the 1 Hz grid;
    the Hann-squared envelope keeps clip edges silent, as in recorded notes.
    """
    rng = np.random.default_rng(seed)
    spectrum = np.zeros(N // 2 + 1, dtype=complex)
    spectrum[lo_hz:hi_hz] = rng.standard_normal(hi_hz - lo_hz) + 1j * rng.standard_normal(
        hi_hz - lo_hz
    )
    x = np.fft.irfft(spectrum, N)
    x *= np.sin(np.pi * np.arange(N) / N) ** 2
    return AudioBuffer(0.5 * x / np.abs(x).max(), SR)


def harmonic_tone(midi: int, seed: int = 0, decay: float = 0.7) -> AudioBuffer:
    """Harmonic stack at the MIDI pitch with 1/h amplitudes and an AD envelope."""
    f0 = 440.0 * 2.0 ** ((midi - 69) / 12.0)
    t = np.arange(N) / SR
    rng = np.random.default_rng(seed)
    x = np.zeros(N)
    h = 1
    while h * f0 < 7600.0:
        x += (1.0 / h) * np.sin(2.0 * np.pi * h * f0 * t + rng.uniform(0.0, 2.0 * np.pi))
        h += 1
    x *= np.minimum(1.0, t / 0.02) * np.exp(-t / decay)
    return AudioBuffer(0.5 * x / np.abs(x).max(), SR)


def pure_tone(freq_hz: float, amplitude: float = 0.5, fade: bool = True) -> AudioBuffer:
    t = np.arange(N) / SR
    x = amplitude * np.sin(2.0 * np.pi * freq_hz * t)
    if fade:
        x *= np.sin(np.pi * t / 1.0) ** 0.5
    return AudioBuffer(x, SR)


def dominant_frequency_hz(samples: np.ndarray) -> float:
    """Peak-picking oracle: argmax of the Hann-windowed FFT magnitude, in Hz."""
    windowed = samples * np.hanning(len(samples))
    return float(np.argmax(np.abs(np.fft.rfft(windowed))) * SR / len(samples))


def naive_dft(x: np.ndarray) -> np.ndarray:
    """O(N^2) DFT by the definition; oracle for fft_forward."""
    n = len(x)
    out = np.zeros(n, dtype=complex)
    for k in range(n):
        for j in range(n):
            out[k] += x[j] * np.exp(-2j * np.pi * k * j / n)
    return out


def naive_dct_ii(x: np.ndarray) -> np.ndarray:
    """Direct orthonormal DCT-II summation; oracle for dct_ii."""
    n = len(x)
    out = np.zeros(n)
    for k in range(n):
        acc = 0.0
        for m in range(n):
            acc += x[m] * np.cos(np.pi * k * (2 * m + 1) / (2 * n))
        scale = np.sqrt(1.0 / n) if k == 0 else np.sqrt(2.0 / n)
        out[k] = scale * acc
    return out


def naive_mmd2(x: np.ndarray, y: np.ndarray, gamma_sq: float = 8.0) -> float:
    """Triple-loop unbiased squared MMD with the IMQ kernel; oracle for mmd2_unbiased."""

    def k(a, b):
        return 1.0 / (1.0 + float(np.sum((a - b) ** 2)) / (2.0 * gamma_sq))

    m, n = len(x), len(y)
    term_x = sum(k(x[i], x[j]) for i in range(m) for j in range(m) if i != j) / (m * (m - 1))
    term_y = sum(k(y[i], y[j]) for i in range(n) for j in range(n) if i != j) / (n * (n - 1))
    cross = sum(k(x[i], y[j]) for i in range(m) for j in range(n)) * 2.0 / (m * n)
    return term_x + term_y - cross


def two_pass_stats(x: np.ndarray):
    """Independent mean/covariance oracle (explicit loops, n-1 divisor)."""
    n, d = x.shape
    mu = np.zeros(d)
    for row in x:
        mu += row
    mu /= n
    sigma = np.zeros((d, d))
    for row in x:
        c = row - mu
        sigma += np.outer(c, c)
    return mu, sigma / (n - 1)


def diagonal_frechet(mu_r, var_r, mu_g, var_g) -> float:
    """Closed form for commuting (diagonal) covariances."""
    mu_r, var_r = np.asarray(mu_r, float), np.asarray(var_r, float)
    mu_g, var_g = np.asarray(mu_g, float), np.asarray(var_g, float)
    return float(np.sum((mu_r - mu_g) ** 2) + np.sum((np.sqrt(var_r) - np.sqrt(var_g)) ** 2))
