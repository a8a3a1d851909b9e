import numpy as np
import pytest
from hypothesis import given, strategies as st

from audiorep.dsp import (
    AudioBuffer,
    ComplexSpectrogram,
    FrameParams,
    dct_ii,
    dct_iii,
    fft_forward,
    fft_inverse,
    istft,
    mel_filterbank,
    princarg,
    snr_db,
    stft,
)
from helpers import naive_dct_ii, naive_dft

PARAMS = FrameParams()


class TestFft:
    def test_impulse_has_flat_spectrum(self):
        x = np.zeros(8)
        x[0] = 1.0
        assert np.allclose(fft_forward(x), np.ones(8), atol=1e-12)

    def test_constant_vector_is_dc_only(self):
        result = fft_forward(np.ones(8))
        assert result[0] == pytest.approx(8.0)
        assert np.allclose(result[1:], 0.0, atol=1e-12)

    def test_matches_naive_dft(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        expected = naive_dft(x)
        got = fft_forward(x)
        assert np.max(np.abs(got - expected)) <= 1e-10 * np.max(np.abs(expected))

    def test_inverse_roundtrip(self):
        rng = np.random.default_rng(2)
        x = rng.standard_normal(64) + 1j * rng.standard_normal(64)
        back = fft_inverse(fft_forward(x))
        assert np.max(np.abs(back - x)) <= 1e-10 * np.max(np.abs(x))

    def test_parseval(self):
        rng = np.random.default_rng(3)
        for n in (8, 64, 1024):
            x = rng.standard_normal(n)
            lhs = np.sum(np.abs(x) ** 2)
            rhs = np.sum(np.abs(fft_forward(x)) ** 2) / n
            assert abs(lhs - rhs) <= 1e-9 * lhs

    @pytest.mark.parametrize("n", [0, 3, 12, 1000])
    def test_rejects_non_power_of_two(self, n):
        with pytest.raises(ValueError):
            fft_forward(np.zeros(max(n, 1))[:n] if n else np.array([]))


class TestStft:
    def test_default_shape(self):
        clip = AudioBuffer(np.random.default_rng(0).standard_normal(16000))
        spec = stft(clip, PARAMS)
        assert (spec.bins, spec.frames) == (513, 64)

    def test_zero_input_zero_output(self):
        spec = stft(AudioBuffer(np.zeros(16000)), PARAMS)
        assert np.all(spec.data == 0)

    def test_sine_peak_bin(self):
        t = np.arange(16000) / 16000
        spec = stft(AudioBuffer(0.5 * np.sin(2 * np.pi * 1000 * t)), PARAMS)
        mags = np.abs(spec.data)
        # frames fully covering the clip; wrapped edge frames excluded
        for frame in range(0, 58):
            assert np.argmax(mags[:, frame]) == round(1000 * 1024 / 16000)

    def test_rejects_overlong_input(self):
        with pytest.raises(ValueError):
            stft(AudioBuffer(np.zeros(16385)), PARAMS)

    def test_linearity(self):
        rng = np.random.default_rng(4)
        x, y = rng.standard_normal((2, 16000))
        a, b = 0.7, -1.3
        lhs = stft(AudioBuffer(a * x + b * y), PARAMS).data
        rhs = a * stft(AudioBuffer(x), PARAMS).data + b * stft(AudioBuffer(y), PARAMS).data
        assert np.max(np.abs(lhs - rhs)) <= 1e-9 * np.max(np.abs(rhs))


class TestIstft:
    def test_cola_roundtrip_snr(self):
        rng = np.random.default_rng(5)
        worst = np.inf
        for _ in range(100):
            x = rng.standard_normal(16000)
            back = istft(stft(AudioBuffer(x), PARAMS), PARAMS, 16000)
            worst = min(worst, snr_db(x, back.samples))
        assert worst >= 120.0

    def test_zero_spectrogram_zero_signal(self):
        spec = ComplexSpectrogram(np.zeros((513, 64), complex))
        assert np.all(istft(spec, PARAMS, 16000).samples == 0)

    def test_single_bin_synthesizes_sinusoid(self):
        data = np.zeros((513, 64), complex)
        data[64, :] = 1.0
        x = istft(ComplexSpectrogram(data), PARAMS, 16384).samples
        interior = x[2048:14000]
        windowed = interior * np.hanning(interior.size)
        peak_hz = np.argmax(np.abs(np.fft.rfft(windowed))) * 16000 / interior.size
        assert abs(peak_hz - 1000.0) < 20.0

    def test_shape_mismatch_rejected(self):
        spec = ComplexSpectrogram(np.zeros((513, 63), complex))
        with pytest.raises(ValueError):
            istft(spec, PARAMS, 16000)


class TestMelFilterbank:
    def test_shape_and_nonnegativity(self):
        fb = mel_filterbank(128, 513, 16000, 0.0, 8000.0)
        assert fb.matrix.shape == (128, 513)
        assert np.all(fb.matrix >= 0)
        assert np.all(fb.matrix.max(axis=1) > 0)

    def test_single_filter_spans_range(self):
        fb = mel_filterbank(1, 513, 16000, 100.0, 4000.0)
        freqs = np.arange(513) * 8000.0 / 512
        support = freqs[fb.matrix[0] > 0]
        assert support.min() > 100.0 and support.max() < 4000.0

    def test_flat_spectrum_gives_positive_responses(self):
        fb = mel_filterbank(128, 513, 16000, 0.0, 8000.0)
        response = fb.matrix @ np.ones(513)
        assert np.all(response > 0)

    def test_rejects_fmax_beyond_nyquist(self):
        with pytest.raises(ValueError):
            mel_filterbank(128, 513, 16000, 0.0, 8001.0)


class TestDct:
    def test_constant_vector_concentrates_in_dc(self):
        out = dct_ii(np.full(16, 3.0))
        assert out[0] == pytest.approx(3.0 * np.sqrt(16))
        assert np.allclose(out[1:], 0.0, atol=1e-12)

    def test_roundtrip_identity(self):
        x = np.random.default_rng(6).standard_normal(128)
        back = dct_iii(dct_ii(x))
        assert np.max(np.abs(back - x)) <= 1e-10 * np.max(np.abs(x))

    def test_matches_naive_oracle(self):
        x = np.random.default_rng(7).standard_normal(8)
        expected = naive_dct_ii(x)
        assert np.max(np.abs(dct_ii(x) - expected)) <= 1e-10 * np.max(np.abs(expected))

    def test_preserves_norm(self):
        x = np.random.default_rng(8).standard_normal(64)
        assert np.linalg.norm(dct_ii(x)) == pytest.approx(np.linalg.norm(x), rel=1e-9)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            dct_ii(np.array([]))


class TestPrincarg:
    @pytest.mark.parametrize(
        "phase,expected",
        [(0.0, 0.0), (3 * np.pi, np.pi), (2.5 * np.pi, 0.5 * np.pi), (np.pi, np.pi), (-np.pi, np.pi)],
    )
    def test_known_values(self, phase, expected):
        assert princarg(phase) == pytest.approx(expected, abs=1e-12)

    @given(st.floats(min_value=-1e6, max_value=1e6))
    def test_principal_interval_and_congruence(self, phase):
        wrapped = princarg(phase)
        assert -np.pi < wrapped <= np.pi
        k = (phase - wrapped) / (2 * np.pi)
        assert abs(k - round(k)) < 1e-6


class TestValidation:
    def test_audio_buffer_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            AudioBuffer(np.array([0.0, np.nan]))

    def test_audio_buffer_rejects_empty(self):
        with pytest.raises(ValueError):
            AudioBuffer(np.array([]))

    def test_frame_params_validation(self):
        with pytest.raises(ValueError):
            FrameParams(fft_size=1000)
        with pytest.raises(ValueError):
            FrameParams(hop=300)
        with pytest.raises(ValueError):
            FrameParams(padded_length=16383)

    def test_stft_determinism(self):
        x = AudioBuffer(np.random.default_rng(9).standard_normal(16000))
        a = stft(x, PARAMS).data
        b = stft(x, PARAMS).data
        assert np.array_equal(a, b)
