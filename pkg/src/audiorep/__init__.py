"""Audio representation codecs, evaluation metrics, and benchmark harness.

Seven paired encode/decode transforms over 1 s / 16 kHz clips (waveform,
complex STFT, magnitude + instantaneous frequency, CQ-NSGT, CQT, mel,
MFCC), the IS / KID / FAD evaluation metrics, bit-exact tensor and
embedding file formats, and a harness for round-trip lower-bound and
timing experiments.
"""

from audiorep.codecs import CodecConfig, decode, encode, griffin_lim
from audiorep.dsp import AudioBuffer, FrameParams, istft, stft
from audiorep.metrics import (
    EmbeddingSet,
    GaussianStats,
    KernelParams,
    ProbMatrix,
    fad,
    frechet_distance,
    gaussian_stats,
    inception_score,
    kid,
    mmd2_unbiased,
)
from audiorep.tensors import REP_SHAPES, REPRESENTATIONS, RepTensor, read_rten, write_rten

__version__ = "0.1.0"

__all__ = [
    "AudioBuffer",
    "CodecConfig",
    "EmbeddingSet",
    "FrameParams",
    "GaussianStats",
    "KernelParams",
    "ProbMatrix",
    "REPRESENTATIONS",
    "REP_SHAPES",
    "RepTensor",
    "decode",
    "encode",
    "fad",
    "frechet_distance",
    "gaussian_stats",
    "griffin_lim",
    "inception_score",
    "istft",
    "kid",
    "mmd2_unbiased",
    "read_rten",
    "stft",
    "write_rten",
    "__version__",
]
