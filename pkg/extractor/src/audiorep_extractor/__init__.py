"""Bridges pretrained/trained audio models to the EMB1/PRB1 toolkit formats.

Trains small pitch/instrument classifiers on magnitude STFT spectrograms,
runs batch inference to produce embedding (EMB1) and class-probability
(PRB1) files, and hosts a VGGish architecture for FAD-style embeddings
when reference weights are available locally.
"""

__version__ = "0.1.0"
