"""Batch inference: WAV clips to EMB1 embeddings and PRB1 probabilities."""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np
import torch

from audiorep_extractor.features import load_wav, log_magnitude_stft, read_index
from audiorep_extractor.formats import write_emb1, write_prb1
from audiorep_extractor.models import SpectrogramClassifier, VGGish, vggish_log_mel
from audiorep_extractor.train import load_checkpoint

log = logging.getLogger("audiorep-extractor")

VGGISH_WEIGHTS_HINT = (
    "VGGish weights not found. Download the reference checkpoint "
    "(https://github.com/harritaylor/torchvggish, file vggish-10086976.pth, "
    "the pytorch port of the Google VGGish model used by the FAD tooling) "
    "and pass its path via --weights."
)


def resolve_wavs(wav_paths=None, metadata_path=None, root=None) -> list[Path]:
    """Input clip list: explicit paths, or every record of a dataset index in file order."""
    if wav_paths:
        return [Path(p) for p in wav_paths]
    if metadata_path:
        return [r["wav_path"] for r in read_index(metadata_path, root)]
    raise ValueError("provide WAV paths or a metadata index")


def extract_classifier(
    weights_path,
    wavs: list[Path],
    emb_out=None,
    prob_out=None,
    batch_size: int = 32,
) -> dict:
    """Run a trained classifier; one embedding/probability row per input clip."""
    checkpoint = load_checkpoint(weights_path)
    model = SpectrogramClassifier(len(checkpoint["classes"]), checkpoint["embed_dim"])
    model.load_state_dict(checkpoint["state_dict"])
    model.eval()

    features = np.stack([log_magnitude_stft(load_wav(p)) for p in wavs])
    features = (features - checkpoint["norm_mean"]) / checkpoint["norm_std"]
    x = torch.from_numpy(features).unsqueeze(1)

    embeddings = []
    probs = []
    with torch.no_grad():
        for start in range(0, len(wavs), batch_size):
            hidden = model.embed(x[start : start + batch_size])
            embeddings.append(hidden.numpy())
            probs.append(torch.softmax(model.fc_out(hidden), dim=1).numpy())
    embeddings = np.vstack(embeddings)
    probs = np.vstack(probs)
    # float32 file rows must sum to 1 within tolerance after quantization
    probs = probs / probs.sum(axis=1, keepdims=True)

    if emb_out is not None:
        write_emb1(embeddings, emb_out)
        log.info("wrote %s (%d x %d)", emb_out, *embeddings.shape)
    if prob_out is not None:
        write_prb1(probs, prob_out)
        log.info("wrote %s (%d x %d)", prob_out, *probs.shape)
    return {"embeddings": embeddings, "probs": probs, "classes": checkpoint["classes"]}


def extract_vggish(weights_path, wavs: list[Path], emb_out, batch_size: int = 8) -> np.ndarray:
    """128-d VGGish embeddings through the reference preprocessing."""
    if weights_path is None or not Path(weights_path).is_file():
        raise FileNotFoundError(VGGISH_WEIGHTS_HINT)
    state = torch.load(weights_path, map_location="cpu", weights_only=False)
    if hasattr(state, "state_dict"):
        state = state.state_dict()
    model = VGGish()
    model.load_state_dict(state)
    model.eval()

    patches = np.stack([vggish_log_mel(load_wav(p)) for p in wavs])
    x = torch.from_numpy(patches).unsqueeze(1)
    rows = []
    with torch.no_grad():
        for start in range(0, len(wavs), batch_size):
            rows.append(model(x[start : start + batch_size]).numpy())
    embeddings = np.vstack(rows)
    write_emb1(embeddings, emb_out)
    log.info("wrote %s (%d x %d)", emb_out, *embeddings.shape)
    return embeddings
