"""Training for the pitch/instrument spectrogram classifiers."""

from __future__ import annotations

import logging

import numpy as np
import torch
from torch import nn

from audiorep_extractor.features import (
    load_wav,
    log_magnitude_stft,
    read_index,
    target_classes,
    target_label,
)
from audiorep_extractor.models import SpectrogramClassifier

log = logging.getLogger("audiorep-extractor")

WEIGHTS_FORMAT_VERSION = 1


def _load_features(records) -> np.ndarray:
    return np.stack([log_magnitude_stft(load_wav(r["wav_path"])) for r in records])


def train_classifier(
    metadata_path,
    target: str,
    epochs: int = 12,
    seed: int = 42,
    batch_size: int = 32,
    lr: float = 2e-3,
    val_fraction: float = 0.2,
    root=None,
) -> dict:
    """Train on magnitude STFTs with an 80/20 train-validation split.

    Returns a checkpoint dict (state dict, class list, normalization stats,
    validation accuracy) that :func:`audiorep_extractor.extract.extract`
    consumes. Raises if the model fails to beat chance on validation.
    """
    torch.manual_seed(seed)
    records = read_index(metadata_path, root)
    classes = target_classes(records, target)
    if len(classes) < 2:
        raise ValueError(f"need at least 2 {target} classes, found {len(classes)}")
    class_index = {c: i for i, c in enumerate(classes)}
    labels = np.array([class_index[target_label(r, target)] for r in records], dtype=np.int64)

    log.info("loading %d clips ...", len(records))
    features = _load_features(records)
    mean = float(features.mean())
    std = float(features.std() + 1e-8)
    features = (features - mean) / std

    rng = np.random.default_rng(seed)
    order = rng.permutation(len(records))
    n_val = max(1, int(round(val_fraction * len(records))))
    val_idx, train_idx = order[:n_val], order[n_val:]

    x = torch.from_numpy(features).unsqueeze(1)
    y = torch.from_numpy(labels)
    model = SpectrogramClassifier(len(classes))
    optimizer = torch.optim.Adam(model.parameters(), lr=lr)
    loss_fn = nn.CrossEntropyLoss()

    generator = torch.Generator().manual_seed(seed)
    for epoch in range(epochs):
        model.train()
        perm = train_idx[torch.randperm(len(train_idx), generator=generator).numpy()]
        total = 0.0
        for start in range(0, len(perm), batch_size):
            batch = perm[start : start + batch_size]
            optimizer.zero_grad()
            loss = loss_fn(model(x[batch]), y[batch])
            loss.backward()
            optimizer.step()
            total += loss.detach().item() * len(batch)
        val_acc = _accuracy(model, x, y, val_idx, batch_size)
        log.info("epoch %d: loss %.4f, val acc %.3f", epoch + 1, total / len(perm), val_acc)

    val_acc = _accuracy(model, x, y, val_idx, batch_size)
    if val_acc <= 1.0 / len(classes):
        raise RuntimeError(
            f"training diverged: validation accuracy {val_acc:.3f} is not above "
            f"chance (1/{len(classes)}); inspect the dataset or lower the learning rate"
        )
    return {
        "format_version": WEIGHTS_FORMAT_VERSION,
        "model": "spectrogram-classifier",
        "target": target,
        "classes": classes,
        "embed_dim": model.embed_dim,
        "norm_mean": mean,
        "norm_std": std,
        "val_accuracy": val_acc,
        "seed": seed,
        "state_dict": model.state_dict(),
    }


def _accuracy(model, x, y, indices, batch_size) -> float:
    model.eval()
    correct = 0
    with torch.no_grad():
        for start in range(0, len(indices), batch_size):
            batch = indices[start : start + batch_size]
            predicted = model(x[batch]).argmax(dim=1)
            correct += int((predicted == y[batch]).sum())
    return correct / len(indices)


def save_checkpoint(checkpoint: dict, path) -> None:
    torch.save(checkpoint, path)


def load_checkpoint(path) -> dict:
    checkpoint = torch.load(path, map_location="cpu", weights_only=False)
    if checkpoint.get("format_version") != WEIGHTS_FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported checkpoint format")
    return checkpoint
