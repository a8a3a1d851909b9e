import subprocess
import sys

import pytest

from audiorep_extractor.train import save_checkpoint, train_classifier


@pytest.fixture(scope="session")
def dataset(tmp_path_factory):
    """Synthetic dataset generated through the toolkit CLI (external interface)."""
    root = tmp_path_factory.mktemp("synthds")
    result = subprocess.run(
        [
            sys.executable,
            "-m",
            "audiorep.cli",
            "synth-data",
            "--out",
            str(root),
            "--n-per-class",
            "108",
            "--seed",
            "7",
        ],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0, result.stderr
    return root


@pytest.fixture(scope="session")
def instrument_checkpoint(dataset, tmp_path_factory):
    path = tmp_path_factory.mktemp("ckpt") / "instrument.pt"
    checkpoint = train_classifier(dataset / "metadata.jsonl", "instrument", epochs=12, seed=42)
    save_checkpoint(checkpoint, path)
    return path, checkpoint


@pytest.fixture(scope="session")
def pitch_checkpoint(dataset, tmp_path_factory):
    path = tmp_path_factory.mktemp("ckpt") / "pitch.pt"
    checkpoint = train_classifier(dataset / "metadata.jsonl", "pitch", epochs=12, seed=42)
    save_checkpoint(checkpoint, path)
    return path, checkpoint
