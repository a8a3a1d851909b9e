import pytest

from audiorep.harness import synth_dataset


@pytest.fixture(scope="session")
def small_dataset(tmp_path_factory):
    """60-clip synthetic dataset (5 profiles x 12) for harness/CLI tests."""
    root = tmp_path_factory.mktemp("synth-small")
    return synth_dataset(root, n_per_class=12, seed=42)


@pytest.fixture(scope="session")
def acceptance_dataset(tmp_path_factory):
    """500-clip synthetic dataset for the acceptance experiments."""
    root = tmp_path_factory.mktemp("synth-500")
    return synth_dataset(root, n_per_class=100, seed=42)
