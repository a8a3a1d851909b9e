"""Generative-model evaluation metrics: Inception Score, KID, and FAD.

Pure numerical operations over embedding matrices and class-probability
matrices. All reductions use exact compensated summation (math.fsum), so
results are bit-reproducible and symmetric: kid(A, B) == kid(B, A)
exactly, regardless of BLAS blocking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist


@dataclass(frozen=True)
class EmbeddingSet:
    """n x d matrix of per-sample embeddings."""

    data: np.ndarray
    labels: np.ndarray | None = None

    def __post_init__(self):
        d = np.asarray(self.data, dtype=np.float64)
        if d.ndim != 2 or d.shape[0] < 1 or d.shape[1] < 1:
            raise ValueError(f"embeddings must be a non-empty 2-D matrix, got shape {d.shape}")
        if not np.all(np.isfinite(d)):
            raise ValueError("embeddings must be finite")
        object.__setattr__(self, "data", d)
        if self.labels is not None:
            lab = np.asarray(self.labels, dtype=np.uint32)
            if lab.shape != (d.shape[0],):
                raise ValueError("labels must have one entry per embedding row")
            object.__setattr__(self, "labels", lab)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class ProbMatrix:
    """n x C class-probability matrix; rows are distributions."""

    data: np.ndarray
    row_sum_tol: float = 1e-6

    def __post_init__(self):
        d = np.asarray(self.data, dtype=np.float64)
        if d.ndim != 2 or d.shape[1] < 2:
            raise ValueError("probability matrix must be 2-D with at least 2 classes")
        if d.shape[0] < 1:
            raise ValueError("probability matrix must have at least one row")
        if not np.all(np.isfinite(d)) or np.any(d < 0):
            raise ValueError("probabilities must be finite and non-negative")
        sums = d.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > self.row_sum_tol):
            worst = int(np.argmax(np.abs(sums - 1.0)))
            raise ValueError(
                f"row {worst} sums to {sums[worst]:.8f}, outside 1 +/- {self.row_sum_tol}"
            )
        object.__setattr__(self, "data", d)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def n_classes(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class GaussianStats:
    """Mean vector and symmetric covariance summarizing an embedding set."""

    mu: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=np.float64)
        sigma = np.asarray(self.sigma, dtype=np.float64)
        if mu.ndim != 1 or sigma.shape != (mu.size, mu.size):
            raise ValueError("mu must be 1-D and sigma d x d")
        if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(sigma))):
            raise ValueError("Gaussian stats must be finite")
        scale = max(1.0, float(np.abs(sigma).max()))
        if np.abs(sigma - sigma.T).max() > 1e-9 * scale:
            raise ValueError("sigma must be symmetric within 1e-9")
        smallest = float(np.linalg.eigvalsh(sigma)[0])
        if smallest < -1e-8 * scale:
            raise ValueError(f"sigma is not numerically PSD (eigenvalue {smallest:.3e})")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)

    @property
    def d(self) -> int:
        return self.mu.size


@dataclass(frozen=True)
class KernelParams:
    """IMQ kernel bandwidth; k(x, y) = 1 / (1 + ||x - y||^2 / (2 * gamma_sq))."""

    gamma_sq: float = 8.0

    def __post_init__(self):
        if self.gamma_sq <= 0:
            raise ValueError("gamma_sq must be positive")


def imq_kernel(x, y, params: KernelParams = KernelParams()) -> float:
    """Inverse multi-quadratic kernel between two vectors; value in (0, 1]."""
    a = np.asarray(x, dtype=np.float64)
    b = np.asarray(y, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"vectors must share one dimension, got {a.shape} and {b.shape}")
    dist_sq = float(np.sum((a - b) ** 2))
    return 1.0 / (1.0 + dist_sq / (2.0 * params.gamma_sq))


def _imq_gram(a: np.ndarray, b: np.ndarray, params: KernelParams) -> np.ndarray:
    # cdist evaluates each pair independently, so the Gram matrix transposes
    # exactly under argument swap.
    return 1.0 / (1.0 + cdist(a, b, "sqeuclidean") / (2.0 * params.gamma_sq))


def mmd2_unbiased(
    x_set: EmbeddingSet, y_set: EmbeddingSet, params: KernelParams = KernelParams()
) -> float:
    """Unbiased estimator of the squared maximum mean discrepancy.

    (1/(m(m-1))) sum_{i!=j} k(x_i, x_j) + (1/(n(n-1))) sum_{i!=j} k(y_i, y_j)
    - (2/(mn)) sum_{i,j} k(x_i, y_j). May be negative.
    """
    if x_set.n < 2 or y_set.n < 2:
        raise ValueError("unbiased MMD needs at least 2 samples on each side")
    if x_set.d != y_set.d:
        raise ValueError(f"dimension mismatch: {x_set.d} vs {y_set.d}")
    m, n = x_set.n, y_set.n
    k_xx = _imq_gram(x_set.data, x_set.data, params)
    k_yy = _imq_gram(y_set.data, y_set.data, params)
    k_xy = _imq_gram(x_set.data, y_set.data, params)
    off_diag = ~np.eye(m, dtype=bool)
    term_x = math.fsum(k_xx[off_diag].tolist()) / (m * (m - 1))
    off_diag = ~np.eye(n, dtype=bool)
    term_y = math.fsum(k_yy[off_diag].tolist()) / (n * (n - 1))
    cross = math.fsum(k_xy.ravel().tolist()) * 2.0 / (m * n)
    return term_x + term_y - cross


def kid(real: EmbeddingSet, generated: EmbeddingSet) -> float:
    """Kernel Inception Distance: unbiased squared MMD with the IMQ kernel, gamma^2 = 8."""
    return mmd2_unbiased(real, generated, KernelParams(8.0))


def inception_score(probs: ProbMatrix) -> float:
    """exp of the mean KL divergence between rows and the marginal distribution.

    Natural log; terms with p = 0 contribute nothing. The result lies in
    [1, n_classes].
    """
    p = probs.data
    marginal = p.mean(axis=0)
    ratio = np.zeros_like(p)
    positive = p > 0
    ratio[positive] = np.log(p[positive]) - np.log(marginal[np.nonzero(positive)[1]])
    kl_rows = np.sum(p * ratio, axis=1)
    score = float(np.exp(math.fsum(kl_rows.tolist()) / p.shape[0]))
    return float(np.clip(score, 1.0, probs.n_classes))


def gaussian_stats(embeddings: EmbeddingSet) -> GaussianStats:
    """Column means and unbiased (n-1) covariance, symmetrized."""
    if embeddings.n < 2:
        raise ValueError("covariance estimation needs at least 2 samples")
    x = embeddings.data
    mu = x.mean(axis=0)
    centered = x - mu
    sigma = centered.T @ centered / (embeddings.n - 1)
    sigma = 0.5 * (sigma + sigma.T)
    return GaussianStats(mu, sigma)


def _psd_sqrt(sigma: np.ndarray) -> np.ndarray:
    eigvals, eigvecs = np.linalg.eigh(sigma)
    return (eigvecs * np.sqrt(np.clip(eigvals, 0.0, None))) @ eigvecs.T


def frechet_distance(real: GaussianStats, generated: GaussianStats) -> float:
    """Squared Wasserstein-2 distance between two Gaussians.

    ||mu_r - mu_g||^2 + tr(Sigma_r) + tr(Sigma_g)
    - 2 tr((Sigma_r^1/2 Sigma_g Sigma_r^1/2)^1/2), computed with symmetric
    eigendecompositions and eigenvalues clamped at zero.
    """
    if real.d != generated.d:
        raise ValueError(f"dimension mismatch: {real.d} vs {generated.d}")
    delta = real.mu - generated.mu
    sqrt_r = _psd_sqrt(real.sigma)
    inner = sqrt_r @ generated.sigma @ sqrt_r
    inner = 0.5 * (inner + inner.T)
    cross_eigs = np.clip(np.linalg.eigvalsh(inner), 0.0, None)
    value = (
        float(delta @ delta)
        + float(np.trace(real.sigma))
        + float(np.trace(generated.sigma))
        - 2.0 * float(np.sum(np.sqrt(cross_eigs)))
    )
    return max(0.0, value)


def fad(real_emb: EmbeddingSet, gen_emb: EmbeddingSet) -> float:
    """Frechet distance between Gaussians fitted to the two embedding sets."""
    return frechet_distance(gaussian_stats(real_emb), gaussian_stats(gen_emb))
