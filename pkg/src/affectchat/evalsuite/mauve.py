"""Divergence-frontier similarity between two text collections.

Both sides are embedded, jointly quantized into k bins (seeded k-means over
a canonical ordering of the stacked points, so the score is invariant to
text order and to swapping the two sides), and compared through the curve of
exponentiated KL divergences against mixtures of the two bin histograms.
The score is the area under that frontier: 1.0 exactly when the histograms
coincide, approaching 0 as the sides separate.
"""

from __future__ import annotations

import numpy as np
from sklearn.cluster import KMeans

from .embedders import EmbedderPort

DEFAULT_SCALING_C = 5.0
DEFAULT_LAMBDA_GRID = 25
MAX_CLUSTERS = 500


def default_cluster_count(n_per_side: int) -> int:
    return max(1, min(n_per_side // 10, MAX_CLUSTERS))


def _kl(p: np.ndarray, r: np.ndarray) -> float:
    mask = p > 0
    return float(np.sum(p[mask] * np.log(p[mask] / r[mask])))


def divergence_frontier(
    p: np.ndarray,
    q: np.ndarray,
    scaling_c: float = DEFAULT_SCALING_C,
    grid_size: int = DEFAULT_LAMBDA_GRID,
) -> np.ndarray:
    """Frontier points (exp(-c KL(q||r)), exp(-c KL(p||r))) over the mixture grid.

    Anchor points (1, 0) and (0, 1) close the curve onto the axes. Along the
    returned order the x coordinate is non-increasing.
    """
    lambdas = np.linspace(1e-6, 1.0 - 1e-6, grid_size)
    points = [(1.0, 0.0)]
    for lam in lambdas:
        r = lam * p + (1.0 - lam) * q
        points.append((np.exp(-scaling_c * _kl(q, r)), np.exp(-scaling_c * _kl(p, r))))
    points.append((0.0, 1.0))
    return np.asarray(points)


def frontier_area(points: np.ndarray) -> float:
    """Area under a monotone frontier path, integrated with the trapezoid rule."""
    reversed_path = points[::-1]
    return float(np.trapezoid(reversed_path[:, 1], reversed_path[:, 0]))


def quantize_joint(
    human_vectors: np.ndarray,
    model_vectors: np.ndarray,
    k_clusters: int,
    seed: int = 0,
) -> tuple[np.ndarray, np.ndarray]:
    """Histogram both sides over a joint k-means code book.

    The code book is fitted on the stacked points in a canonical (sorted)
    order, which makes the histograms independent of text order and of which
    side is called human.
    """
    stacked = np.vstack([human_vectors, model_vectors])
    canonical = stacked[np.lexsort(stacked.T[::-1])]
    kmeans = KMeans(n_clusters=k_clusters, random_state=seed, n_init=10)
    kmeans.fit(canonical)
    p = np.bincount(kmeans.predict(human_vectors), minlength=k_clusters).astype(float)
    q = np.bincount(kmeans.predict(model_vectors), minlength=k_clusters).astype(float)
    return p / p.sum(), q / q.sum()


def mauve_score(
    human_texts: list[str],
    model_texts: list[str],
    embedder: EmbedderPort,
    k_clusters: int | None = None,
    scaling_c: float = DEFAULT_SCALING_C,
    grid_size: int = DEFAULT_LAMBDA_GRID,
    seed: int = 0,
) -> float:
    """Frontier area between the two sides' quantized embedding histograms."""
    if not human_texts or not model_texts:
        raise ValueError("both sides need at least one text")
    if k_clusters is None:
        k_clusters = default_cluster_count(min(len(human_texts), len(model_texts)))
    if min(len(human_texts), len(model_texts)) < k_clusters:
        raise ValueError(
            f"need at least {k_clusters} texts per side, got "
            f"{len(human_texts)} human / {len(model_texts)} model"
        )
    human_vectors = np.asarray(embedder.embed(human_texts), dtype=float)
    model_vectors = np.asarray(embedder.embed(model_texts), dtype=float)
    p, q = quantize_joint(human_vectors, model_vectors, k_clusters, seed=seed)
    return frontier_area(divergence_frontier(p, q, scaling_c, grid_size))
