"""Seeded k-means++ / Lloyd clustering used to train the IVF coarse quantizer."""
import logging
from typing import Optional, Tuple

import numpy as np

try:  # pragma: no cover
    from ..shared.errors import ValidationError  # type: ignore
except Exception:
    from shared.errors import ValidationError  # type: ignore

logger = logging.getLogger('Bitext.KMeans')

ASSIGN_BLOCK_ROWS = 4096


def squared_distances(x: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """||x_i - c_j||^2 in float64, never negative."""
    x = np.asarray(x, dtype=np.float64)
    c = np.asarray(centroids, dtype=np.float64)
    d2 = (x * x).sum(axis=1)[:, None] - 2.0 * (x @ c.T) + (c * c).sum(axis=1)[None, :]
    return np.maximum(d2, 0.0)


def assign(vectors: np.ndarray, centroids: np.ndarray,
           block_rows: int = ASSIGN_BLOCK_ROWS) -> Tuple[np.ndarray, np.ndarray]:
    """Nearest centroid per row (lowest index on ties) and its squared distance."""
    n = vectors.shape[0]
    labels = np.empty(n, dtype=np.int64)
    best = np.empty(n, dtype=np.float64)
    for s in range(0, n, block_rows):
        d2 = squared_distances(vectors[s:s + block_rows], centroids)
        labels[s:s + block_rows] = np.argmin(d2, axis=1)
        best[s:s + block_rows] = d2[np.arange(d2.shape[0]), labels[s:s + block_rows]]
    return labels, best


def kmeans_plusplus(x: np.ndarray, nlist: int, rng: np.random.Generator) -> np.ndarray:
    """Seed rows chosen by D^2 sampling; returns their indices."""
    n = x.shape[0]
    chosen = np.zeros(n, dtype=bool)
    seeds = np.empty(nlist, dtype=np.int64)
    seeds[0] = rng.integers(0, n)
    chosen[seeds[0]] = True
    d2 = squared_distances(x, x[seeds[0]:seeds[0] + 1])[:, 0]
    for i in range(1, nlist):
        total = d2.sum()
        if total <= 0.0:
            # remaining points coincide with a seed
            pick = int(rng.choice(np.flatnonzero(~chosen)))
        else:
            r = rng.random() * total
            pick = int(np.searchsorted(np.cumsum(d2), r, side="right"))
            pick = min(pick, n - 1)
            if chosen[pick]:
                pick = int(np.flatnonzero(~chosen)[0])
        seeds[i] = pick
        chosen[pick] = True
        d2 = np.minimum(d2, squared_distances(x, x[pick:pick + 1])[:, 0])
    return seeds


def _update(x: np.ndarray, labels: np.ndarray, nlist: int) -> Tuple[np.ndarray, np.ndarray]:
    counts = np.bincount(labels, minlength=nlist)
    order = np.argsort(labels, kind="stable")
    sums = np.zeros((nlist, x.shape[1]), dtype=np.float64)
    present = np.flatnonzero(counts)
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])[present]
    sums[present] = np.add.reduceat(x[order], starts, axis=0)
    return sums, counts


def kmeans(vectors: np.ndarray, nlist: int, iters: int = 10, seed: int = 0,
           max_train: Optional[int] = None) -> Tuple[np.ndarray, int]:
    """Returns (centroids as float32 nlist x d, number of training rows).

    ``iters=0`` returns the k-means++ seeds.  Clusters that empty out during
    Lloyd iterations are re-seeded from the points farthest from their centroid.
    """
    x = np.asarray(vectors, dtype=np.float64)
    n = x.shape[0]
    if nlist < 1:
        raise ValidationError(f"nlist must be >= 1, got {nlist}")
    if nlist > n:
        raise ValidationError(f"nlist={nlist} exceeds the number of vectors ({n})")
    if iters < 0:
        raise ValidationError(f"iters must be >= 0, got {iters}")

    rng = np.random.default_rng(seed)
    if max_train is not None and nlist <= max_train < n:
        x = x[np.sort(rng.choice(n, size=max_train, replace=False))]
        logger.info(f"🎯 Training on a {max_train}/{n} sample")

    centroids = x[kmeans_plusplus(x, nlist, rng)].copy()
    labels = None
    for it in range(iters):
        new_labels, d2 = assign(x, centroids)
        if labels is not None and np.array_equal(labels, new_labels):
            logger.debug(f"k-means converged after {it} iterations")
            break
        labels = new_labels
        sums, counts = _update(x, labels, nlist)
        filled = counts > 0
        centroids[filled] = sums[filled] / counts[filled, None]
        empty = np.flatnonzero(~filled)
        if empty.size:
            far = np.lexsort((np.arange(x.shape[0]), -d2))[:empty.size]
            centroids[empty] = x[far]
            logger.debug(f"re-seeded {empty.size} empty clusters")
    return centroids.astype(np.float32), int(x.shape[0])
