"""Cosine distance on unit vectors, shared by every scoring path.

Similarities are accumulated in float64 and distances rounded to
``DISTANCE_DECIMALS`` so that exact search, IVF search and per-pair scoring
rank candidates identically; equal vectors therefore tie exactly.
"""
import numpy as np

DISTANCE_DECIMALS = 9


def similarity_to_distance(sims):
    d = np.round(1.0 - np.asarray(sims, dtype=np.float64), DISTANCE_DECIMALS)
    return np.clip(d, 0.0, 2.0)


def cosine_distance(u, v) -> float:
    """1 - dot(u, v) for unit vectors, clamped to [0, 2]."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    return float(similarity_to_distance(np.dot(u, v)))


def row_distances(a, b) -> np.ndarray:
    """Distance between row i of ``a`` and row i of ``b``."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    return similarity_to_distance(np.einsum("ij,ij->i", a, b))
