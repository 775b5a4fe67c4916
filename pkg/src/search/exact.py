"""Blocked brute-force k-NN over unit vectors.

Targets are walked in fixed tiles and queries in fixed row blocks; each
query keeps a running top-k ordered by (distance, target index).  Block
boundaries never depend on the thread count, so results do not either.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Tuple, Union

import numpy as np
from tqdm import tqdm

try:  # pragma: no cover
    from ..shared.distance import similarity_to_distance  # type: ignore
    from ..shared.errors import ConfigError, ValidationError  # type: ignore
    from ..shared.records import EmbeddingMatrix  # type: ignore
except Exception:
    from shared.distance import similarity_to_distance  # type: ignore
    from shared.errors import ConfigError, ValidationError  # type: ignore
    from shared.records import EmbeddingMatrix  # type: ignore

logger = logging.getLogger('Bitext.Search')

NO_NEIGHBOR = np.iinfo(np.int64).max

Vectors = Union[EmbeddingMatrix, np.ndarray]


class Neighbor(NamedTuple):
    target_index: int
    distance: float


@dataclass
class SearchParams:
    k: int = 20
    nprobe: int = 32
    block_rows: int = 256        # queries per block
    target_block: int = 16384    # targets per tile in exact search

    def validate(self, nlist: Optional[int] = None) -> "SearchParams":
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if self.nprobe < 1:
            raise ConfigError(f"nprobe must be >= 1, got {self.nprobe}")
        if nlist is not None and self.nprobe > nlist:
            raise ConfigError(f"nprobe={self.nprobe} exceeds nlist={nlist}")
        if self.block_rows < 1 or self.target_block < 1:
            raise ConfigError("block sizes must be >= 1")
        return self


def as_rows(x: Vectors) -> np.ndarray:
    rows = x.rows if isinstance(x, EmbeddingMatrix) else np.asarray(x, dtype=np.float32)
    if rows.ndim != 2:
        raise ValidationError(f"expected a 2-D matrix, got shape {rows.shape}")
    return rows


class TopK:
    """Running k smallest (distance, index) per query row."""

    def __init__(self, n: int, k: int):
        self.k = k
        self.dist = np.full((n, k), np.inf)
        self.idx = np.full((n, k), NO_NEIGHBOR, dtype=np.int64)

    def push(self, row: int, dists: np.ndarray, cols: np.ndarray) -> None:
        if dists.size == 0:
            return
        worst = self.dist[row, -1]
        if dists.size > self.k:
            kth = np.partition(dists, self.k - 1)[self.k - 1]
            keep = np.flatnonzero(dists <= min(kth, worst))
        else:
            keep = np.flatnonzero(dists <= worst)
        if keep.size == 0:
            return
        cand_d = np.concatenate([self.dist[row], dists[keep]])
        cand_i = np.concatenate([self.idx[row], cols[keep]])
        order = np.lexsort((cand_i, cand_d))[:self.k]
        self.dist[row] = cand_d[order]
        self.idx[row] = cand_i[order]

    def push_block(self, rows: np.ndarray, dists: np.ndarray, cols: np.ndarray) -> None:
        for j, r in enumerate(rows):
            self.push(int(r), dists[j], cols)

    def arrays(self, limit: int) -> Tuple[np.ndarray, np.ndarray]:
        kk = min(self.k, limit)
        return self.idx[:, :kk].copy(), self.dist[:, :kk].copy()


def to_neighbors(idx: np.ndarray, dist: np.ndarray) -> List[List[Neighbor]]:
    out = []
    for irow, drow in zip(idx, dist):
        out.append([Neighbor(int(i), float(d)) for i, d in zip(irow, drow) if i != NO_NEIGHBOR])
    return out


def _check_pair(q: np.ndarray, t: np.ndarray, k: int) -> None:
    if q.shape[1] != t.shape[1]:
        raise ValidationError(f"dimension mismatch: queries d={q.shape[1]}, targets d={t.shape[1]}")
    if t.shape[0] == 0:
        raise ValidationError("cannot search an empty target set")
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")


def knn_exact_arrays(queries: Vectors, targets: Vectors, k: int = 20,
                     params: Optional[SearchParams] = None, threads: int = 1,
                     progress: bool = False) -> Tuple[np.ndarray, np.ndarray]:
    """(indices, distances), each n_queries x min(k, n_targets), rows sorted ascending."""
    params = params or SearchParams(k=k)
    q, t = as_rows(queries), as_rows(targets)
    _check_pair(q, t, k)
    n, m = q.shape[0], t.shape[0]
    top = TopK(n, k)
    if n == 0:
        return top.arrays(m)

    q64 = q.astype(np.float64)
    q_starts = list(range(0, n, params.block_rows))
    tiles = range(0, m, params.target_block)
    bar = tqdm(total=len(tiles) * len(q_starts), desc="knn exact", unit="block", disable=not progress)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        for t0 in tiles:
            t1 = min(t0 + params.target_block, m)
            t64 = t[t0:t1].astype(np.float64)
            cols = np.arange(t0, t1, dtype=np.int64)

            def run(q0: int) -> None:
                q1 = min(q0 + params.block_rows, n)
                dists = similarity_to_distance(q64[q0:q1] @ t64.T)
                top.push_block(np.arange(q0, q1), dists, cols)

            for _ in pool.map(run, q_starts):
                bar.update(1)
    bar.close()
    logger.debug(f"🔎 exact search {n}x{m} k={k} done")
    return top.arrays(m)


def knn_exact(queries: Vectors, targets: Vectors, k: int = 20,
              params: Optional[SearchParams] = None, threads: int = 1) -> List[List[Neighbor]]:
    idx, dist = knn_exact_arrays(queries, targets, k, params, threads)
    return to_neighbors(idx, dist)
