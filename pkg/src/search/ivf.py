"""Inverted-file (IVF-flat) index.

Targets are partitioned by their nearest k-means centroid.  A query scores
every vector in the ``nprobe`` lists whose centroids are closest to it; with
``nprobe == nlist`` this is exactly brute-force search.

On disk::

    b"BMIV" | u32 version=1 | u32 nlist | u32 d | u32 ntotal | u32 trained_on
    nlist*d f32 centroids | (nlist+1) u64 list offsets | ntotal u64 row indices
    ntotal*d f32 vectors in list order

plus the target ids in ``<path>.ids``.
"""
import logging
import math
import os
import struct
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from tqdm import tqdm

try:  # pragma: no cover
    from ..shared.distance import similarity_to_distance  # type: ignore
    from ..shared.errors import FormatError, ValidationError  # type: ignore
    from ..shared.records import EmbeddingMatrix  # type: ignore
    from ..corpus.io import check_sidecar_ids, ensure_parent, read_ids, write_ids  # type: ignore
    from .exact import Neighbor, SearchParams, TopK, Vectors, as_rows, to_neighbors  # type: ignore
    from .kmeans import assign, kmeans  # type: ignore
except Exception:
    from shared.distance import similarity_to_distance  # type: ignore
    from shared.errors import FormatError, ValidationError  # type: ignore
    from shared.records import EmbeddingMatrix  # type: ignore
    from corpus.io import check_sidecar_ids, ensure_parent, read_ids, write_ids  # type: ignore
    from search.exact import Neighbor, SearchParams, TopK, Vectors, as_rows, to_neighbors  # type: ignore
    from search.kmeans import assign, kmeans  # type: ignore

logger = logging.getLogger('Bitext.Search')

IVF_MAGIC = b"BMIV"
IVF_VERSION = 1
IVF_HEADER = struct.Struct("<4sIIIII")
DEFAULT_KMEANS_ITERS = 10


@dataclass(frozen=True)
class IvfIndex:
    centroids: np.ndarray      # nlist x d float32
    offsets: np.ndarray        # nlist + 1 int64; list c is [offsets[c], offsets[c+1])
    rows: np.ndarray           # ntotal int64 target row indices, ascending within a list
    vectors: np.ndarray        # ntotal x d float32, same order as ``rows``
    ids: Tuple[str, ...]       # target ids by row index
    trained_on: int

    @property
    def nlist(self) -> int:
        return int(self.centroids.shape[0])

    @property
    def dim(self) -> int:
        return int(self.centroids.shape[1])

    @property
    def ntotal(self) -> int:
        return int(self.rows.shape[0])

    def list_sizes(self) -> np.ndarray:
        return np.diff(self.offsets)

    def list_rows(self, c: int) -> np.ndarray:
        return self.rows[self.offsets[c]:self.offsets[c + 1]]

    def list_vectors(self, c: int) -> np.ndarray:
        return self.vectors[self.offsets[c]:self.offsets[c + 1]]

    def check(self) -> "IvfIndex":
        if self.offsets.shape != (self.nlist + 1,) or self.offsets[0] != 0 or self.offsets[-1] != self.ntotal:
            raise FormatError("IVF list offsets do not cover the indexed rows")
        if np.any(np.diff(self.offsets) < 0):
            raise FormatError("IVF list offsets are not monotone")
        if len(self.ids) != self.ntotal:
            raise FormatError(f"{len(self.ids)} ids for {self.ntotal} indexed rows")
        if not np.array_equal(np.sort(self.rows), np.arange(self.ntotal)):
            raise FormatError("IVF lists must hold every row exactly once")
        return self


def default_nlist(n: int) -> int:
    return max(1, math.ceil(math.sqrt(n)))


def build_ivf(targets: EmbeddingMatrix, nlist: Optional[int] = None, seed: int = 0,
              iters: int = DEFAULT_KMEANS_ITERS, max_train: Optional[int] = None) -> IvfIndex:
    n = len(targets)
    if n == 0:
        raise ValidationError("cannot index an empty target set")
    nlist = default_nlist(n) if nlist is None else nlist
    start = time.time()
    logger.info(f"⏳ Building IVF index: n={n} d={targets.dim} nlist={nlist} seed={seed}")
    centroids, trained_on = kmeans(targets.rows, nlist, iters=iters, seed=seed, max_train=max_train)
    labels, _ = assign(targets.rows, centroids)
    order = np.argsort(labels, kind="stable")
    counts = np.bincount(labels, minlength=nlist)
    offsets = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
    index = IvfIndex(
        centroids=centroids,
        offsets=offsets,
        rows=order.astype(np.int64),
        vectors=np.ascontiguousarray(targets.rows[order]),
        ids=targets.ids,
        trained_on=trained_on,
    )
    logger.info(f"✅ IVF index built in {time.time() - start:.2f}s "
                f"(lists: min={counts.min()} max={counts.max()}, empty={int((counts == 0).sum())})")
    return index


def probe_lists(index: IvfIndex, queries: np.ndarray, nprobe: int) -> np.ndarray:
    """The ``nprobe`` closest centroids per query (ties by centroid index)."""
    q = np.asarray(queries, dtype=np.float64)
    c = index.centroids.astype(np.float64)
    d2 = (c * c).sum(axis=1)[None, :] - 2.0 * (q @ c.T)
    return np.argsort(d2, axis=1, kind="stable")[:, :nprobe]


def knn_ivf_arrays(index: IvfIndex, queries: Vectors, params: Optional[SearchParams] = None,
                   threads: int = 1, progress: bool = False) -> Tuple[np.ndarray, np.ndarray]:
    params = (params or SearchParams()).validate(index.nlist)
    q = as_rows(queries)
    if q.shape[1] != index.dim:
        raise ValidationError(f"dimension mismatch: queries d={q.shape[1]}, index d={index.dim}")
    n = q.shape[0]
    top = TopK(n, params.k)
    if n == 0:
        return top.arrays(index.ntotal)

    q64 = q.astype(np.float64)

    def run(q0: int) -> None:
        q1 = min(q0 + params.block_rows, n)
        probes = probe_lists(index, q64[q0:q1], params.nprobe)
        for c in np.unique(probes):
            members = np.flatnonzero((probes == c).any(axis=1))
            vecs = index.list_vectors(int(c))
            if vecs.shape[0] == 0:
                continue
            dists = similarity_to_distance(q64[q0 + members] @ vecs.astype(np.float64).T)
            top.push_block(q0 + members, dists, index.list_rows(int(c)))

    starts = list(range(0, n, params.block_rows))
    bar = tqdm(total=len(starts), desc="knn ivf", unit="block", disable=not progress)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        for _ in pool.map(run, starts):
            bar.update(1)
    bar.close()
    logger.debug(f"🔎 IVF search {n} queries nprobe={params.nprobe}/{index.nlist} k={params.k}")
    return top.arrays(index.ntotal)


def knn_ivf(index: IvfIndex, queries: Vectors, params: Optional[SearchParams] = None,
            threads: int = 1) -> List[List[Neighbor]]:
    idx, dist = knn_ivf_arrays(index, queries, params, threads)
    return to_neighbors(idx, dist)


def save_ivf(index: IvfIndex, path: str) -> None:
    check_sidecar_ids(index.ids)
    ensure_parent(path)
    with open(path, "wb") as f:
        f.write(IVF_HEADER.pack(IVF_MAGIC, IVF_VERSION, index.nlist, index.dim, index.ntotal, index.trained_on))
        f.write(np.ascontiguousarray(index.centroids, dtype="<f4").tobytes())
        f.write(np.ascontiguousarray(index.offsets, dtype="<u8").tobytes())
        f.write(np.ascontiguousarray(index.rows, dtype="<u8").tobytes())
        f.write(np.ascontiguousarray(index.vectors, dtype="<f4").tobytes())
    write_ids(index.ids, path)
    logger.info(f"💾 Saved IVF index ({index.ntotal} rows, {index.nlist} lists) to {path}")


def load_ivf(path: str) -> IvfIndex:
    actual = os.path.getsize(path)
    with open(path, "rb") as f:
        head = f.read(IVF_HEADER.size)
    if len(head) < IVF_HEADER.size:
        raise FormatError(f"{path}: truncated header ({len(head)} of {IVF_HEADER.size} bytes)")
    magic, version, nlist, d, ntotal, trained_on = IVF_HEADER.unpack(head)
    if magic != IVF_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}, expected {IVF_MAGIC!r}")
    if version != IVF_VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    if d == 0 or nlist == 0:
        raise FormatError(f"{path}: empty index header (nlist={nlist}, d={d})")
    sizes = (4 * nlist * d, 8 * (nlist + 1), 8 * ntotal, 4 * ntotal * d)
    expected = IVF_HEADER.size + sum(sizes)
    if actual != expected:
        raise FormatError(f"{path}: expected {expected} bytes for nlist={nlist} d={d} n={ntotal}, found {actual}")

    offset = IVF_HEADER.size
    parts = []
    for dtype, count, size in (("<f4", nlist * d, sizes[0]), ("<u8", nlist + 1, sizes[1]),
                               ("<u8", ntotal, sizes[2]), ("<f4", ntotal * d, sizes[3])):
        parts.append(np.fromfile(path, dtype=dtype, count=count, offset=offset))
        offset += size
    centroids, offsets, rows, vectors = parts
    index = IvfIndex(
        centroids=centroids.reshape(nlist, d).astype(np.float32),
        offsets=offsets.astype(np.int64),
        rows=rows.astype(np.int64),
        vectors=vectors.reshape(ntotal, d).astype(np.float32),
        ids=tuple(read_ids(path, ntotal)),
        trained_on=int(trained_on),
    )
    return index.check()
