"""k-NN mining of candidate translation pairs from two monolingual corpora.

Each source sentence is matched against its k nearest targets; every
neighbour within the distance threshold becomes a candidate.  Output is
sorted by (distance, src_id, tgt_id) and is independent of thread count.
"""
import logging
import time
from typing import Dict, List, Optional, Set, Tuple

import numpy as np

try:  # pragma: no cover
    from ..shared.errors import ValidationError  # type: ignore
    from ..shared.records import CandidatePair, Corpus, EmbeddingMatrix  # type: ignore
    from ..search.exact import NO_NEIGHBOR, SearchParams, knn_exact_arrays  # type: ignore
    from ..search.ivf import IvfIndex, knn_ivf_arrays  # type: ignore
    from .filtering import validate_threshold  # type: ignore
except Exception:
    from shared.errors import ValidationError  # type: ignore
    from shared.records import CandidatePair, Corpus, EmbeddingMatrix  # type: ignore
    from search.exact import NO_NEIGHBOR, SearchParams, knn_exact_arrays  # type: ignore
    from search.ivf import IvfIndex, knn_ivf_arrays  # type: ignore
    from mining.filtering import validate_threshold  # type: ignore

logger = logging.getLogger('Bitext.Mine')


def _check(src: Corpus, es: EmbeddingMatrix, tgt: Corpus, et: EmbeddingMatrix,
           index: Optional[IvfIndex] = None) -> None:
    es.check_aligned(src)
    et.check_aligned(tgt)
    if es.dim != et.dim:
        raise ValidationError(f"dimension mismatch: source d={es.dim}, target d={et.dim}")
    if len(tgt) == 0:
        raise ValidationError("target corpus is empty")
    if index is not None:
        if index.ids != et.ids:
            raise ValidationError("IVF index was not built over these target embeddings")
        if index.dim != es.dim:
            raise ValidationError(f"dimension mismatch: source d={es.dim}, index d={index.dim}")


def _neighbors(queries: EmbeddingMatrix, targets: EmbeddingMatrix, params: SearchParams,
               index: Optional[IvfIndex], threads: int, progress: bool) -> Tuple[np.ndarray, np.ndarray]:
    if index is not None:
        return knn_ivf_arrays(index, queries, params, threads=threads, progress=progress)
    return knn_exact_arrays(queries, targets, params.k, params, threads=threads, progress=progress)


def mine(src: Corpus, es: EmbeddingMatrix, tgt: Corpus, et: EmbeddingMatrix,
         params: Optional[SearchParams] = None, t: float = 0.55, index: Optional[IvfIndex] = None,
         bidirectional: bool = False, threads: int = 1, progress: bool = False) -> List[CandidatePair]:
    params = (params or SearchParams()).validate(index.nlist if index is not None else None)
    t = validate_threshold(t)
    _check(src, es, tgt, et, index)
    start = time.time()
    logger.info(f"⏳ Mining {len(src)} x {len(tgt)} (k={params.k}, t={t}, "
                f"{'ivf nprobe=%d' % params.nprobe if index is not None else 'exact'})")

    idx, dist = _neighbors(es, et, params, index, threads, progress)
    best: Dict[Tuple[str, str], float] = {}
    src_ids, tgt_ids = es.ids, et.ids
    for i in range(idx.shape[0]):
        for j, d in zip(idx[i], dist[i]):
            if j == NO_NEIGHBOR or d > t:
                break
            key = (src_ids[i], tgt_ids[int(j)])
            if key not in best or d < best[key]:
                best[key] = float(d)

    if bidirectional and best:
        back_idx, _ = knn_exact_arrays(et, es, params.k, params, threads=threads)
        backward: Set[Tuple[str, str]] = set()
        for j in range(back_idx.shape[0]):
            for i in back_idx[j]:
                if i != NO_NEIGHBOR:
                    backward.add((src_ids[int(i)], tgt_ids[j]))
        before = len(best)
        best = {k: v for k, v in best.items() if k in backward}
        logger.info(f"🔁 Bidirectional check kept {len(best)}/{before} candidates")

    pairs = [CandidatePair(s, g, d) for (s, g), d in best.items()]
    pairs.sort(key=lambda p: (p.distance, p.src_id, p.tgt_id))
    logger.info(f"✅ Mined {len(pairs)} candidate pairs in {time.time() - start:.2f}s")
    return pairs


def best_matches(src: Corpus, es: EmbeddingMatrix, tgt: Corpus, et: EmbeddingMatrix,
                 index: Optional[IvfIndex] = None, nprobe: int = 32,
                 threads: int = 1) -> Dict[str, Tuple[str, float]]:
    """source id -> (nearest target id, distance)."""
    _check(src, es, tgt, et, index)
    params = SearchParams(k=1, nprobe=min(nprobe, index.nlist) if index is not None else nprobe)
    idx, dist = _neighbors(es, et, params, index, threads, progress=False)
    out = {}
    for i, sid in enumerate(es.ids):
        if idx[i, 0] != NO_NEIGHBOR:
            out[sid] = (et.ids[int(idx[i, 0])], float(dist[i, 0]))
    return out


def predict_bucc(src: Corpus, es: EmbeddingMatrix, tgt: Corpus, et: EmbeddingMatrix, t: float,
                 index: Optional[IvfIndex] = None, threads: int = 1) -> Set[Tuple[str, str]]:
    """At most one (src, nearest tgt) per source, kept when its distance <= t."""
    t = validate_threshold(t)
    matches = best_matches(src, es, tgt, et, index=index, threads=threads)
    return {(s, g) for s, (g, d) in matches.items() if d <= t}


def best_match_pairs(matches: Dict[str, Tuple[str, float]]) -> List[CandidatePair]:
    pairs = [CandidatePair(s, g, d) for s, (g, d) in matches.items()]
    pairs.sort(key=lambda p: (p.distance, p.src_id, p.tgt_id))
    return pairs
