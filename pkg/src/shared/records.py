from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, NamedTuple, Sequence, Tuple

import numpy as np

try:  # pragma: no cover
    from .errors import ValidationError  # type: ignore
except Exception:
    from shared.errors import ValidationError  # type: ignore

# Maximum tolerated deviation of a stored row norm from 1.0
NORM_TOLERANCE = 1e-4
# Distances are printed with this many decimals in every pair file
PAIR_DECIMALS = 6


@dataclass(frozen=True)
class SentenceRecord:
    id: str
    lang: str
    text: str

    def __post_init__(self):
        if not self.id:
            raise ValidationError("sentence id must be non-empty")


@dataclass(frozen=True)
class Corpus:
    lang: str
    records: Tuple[SentenceRecord, ...] = ()

    def __post_init__(self):
        seen = set()
        for rec in self.records:
            if rec.lang != self.lang:
                raise ValidationError(f"record {rec.id!r} has lang {rec.lang!r}, corpus is {self.lang!r}")
            if rec.id in seen:
                raise ValidationError(f"duplicate sentence id {rec.id!r}")
            seen.add(rec.id)

    @classmethod
    def from_texts(cls, lang: str, texts: Iterable[str], prefix: str = "") -> "Corpus":
        pfx = prefix or f"{lang}-"
        return cls(lang, tuple(SentenceRecord(f"{pfx}{i + 1:06d}", lang, t) for i, t in enumerate(texts)))

    @property
    def size(self) -> int:
        return len(self.records)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[SentenceRecord]:
        return iter(self.records)

    def ids(self) -> List[str]:
        return [r.id for r in self.records]

    def texts(self) -> List[str]:
        return [r.text for r in self.records]

    def by_id(self) -> Dict[str, SentenceRecord]:
        return {r.id: r for r in self.records}

    def select(self, ids: Iterable[str]) -> "Corpus":
        """Sub-corpus in the order of ``ids``; unknown ids are a validation error."""
        lookup = self.by_id()
        try:
            return Corpus(self.lang, tuple(lookup[i] for i in ids))
        except KeyError as e:
            raise ValidationError(f"id {e.args[0]!r} not in {self.lang} corpus") from None


@dataclass(frozen=True)
class GoldAlignment:
    pairs: FrozenSet[Tuple[str, str]] = frozenset()
    duplicate_count: int = 0

    def __len__(self) -> int:
        return len(self.pairs)

    def __contains__(self, pair) -> bool:
        return pair in self.pairs

    def check_against(self, src: Corpus, tgt: Corpus) -> None:
        src_ids, tgt_ids = set(src.ids()), set(tgt.ids())
        for s, t in self.pairs:
            if s not in src_ids or t not in tgt_ids:
                raise ValidationError(f"gold pair ({s}, {t}) references an unknown id")


class CandidatePair(NamedTuple):
    src_id: str
    tgt_id: str
    distance: float


def pair_sort_key(p: CandidatePair) -> Tuple[float, str, str]:
    # Rounded so that a written and re-read pair file sorts the same way
    return (round(p.distance, PAIR_DECIMALS), p.src_id, p.tgt_id)


@dataclass(frozen=True)
class EmbeddingMatrix:
    """n x d float32 matrix of unit rows aligned to sentence ids."""
    ids: Tuple[str, ...]
    rows: np.ndarray = field(repr=False)

    @classmethod
    def from_rows(cls, ids: Sequence[str], rows, dim: int = 0) -> "EmbeddingMatrix":
        ids = tuple(ids)
        arr = np.array(rows, dtype=np.float32, copy=True)
        if arr.size == 0:
            arr = arr.reshape(len(ids), dim if arr.ndim < 2 else arr.shape[1])
        if arr.ndim != 2:
            raise ValidationError(f"embedding rows must be 2-D, got shape {arr.shape}")
        if arr.shape[1] == 0:
            raise ValidationError("embedding dimension must be >= 1")
        if arr.shape[0] != len(ids):
            raise ValidationError(f"{arr.shape[0]} rows but {len(ids)} ids")
        if len(set(ids)) != len(ids):
            raise ValidationError("embedding ids must be unique")
        if not np.all(np.isfinite(arr)):
            bad = int(np.argmin(np.isfinite(arr).all(axis=1)))
            raise ValidationError(f"non-finite embedding values for id {ids[bad]!r}")
        if len(ids):
            norms = np.linalg.norm(arr.astype(np.float64), axis=1)
            if np.any(norms == 0.0):
                raise ValidationError(f"zero vector for id {ids[int(np.argmin(norms))]!r}")
            if np.any(np.abs(norms - 1.0) > NORM_TOLERANCE):
                arr = (arr.astype(np.float64) / norms[:, None]).astype(np.float32)
        arr.flags.writeable = False
        return cls(ids, arr)

    @property
    def dim(self) -> int:
        return int(self.rows.shape[1])

    def __len__(self) -> int:
        return len(self.ids)

    def index_of(self) -> Dict[str, int]:
        return {sid: i for i, sid in enumerate(self.ids)}

    def select(self, ids: Iterable[str]) -> "EmbeddingMatrix":
        pos = self.index_of()
        ids = list(ids)
        try:
            idx = np.fromiter((pos[i] for i in ids), dtype=np.int64, count=len(ids))
        except KeyError as e:
            raise ValidationError(f"id {e.args[0]!r} has no embedding") from None
        sub = self.rows[idx]
        sub.flags.writeable = False
        return EmbeddingMatrix(tuple(ids), sub)

    def check_aligned(self, corpus: Corpus) -> None:
        if list(self.ids) != corpus.ids():
            raise ValidationError(
                f"embeddings ({len(self)} rows) are not id-aligned with the {corpus.lang} corpus ({corpus.size} records)")
