import logging
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import numpy as np

try:  # pragma: no cover
    from ..shared.distance import row_distances  # type: ignore
    from ..shared.errors import ValidationError  # type: ignore
    from ..shared.records import CandidatePair, Corpus, EmbeddingMatrix, PAIR_DECIMALS  # type: ignore
except Exception:
    from shared.distance import row_distances  # type: ignore
    from shared.errors import ValidationError  # type: ignore
    from shared.records import CandidatePair, Corpus, EmbeddingMatrix, PAIR_DECIMALS  # type: ignore

logger = logging.getLogger('Bitext.Mine')

DEFAULT_THRESHOLD = 0.55
MAX_DISTANCE = 2.0


def validate_threshold(t: float) -> float:
    try:
        t = float(t)
    except (TypeError, ValueError):
        raise ValidationError(f"threshold must be a number, got {t!r}") from None
    if not 0.0 <= t <= MAX_DISTANCE:
        raise ValidationError(f"threshold {t} outside [0, {MAX_DISTANCE}]")
    return t


def score_bitext(src: Corpus, tgt: Corpus, es: EmbeddingMatrix, et: EmbeddingMatrix) -> List[CandidatePair]:
    """Distance of every line-aligned pair, in corpus order."""
    if len(src) != len(tgt):
        raise ValidationError(f"bitext sides differ in length: {len(src)} vs {len(tgt)}")
    es.check_aligned(src)
    et.check_aligned(tgt)
    if es.dim != et.dim:
        raise ValidationError(f"dimension mismatch: {es.dim} vs {et.dim}")
    dists = row_distances(es.rows, et.rows) if len(src) else np.empty(0)
    return [CandidatePair(s, t, float(d)) for s, t, d in zip(src.ids(), tgt.ids(), dists)]


def filter_by_threshold(pairs: Iterable[CandidatePair], t: float) -> List[CandidatePair]:
    """Pairs with distance <= t, original order kept."""
    t = validate_threshold(t)
    return [p for p in pairs if p.distance <= t]


def threshold_grid(start: float, stop: float, step: float) -> List[float]:
    """Inclusive grid start, start+step, ..., stop (rounded to pair-file precision)."""
    if step <= 0:
        raise ValidationError(f"step must be > 0, got {step}")
    if stop < start:
        raise ValidationError(f"empty grid: {start} > {stop}")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [validate_threshold(round(start + i * step, PAIR_DECIMALS)) for i in range(count)]


@dataclass(frozen=True)
class SweepCurve:
    points: Tuple[Tuple[float, int], ...]
    total: int

    def counts(self) -> List[int]:
        return [c for _, c in self.points]

    def to_tsv(self) -> str:
        lines = ["threshold\tpairs\tpercent"]
        for t, c in self.points:
            pct = 100.0 * c / self.total if self.total else 0.0
            lines.append(f"{t:.{PAIR_DECIMALS}f}\t{c}\t{pct:.1f}")
        return "\n".join(lines) + "\n"


def sweep(pairs: Sequence[CandidatePair], thresholds: Sequence[float]) -> SweepCurve:
    """Number of pairs with distance <= t for each t; thresholds must be ascending."""
    ts = [validate_threshold(t) for t in thresholds]
    if any(b < a for a, b in zip(ts, ts[1:])):
        raise ValidationError("sweep thresholds must be sorted ascending")
    dists = np.sort(np.fromiter((p.distance for p in pairs), dtype=np.float64, count=len(pairs)))
    counts = np.searchsorted(dists, np.asarray(ts, dtype=np.float64), side="right")
    curve = SweepCurve(tuple((t, int(c)) for t, c in zip(ts, counts)), len(pairs))
    logger.debug(f"📊 sweep over {len(pairs)} pairs at {len(ts)} thresholds")
    return curve
