"""BUCC-style scoring of predicted pairs and F1-optimal threshold tuning."""
import json
import logging
from dataclasses import asdict, dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Tuple, Union

import numpy as np

try:  # pragma: no cover
    from ..shared.errors import ParseError, ValidationError  # type: ignore
    from ..shared.records import CandidatePair, GoldAlignment  # type: ignore
except Exception:
    from shared.errors import ParseError, ValidationError  # type: ignore
    from shared.records import CandidatePair, GoldAlignment  # type: ignore

logger = logging.getLogger('Bitext.Eval')

Pair = Tuple[str, str]
Candidates = Union[Mapping[str, Tuple[str, float]], Iterable[CandidatePair]]


@dataclass(frozen=True)
class EvalReport:
    precision: float
    recall: float
    f1: float
    true_positives: int
    predicted: int
    gold: int
    threshold: Optional[float] = None

    HEADER = "threshold\tprecision\trecall\tf1\ttrue_positives\tpredicted\tgold"

    def to_tsv(self) -> str:
        t = "NA" if self.threshold is None else f"{self.threshold:.6f}"
        row = f"{t}\t{self.precision:.1f}\t{self.recall:.1f}\t{self.f1:.1f}\t" \
              f"{self.true_positives}\t{self.predicted}\t{self.gold}"
        return self.HEADER + "\n" + row + "\n"

    def to_json(self) -> str:
        data = asdict(self)
        for key in ("precision", "recall", "f1"):
            data[key] = round(data[key], 4)
        return json.dumps(data, sort_keys=True)


def _metrics(tp: int, predicted: int, gold: int) -> Tuple[float, float, float]:
    p = 100.0 * tp / predicted if predicted else 0.0
    r = 100.0 * tp / gold if gold else 0.0
    f = 2.0 * p * r / (p + r) if p + r > 0 else 0.0
    return p, r, f


def _as_pairs(predicted: Iterable) -> set:
    out = set()
    for item in predicted:
        if isinstance(item, CandidatePair):
            out.add((item.src_id, item.tgt_id))
        else:
            s, t = item
            out.add((s, t))
    return out


def score(predicted: Iterable, gold: GoldAlignment, threshold: Optional[float] = None) -> EvalReport:
    """Set semantics: duplicate predictions count once."""
    pred = _as_pairs(predicted)
    tp = len(pred & gold.pairs)
    p, r, f = _metrics(tp, len(pred), len(gold))
    return EvalReport(p, r, f, tp, len(pred), len(gold), threshold)


def best_per_source(candidates: Candidates) -> Dict[str, Tuple[str, float]]:
    """Collapse candidates to the nearest target per source (ties by target id)."""
    if isinstance(candidates, Mapping):
        return dict(candidates)
    best: Dict[str, Tuple[str, float]] = {}
    for p in candidates:
        cur = best.get(p.src_id)
        if cur is None or (p.distance, p.tgt_id) < (cur[1], cur[0]):
            best[p.src_id] = (p.tgt_id, p.distance)
    return best


def tune_threshold(candidates: Candidates, gold: GoldAlignment) -> Tuple[float, EvalReport]:
    """Threshold maximizing F1 over every distinct candidate distance plus 0 and 2.

    Candidates are one best target per source; equal F1 prefers the smaller threshold.
    """
    if len(gold) == 0:
        raise ValidationError("threshold tuning needs at least one gold pair")
    best = best_per_source(candidates)
    items: List[Tuple[float, bool]] = sorted((d, (s, t) in gold.pairs) for s, (t, d) in best.items())
    dists = np.array([d for d, _ in items], dtype=np.float64)
    hits = np.cumsum([h for _, h in items], dtype=np.int64) if items else np.zeros(0, dtype=np.int64)

    grid = sorted(set(dists.tolist()) | {0.0, 2.0})
    best_t, best_report = 0.0, None
    for t in grid:
        n = int(np.searchsorted(dists, t, side="right"))
        tp = int(hits[n - 1]) if n else 0
        p, r, f = _metrics(tp, n, len(gold))
        if best_report is None or f > best_report.f1:
            best_t, best_report = t, EvalReport(p, r, f, tp, n, len(gold), t)
    logger.info(f"🎯 Tuned threshold {best_t:.6f}: P={best_report.precision:.1f} "
                f"R={best_report.recall:.1f} F1={best_report.f1:.1f} over {len(items)} candidates")
    return best_t, best_report


def read_tuned_threshold(path: str) -> float:
    """Threshold chosen by a ``tune`` report (TSV header, row, JSON line).

    The JSON line keeps the unrounded distance; the TSV column is the fallback.
    """
    with open(path, "r", encoding="utf-8") as f:
        lines = [ln.rstrip("\r\n") for ln in f]
    if not lines or lines[0] != EvalReport.HEADER:
        raise ParseError("not a tune report, expected the report header", path, 1)
    if len(lines) < 2:
        raise ParseError("report has no result row", path, 2)
    value = lines[1].split("\t")[0]
    if len(lines) > 2 and lines[2]:
        try:
            value = json.loads(lines[2]).get("threshold")
        except (ValueError, AttributeError):
            raise ParseError("bad JSON result line", path, 3) from None
    if value is None or value == "NA":
        raise ParseError("report carries no threshold", path, 2)
    try:
        t = float(value)
    except (TypeError, ValueError):
        raise ParseError(f"bad threshold {value!r}", path, 2) from None
    if not 0.0 <= t <= 2.0:
        raise ParseError(f"threshold {t} outside [0, 2]", path, 2)
    logger.info(f"📥 Tuned threshold {t:.6f} from {path}")
    return t
