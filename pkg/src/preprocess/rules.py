"""Pre-filtering applied before distance computation.

Stages always run in the order commas -> length -> LID and the
:class:`StageReport` records the survivors after each one.
"""
import logging
from dataclasses import dataclass, astuple
from typing import List, Optional, Tuple

try:  # pragma: no cover
    from ..shared.errors import ConfigError, ValidationError  # type: ignore
    from ..shared.records import Corpus, SentenceRecord  # type: ignore
    from .lid import LidModel, classify  # type: ignore
except Exception:
    from shared.errors import ConfigError, ValidationError  # type: ignore
    from shared.records import Corpus, SentenceRecord  # type: ignore
    from preprocess.lid import LidModel, classify  # type: ignore

logger = logging.getLogger('Bitext.Preprocess')

# ASCII, full-width and ideographic commas
COMMA_CHARS = frozenset(",，、")


@dataclass
class PreprocessConfig:
    max_commas: int = 3          # drop sentences with more commas than this
    max_words: int = 50          # keep sentences with fewer words than this
    lid_enabled: bool = True
    lid_min_confidence: float = 0.5

    def validate(self) -> "PreprocessConfig":
        if self.max_commas < 0:
            raise ConfigError(f"max_commas must be >= 0, got {self.max_commas}")
        if self.max_words < 1:
            raise ConfigError(f"max_words must be >= 1, got {self.max_words}")
        if not 0.0 <= self.lid_min_confidence <= 1.0:
            raise ConfigError(f"lid_min_confidence must be in [0, 1], got {self.lid_min_confidence}")
        return self


@dataclass(frozen=True)
class StageReport:
    input_count: int = 0
    after_commas: int = 0
    after_length: int = 0
    after_lid: int = 0

    HEADER = "input\tafter_commas\tafter_length\tafter_lid"

    def as_tuple(self) -> Tuple[int, int, int, int]:
        return astuple(self)

    def to_tsv(self) -> str:
        return self.HEADER + "\n" + "\t".join(str(v) for v in self.as_tuple()) + "\n"


def count_commas(text: str) -> int:
    return sum(1 for ch in text if ch in COMMA_CHARS)


def count_words(text: str) -> int:
    return len(text.split())


def passes_commas(text: str, cfg: PreprocessConfig) -> bool:
    return count_commas(text) <= cfg.max_commas


def passes_length(text: str, cfg: PreprocessConfig) -> bool:
    return count_words(text) < cfg.max_words


def passes_lid(text: str, lang: str, cfg: PreprocessConfig, model: Optional[LidModel]) -> bool:
    if not cfg.lid_enabled:
        return True
    guess, conf = classify(model, text)
    return guess == lang and conf >= cfg.lid_min_confidence


def _check(cfg: PreprocessConfig, model: Optional[LidModel]) -> None:
    cfg.validate()
    if cfg.lid_enabled and model is None:
        raise ConfigError("LID is enabled but no LID model was given")


def preprocess_corpus(c: Corpus, cfg: PreprocessConfig,
                      model: Optional[LidModel] = None) -> Tuple[Corpus, StageReport]:
    _check(cfg, model)
    stage1 = [r for r in c if passes_commas(r.text, cfg)]
    stage2 = [r for r in stage1 if passes_length(r.text, cfg)]
    stage3 = [r for r in stage2 if passes_lid(r.text, c.lang, cfg, model)]
    report = StageReport(c.size, len(stage1), len(stage2), len(stage3))
    logger.info(f"📊 Preprocess {c.lang}: " + " → ".join(str(v) for v in report.as_tuple()))
    return Corpus(c.lang, tuple(stage3)), report


def preprocess_bitext(src: Corpus, tgt: Corpus, cfg: PreprocessConfig,
                      model: Optional[LidModel] = None
                      ) -> Tuple[List[Tuple[SentenceRecord, SentenceRecord]], StageReport]:
    """A line-aligned pair survives a stage only if both sides do."""
    if src.size != tgt.size:
        raise ValidationError(f"bitext sides differ in length: {src.size} vs {tgt.size}")
    _check(cfg, model)
    pairs = list(zip(src.records, tgt.records))
    stage1 = [(s, t) for s, t in pairs if passes_commas(s.text, cfg) and passes_commas(t.text, cfg)]
    stage2 = [(s, t) for s, t in stage1 if passes_length(s.text, cfg) and passes_length(t.text, cfg)]
    stage3 = [(s, t) for s, t in stage2
              if passes_lid(s.text, src.lang, cfg, model) and passes_lid(t.text, tgt.lang, cfg, model)]
    report = StageReport(len(pairs), len(stage1), len(stage2), len(stage3))
    logger.info(f"📊 Preprocess {src.lang}-{tgt.lang} bitext: " + " → ".join(str(v) for v in report.as_tuple()))
    return stage3, report
