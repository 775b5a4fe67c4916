"""Sentence-level language identification.

Character 1..4-gram multinomial naive Bayes with additive smoothing, trained
from per-language seed text.  Priors are uniform, so two languages with the
same profile score identically and the lexicographically smallest tag wins.
"""
import glob
import logging
import os
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Tuple

import numpy as np

try:  # pragma: no cover
    from ..shared.errors import ValidationError  # type: ignore
except Exception:
    from shared.errors import ValidationError  # type: ignore

logger = logging.getLogger('Bitext.LID')

NGRAM_ORDERS = (1, 2, 3, 4)
DEFAULT_SMOOTHING = 0.1
UNDETERMINED = "und"
BUNDLED_SEED_DIR = os.path.normpath(os.path.join(os.path.dirname(__file__), "..", "..", "data", "lid"))


def char_ngrams(text: str) -> Counter:
    """Counts of 1..4-grams over each lower-cased word padded with spaces."""
    grams: Counter = Counter()
    for word in text.lower().split():
        w = f" {word} "
        size = len(w)
        for n in NGRAM_ORDERS:
            for i in range(size - n + 1):
                grams[w[i:i + n]] += 1
    return grams


@dataclass(frozen=True)
class LidModel:
    languages: Tuple[str, ...]
    vocab: Dict[str, int] = field(repr=False)
    log_probs: np.ndarray = field(repr=False)  # (languages, vocab) log P(gram | lang)
    smoothing: float = DEFAULT_SMOOTHING

    def profile(self, lang: str) -> Dict[str, float]:
        row = self.log_probs[self.languages.index(lang)]
        return {g: float(row[j]) for g, j in self.vocab.items()}


def train_lid(samples: Iterable[Tuple[str, str]], smoothing: float = DEFAULT_SMOOTHING) -> LidModel:
    if smoothing <= 0:
        raise ValidationError("LID smoothing must be > 0")
    per_lang: Dict[str, Counter] = {}
    for lang, text in samples:
        per_lang.setdefault(lang, Counter()).update(char_ngrams(text))
    if len(per_lang) < 2:
        raise ValidationError(f"LID needs at least 2 languages, got {sorted(per_lang)}")
    for lang, counts in per_lang.items():
        if not counts:
            raise ValidationError(f"LID profile for {lang!r} is empty")

    languages = tuple(sorted(per_lang))
    vocab = {g: j for j, g in enumerate(sorted(set().union(*per_lang.values())))}
    counts = np.zeros((len(languages), len(vocab)), dtype=np.float64)
    for i, lang in enumerate(languages):
        for g, c in per_lang[lang].items():
            counts[i, vocab[g]] = c
    totals = counts.sum(axis=1, keepdims=True)
    log_probs = np.log(counts + smoothing) - np.log(totals + smoothing * len(vocab))
    log_probs.flags.writeable = False
    logger.info(f"✅ LID trained: languages={','.join(languages)} ngrams={len(vocab)}")
    return LidModel(languages, vocab, log_probs, smoothing)


def posteriors(model: LidModel, text: str) -> np.ndarray:
    """Normalized posterior over ``model.languages``; n-grams unseen in training are ignored."""
    grams = char_ngrams(text)
    cols, weights = [], []
    for g, c in grams.items():
        j = model.vocab.get(g)
        if j is not None:
            cols.append(j)
            weights.append(c)
    if not cols:
        return np.full(len(model.languages), 1.0 / len(model.languages))
    scores = model.log_probs[:, cols] @ np.asarray(weights, dtype=np.float64)
    scores -= scores.max()
    p = np.exp(scores)
    return p / p.sum()


def has_evidence(model: LidModel, text: str) -> bool:
    """True if some known n-gram other than bare padding occurs in ``text``."""
    return any(g.strip() and g in model.vocab for g in char_ngrams(text))


def classify(model: LidModel, text: str) -> Tuple[str, float]:
    if not text.strip() or not has_evidence(model, text):
        return UNDETERMINED, 0.0
    post = posteriors(model, text)
    best = int(np.argmax(post))  # first maximum = smallest tag, languages are sorted
    return model.languages[best], float(post[best])


def read_seed_file(path: str) -> List[str]:
    """One sentence per line; ``id<TAB>text`` corpus lines are accepted too."""
    lines = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if "\t" in line:
                line = line.split("\t", 1)[1]
            if line.strip():
                lines.append(line)
    return lines


def load_seed_samples(paths: Dict[str, str]) -> List[Tuple[str, str]]:
    samples = []
    for lang in sorted(paths):
        samples.extend((lang, s) for s in read_seed_file(paths[lang]))
    return samples


def bundled_seed_paths() -> Dict[str, str]:
    return {os.path.splitext(os.path.basename(p))[0]: p
            for p in sorted(glob.glob(os.path.join(BUNDLED_SEED_DIR, "*.txt")))}


def parse_lid_specs(specs: Iterable[str]) -> Dict[str, str]:
    """Parse CLI ``tag=path`` items."""
    out = {}
    for spec in specs:
        tag, sep, path = spec.partition("=")
        if not sep or not tag or not path:
            raise ValidationError(f"--lid-train expects <tag>=<path>, got {spec!r}")
        out[tag] = path
    return out
