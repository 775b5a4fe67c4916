"""Seeded comparable corpora with planted translation pairs.

Sources are random unit vectors.  The first ``n_planted`` targets are noisy
copies of randomly chosen sources, the rest are independent; both sides are
then shuffled, so the gold alignment is the only record of which pairs are
planted.  Texts are random pseudo-words; a planted target reuses its source's
words, each replaced with probability ``text_noise``.
"""
import logging
import os
from dataclasses import dataclass, replace
from typing import List, NamedTuple

import numpy as np

try:  # pragma: no cover
    from ..shared.errors import ConfigError  # type: ignore
    from ..shared.records import Corpus, EmbeddingMatrix, GoldAlignment, SentenceRecord  # type: ignore
    from ..corpus.io import write_corpus, write_embeddings, write_gold  # type: ignore
except Exception:
    from shared.errors import ConfigError  # type: ignore
    from shared.records import Corpus, EmbeddingMatrix, GoldAlignment, SentenceRecord  # type: ignore
    from corpus.io import write_corpus, write_embeddings, write_gold  # type: ignore

logger = logging.getLogger('Bitext.Eval')

_SYLLABLES = [c + v for c in "bdfgklmnprstvz" for v in "aeiou"]


@dataclass
class SyntheticSpec:
    n_src: int = 10000
    n_tgt: int = 10000
    n_planted: int = 5000
    dim: int = 1024
    noise_sigma: float = 0.1
    seed: int = 42
    text_noise: float = 0.2
    src_lang: str = "xx"
    tgt_lang: str = "yy"
    vocab_size: int = 5000
    min_words: int = 3
    max_words: int = 30

    def __post_init__(self):
        if self.n_src < 0 or self.n_tgt < 0 or self.n_planted < 0:
            raise ConfigError("corpus sizes must be >= 0")
        if self.n_planted > min(self.n_src, self.n_tgt):
            raise ConfigError(f"n_planted={self.n_planted} exceeds min(n_src, n_tgt)={min(self.n_src, self.n_tgt)}")
        if self.dim < 1:
            raise ConfigError(f"dim must be >= 1, got {self.dim}")
        if self.noise_sigma < 0:
            raise ConfigError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        if not 0.0 <= self.text_noise <= 1.0:
            raise ConfigError(f"text_noise must be in [0, 1], got {self.text_noise}")
        if self.src_lang == self.tgt_lang:
            raise ConfigError("source and target languages must differ")
        if self.vocab_size < 1 or not 1 <= self.min_words <= self.max_words:
            raise ConfigError("invalid vocabulary or sentence length settings")


class SyntheticCorpus(NamedTuple):
    src: Corpus
    src_emb: EmbeddingMatrix
    tgt: Corpus
    tgt_emb: EmbeddingMatrix
    gold: GoldAlignment


def tuning_spec(spec: SyntheticSpec, n_planted: int) -> SyntheticSpec:
    """A disjoint, smaller corpus with the same noise model for threshold tuning."""
    if spec.n_planted == 0:
        raise ConfigError("cannot derive a tuning corpus from a spec without planted pairs")
    scale = n_planted / spec.n_planted
    return replace(spec, n_src=max(n_planted, round(spec.n_src * scale)),
                   n_tgt=max(n_planted, round(spec.n_tgt * scale)),
                   n_planted=n_planted, seed=spec.seed + 1)


def _unit_rows(x: np.ndarray) -> np.ndarray:
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def _vocabulary(rng: np.random.Generator, size: int) -> List[str]:
    words, seen = [], set()
    while len(words) < size:
        n = int(rng.integers(1, 4))
        w = "".join(_SYLLABLES[i] for i in rng.integers(0, len(_SYLLABLES), size=n))
        if w not in seen:
            seen.add(w)
            words.append(w)
    return words


def generate_synthetic(spec: SyntheticSpec) -> SyntheticCorpus:
    rng = np.random.default_rng(spec.seed)
    n_src, n_tgt, n_pl, d = spec.n_src, spec.n_tgt, spec.n_planted, spec.dim

    src = _unit_rows(rng.standard_normal((n_src, d))) if n_src else np.zeros((0, d))
    planted = rng.permutation(n_src)[:n_pl]
    tgt = np.empty((n_tgt, d))
    if n_pl:
        if spec.noise_sigma > 0:
            tgt[:n_pl] = _unit_rows(src[planted] + spec.noise_sigma * rng.standard_normal((n_pl, d)))
        else:
            tgt[:n_pl] = src[planted]
    if n_tgt > n_pl:
        tgt[n_pl:] = _unit_rows(rng.standard_normal((n_tgt - n_pl, d)))

    vocab = _vocabulary(rng, spec.vocab_size)
    src_words = [rng.integers(0, spec.vocab_size, size=int(rng.integers(spec.min_words, spec.max_words + 1)))
                 for _ in range(n_src)]
    tgt_words = []
    for j in range(n_tgt):
        if j < n_pl:
            words = src_words[planted[j]].copy()
            swap = rng.random(words.size) < spec.text_noise
            words[swap] = rng.integers(0, spec.vocab_size, size=int(swap.sum()))
        else:
            words = rng.integers(0, spec.vocab_size, size=int(rng.integers(spec.min_words, spec.max_words + 1)))
        tgt_words.append(words)

    # row perm[i] of the unshuffled side lands at position i
    src_perm = rng.permutation(n_src)
    tgt_perm = rng.permutation(n_tgt)
    src_pos = np.argsort(src_perm)
    tgt_pos = np.argsort(tgt_perm)
    src_ids = [f"{spec.src_lang}-{i + 1:07d}" for i in range(n_src)]
    tgt_ids = [f"{spec.tgt_lang}-{i + 1:07d}" for i in range(n_tgt)]

    def corpus(lang, ids, words, perm) -> Corpus:
        return Corpus(lang, tuple(SentenceRecord(ids[i], lang, " ".join(vocab[w] for w in words[perm[i]]))
                                  for i in range(len(ids))))

    gold = frozenset((src_ids[src_pos[planted[j]]], tgt_ids[tgt_pos[j]]) for j in range(n_pl))
    result = SyntheticCorpus(
        src=corpus(spec.src_lang, src_ids, src_words, src_perm),
        src_emb=EmbeddingMatrix.from_rows(src_ids, src[src_perm].astype(np.float32), dim=d),
        tgt=corpus(spec.tgt_lang, tgt_ids, tgt_words, tgt_perm),
        tgt_emb=EmbeddingMatrix.from_rows(tgt_ids, tgt[tgt_perm].astype(np.float32), dim=d),
        gold=GoldAlignment(gold),
    )
    logger.info(f"🧪 Synthetic corpus: {n_src} x {n_tgt}, {n_pl} planted, d={d}, "
                f"sigma={spec.noise_sigma}, seed={spec.seed}")
    return result


def write_synthetic(result: SyntheticCorpus, out_dir: str) -> List[str]:
    """Writes src.tsv, tgt.tsv, src.bmem, tgt.bmem (with .ids sidecars) and gold.tsv."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {name: os.path.join(out_dir, name) for name in
             ("src.tsv", "tgt.tsv", "src.bmem", "tgt.bmem", "gold.tsv")}
    write_corpus(result.src, paths["src.tsv"])
    write_corpus(result.tgt, paths["tgt.tsv"])
    write_embeddings(result.src_emb, paths["src.bmem"])
    write_embeddings(result.tgt_emb, paths["tgt.bmem"])
    write_gold(result.gold, paths["gold.tsv"])
    return list(paths.values())
