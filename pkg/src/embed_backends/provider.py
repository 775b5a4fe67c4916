import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from tqdm import tqdm

try:  # pragma: no cover
    from ..shared.distance import cosine_distance  # type: ignore  # noqa: F401  (re-exported)
    from ..shared.errors import ConfigError  # type: ignore
    from ..shared.records import Corpus, EmbeddingMatrix  # type: ignore
    from ..bpe.model import BpeModel, apply_bpe, read_bpe  # type: ignore
    from .hashed import DEFAULT_DIM, DEFAULT_SEED, EMPTY_TOKEN, HashedBaselineEncoder  # type: ignore
    from .file_backed import FileBackedEncoder  # type: ignore
except Exception:
    from shared.distance import cosine_distance  # type: ignore  # noqa: F401
    from shared.errors import ConfigError  # type: ignore
    from shared.records import Corpus, EmbeddingMatrix  # type: ignore
    from bpe.model import BpeModel, apply_bpe, read_bpe  # type: ignore
    from embed_backends.hashed import DEFAULT_DIM, DEFAULT_SEED, EMPTY_TOKEN, HashedBaselineEncoder  # type: ignore
    from embed_backends.file_backed import FileBackedEncoder  # type: ignore

logger = logging.getLogger('Bitext.Embed')

EmbeddingProvider = Union[HashedBaselineEncoder, FileBackedEncoder]

# Row blocks are fixed-size so the thread count never changes the result
EMBED_BLOCK_ROWS = 1024


@dataclass
class EmbedConfig:
    mode: str = "hashed"            # hashed | file
    dim: int = DEFAULT_DIM
    seed: int = DEFAULT_SEED
    bpe_path: Optional[str] = None
    source_path: Optional[str] = None  # file mode: precomputed .bmem
    lowercase: bool = False


def make_provider(cfg: EmbedConfig, bpe: Optional[BpeModel] = None) -> EmbeddingProvider:
    if cfg.mode in ("hashed", "hashed_baseline"):
        if bpe is None and cfg.bpe_path:
            bpe = read_bpe(cfg.bpe_path)
        logger.info(f"🧪 Using hashed baseline encoder (dim={cfg.dim}, seed={cfg.seed}, "
                    f"bpe={'yes' if bpe else 'no'})")
        return HashedBaselineEncoder(cfg.dim, cfg.seed, bpe, cfg.lowercase)
    elif cfg.mode in ("file", "file_backed"):
        if not cfg.source_path:
            raise ConfigError("file-backed embeddings need a source path")
        return FileBackedEncoder(cfg.source_path)
    else:
        raise ConfigError(f"Unknown embedding mode: {cfg.mode}")


def embed_sentence(p: EmbeddingProvider, tokens: Sequence[str]) -> np.ndarray:
    return p.embed_sentence(tokens)


def embed_corpus(p: EmbeddingProvider, c: Corpus, bpe: Optional[BpeModel] = None,
                 threads: int = 1, progress: bool = False) -> EmbeddingMatrix:
    """Row i embeds record i; sentences without tokens get the reserved empty token."""
    if isinstance(p, FileBackedEncoder):
        return p.embed_corpus(c)

    texts = c.texts()
    rows = np.empty((len(texts), p.dim), dtype=np.float32)

    def tokens_of(text: str):
        toks = apply_bpe(bpe, text, lowercase=p.lowercase) if bpe is not None else p.tokenize(text)
        return toks or [EMPTY_TOKEN]

    def run_block(start: int) -> int:
        stop = min(start + EMBED_BLOCK_ROWS, len(texts))
        for i in range(start, stop):
            rows[i] = p.embed_sentence(tokens_of(texts[i]))
        return stop - start

    starts = range(0, len(texts), EMBED_BLOCK_ROWS)
    bar = tqdm(total=len(texts), desc=f"embed {c.lang}", unit="sent", disable=not progress)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        for done in pool.map(run_block, starts):
            bar.update(done)
    bar.close()
    logger.info(f"✅ Embedded {len(texts)} {c.lang} sentences (dim={p.dim})")
    return EmbeddingMatrix.from_rows(c.ids(), rows, dim=p.dim)
