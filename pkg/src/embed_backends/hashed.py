"""Deterministic baseline encoder used for tests and synthetic runs.

Every subword maps to a fixed pseudo-random vector in [-1, 1]^d derived from
a seeded 64-bit hash of its bytes and the coordinate index; a sentence is the
coordinate-wise max over its distinct token vectors, centered by the expected
maximum and L2-normalized.  Distances are not meaningful across languages.
"""
import hashlib
import logging
import threading
from typing import Dict, Optional, Sequence

import numpy as np

try:  # pragma: no cover
    from ..shared.errors import ValidationError  # type: ignore
    from ..bpe.model import BpeModel, apply_bpe  # type: ignore
except Exception:
    from shared.errors import ValidationError  # type: ignore
    from bpe.model import BpeModel, apply_bpe  # type: ignore

logger = logging.getLogger('Bitext.Embed')

EMPTY_TOKEN = "⟨empty⟩"
DEFAULT_DIM = 1024
DEFAULT_SEED = 42

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_U64_MAX = 2 ** 64 - 1


def _splitmix64(z: np.ndarray) -> np.ndarray:
    z = z + _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


class HashedBaselineEncoder:
    mode = "hashed_baseline"

    def __init__(self, dim: int = DEFAULT_DIM, seed: int = DEFAULT_SEED,
                 bpe: Optional[BpeModel] = None, lowercase: bool = False):
        if dim < 1:
            raise ValidationError(f"embedding dimension must be >= 1, got {dim}")
        if not 0 <= seed <= _U64_MAX:
            raise ValidationError(f"seed must fit in an unsigned 64-bit integer, got {seed}")
        self.dim = int(dim)
        self.seed = int(seed)
        self.bpe = bpe
        self.lowercase = lowercase
        self._key = self.seed.to_bytes(8, "little")
        self._coords = np.arange(self.dim, dtype=np.uint64) * _GOLDEN
        self._cache: Dict[str, np.ndarray] = {}
        self._lock = threading.Lock()

    def token_hash(self, token: str) -> int:
        digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8, key=self._key).digest()
        return int.from_bytes(digest, "little")

    def token_vector(self, token: str) -> np.ndarray:
        vec = self._cache.get(token)
        if vec is None:
            z = _splitmix64(np.uint64(self.token_hash(token)) ^ self._coords)
            # top 53 bits -> uniform [0, 1) -> [-1, 1)
            vec = (z >> np.uint64(11)).astype(np.float64) * (2.0 ** -53) * 2.0 - 1.0
            vec.flags.writeable = False
            with self._lock:
                self._cache.setdefault(token, vec)
        return vec

    def tokenize(self, text: str) -> Sequence[str]:
        if self.bpe is not None:
            return apply_bpe(self.bpe, text, lowercase=self.lowercase)
        return (text.lower() if self.lowercase else text).split()

    def embed_sentence(self, tokens: Sequence[str]) -> np.ndarray:
        if not tokens:
            raise ValidationError("cannot embed an empty token sequence")
        distinct = sorted(set(tokens))
        pooled = np.max(np.stack([self.token_vector(t) for t in distinct]), axis=0)
        # E[max of n iid U(-1, 1)] = (n - 1) / (n + 1); centering keeps unrelated sentences near-orthogonal
        n = len(distinct)
        pooled = pooled - (n - 1) / (n + 1)
        norm = np.linalg.norm(pooled)
        if norm == 0.0:
            raise ValidationError("max-pooled vector has zero norm")
        return (pooled / norm).astype(np.float32)
