"""Joint byte-pair-encoding vocabulary shared across languages.

Words are whitespace tokens; each starts as its characters with the
end-of-word marker glued to the last one.  Training repeatedly merges the
most frequent adjacent pair (ties: smallest ``(left, right)``) until the
merge budget is spent or no pair occurs at least twice.
"""
import heapq
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Sequence, Set, Tuple

try:  # pragma: no cover
    from ..shared.errors import ParseError, ValidationError  # type: ignore
    from ..shared.records import Corpus  # type: ignore
except Exception:
    from shared.errors import ParseError, ValidationError  # type: ignore
    from shared.records import Corpus  # type: ignore

logger = logging.getLogger('Bitext.BPE')

END_OF_WORD = "</w>"
DEFAULT_NUM_MERGES = 20000
MIN_PAIR_FREQ = 2
MODEL_MAGIC = "#bpe"
MODEL_VERSION = "v1"

Pair = Tuple[str, str]


@dataclass(frozen=True)
class BpeModel:
    merges: Tuple[Pair, ...]
    num_merges: int = DEFAULT_NUM_MERGES     # requested budget; len(merges) may be smaller
    end_of_word: str = END_OF_WORD
    _ranks: Dict[Pair, int] = field(init=False, repr=False, compare=False)
    _cache: Dict[str, Tuple[str, ...]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        ranks: Dict[Pair, int] = {}
        for i, pair in enumerate(self.merges):
            if pair in ranks:
                raise ValidationError(f"duplicate merge {pair} at position {i}")
            if builds_false_word_end(pair, self.end_of_word):
                raise ValidationError(f"merge {pair} at position {i} ends a symbol with {self.end_of_word!r} mid-word")
            ranks[pair] = i
        object.__setattr__(self, "_ranks", ranks)
        object.__setattr__(self, "_cache", {})

    def encode_word(self, word: str) -> Tuple[str, ...]:
        hit = self._cache.get(word)
        if hit is not None:
            return hit
        symbols = list(word)
        symbols[-1] += self.end_of_word
        while len(symbols) > 1:
            best_rank, best = None, None
            for pair in zip(symbols, symbols[1:]):
                r = self._ranks.get(pair)
                if r is not None and (best_rank is None or r < best_rank):
                    best_rank, best = r, pair
            if best is None:
                break
            symbols = merge_symbols(symbols, best)
        out = tuple(symbols)
        self._cache[word] = out
        return out


def builds_false_word_end(pair: Pair, end_of_word: str = END_OF_WORD) -> bool:
    """True if merging ``pair`` would end a mid-word symbol with the end-of-word marker."""
    left, right = pair
    return (left + right).endswith(end_of_word) and not right.endswith(end_of_word)


def merge_symbols(symbols: Sequence[str], pair: Pair) -> List[str]:
    """Replace non-overlapping occurrences of ``pair``, scanning left to right."""
    left, right = pair
    out: List[str] = []
    i = 0
    n = len(symbols)
    while i < n:
        if i < n - 1 and symbols[i] == left and symbols[i + 1] == right:
            out.append(left + right)
            i += 2
        else:
            out.append(symbols[i])
            i += 1
    return out


def word_counts(corpora: Iterable[Corpus], lowercase: bool = False) -> Counter:
    counts: Counter = Counter()
    for corpus in corpora:
        for rec in corpus:
            text = rec.text.lower() if lowercase else rec.text
            counts.update(text.split())
    return counts


def _pairs(symbols: Sequence[str]) -> Counter:
    return Counter(zip(symbols, symbols[1:]))


def learn_bpe(corpora: Iterable[Corpus], num_merges: int = DEFAULT_NUM_MERGES,
              lowercase: bool = False) -> BpeModel:
    if num_merges < 1:
        raise ValidationError(f"num_merges must be >= 1, got {num_merges}")
    counts = word_counts(corpora, lowercase)
    if not counts:
        raise ValidationError("cannot learn BPE from an empty pooled corpus")

    vocab = sorted(counts)
    freqs = [counts[w] for w in vocab]
    words: List[List[str]] = []
    for w in vocab:
        symbols = list(w)
        symbols[-1] += END_OF_WORD
        words.append(symbols)

    stats: Dict[Pair, int] = defaultdict(int)
    where: Dict[Pair, Set[int]] = defaultdict(set)
    for i, symbols in enumerate(words):
        for pair, c in _pairs(symbols).items():
            stats[pair] += c * freqs[i]
            where[pair].add(i)

    # lazy max-heap: stale entries are skipped when their count no longer matches
    heap = [(-c, pair) for pair, c in stats.items()]
    heapq.heapify(heap)

    merges: List[Pair] = []
    merged: Set[Pair] = set()
    while len(merges) < num_merges and heap:
        neg, pair = heapq.heappop(heap)
        if stats.get(pair, 0) != -neg:
            continue
        if -neg < MIN_PAIR_FREQ:
            break
        if builds_false_word_end(pair):
            continue
        if pair in merged:
            # the same symbol string was rebuilt by another merge route
            continue
        merges.append(pair)
        merged.add(pair)
        touched: Dict[Pair, None] = {}
        for i in sorted(where.pop(pair)):
            old = words[i]
            new = merge_symbols(old, pair)
            f = freqs[i]
            for p, c in _pairs(old).items():
                stats[p] -= c * f
                where[p].discard(i)
                touched[p] = None
            for p, c in _pairs(new).items():
                stats[p] += c * f
                where[p].add(i)
                touched[p] = None
            words[i] = new
        for p in touched:
            c = stats.get(p, 0)
            if c <= 0:
                stats.pop(p, None)
                where.pop(p, None)
            else:
                heapq.heappush(heap, (-c, p))
        stats.pop(pair, None)

    logger.info(f"✅ Learned {len(merges)} BPE merges (budget {num_merges}) over {len(vocab)} word types")
    return BpeModel(tuple(merges), num_merges)


def apply_bpe(model: BpeModel, text: str, lowercase: bool = False) -> List[str]:
    if lowercase:
        text = text.lower()
    tokens: List[str] = []
    for word in text.split():
        tokens.extend(model.encode_word(word))
    return tokens


def detokenize(tokens: Iterable[str], end_of_word: str = END_OF_WORD) -> str:
    # the marker is stripped only as a token suffix; words may contain its text
    cut = len(end_of_word)
    parts: List[str] = []
    for tok in tokens:
        parts.append(tok[:-cut] + " " if tok.endswith(end_of_word) else tok)
    return "".join(parts).strip()


def write_bpe(model: BpeModel, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"{MODEL_MAGIC} {MODEL_VERSION} {model.num_merges}\n")
        for left, right in model.merges:
            f.write(f"{left} {right}\n")


def read_bpe(path: str) -> BpeModel:
    with open(path, "r", encoding="utf-8", newline="\n") as f:
        lines = [ln.rstrip("\n") for ln in f]
    if not lines:
        raise ParseError("empty BPE model file", path, 1)
    head = lines[0].split(" ")
    if len(head) != 3 or head[0] != MODEL_MAGIC or head[1] != MODEL_VERSION or not head[2].isdigit():
        raise ParseError(f"bad header {lines[0]!r}, expected '{MODEL_MAGIC} {MODEL_VERSION} <num_merges>'", path, 1)
    merges: List[Pair] = []
    for line_no, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        parts = line.split(" ")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise ParseError("expected 'left right'", path, line_no)
        merges.append((parts[0], parts[1]))
    num_merges = int(head[2])
    if len(merges) > num_merges:
        raise ParseError(f"{len(merges)} merges exceed declared budget {num_merges}", path, 1)
    return BpeModel(tuple(merges), num_merges)
