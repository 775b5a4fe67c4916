from collections import Counter
from dataclasses import dataclass
from typing import Dict, Mapping

try:  # pragma: no cover
    from ..shared.records import Corpus  # type: ignore
    from ..preprocess.rules import count_words  # type: ignore
except Exception:
    from shared.records import Corpus  # type: ignore
    from preprocess.rules import count_words  # type: ignore


@dataclass(frozen=True)
class LengthHistogram:
    bins: Dict[int, int]
    mean_length: float
    total: int
    empty: bool = False   # mean_length is meaningless when set

    def to_tsv(self) -> str:
        lines = ["length\tsentences"]
        lines += [f"{n}\t{c}" for n, c in sorted(self.bins.items())]
        return "\n".join(lines) + "\n"


def length_histogram(c: Corpus) -> LengthHistogram:
    counts = Counter(count_words(text) for text in c.texts())
    total = sum(counts.values())
    if total == 0:
        return LengthHistogram({}, 0.0, 0, empty=True)
    mean = sum(n * k for n, k in counts.items()) / total
    return LengthHistogram(dict(counts), mean, total)


def histogram_table(hists: Mapping[str, LengthHistogram]) -> str:
    """Side-by-side histograms, one column per corpus, with a mean row at the end."""
    names = list(hists)
    lengths = sorted(set().union(*(h.bins for h in hists.values())))
    lines = ["length\t" + "\t".join(names)]
    for n in lengths:
        lines.append(f"{n}\t" + "\t".join(str(hists[name].bins.get(n, 0)) for name in names))
    lines.append("mean\t" + "\t".join("NA" if hists[name].empty else f"{hists[name].mean_length:.2f}"
                                      for name in names))
    return "\n".join(lines) + "\n"
