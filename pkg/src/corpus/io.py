"""Readers and writers for every on-disk format.

Text formats are UTF-8 TSV with LF line endings.  Embeddings use a small
little-endian binary layout::

    b"BMEM" | u32 version=1 | u32 n | u32 d | n*d f32 row-major

with sentence ids in a ``<path>.ids`` sidecar, one per line.
"""
import logging
import os
import re
import struct
from typing import Dict, Iterable, Iterator, List, Sequence, Tuple

import numpy as np

try:  # pragma: no cover
    from ..shared.errors import FormatError, ParseError, ValidationError  # type: ignore
    from ..shared.records import (CandidatePair, Corpus, EmbeddingMatrix, GoldAlignment,  # type: ignore
                                  SentenceRecord, PAIR_DECIMALS, pair_sort_key)
except Exception:
    from shared.errors import FormatError, ParseError, ValidationError  # type: ignore
    from shared.records import (CandidatePair, Corpus, EmbeddingMatrix, GoldAlignment,  # type: ignore
                                SentenceRecord, PAIR_DECIMALS, pair_sort_key)

logger = logging.getLogger('Bitext.IO')

EMB_MAGIC = b"BMEM"
EMB_VERSION = 1
EMB_HEADER = struct.Struct("<4sIII")
IDS_SUFFIX = ".ids"

_ESCAPES = {"\\": "\\\\", "\t": "\\t", "\n": "\\n", "\r": "\\r"}
_UNESCAPES = {"\\": "\\", "t": "\t", "n": "\n", "r": "\r"}
_ESCAPE_RE = re.compile(r"[\\\t\n\r]")
_UNESCAPE_RE = re.compile(r"\\([\\tnr])")


def escape_text(text: str) -> str:
    return _ESCAPE_RE.sub(lambda m: _ESCAPES[m.group(0)], text)


def unescape_text(text: str) -> str:
    if "\\" not in text:
        return text
    return _UNESCAPE_RE.sub(lambda m: _UNESCAPES[m.group(1)], text)


def ensure_parent(path: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


def _iter_lines(path: str) -> Iterator[Tuple[int, str]]:
    with open(path, "r", encoding="utf-8", newline="\n") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if line.endswith("\r"):
                line = line[:-1]
            yield line_no, line


# --- corpora -----------------------------------------------------------------

def iter_bucc_records(path: str, lang: str) -> Iterator[SentenceRecord]:
    """Stream ``id<TAB>text`` lines; holds one record at a time.

    Id uniqueness is not checked here (that needs the whole id set); see
    :func:`read_bucc_corpus`.
    """
    for line_no, line in _iter_lines(path):
        if not line:
            continue
        sid, sep, text = line.partition("\t")
        if not sep:
            raise ParseError("expected 'id<TAB>text'", path, line_no)
        if not sid:
            raise ParseError("empty sentence id", path, line_no)
        yield SentenceRecord(sid, lang, unescape_text(text))


def read_bucc_corpus(path: str, lang: str) -> Corpus:
    records: List[SentenceRecord] = []
    first_line: Dict[str, int] = {}
    for rec in iter_bucc_records(path, lang):
        if rec.id in first_line:
            raise ValidationError(f"{path}: duplicate id {rec.id!r} (record {len(records) + 1}, "
                                  f"first seen as record {first_line[rec.id]})")
        first_line[rec.id] = len(records) + 1
        records.append(rec)
    logger.info(f"📥 Read {len(records)} {lang} sentences from {path}")
    return Corpus(lang, tuple(records))


def write_corpus(corpus: Corpus, path: str) -> None:
    ensure_parent(path)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for rec in corpus:
            f.write(f"{rec.id}\t{escape_text(rec.text)}\n")


# --- gold alignments ---------------------------------------------------------

def read_gold(path: str) -> GoldAlignment:
    pairs = set()
    dups = 0
    for line_no, line in _iter_lines(path):
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != 2 or not fields[0] or not fields[1]:
            raise ParseError("expected 'src_id<TAB>tgt_id'", path, line_no)
        pair = (fields[0], fields[1])
        if pair in pairs:
            dups += 1
        else:
            pairs.add(pair)
    if dups:
        logger.warning(f"⚠️ {path}: collapsed {dups} duplicate gold pairs")
    return GoldAlignment(frozenset(pairs), dups)


def write_gold(gold: GoldAlignment, path: str) -> None:
    ensure_parent(path)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for s, t in sorted(gold.pairs):
            f.write(f"{s}\t{t}\n")


# --- embeddings --------------------------------------------------------------

def ids_path(path: str) -> str:
    return path + IDS_SUFFIX


def check_sidecar_ids(ids: Sequence[str]) -> None:
    for sid in ids:
        if not sid or "\n" in sid or "\r" in sid:
            raise ValidationError(f"id {sid!r} cannot be stored in an id sidecar")


def write_ids(ids: Sequence[str], path: str) -> None:
    """One id per line in the sidecar of the binary file at ``path``."""
    with open(ids_path(path), "w", encoding="utf-8", newline="\n") as f:
        for sid in ids:
            f.write(sid + "\n")


def read_ids(path: str, expected: int) -> List[str]:
    ids = [line for _, line in _iter_lines(ids_path(path)) if line]
    if len(ids) != expected:
        raise FormatError(f"{ids_path(path)}: {len(ids)} ids for {expected} vectors")
    return ids


def write_embeddings(m: EmbeddingMatrix, path: str) -> None:
    n, d = m.rows.shape
    if d == 0:
        raise ValidationError("cannot write embeddings of dimension 0")
    if len(m.ids) != n:
        raise ValidationError(f"{n} rows but {len(m.ids)} ids")
    check_sidecar_ids(m.ids)
    ensure_parent(path)
    with open(path, "wb") as f:
        f.write(EMB_HEADER.pack(EMB_MAGIC, EMB_VERSION, n, d))
        f.write(np.ascontiguousarray(m.rows, dtype="<f4").tobytes())
    write_ids(m.ids, path)


def read_embeddings(path: str) -> EmbeddingMatrix:
    actual = os.path.getsize(path)
    with open(path, "rb") as f:
        head = f.read(EMB_HEADER.size)
    if len(head) < EMB_HEADER.size:
        raise FormatError(f"{path}: truncated header ({len(head)} of {EMB_HEADER.size} bytes)")
    magic, version, n, d = EMB_HEADER.unpack(head)
    if magic != EMB_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}, expected {EMB_MAGIC!r}")
    if version != EMB_VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    if d == 0:
        raise FormatError(f"{path}: dimension 0")
    expected = EMB_HEADER.size + 4 * n * d
    if actual != expected:
        raise FormatError(f"{path}: expected {expected} bytes for n={n} d={d}, found {actual}")
    rows = np.fromfile(path, dtype="<f4", count=n * d, offset=EMB_HEADER.size).reshape(n, d)
    ids = read_ids(path, n)
    m = EmbeddingMatrix.from_rows(ids, rows.astype(np.float32), dim=d)
    logger.debug(f"📥 Read {n}x{d} embeddings from {path}")
    return m


# --- candidate pairs ---------------------------------------------------------

def format_distance(distance: float) -> str:
    return f"{distance:.{PAIR_DECIMALS}f}"


def write_pairs(pairs: Iterable[CandidatePair], path: str) -> None:
    rows = sorted(pairs, key=pair_sort_key)
    ensure_parent(path)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for p in rows:
            f.write(f"{format_distance(p.distance)}\t{p.src_id}\t{p.tgt_id}\n")
    logger.info(f"📤 Wrote {len(rows)} pairs to {path}")


def iter_pairs(path: str) -> Iterator[CandidatePair]:
    for line_no, line in _iter_lines(path):
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise ParseError("expected 'distance<TAB>src_id<TAB>tgt_id'", path, line_no)
        try:
            dist = float(fields[0])
        except ValueError:
            raise ParseError(f"bad distance {fields[0]!r}", path, line_no) from None
        if not 0.0 <= dist <= 2.0:
            raise ParseError(f"distance {dist} outside [0, 2]", path, line_no)
        yield CandidatePair(fields[1], fields[2], dist)


def read_pairs(path: str) -> List[CandidatePair]:
    return list(iter_pairs(path))


def export_bitext(pairs: Sequence[CandidatePair], src: Corpus, tgt: Corpus,
                  src_path: str, tgt_path: str) -> int:
    """Write the sentences of ``pairs`` as two line-aligned plain-text files."""
    src_by_id, tgt_by_id = src.by_id(), tgt.by_id()
    ensure_parent(src_path)
    ensure_parent(tgt_path)
    n = 0
    with open(src_path, "w", encoding="utf-8", newline="\n") as fs, \
            open(tgt_path, "w", encoding="utf-8", newline="\n") as ft:
        for p in pairs:
            try:
                s, t = src_by_id[p.src_id], tgt_by_id[p.tgt_id]
            except KeyError as e:
                raise ValidationError(f"pair references unknown id {e.args[0]!r}") from None
            fs.write(escape_text(s.text) + "\n")
            ft.write(escape_text(t.text) + "\n")
            n += 1
    logger.info(f"📤 Exported {n} sentence pairs to {src_path} / {tgt_path}")
    return n
