"""Word tokenization, stopword filtering and n-gram profiling of English text."""

from __future__ import annotations

import csv
import hashlib
import io
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

# A word is a run of letters, optionally joined by internal apostrophes.
_WORD_RE = re.compile(r"[^\W\d_]+(?:['’][^\W\d_]+)*")

STOPLIST_RESOURCE = "stopwords_en.txt"


@dataclass(frozen=True)
class TokenStream:
    """Lowercased tokens plus the offsets at which each sentence starts.

    ``boundaries`` always begins with 0 when the stream is non-empty; n-gram
    windows never span two sentences.
    """

    tokens: tuple[str, ...]
    origin: str | None = None
    boundaries: tuple[int, ...] = field(default=(0,))

    def __post_init__(self):
        for tok in self.tokens:
            if not tok or any(c.isspace() for c in tok) or tok != tok.lower():
                raise ValueError(f"invalid token {tok!r}")
        if self.tokens and (not self.boundaries or self.boundaries[0] != 0):
            raise ValueError("boundaries must start at 0")
        if any(b <= a for a, b in zip(self.boundaries, self.boundaries[1:])):
            raise ValueError("boundaries must be strictly increasing")

    def __len__(self) -> int:
        return len(self.tokens)

    def sentences(self) -> list[tuple[str, ...]]:
        if not self.tokens:
            return []
        edges = [b for b in self.boundaries if b < len(self.tokens)] + [len(self.tokens)]
        return [self.tokens[a:b] for a, b in zip(edges, edges[1:])]


@dataclass(frozen=True)
class NgramTable:
    n: int
    entries: dict[tuple[str, ...], int]
    origin: str | None = None

    def __post_init__(self):
        if self.n not in (2, 3):
            raise ValueError(f"n must be 2 or 3, got {self.n}")
        for gram, count in self.entries.items():
            if len(gram) != self.n or count < 1:
                raise ValueError(f"bad entry {gram!r}: {count}")

    @property
    def total(self) -> int:
        return sum(self.entries.values())


def tokenize(text: str, origin: str | None = None) -> TokenStream:
    tokens = tuple(m.group(0).replace("’", "'").lower() for m in _WORD_RE.finditer(text))
    return TokenStream(tokens, origin)


def tokenize_sentences(sentences: Iterable[str], origin: str | None = None) -> TokenStream:
    """Tokenize each sentence separately and record where each one starts."""
    tokens: list[str] = []
    boundaries: list[int] = []
    for sentence in sentences:
        words = tokenize(sentence).tokens
        if words:
            boundaries.append(len(tokens))
            tokens.extend(words)
    return TokenStream(tuple(tokens), origin, tuple(boundaries) or (0,))


def remove_stopwords(stream: TokenStream, stoplist: Iterable[str]) -> TokenStream:
    stop = frozenset(stoplist)
    kept: list[str] = []
    boundaries: list[int] = []
    for sentence in stream.sentences():
        survivors = [t for t in sentence if t not in stop]
        if survivors:
            boundaries.append(len(kept))
            kept.extend(survivors)
    return TokenStream(tuple(kept), stream.origin, tuple(boundaries) or (0,))


def ngram_counts(stream: TokenStream, n: int) -> NgramTable:
    if n not in (2, 3):
        raise ValueError(f"n must be 2 or 3, got {n}")
    counts: Counter[tuple[str, ...]] = Counter()
    for sentence in stream.sentences():
        counts.update(zip(*(sentence[i:] for i in range(n))))
    return NgramTable(n, dict(counts), stream.origin)


def top_k(table: NgramTable, k: int) -> list[tuple[tuple[str, ...], int]]:
    """Most frequent n-grams; equal counts are ordered lexicographically."""
    if k < 1:
        raise ValueError("k must be at least 1")
    ranked = sorted(table.entries.items(), key=lambda item: (-item[1], item[0]))
    return ranked[:k]


@lru_cache(maxsize=None)
def _bundled_stoplist_text() -> str:
    return resources.files("mtfidelity").joinpath("data", STOPLIST_RESOURCE).read_text(encoding="utf-8")


def parse_stoplist(text: str) -> frozenset[str]:
    words = (line.strip().lower() for line in text.splitlines())
    return frozenset(w for w in words if w and not w.startswith("#"))


def load_stoplist(path: str | Path | None = None) -> tuple[frozenset[str], str]:
    """Return ``(words, sha256-of-file-content)``; ``None`` loads the bundled list."""
    text = _bundled_stoplist_text() if path is None else Path(path).read_text(encoding="utf-8")
    return parse_stoplist(text), hashlib.sha256(text.encode("utf-8")).hexdigest()


NGRAM_CSV_FIELDS = ("n", "tokens", "count", "version", "corpus")


def ngram_rows(table: NgramTable, corpus: str, ranked: Sequence | None = None) -> list[dict]:
    items = ranked if ranked is not None else sorted(table.entries.items(), key=lambda kv: (-kv[1], kv[0]))
    return [
        {"n": table.n, "tokens": " ".join(gram), "count": count, "version": table.origin or "", "corpus": corpus}
        for gram, count in items
    ]


def ngram_csv(tables: Iterable[tuple[str, NgramTable]]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=NGRAM_CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for corpus, table in tables:
        writer.writerows(ngram_rows(table, corpus))
    return buf.getvalue()
