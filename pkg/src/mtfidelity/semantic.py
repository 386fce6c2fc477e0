"""Sentence-embedding similarity per aligned unit and its chapter-level aggregates."""

from __future__ import annotations

import enum
import logging
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Protocol, Sequence

import numpy as np

from .corpus import Corpus
from .errors import (
    DimensionMismatch,
    EmptyInput,
    InsufficientChapters,
    KeyMismatch,
    ProviderError,
    ScoreOutOfRange,
    ZeroVector,
)

logger = logging.getLogger(__name__)

BOUND_TOLERANCE = 1e-9
DEFAULT_RESAMPLES = 10_000


class Direction(str, enum.Enum):
    LOWEST = "Lowest"
    HIGHEST = "Highest"


class SentenceEmbedder(Protocol):
    def embed(self, texts: Sequence[str]) -> list[np.ndarray]: ...


def _as_vector(v) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise DimensionMismatch(f"expected a non-empty 1-d vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("embedding contains non-finite entries")
    return arr


def cosine_similarity(a, b) -> float:
    a, b = _as_vector(a), _as_vector(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"dimension {a.size} != {b.size}")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ZeroVector("cosine similarity is undefined for a zero vector")
    # dividing by the norms separately keeps sim(a, la) == 1 closer to exact
    return float(np.dot(a / na, b / nb))


@dataclass(frozen=True, order=True)
class SimilarityRecord:
    chapter: int
    verse: int
    version: str
    score: float
    corpus: str = ""

    def __post_init__(self):
        if not -1.0 - BOUND_TOLERANCE <= self.score <= 1.0 + BOUND_TOLERANCE:
            raise ScoreOutOfRange(
                f"{self.chapter}.{self.verse} {self.version}: similarity {self.score} outside [-1, 1]"
            )

    @property
    def key(self) -> tuple[int, int]:
        return (self.chapter, self.verse)


@dataclass(frozen=True)
class ChapterSummary:
    chapter: int
    per_version_mean: dict[str, float]

    @property
    def overall_mean(self) -> float:
        return float(np.mean(list(self.per_version_mean.values())))


@dataclass(frozen=True)
class VariationSummary:
    version: str
    range_pp: float


@dataclass(frozen=True)
class FlaggedUnit:
    corpus: str
    chapter: int
    verse: int
    version: str
    reason: str


def score_corpus(
    corpus: Corpus,
    embedder: SentenceEmbedder,
    *,
    flagged: list[FlaggedUnit] | None = None,
    max_parallel: int = 1,
    batch_size: int = 64,
) -> list[SimilarityRecord]:
    """One record per (unit, candidate): cosine of reference vs candidate embedding.

    Every distinct text is embedded exactly once. Units whose reference or
    candidate embeds to a zero vector are appended to ``flagged`` and left
    out of the result.
    """
    texts: list[str] = []
    seen: dict[str, int] = {}
    for _, unit in corpus.units():
        for t in (unit.reference_en, *(unit.candidates[v] for v in corpus.versions)):
            if t not in seen:
                seen[t] = len(texts)
                texts.append(t)

    batches = [texts[i : i + batch_size] for i in range(0, len(texts), batch_size)]

    def run(batch: list[str]) -> list[np.ndarray]:
        try:
            return embedder.embed(batch)
        except ProviderError as exc:
            raise type(exc)(f"corpus {corpus.id}: embedding failed for {batch[0][:40]!r}...: {exc}") from exc

    if max_parallel > 1 and len(batches) > 1:
        with ThreadPoolExecutor(max_workers=max_parallel) as pool:
            results = list(pool.map(run, batches))
    else:
        results = [run(b) for b in batches]
    vectors = [np.asarray(v, dtype=float) for batch in results for v in batch]
    if len(vectors) != len(texts):
        raise ProviderError(f"embedder returned {len(vectors)} vectors for {len(texts)} texts")

    records: list[SimilarityRecord] = []
    for chapter, unit in corpus.units():
        ref = vectors[seen[unit.reference_en]]
        for version in corpus.versions:
            cand = vectors[seen[unit.candidates[version]]]
            try:
                score = cosine_similarity(ref, cand)
            except ZeroVector:
                logger.warning("corpus %s %d.%d %s: zero embedding, excluded", corpus.id, chapter, unit.verse, version)
                if flagged is not None:
                    flagged.append(FlaggedUnit(corpus.id, chapter, unit.verse, version, "zero-vector"))
                continue
            records.append(SimilarityRecord(chapter, unit.verse, version, score, corpus.id))
    records.sort(key=lambda r: (r.chapter, r.verse, r.version))
    return records


def chapter_means(records: Iterable[SimilarityRecord]) -> list[ChapterSummary]:
    records = list(records)
    if not records:
        raise EmptyInput("no similarity records")
    if len({r.corpus for r in records}) > 1:
        raise ValueError("chapter_means expects records from a single corpus")
    grouped: dict[int, dict[str, list[float]]] = defaultdict(lambda: defaultdict(list))
    for r in records:
        grouped[r.chapter][r.version].append(r.score)
    return [
        ChapterSummary(ch, {v: float(np.mean(s)) for v, s in sorted(grouped[ch].items())})
        for ch in sorted(grouped)
    ]


def corpus_means(summaries: Sequence[ChapterSummary]) -> dict[str, float]:
    """Per-version mean of chapter means; every chapter weighs the same."""
    if not summaries:
        raise EmptyInput("no chapter summaries")
    per_version: dict[str, list[float]] = defaultdict(list)
    for s in summaries:
        for v, m in s.per_version_mean.items():
            per_version[v].append(m)
    return {v: float(np.mean(ms)) for v, ms in sorted(per_version.items())}


def inter_chapter_variation(summaries: Sequence[ChapterSummary], version: str) -> VariationSummary:
    means = [s.per_version_mean[version] for s in summaries if version in s.per_version_mean]
    if len(means) < 2:
        raise InsufficientChapters(f"{version}: need at least 2 chapters, have {len(means)}")
    return VariationSummary(version, 100.0 * (max(means) - min(means)))


def extremes(
    records: Iterable[SimilarityRecord],
    k: int,
    direction: Direction | str = Direction.LOWEST,
) -> list[SimilarityRecord]:
    """The ``k`` verses with the lowest (or highest) mean score across versions.

    Each selected verse contributes all of its records. Equal means are
    ordered by (chapter, verse) ascending in both directions.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    direction = Direction(direction)
    by_verse: dict[tuple[str, int, int], list[SimilarityRecord]] = defaultdict(list)
    for r in records:
        by_verse[(r.corpus, r.chapter, r.verse)].append(r)
    sign = 1.0 if direction is Direction.LOWEST else -1.0
    ranked = sorted(
        by_verse.items(),
        key=lambda kv: (sign * float(np.mean([r.score for r in kv[1]])), kv[0]),
    )
    out: list[SimilarityRecord] = []
    for _, recs in ranked[:k]:
        out.extend(sorted(recs, key=lambda r: r.version))
    return out


def verse_means(records: Iterable[SimilarityRecord]) -> dict[tuple[str, int, int], float]:
    by_verse: dict[tuple[str, int, int], list[float]] = defaultdict(list)
    for r in records:
        by_verse[(r.corpus, r.chapter, r.verse)].append(r.score)
    return {k: float(np.mean(v)) for k, v in sorted(by_verse.items())}


def paired_differences(
    records_a: Iterable[SimilarityRecord], records_b: Iterable[SimilarityRecord]
) -> np.ndarray:
    a = {(r.corpus, r.chapter, r.verse): r.score for r in records_a}
    b = {(r.corpus, r.chapter, r.verse): r.score for r in records_b}
    if set(a) != set(b):
        only_a = sorted(set(a) - set(b))[:3]
        only_b = sorted(set(b) - set(a))[:3]
        raise KeyMismatch(f"record keys differ (only in a: {only_a}, only in b: {only_b})")
    if not a:
        raise EmptyInput("no records to compare")
    keys = sorted(a)
    return np.array([b[k] - a[k] for k in keys])


def significance_test(
    records_a: Sequence[SimilarityRecord],
    records_b: Sequence[SimilarityRecord],
    resamples: int = DEFAULT_RESAMPLES,
    seed: int = 0,
) -> float:
    """Two-sided paired bootstrap p-value for the mean difference ``b - a``.

    Resampled means are shifted by the observed mean so they approximate the
    null distribution; the p-value is the add-one smoothed share of shifted
    means at least as extreme as the observation. A single pair carries no
    information about spread and yields 1.0.
    """
    if resamples < 1000:
        raise ValueError("resamples must be at least 1000")
    diffs = paired_differences(records_a, records_b)
    n = diffs.size
    if n == 1:
        return 1.0
    observed = float(diffs.mean())
    rng = np.random.default_rng(seed)
    extreme = 0
    chunk = max(1, min(resamples, 2_000_000 // n))
    done = 0
    while done < resamples:
        m = min(chunk, resamples - done)
        idx = rng.integers(0, n, size=(m, n))
        null_means = diffs[idx].mean(axis=1) - observed
        # small slack so exact ties are not lost to rounding
        extreme += int(np.count_nonzero(np.abs(null_means) >= abs(observed) - 1e-12))
        done += m
    return (extreme + 1) / (resamples + 1)
