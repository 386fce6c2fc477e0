"""Nine-category emotion labels, per-version distributions and polarity deviation."""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import EmptyInput, MissingCategory

DEFAULT_THRESHOLD = 0.5


class EmotionCategory(str, enum.Enum):
    OPTIMISTIC = "Optimistic"
    THANKFUL = "Thankful"
    EMPATHETIC = "Empathetic"
    PESSIMISTIC = "Pessimistic"
    ANXIOUS = "Anxious"
    SAD = "Sad"
    ANNOYED = "Annoyed"
    DENIAL = "Denial"
    HUMOUR = "Humour"


class Polarity(str, enum.Enum):
    POSITIVE = "Positive"
    NEUTRAL = "Neutral"
    NEGATIVE = "Negative"


POLARITY_OF: dict[EmotionCategory, Polarity] = {
    EmotionCategory.OPTIMISTIC: Polarity.POSITIVE,
    EmotionCategory.THANKFUL: Polarity.POSITIVE,
    EmotionCategory.HUMOUR: Polarity.POSITIVE,
    EmotionCategory.EMPATHETIC: Polarity.NEUTRAL,
    EmotionCategory.PESSIMISTIC: Polarity.NEGATIVE,
    EmotionCategory.ANXIOUS: Polarity.NEGATIVE,
    EmotionCategory.SAD: Polarity.NEGATIVE,
    EmotionCategory.ANNOYED: Polarity.NEGATIVE,
    EmotionCategory.DENIAL: Polarity.NEGATIVE,
}

# upstream classifier label names that differ from ours
_ALIASES = {"joking": EmotionCategory.HUMOUR, "humor": EmotionCategory.HUMOUR}
_IGNORED = {"official report", "official_report"}


def polarity_of(category: EmotionCategory | str) -> Polarity:
    return POLARITY_OF[parse_category(category)]


def parse_category(name: EmotionCategory | str) -> EmotionCategory:
    if isinstance(name, EmotionCategory):
        return name
    key = name.strip().lower()
    if key in _ALIASES:
        return _ALIASES[key]
    for cat in EmotionCategory:
        if cat.value.lower() == key:
            return cat
    raise KeyError(f"unknown emotion category {name!r}")


def normalize_scores(scores: Mapping[EmotionCategory | str, float]) -> dict[EmotionCategory, float]:
    """Map classifier output onto the nine categories; extra labels are dropped."""
    out: dict[EmotionCategory, float] = {}
    for name, score in scores.items():
        if isinstance(name, str) and name.strip().lower() in _IGNORED:
            continue
        try:
            cat = parse_category(name)
        except KeyError:
            continue
        score = float(score)
        if not 0.0 <= score <= 1.0:
            raise ValueError(f"score for {cat.value} outside [0, 1]: {score}")
        out[cat] = score
    missing = [c.value for c in EmotionCategory if c not in out]
    if missing:
        raise MissingCategory(missing)
    return {c: out[c] for c in EmotionCategory}


@dataclass(frozen=True)
class SentenceLabels:
    index: int
    scores: Mapping[EmotionCategory, float]
    active: frozenset[EmotionCategory]


def label_sentence(
    scores: Mapping[EmotionCategory | str, float],
    threshold: float = DEFAULT_THRESHOLD,
    index: int = 0,
) -> SentenceLabels:
    """Multi-label decision: every category at or above ``threshold``.

    When nothing clears the threshold the single highest-scoring category is
    used (first in category order on ties).
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must lie in (0, 1), got {threshold}")
    norm = normalize_scores(scores)
    active = frozenset(c for c, s in norm.items() if s >= threshold)
    if not active:
        active = frozenset({max(EmotionCategory, key=lambda c: norm[c])})
    return SentenceLabels(index, norm, active)


@dataclass(frozen=True)
class SentimentDistribution:
    version: str
    counts: Mapping[EmotionCategory, int]
    polarity_pct: Mapping[Polarity, float]
    sentences: int = 0

    @property
    def polarity_counts(self) -> dict[Polarity, int]:
        out = {p: 0 for p in Polarity}
        for cat, n in self.counts.items():
            out[POLARITY_OF[cat]] += n
        return out


def distribution_from_counts(
    version: str,
    counts: Mapping[EmotionCategory | str, int],
    sentences: int = 0,
) -> SentimentDistribution:
    """Build a distribution from per-category instance counts."""
    full = {c: 0 for c in EmotionCategory}
    for name, n in counts.items():
        if n < 0:
            raise ValueError("counts must be non-negative")
        full[parse_category(name)] += int(n)
    by_polarity = Counter()
    for cat, n in full.items():
        by_polarity[POLARITY_OF[cat]] += n
    total = sum(by_polarity.values())
    pct = {p: (100.0 * by_polarity[p] / total if total else 0.0) for p in Polarity}
    return SentimentDistribution(version, full, pct, sentences)


def aggregate_distribution(labels: Sequence[SentenceLabels], version: str) -> SentimentDistribution:
    """Count active labels per category; polarity shares are over label instances."""
    if not labels:
        raise EmptyInput(f"no sentence labels for version {version!r}")
    counts = Counter(cat for lab in labels for cat in lab.active)
    return distribution_from_counts(version, counts, sentences=len(labels))


def merge_distributions(dists: Iterable[SentimentDistribution], version: str) -> SentimentDistribution:
    counts: Counter = Counter()
    sentences = 0
    for d in dists:
        counts.update(d.counts)
        sentences += d.sentences
    return distribution_from_counts(version, counts, sentences)


def sentiment_deviation(system: SentimentDistribution, expert: SentimentDistribution) -> float:
    """L1 distance between polarity percentages, in percentage points."""
    return sum(abs(system.polarity_pct[p] - expert.polarity_pct[p]) for p in Polarity)
