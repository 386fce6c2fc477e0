"""Summary tables, the similarity/sentiment join, and deterministic export."""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import os
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .corpus import EXPERT
from .errors import InsufficientChapters, IoError, MissingInput, NoOverlap
from .semantic import ChapterSummary, SimilarityRecord, corpus_means, inter_chapter_variation
from .sentiment import SentimentDistribution, sentiment_deviation

SIMILARITY_PLACES = 4
PP_PLACES = 2
RECORD_PLACES = 6
NOT_APPLICABLE = "n/a"

CONTRACT_FILES = (
    "performance_table",
    "similarity_records",
    "ngram_top",
    "sentiment_polarity",
    "extremes",
)


def round_half_even(value: float, places: int) -> Decimal:
    return Decimal(repr(float(value))).quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_EVEN)


def fmt(value: float | None, places: int) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return NOT_APPLICABLE
    return str(round_half_even(value, places))


def fixed(value: float | None, places: int) -> float | None:
    """Rounded float for JSON output."""
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return None
    return float(round_half_even(value, places))


# ---------------------------------------------------------------------------
# performance table

METRICS = ("semantic_similarity", "sentiment_deviation", "inter_chapter_variation")
HIGHER_IS_BETTER = {"semantic_similarity": True, "sentiment_deviation": False, "inter_chapter_variation": False}


@dataclass(frozen=True)
class PerformanceRow:
    system: str
    text_type: str
    semantic_similarity: float
    sentiment_deviation: float | None
    inter_chapter_variation: float | None

    def __post_init__(self):
        if not -1.0 <= self.semantic_similarity <= 1.0:
            raise ValueError(f"similarity out of range: {self.semantic_similarity}")
        if self.sentiment_deviation is not None and not 0.0 <= self.sentiment_deviation <= 200.0:
            raise ValueError(f"deviation out of range: {self.sentiment_deviation}")
        if self.inter_chapter_variation is not None and self.inter_chapter_variation < 0:
            raise ValueError(f"negative variation: {self.inter_chapter_variation}")


@dataclass(frozen=True)
class PerformanceTable:
    rows: tuple[PerformanceRow, ...]
    best: Mapping[tuple[str, str], frozenset[str]]  # (metric, text_type) -> systems

    def row(self, system: str, text_type: str) -> PerformanceRow:
        for r in self.rows:
            if r.system == system and r.text_type == text_type:
                return r
        raise KeyError((system, text_type))

    def is_best(self, metric: str, system: str, text_type: str) -> bool:
        return system in self.best.get((metric, text_type), frozenset())

    @property
    def text_types(self) -> list[str]:
        return list(dict.fromkeys(r.text_type for r in self.rows))

    @property
    def systems(self) -> list[str]:
        return list(dict.fromkeys(r.system for r in self.rows))


def mark_best(rows: Sequence[PerformanceRow]) -> dict[tuple[str, str], frozenset[str]]:
    best: dict[tuple[str, str], frozenset[str]] = {}
    for text_type in dict.fromkeys(r.text_type for r in rows):
        group = [r for r in rows if r.text_type == text_type]
        for metric in METRICS:
            values = {r.system: getattr(r, metric) for r in group if getattr(r, metric) is not None}
            if not values:
                continue
            target = max(values.values()) if HIGHER_IS_BETTER[metric] else min(values.values())
            best[(metric, text_type)] = frozenset(s for s, v in values.items() if v == target)
    return best


def build_performance_table(
    summaries: Mapping[str, Sequence[ChapterSummary]],
    distributions: Mapping[str, Mapping[str, SentimentDistribution]] | None,
) -> PerformanceTable:
    """One row per (system, text type).

    ``summaries`` maps text type to its chapter summaries; ``distributions``
    maps text type to per-version sentiment distributions including the
    expert's. Variation is left empty for single-chapter texts.
    """
    if not summaries:
        raise MissingInput("semantic_similarity", "no chapter summaries")
    if distributions is None:
        raise MissingInput("sentiment_deviation", "no sentiment distributions")
    rows: list[PerformanceRow] = []
    for text_type, chapter_list in summaries.items():
        if not chapter_list:
            raise MissingInput("semantic_similarity", f"no chapters for {text_type}")
        means = corpus_means(chapter_list)
        dists = distributions.get(text_type)
        if dists is None:
            raise MissingInput("sentiment_deviation", f"no distributions for {text_type}")
        if EXPERT not in dists:
            raise MissingInput("sentiment_deviation", f"no expert distribution for {text_type}")
        for system, mean in means.items():
            if system == EXPERT:
                continue
            if system not in dists:
                raise MissingInput("sentiment_deviation", f"no distribution for {system} on {text_type}")
            try:
                variation = inter_chapter_variation(chapter_list, system).range_pp
            except InsufficientChapters:
                variation = None
            rows.append(
                PerformanceRow(system, text_type, mean, sentiment_deviation(dists[system], dists[EXPERT]), variation)
            )
    return PerformanceTable(tuple(rows), mark_best(rows))


def render_performance_table(table: PerformanceTable) -> str:
    """Markdown rendering at the usual printed precision, best cells in bold."""
    types = table.text_types
    places = {"semantic_similarity": 3, "sentiment_deviation": 1, "inter_chapter_variation": 2}
    arrows = {"semantic_similarity": "Similarity ↑", "sentiment_deviation": "Deviation ↓", "inter_chapter_variation": "Variation ↓"}
    header = ["System"] + [f"{arrows[m]} {t}" for m in METRICS for t in types]
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    for system in table.systems:
        cells = [system]
        for metric in METRICS:
            for t in types:
                try:
                    value = getattr(table.row(system, t), metric)
                except KeyError:
                    cells.append("")
                    continue
                text = fmt(value, places[metric])
                cells.append(f"**{text}**" if table.is_best(metric, system, t) else text)
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def text_type_gaps(table: PerformanceTable) -> list[tuple[str, str, str, float]]:
    """Per-system similarity difference between every pair of text types, in pp.

    Rows are ``(system, type_a, type_b, 100 * (sim_a - sim_b))`` with the
    types taken in table order.
    """
    out = []
    for system in table.systems:
        for a, b in itertools.combinations(table.text_types, 2):
            try:
                ra, rb = table.row(system, a), table.row(system, b)
            except KeyError:
                continue
            out.append((system, a, b, 100.0 * (ra.semantic_similarity - rb.semantic_similarity)))
    return out


# ---------------------------------------------------------------------------
# combined analysis


def _average_ranks(values: Sequence[float]) -> np.ndarray:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = np.empty(len(values))
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        for k in range(i, j + 1):
            ranks[order[k]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(x: Sequence[float], y: Sequence[float]) -> float | None:
    """Rank correlation with average ranks for ties.

    Returns ``None`` for fewer than two pairs. When either side is constant
    there is no ordering to correlate and the result is 0.0.
    """
    if len(x) != len(y):
        raise ValueError("x and y differ in length")
    if len(x) < 2:
        return None
    rx, ry = _average_ranks(list(x)), _average_ranks(list(y))
    dx, dy = rx - rx.mean(), ry - ry.mean()
    denom = math.sqrt(float(dx @ dx) * float(dy @ dy))
    if denom == 0.0:
        return 0.0
    return float(dx @ dy) / denom


@dataclass(frozen=True)
class CombinedRecord:
    chapter: int
    version: str
    mean_similarity: float
    sentiment_deviation: float
    corpus: str = ""


@dataclass(frozen=True)
class CombinedAnalysis:
    records: tuple[CombinedRecord, ...]
    coefficient: float | None


def combined_analysis(
    records: Iterable[SimilarityRecord],
    distributions: Mapping[Any, Mapping[str, SentimentDistribution]],
) -> CombinedAnalysis:
    """Join chapter-mean similarity with chapter sentiment deviation per version.

    ``distributions`` is keyed by ``(corpus, chapter)`` or, for a single
    corpus, by chapter number, and each value maps versions (including the
    expert) to that chapter's distribution.
    """
    records = list(records)
    corpora = {r.corpus for r in records}
    dists: dict[tuple[str, int], Mapping[str, SentimentDistribution]] = {}
    for key, value in distributions.items():
        if isinstance(key, tuple):
            dists[(str(key[0]), int(key[1]))] = value
        else:
            if len(corpora) > 1:
                raise ValueError("bare chapter keys are ambiguous across several corpora")
            dists[(next(iter(corpora), ""), int(key))] = value

    scores: dict[tuple[str, int, str], list[float]] = {}
    for r in records:
        scores.setdefault((r.corpus, r.chapter, r.version), []).append(r.score)

    joined: list[CombinedRecord] = []
    for (corpus, chapter, version), vals in sorted(scores.items()):
        chapter_dists = dists.get((corpus, chapter))
        if not chapter_dists or version not in chapter_dists or EXPERT not in chapter_dists:
            continue
        deviation = sentiment_deviation(chapter_dists[version], chapter_dists[EXPERT])
        joined.append(CombinedRecord(chapter, version, float(np.mean(vals)), deviation, corpus))
    if not joined:
        raise NoOverlap("no (chapter, version) pair has both similarity records and sentiment distributions")
    rho = spearman([j.mean_similarity for j in joined], [j.sentiment_deviation for j in joined])
    return CombinedAnalysis(tuple(joined), rho)


# ---------------------------------------------------------------------------
# manifest and export


@dataclass
class RunManifest:
    corpora: list[dict]
    providers: list[dict]
    stoplist_sha256: str | None
    segmentation_rules: str
    settings: dict
    package_version: str
    created_at: str | None = None
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "corpora": self.corpora,
            "created_at": self.created_at,
            "package_version": self.package_version,
            "providers": self.providers,
            "segmentation_rules": self.segmentation_rules,
            "settings": self.settings,
            "stoplist_sha256": self.stoplist_sha256,
            "warnings": self.warnings,
        }


@dataclass
class Table:
    """Rows ready for export: CSV cells are strings, JSON values are typed."""

    columns: Sequence[str]
    csv_rows: list[list[str]]
    json_rows: list[dict]


@dataclass
class RunArtifacts:
    tables: dict[str, Table]
    manifest: RunManifest
    performance: PerformanceTable | None = None


def to_csv(table: Table) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    writer.writerows(table.csv_rows)
    return buf.getvalue()


def to_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def export(run: RunArtifacts, out_dir: str | Path, formats: Iterable[str] = ("csv", "json")) -> list[Path]:
    """Write every table in each requested format plus ``manifest.json``.

    File names are ``<table>.csv`` / ``<table>.json``; the same in-memory run
    always produces byte-identical files.
    """
    formats = {f.lower() for f in formats}
    unknown = formats - {"csv", "json"}
    if unknown:
        raise ValueError(f"unknown formats: {sorted(unknown)}")
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        if not os.access(out, os.W_OK):
            raise PermissionError("directory is not writable")
    except OSError as exc:
        raise IoError(out, exc.strerror or str(exc)) from exc

    written: list[Path] = []

    def write(name: str, text: str) -> None:
        path = out / name
        try:
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise IoError(path, exc.strerror or str(exc)) from exc
        written.append(path)

    for name in sorted(run.tables):
        table = run.tables[name]
        if "csv" in formats:
            write(f"{name}.csv", to_csv(table))
        if "json" in formats:
            write(f"{name}.json", to_json({"columns": list(table.columns), "rows": table.json_rows}))
    write("manifest.json", to_json(run.manifest.to_dict()))
    return written
