"""Analysis and report stages over a run directory.

``analyze`` writes raw metric artifacts to ``<run>/analysis``; ``build_report``
reads them back and assembles the exported tables. Keeping the stages
file-separated lets ``report`` be re-run without touching any provider.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import logging
import os
from collections import defaultdict
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__
from .corpus import SEGMENTATION_RULES_VERSION, Corpus, Language, segment_sentences, sentence_counts
from .errors import EmptyAfterTokenization, InsufficientChapters, ZeroVector
from .lexical import NgramTable, load_stoplist, ngram_counts, ngram_rows, remove_stopwords, tokenize_sentences, top_k
from .providers import Embedder, SentimentClassifier
from .report import (
    RECORD_PLACES,
    PP_PLACES,
    SIMILARITY_PLACES,
    RunArtifacts,
    RunManifest,
    Table,
    build_performance_table,
    combined_analysis,
    fixed,
    fmt,
    spearman,
    text_type_gaps,
)
from .semantic import (
    Direction,
    FlaggedUnit,
    SimilarityRecord,
    chapter_means,
    corpus_means,
    extremes,
    inter_chapter_variation,
    paired_differences,
    score_corpus,
    significance_test,
    verse_means,
)
from .sentiment import (
    EmotionCategory,
    Polarity,
    SentimentDistribution,
    distribution_from_counts,
    label_sentence,
    merge_distributions,
)
from .tokenmatch import score_pair

logger = logging.getLogger(__name__)

STAGES = ("ngram", "sentiment", "semantic", "tokenmatch")
ANALYSIS_DIR = "analysis"
REPORT_DIR = "report"


@dataclass
class Settings:
    threshold: float = 0.5
    granularity: str = "sentence"
    comma_splits: bool = False
    resamples: int = 10_000
    seed: int = 0
    top_k: int = 5
    extremes_k: int = 10
    skip: tuple[str, ...] = ()
    one_to_one: bool = False
    stoplist: str | None = None

    def validate(self) -> None:
        if not 0.0 < self.threshold < 1.0:
            raise ValueError(f"threshold must lie in (0, 1), got {self.threshold}")
        if self.granularity not in ("sentence", "paragraph"):
            raise ValueError(f"granularity must be 'sentence' or 'paragraph', got {self.granularity!r}")
        if self.resamples < 1000:
            raise ValueError("resamples must be at least 1000")
        if self.top_k < 1 or self.extremes_k < 1:
            raise ValueError("top-k values must be positive")
        unknown = set(self.skip) - set(STAGES)
        if unknown:
            raise ValueError(f"unknown stages to skip: {sorted(unknown)}; known: {', '.join(STAGES)}")
        self.skip = tuple(sorted(set(self.skip)))


# ---------------------------------------------------------------------------
# small csv helpers


def write_csv(path: Path, columns: Sequence[str], rows: Iterable[Sequence]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    path.write_text(buf.getvalue(), encoding="utf-8", newline="\n")


def read_csv(path: Path) -> list[dict[str, str]]:
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n", encoding="utf-8", newline="\n")


# ---------------------------------------------------------------------------
# analyze


def _pieces(text: str, granularity: str, comma_splits: bool) -> list[str]:
    seg = segment_sentences(text, Language.ENGLISH, comma_splits=comma_splits)
    return seg.paragraphs() if granularity == "paragraph" else list(seg.sentences)


def chapter_sentiment(
    corpus: Corpus, classifier: SentimentClassifier, settings: Settings
) -> dict[tuple[int, str], SentimentDistribution]:
    """Per (chapter, version) distributions, the expert's included."""
    out: dict[tuple[int, str], SentimentDistribution] = {}
    for version in corpus.all_versions:
        pieces: list[tuple[int, str]] = []
        for chapter, unit in corpus.units():
            pieces.extend((chapter, p) for p in _pieces(unit.text(version), settings.granularity, settings.comma_splits))
        scores = classifier.classify([p for _, p in pieces])
        by_chapter = defaultdict(list)
        for i, ((chapter, _), s) in enumerate(zip(pieces, scores)):
            by_chapter[chapter].append(label_sentence(s, settings.threshold, index=i))
        for chapter in (c.index for c in corpus.chapters):
            labels = by_chapter.get(chapter, [])
            counts: dict[EmotionCategory, int] = defaultdict(int)
            for lab in labels:
                for cat in lab.active:
                    counts[cat] += 1
            out[(chapter, version)] = distribution_from_counts(version, counts, sentences=len(labels))
    return out


def analyze(
    corpora: Sequence[Corpus],
    out_dir: str | Path,
    *,
    settings: Settings,
    embedder: Embedder | None = None,
    classifier: SentimentClassifier | None = None,
    provider_profiles: Sequence[dict] = (),
    carried_flags: Sequence[dict] = (),
) -> Path:
    settings.validate()
    if not corpora or all(not c.chapters for c in corpora):
        raise ValueError("corpus is empty")
    ids = [c.id for c in corpora]
    if len(set(ids)) != len(ids):
        raise ValueError("corpus ids must be unique within a run")
    if "semantic" not in settings.skip and embedder is None:
        raise ValueError("semantic analysis needs an embedding provider")
    if "tokenmatch" not in settings.skip and embedder is None:
        raise ValueError("token matching needs an embedding provider")
    if "sentiment" not in settings.skip and classifier is None:
        raise ValueError("sentiment analysis needs a classifier provider")

    target = Path(out_dir) / ANALYSIS_DIR
    target.mkdir(parents=True, exist_ok=True)
    stoplist, stoplist_hash = load_stoplist(settings.stoplist)

    write_json(
        target / "corpora.json",
        [
            {
                "id": c.id,
                "text_type": c.text_type.value,
                "chapters": [ch.index for ch in c.chapters],
                "versions": list(c.all_versions),
                "units": sum(len(ch.units) for ch in c.chapters),
            }
            for c in corpora
        ],
    )

    counts = sentence_counts(corpora, comma_splits=settings.comma_splits)
    write_csv(
        target / "sentence_counts.csv",
        ["version", "text_type", "count"],
        [[v, t, n] for v, row in counts.items() for t, n in row.items()],
    )

    if "ngram" not in settings.skip:
        rows = []
        for corpus in corpora:
            for version in corpus.all_versions:
                sentences = [
                    s for _, unit in corpus.units()
                    for s in segment_sentences(unit.text(version), Language.ENGLISH, comma_splits=settings.comma_splits).sentences
                ]
                stream = remove_stopwords(tokenize_sentences(sentences, version), stoplist)
                for n in (2, 3):
                    for r in ngram_rows(ngram_counts(stream, n), corpus.id):
                        rows.append([r["n"], r["tokens"], r["count"], r["version"], r["corpus"]])
        write_csv(target / "ngrams.csv", ["n", "tokens", "count", "version", "corpus"], rows)

    if "sentiment" not in settings.skip:
        rows = []
        for corpus in corpora:
            dists = chapter_sentiment(corpus, classifier, settings)
            for (chapter, version), d in sorted(dists.items()):
                rows.append([corpus.id, chapter, version, d.sentences, *(d.counts[c] for c in EmotionCategory)])
        write_csv(
            target / "sentiment_counts.csv",
            ["corpus", "chapter", "version", "sentences", *(c.value for c in EmotionCategory)],
            rows,
        )

    flagged: list[FlaggedUnit] = []
    if "semantic" not in settings.skip:
        records: list[SimilarityRecord] = []
        for corpus in corpora:
            records.extend(
                score_corpus(corpus, embedder, flagged=flagged, max_parallel=embedder.cfg.max_parallel, batch_size=embedder.cfg.batch_size)
            )
        write_csv(
            target / "similarity_records.csv",
            ["corpus", "chapter", "verse", "version", "score"],
            [[r.corpus, r.chapter, r.verse, r.version, fmt(r.score, RECORD_PLACES)] for r in records],
        )

    if "tokenmatch" not in settings.skip:
        rows = []
        for corpus in corpora:
            for chapter, unit in corpus.units():
                for version in corpus.versions:
                    try:
                        s = score_pair(unit.reference_en, unit.candidates[version], embedder, one_to_one=settings.one_to_one)
                    except (EmptyAfterTokenization, ZeroVector) as exc:
                        flagged.append(FlaggedUnit(corpus.id, chapter, unit.verse, version, f"tokenmatch: {exc}"))
                        continue
                    rows.append([
                        corpus.id, chapter, unit.verse, version,
                        fmt(s.precision, RECORD_PLACES), fmt(s.recall, RECORD_PLACES), fmt(s.f1, RECORD_PLACES),
                    ])
        write_csv(target / "tokenmatch_scores.csv", ["corpus", "chapter", "verse", "version", "precision", "recall", "f1"], rows)

    write_json(target / "flags.json", [*carried_flags, *(asdict(f) for f in flagged)])
    write_json(
        target / "settings.json",
        {
            "settings": asdict(settings),
            "providers": list(provider_profiles),
            "stoplist_sha256": stoplist_hash,
            "segmentation_rules": SEGMENTATION_RULES_VERSION,
            "package_version": __version__,
        },
    )
    return target


# ---------------------------------------------------------------------------
# report


class MissingArtifact(Exception):
    def __init__(self, path: Path):
        self.path = path
        super().__init__(f"missing upstream artifact: {path}")


def _require(path: Path) -> Path:
    if not path.is_file():
        raise MissingArtifact(path)
    return path


def load_records(path: Path) -> list[SimilarityRecord]:
    return [
        SimilarityRecord(int(r["chapter"]), int(r["verse"]), r["version"], float(r["score"]), r["corpus"])
        for r in read_csv(path)
    ]


def load_chapter_distributions(path: Path) -> dict[tuple[str, int], dict[str, SentimentDistribution]]:
    out: dict[tuple[str, int], dict[str, SentimentDistribution]] = defaultdict(dict)
    for r in read_csv(path):
        counts = {c: int(r[c.value]) for c in EmotionCategory}
        out[(r["corpus"], int(r["chapter"]))][r["version"]] = distribution_from_counts(
            r["version"], counts, sentences=int(r["sentences"])
        )
    return dict(out)


def _created_at() -> str | None:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if not epoch:
        return None
    return datetime.fromtimestamp(int(epoch), tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def build_report(run_dir: str | Path) -> RunArtifacts:
    analysis = Path(run_dir) / ANALYSIS_DIR
    meta = json.loads(_require(analysis / "settings.json").read_text(encoding="utf-8"))
    corpora_meta = json.loads(_require(analysis / "corpora.json").read_text(encoding="utf-8"))
    settings = Settings(**{**meta["settings"], "skip": tuple(meta["settings"]["skip"])})
    records = load_records(_require(analysis / "similarity_records.csv"))
    chapter_dists = load_chapter_distributions(_require(analysis / "sentiment_counts.csv"))
    ngram_path = analysis / "ngrams.csv"
    if "ngram" not in settings.skip:
        _require(ngram_path)
    flags = json.loads(_require(analysis / "flags.json").read_text(encoding="utf-8"))

    text_type_of = {c["id"]: c["text_type"] for c in corpora_meta}
    types = list(text_type_of.values())
    if len(set(types)) != len(types):
        raise ValueError("performance table needs at most one corpus per text type")

    tables: dict[str, Table] = {}

    # similarity records
    tables["similarity_records"] = Table(
        ["corpus", "chapter", "verse", "version", "score"],
        [[r.corpus, str(r.chapter), str(r.verse), r.version, fmt(r.score, RECORD_PLACES)] for r in records],
        [{"corpus": r.corpus, "chapter": r.chapter, "verse": r.verse, "version": r.version, "score": fixed(r.score, RECORD_PLACES)} for r in records],
    )

    by_corpus: dict[str, list[SimilarityRecord]] = defaultdict(list)
    for r in records:
        by_corpus[r.corpus].append(r)

    # chapter means and variation
    summaries = {cid: chapter_means(recs) for cid, recs in sorted(by_corpus.items())}
    cm_rows = []
    var_rows = []
    for cid, chapters in summaries.items():
        for s in chapters:
            for v, m in s.per_version_mean.items():
                cm_rows.append((cid, str(s.chapter), v, m))
            cm_rows.append((cid, str(s.chapter), "Average", s.overall_mean))
        overall = corpus_means(chapters)
        for v, m in overall.items():
            cm_rows.append((cid, "Average", v, m))
        cm_rows.append((cid, "Average", "Average", sum(overall.values()) / len(overall)))
        ranges = []
        for v in overall:
            try:
                rng = inter_chapter_variation(chapters, v).range_pp
            except InsufficientChapters:
                rng = None
            var_rows.append((cid, text_type_of.get(cid, ""), v, rng))
            if rng is not None:
                ranges.append(rng)
        var_rows.append((cid, text_type_of.get(cid, ""), "Mean", sum(ranges) / len(ranges) if ranges else None))
    tables["chapter_means"] = Table(
        ["corpus", "chapter", "version", "mean"],
        [[c, ch, v, fmt(m, SIMILARITY_PLACES)] for c, ch, v, m in cm_rows],
        [{"corpus": c, "chapter": ch, "version": v, "mean": fixed(m, SIMILARITY_PLACES)} for c, ch, v, m in cm_rows],
    )
    tables["variation"] = Table(
        ["corpus", "text_type", "version", "range_pp"],
        [[c, t, v, fmt(x, PP_PLACES)] for c, t, v, x in var_rows],
        [{"corpus": c, "text_type": t, "version": v, "range_pp": fixed(x, PP_PLACES)} for c, t, v, x in var_rows],
    )

    # sentiment
    corpus_dists: dict[str, dict[str, SentimentDistribution]] = defaultdict(dict)
    grouped: dict[tuple[str, str], list[SentimentDistribution]] = defaultdict(list)
    for (cid, _), per_version in sorted(chapter_dists.items()):
        for v, d in per_version.items():
            grouped[(cid, v)].append(d)
    for (cid, v), ds in sorted(grouped.items()):
        corpus_dists[cid][v] = merge_distributions(ds, v)
    pol_rows, cat_rows = [], []
    for cid, per_version in sorted(corpus_dists.items()):
        for v, d in sorted(per_version.items()):
            for p in Polarity:
                pol_rows.append((cid, v, p.value, d.polarity_pct[p]))
            for c in EmotionCategory:
                cat_rows.append((cid, v, c.value, d.counts[c]))
    tables["sentiment_polarity"] = Table(
        ["corpus", "version", "polarity", "percentage"],
        [[c, v, p, fmt(x, PP_PLACES)] for c, v, p, x in pol_rows],
        [{"corpus": c, "version": v, "polarity": p, "percentage": fixed(x, PP_PLACES)} for c, v, p, x in pol_rows],
    )
    tables["sentiment_categories"] = Table(
        ["corpus", "version", "category", "count"],
        [[c, v, k, str(n)] for c, v, k, n in cat_rows],
        [{"corpus": c, "version": v, "category": k, "count": n} for c, v, k, n in cat_rows],
    )

    # performance table
    perf = build_performance_table(
        {text_type_of[cid]: chapters for cid, chapters in summaries.items()},
        {text_type_of[cid]: d for cid, d in corpus_dists.items()},
    )
    perf_rows = []
    for r in perf.rows:
        best = [m for m in ("semantic_similarity", "sentiment_deviation", "inter_chapter_variation") if perf.is_best(m, r.system, r.text_type)]
        perf_rows.append((r, best))
    tables["performance_table"] = Table(
        ["system", "text_type", "semantic_similarity", "sentiment_deviation", "inter_chapter_variation", "best"],
        [
            [r.system, r.text_type, fmt(r.semantic_similarity, SIMILARITY_PLACES), fmt(r.sentiment_deviation, PP_PLACES),
             fmt(r.inter_chapter_variation, PP_PLACES), ";".join(best)]
            for r, best in perf_rows
        ],
        [
            {"system": r.system, "text_type": r.text_type,
             "semantic_similarity": fixed(r.semantic_similarity, SIMILARITY_PLACES),
             "sentiment_deviation": fixed(r.sentiment_deviation, PP_PLACES),
             "inter_chapter_variation": fixed(r.inter_chapter_variation, PP_PLACES), "best": best}
            for r, best in perf_rows
        ],
    )

    gaps = text_type_gaps(perf)
    if gaps:
        tables["text_type_gaps"] = Table(
            ["system", "text_type_a", "text_type_b", "gap_pp"],
            [[sys_, a, b, fmt(g, PP_PLACES)] for sys_, a, b, g in gaps],
            [{"system": sys_, "text_type_a": a, "text_type_b": b, "gap_pp": fixed(g, PP_PLACES)} for sys_, a, b, g in gaps],
        )

    # extremes
    ext_rows = []
    for cid, recs in sorted(by_corpus.items()):
        means = verse_means(recs)
        for direction in Direction:
            picked = extremes(recs, settings.extremes_k, direction)
            rank = 0
            last = None
            for r in picked:
                key = (r.corpus, r.chapter, r.verse)
                if key != last:
                    rank += 1
                    last = key
                ext_rows.append((cid, direction.value, rank, r.chapter, r.verse, means[key], r.version, r.score))
    tables["extremes"] = Table(
        ["corpus", "direction", "rank", "chapter", "verse", "verse_mean", "version", "score"],
        [[c, d, str(k), str(ch), str(v), fmt(m, SIMILARITY_PLACES), ver, fmt(s, SIMILARITY_PLACES)] for c, d, k, ch, v, m, ver, s in ext_rows],
        [{"corpus": c, "direction": d, "rank": k, "chapter": ch, "verse": v, "verse_mean": fixed(m, SIMILARITY_PLACES),
          "version": ver, "score": fixed(s, SIMILARITY_PLACES)} for c, d, k, ch, v, m, ver, s in ext_rows],
    )

    # n-grams
    if ngram_path.is_file():
        grouped_ng: dict[tuple[str, str, int], dict[tuple[str, ...], int]] = defaultdict(dict)
        for r in read_csv(ngram_path):
            grouped_ng[(r["corpus"], r["version"], int(r["n"]))][tuple(r["tokens"].split(" "))] = int(r["count"])
        ng_rows = []
        for (cid, v, n), entries in sorted(grouped_ng.items()):
            for rank, (gram, count) in enumerate(top_k(NgramTable(n, entries, v), settings.top_k), start=1):
                ng_rows.append((n, " ".join(gram), count, v, cid, rank))
        tables["ngram_top"] = Table(
            ["n", "tokens", "count", "version", "corpus", "rank"],
            [[str(n), t, str(c), v, cid, str(k)] for n, t, c, v, cid, k in ng_rows],
            [{"n": n, "tokens": t, "count": c, "version": v, "corpus": cid, "rank": k} for n, t, c, v, cid, k in ng_rows],
        )

    # combined analysis
    combined = combined_analysis(records, chapter_dists)
    tables["combined_analysis"] = Table(
        ["corpus", "chapter", "version", "mean_similarity", "sentiment_deviation"],
        [[j.corpus, str(j.chapter), j.version, fmt(j.mean_similarity, SIMILARITY_PLACES), fmt(j.sentiment_deviation, PP_PLACES)] for j in combined.records],
        [{"corpus": j.corpus, "chapter": j.chapter, "version": j.version, "mean_similarity": fixed(j.mean_similarity, SIMILARITY_PLACES),
          "sentiment_deviation": fixed(j.sentiment_deviation, PP_PLACES)} for j in combined.records],
    )
    corr_rows = [("all", len(combined.records), combined.coefficient)]
    for cid in sorted({j.corpus for j in combined.records}):
        sub = [j for j in combined.records if j.corpus == cid]
        corr_rows.append((cid, len(sub), spearman([j.mean_similarity for j in sub], [j.sentiment_deviation for j in sub])))
    tables["combined_correlation"] = Table(
        ["scope", "n", "spearman"],
        [[s, str(n), fmt(x, SIMILARITY_PLACES)] for s, n, x in corr_rows],
        [{"scope": s, "n": n, "spearman": fixed(x, SIMILARITY_PLACES)} for s, n, x in corr_rows],
    )

    # significance
    sig_rows = []
    for cid, recs in sorted(by_corpus.items()):
        per_version: dict[str, list[SimilarityRecord]] = defaultdict(list)
        for r in recs:
            per_version[r.version].append(r)
        for a, b in itertools.combinations(sorted(per_version), 2):
            ra, rb = per_version[a], per_version[b]
            shared = {x.key for x in ra} & {x.key for x in rb}
            ra = [x for x in ra if x.key in shared]
            rb = [x for x in rb if x.key in shared]
            if not shared:
                continue
            diff = float(paired_differences(ra, rb).mean())
            p = significance_test(ra, rb, settings.resamples, settings.seed)
            sig_rows.append((cid, a, b, len(shared), diff, p))
    tables["significance"] = Table(
        ["corpus", "version_a", "version_b", "n", "mean_diff_b_minus_a", "p_value"],
        [[c, a, b, str(n), fmt(d, SIMILARITY_PLACES), fmt(p, SIMILARITY_PLACES)] for c, a, b, n, d, p in sig_rows],
        [{"corpus": c, "version_a": a, "version_b": b, "n": n, "mean_diff_b_minus_a": fixed(d, SIMILARITY_PLACES),
          "p_value": fixed(p, SIMILARITY_PLACES)} for c, a, b, n, d, p in sig_rows],
    )

    # pass-through tables
    sc_path = analysis / "sentence_counts.csv"
    if sc_path.is_file():
        rows = read_csv(sc_path)
        tables["sentence_counts"] = Table(
            ["version", "text_type", "count"],
            [[r["version"], r["text_type"], r["count"]] for r in rows],
            [{"version": r["version"], "text_type": r["text_type"], "count": int(r["count"])} for r in rows],
        )
    tm_path = analysis / "tokenmatch_scores.csv"
    if tm_path.is_file():
        rows = read_csv(tm_path)
        cols = ["corpus", "chapter", "verse", "version", "precision", "recall", "f1"]
        tables["tokenmatch_scores"] = Table(
            cols,
            [[r[c] for c in cols] for r in rows],
            [{"corpus": r["corpus"], "chapter": int(r["chapter"]), "verse": int(r["verse"]), "version": r["version"],
              **{k: float(r[k]) for k in ("precision", "recall", "f1")}} for r in rows],
        )

    warnings = [f"{f.get('corpus', '')} {f['chapter']}.{f['verse']} {f['version']}: {f['reason']}" for f in flags]
    manifest = RunManifest(
        corpora=corpora_meta,
        providers=meta["providers"],
        stoplist_sha256=meta["stoplist_sha256"],
        segmentation_rules=meta["segmentation_rules"],
        settings=meta["settings"],
        package_version=meta["package_version"],
        created_at=_created_at(),
        warnings=warnings,
    )
    return RunArtifacts(tables, manifest, perf)
