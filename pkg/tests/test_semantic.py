import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from chapter_tables import AVERAGES, SYSTEMS, TEXT_TYPES, VARIATION, records_for
from mtfidelity.corpus import AlignedUnit, Chapter, Corpus, TextType
from mtfidelity.errors import (
    DimensionMismatch,
    EmptyInput,
    InsufficientChapters,
    KeyMismatch,
    ScoreOutOfRange,
    ZeroVector,
)
from mtfidelity.semantic import (
    ChapterSummary,
    SimilarityRecord,
    chapter_means,
    corpus_means,
    cosine_similarity,
    extremes,
    inter_chapter_variation,
    paired_differences,
    score_corpus,
    significance_test,
)

def test_cosine_hand_oracle():
    assert cosine_similarity([1, 2, 2], [2, 1, 2]) == pytest.approx(8 / 9, abs=1e-4)


def test_cosine_errors():
    with pytest.raises(DimensionMismatch):
        cosine_similarity([1, 2], [1, 2, 3])
    with pytest.raises(ZeroVector):
        cosine_similarity([0, 0], [1, 2])


@given(st.integers(1, 16).flatmap(lambda n: st.tuples(
    arrays(np.float64, (n,), elements=st.floats(-100, 100, allow_nan=False)),
    arrays(np.float64, (n,), elements=st.floats(-100, 100, allow_nan=False)),
)), st.floats(1e-3, 1e3))
def test_cosine_properties(pair, scale):
    v, w = pair
    assume(np.linalg.norm(v) > 1e-6 and np.linalg.norm(w) > 1e-6)
    assert cosine_similarity(v, w) == cosine_similarity(w, v)
    assert abs(cosine_similarity(v, w)) <= 1 + 1e-9
    assert abs(cosine_similarity(v * scale, w) - cosine_similarity(v, w)) <= 1e-9
    assert cosine_similarity(v, v) == pytest.approx(1.0, abs=1e-12)


def test_record_bounds():
    SimilarityRecord(1, 1, "a", 1.0 + 5e-10)
    with pytest.raises(ScoreOutOfRange):
        SimilarityRecord(1, 1, "a", 1.01)


@pytest.mark.parametrize("text_type", TEXT_TYPES)
@pytest.mark.parametrize("verses", [1, 3])
def test_chapter_fixture_averages(text_type, verses):
    means = corpus_means(chapter_means(records_for(text_type, verses)))
    for system, expected in zip(SYSTEMS, AVERAGES[text_type]):
        assert abs(means[system] - expected) <= 1e-4


@pytest.mark.parametrize("text_type", TEXT_TYPES)
def test_chapter_fixture_variation(text_type):
    summaries = chapter_means(records_for(text_type))
    for system, expected in zip(SYSTEMS, VARIATION[text_type]):
        assert abs(inter_chapter_variation(summaries, system).range_pp - expected) <= 0.01


def test_unweighted_chapter_mean():
    recs = [SimilarityRecord(1, v, "a", 1.0) for v in range(1, 10)] + [SimilarityRecord(2, 1, "a", 0.0)]
    assert corpus_means(chapter_means(recs))["a"] == 0.5


def test_variation_single_chapter():
    with pytest.raises(InsufficientChapters):
        inter_chapter_variation([ChapterSummary(1, {"a": 0.9})], "a")


def test_chapter_means_empty():
    with pytest.raises(EmptyInput):
        chapter_means([])


def _grid(scores):
    return [SimilarityRecord(1, v, sys_, s) for v, row in enumerate(scores, 1) for sys_, s in zip("ab", row)]


def test_extremes_returns_all_versions_of_selected_verses():
    recs = _grid([(0.9, 0.8), (0.1, 0.3), (0.5, 0.5)])
    low = extremes(recs, 1, "Lowest")
    assert [(r.verse, r.version) for r in low] == [(2, "a"), (2, "b")]
    high = extremes(recs, 1, "Highest")
    assert {r.verse for r in high} == {1}


@given(st.lists(st.floats(-1, 1), min_size=2, max_size=20, unique=True), st.integers(1, 20))
def test_extremes_reverse_under_negation(scores, k):
    recs = [SimilarityRecord(1, v, "a", s) for v, s in enumerate(scores, 1)]
    neg = [SimilarityRecord(1, v, "a", -s) for v, s in enumerate(scores, 1)]
    assert [r.verse for r in extremes(recs, k, "Lowest")] == [r.verse for r in extremes(neg, k, "Highest")]


def test_extremes_ties_by_position():
    recs = _grid([(0.5, 0.5), (0.5, 0.5)])
    assert extremes(recs, 1, "Highest")[0].verse == 1
    assert extremes(recs, 1, "Lowest")[0].verse == 1


def test_paired_differences_key_mismatch():
    with pytest.raises(KeyMismatch):
        paired_differences([SimilarityRecord(1, 1, "a", 0.1)], [SimilarityRecord(1, 2, "b", 0.1)])


def test_significance_identical_is_one():
    a = [SimilarityRecord(1, v, "a", 0.5 + 0.01 * v) for v in range(1, 30)]
    b = [SimilarityRecord(1, v, "b", 0.5 + 0.01 * v) for v in range(1, 30)]
    assert significance_test(a, b, 1000) == 1.0


def test_significance_clear_shift_is_small_and_seeded():
    rng = np.random.default_rng(1)
    base = rng.uniform(0.4, 0.6, 60)
    a = [SimilarityRecord(1, v, "a", float(s)) for v, s in enumerate(base, 1)]
    b = [SimilarityRecord(1, v, "b", float(s) + 0.05 + rng.normal(0, 0.01)) for v, s in enumerate(base, 1)]
    p = significance_test(a, b, 2000, seed=3)
    assert p == 1 / 2001
    assert significance_test(a, b, 2000, seed=3) == p


def test_significance_single_pair_and_resample_floor():
    a, b = [SimilarityRecord(1, 1, "a", 0.1)], [SimilarityRecord(1, 1, "b", 0.9)]
    assert significance_test(a, b) == 1.0
    with pytest.raises(ValueError):
        significance_test(a, b, 999)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-0.5, 0.5), min_size=2, max_size=15))
def test_significance_in_unit_interval(diffs):
    a = [SimilarityRecord(1, v, "a", 0.0) for v in range(1, len(diffs) + 1)]
    b = [SimilarityRecord(1, v, "b", d) for v, d in enumerate(diffs, 1)]
    assert 0.0 < significance_test(a, b, 1000) <= 1.0


class CountingEmbedder:
    def __init__(self, zero=()):
        self.calls = []
        self.zero = set(zero)

    def embed(self, texts):
        self.calls.append(list(texts))
        return [np.zeros(3) if t in self.zero else np.array([len(t), 1.0, t.count("a") + 1.0]) for t in texts]


def _corpus():
    units = (
        AlignedUnit(1, "源", "same text", {"x": "same text", "y": "another one"}),
        AlignedUnit(2, "源", "ref two", {"x": "cand", "y": "ZERO"}),
    )
    return Corpus("c", TextType.NEWS, (Chapter(1, units),), ("x", "y"))


def test_score_corpus_dedups_and_flags_zero_vectors():
    emb = CountingEmbedder(zero={"ZERO"})
    flagged = []
    recs = score_corpus(_corpus(), emb, flagged=flagged, batch_size=2, max_parallel=2)
    seen = [t for call in emb.calls for t in call]
    assert len(seen) == len(set(seen)) == 5
    assert [(r.verse, r.version) for r in recs] == [(1, "x"), (1, "y"), (2, "x")]
    assert recs[0].score == pytest.approx(1.0)
    assert [(f.verse, f.version, f.reason) for f in flagged] == [(2, "y", "zero-vector")]
