import itertools

import pytest
from hypothesis import given, strategies as st

from mtfidelity.errors import EmptyInput, MissingCategory
from mtfidelity.sentiment import (
    POLARITY_OF,
    EmotionCategory,
    Polarity,
    aggregate_distribution,
    distribution_from_counts,
    label_sentence,
    merge_distributions,
    normalize_scores,
    polarity_of,
    sentiment_deviation,
)


def scores(**overrides):
    base = {c.value: 0.1 for c in EmotionCategory}
    base.update(overrides)
    return base


def dist_from_pct(pos, neu, neg, version="v"):
    return distribution_from_counts(version, {"Optimistic": pos, "Empathetic": neu, "Sad": neg})


def test_polarity_groups():
    assert {c for c, p in POLARITY_OF.items() if p is Polarity.POSITIVE} == {
        EmotionCategory.OPTIMISTIC, EmotionCategory.THANKFUL, EmotionCategory.HUMOUR}
    assert {c for c, p in POLARITY_OF.items() if p is Polarity.NEUTRAL} == {EmotionCategory.EMPATHETIC}
    assert len(POLARITY_OF) == 9


def test_aliases():
    assert polarity_of("Joking") is Polarity.POSITIVE
    out = normalize_scores({**scores(), "Official report": 0.9})
    assert len(out) == 9


def test_missing_category():
    s = scores()
    del s["Denial"]
    with pytest.raises(MissingCategory) as info:
        normalize_scores(s)
    assert tuple(info.value.categories) == ("Denial",)


def test_score_range_checked():
    with pytest.raises(ValueError):
        normalize_scores(scores(Sad=1.5))


def test_multilabel_threshold_inclusive():
    lab = label_sentence(scores(Sad=0.5, Anxious=0.7))
    assert lab.active == {EmotionCategory.SAD, EmotionCategory.ANXIOUS}


def test_argmax_fallback_first_on_ties():
    lab = label_sentence(scores(Sad=0.3, Optimistic=0.3))
    assert lab.active == {EmotionCategory.OPTIMISTIC}


def test_threshold_bounds():
    with pytest.raises(ValueError):
        label_sentence(scores(), threshold=1.0)


def test_hand_case_deviation_is_ten():
    assert sentiment_deviation(dist_from_pct(50, 30, 20), dist_from_pct(55, 25, 20)) == 10.0


def test_polarity_pct_over_label_instances():
    labels = [label_sentence(scores(Sad=0.9, Optimistic=0.9)), label_sentence(scores(Empathetic=0.8))]
    d = aggregate_distribution(labels, "v")
    assert d.sentences == 2
    assert d.polarity_counts == {Polarity.POSITIVE: 1, Polarity.NEUTRAL: 1, Polarity.NEGATIVE: 1}
    assert d.polarity_pct[Polarity.POSITIVE] == pytest.approx(100 / 3)


def test_aggregate_empty():
    with pytest.raises(EmptyInput):
        aggregate_distribution([], "v")


def test_merge_sums_counts():
    a = distribution_from_counts("v", {"Sad": 2}, sentences=2)
    b = distribution_from_counts("v", {"Thankful": 2}, sentences=1)
    m = merge_distributions([a, b], "v")
    assert m.sentences == 3
    assert m.polarity_pct[Polarity.NEGATIVE] == 50.0


COUNTS = st.fixed_dictionaries({c: st.integers(0, 40) for c in EmotionCategory}).filter(lambda d: sum(d.values()) > 0)


@given(COUNTS)
def test_percentages_sum_to_100(counts):
    d = distribution_from_counts("v", counts)
    assert abs(sum(d.polarity_pct.values()) - 100.0) <= 0.05


@given(COUNTS, COUNTS, COUNTS)
def test_deviation_is_l1_metric(a, b, c):
    x, y, z = (distribution_from_counts("v", k) for k in (a, b, c))
    assert sentiment_deviation(x, y) == sentiment_deviation(y, x)
    assert sentiment_deviation(x, x) == 0.0
    assert sentiment_deviation(x, z) <= sentiment_deviation(x, y) + sentiment_deviation(y, z) + 1e-9
    assert 0.0 <= sentiment_deviation(x, y) <= 200.0


def test_identity_of_indiscernibles():
    for a, b in itertools.combinations([(1, 0, 0), (0, 1, 0), (1, 1, 0), (2, 2, 0)], 2):
        da, db = dist_from_pct(*a), dist_from_pct(*b)
        same = da.polarity_pct == db.polarity_pct
        assert (sentiment_deviation(da, db) == 0.0) == same
