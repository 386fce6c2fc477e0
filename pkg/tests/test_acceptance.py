"""One test per acceptance criterion; a PASS/FAIL line for each is printed in the summary."""

import functools
import json
import time
from collections import Counter

import numpy as np

from chapter_tables import AVERAGES, SIMILARITY_3DP, SYSTEMS, TEXT_TYPES, VARIATION, records_for
from conftest import ACCEPTANCE
from helpers import run_cli, tree_bytes, write_profiles
from mtfidelity.lexical import TokenStream, load_stoplist, ngram_counts, remove_stopwords
from mtfidelity.providers import MockTransport
from mtfidelity.report import build_performance_table, fmt
from mtfidelity.semantic import chapter_means, corpus_means, cosine_similarity, inter_chapter_variation
from mtfidelity.sentiment import POLARITY_OF, EmotionCategory, Polarity, distribution_from_counts, sentiment_deviation
from mtfidelity.tokenmatch import TokenEmbeddingSequence, greedy_match_score, similarity_matrix


def criterion(name):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            ACCEPTANCE[name] = "FAIL"
            fn(*args, **kwargs)
            ACCEPTANCE[name] = "PASS"

        return run

    return wrap


@criterion("aggregation: chapter means reproduce every Average row within 1e-4, under 1 s")
def test_aggregation_fixture():
    start = time.perf_counter()
    for text_type in TEXT_TYPES:
        means = corpus_means(chapter_means(records_for(text_type)))
        for system, expected in zip(SYSTEMS, AVERAGES[text_type]):
            assert abs(means[system] - expected) <= 1e-4, (text_type, system, means[system])
    assert time.perf_counter() - start < 1.0


@criterion("variation: inter-chapter range within 0.01 pp (google news asserted as 3.48)")
def test_variation_fixture():
    for text_type in TEXT_TYPES:
        summaries = chapter_means(records_for(text_type))
        for system, expected in zip(SYSTEMS, VARIATION[text_type]):
            got = inter_chapter_variation(summaries, system).range_pp
            assert abs(got - expected) <= 0.01, (text_type, system, got)
    # the summary table prints 3.46 for this cell; the chapter values give 3.48
    news = chapter_means(records_for("News"))
    assert fmt(inter_chapter_variation(news, "google").range_pp, 2) == "3.48"


@criterion("performance block: similarity to 3 decimals, deepseek best in every column")
def test_similarity_block():
    summaries = {t: chapter_means(records_for(t)) for t in TEXT_TYPES}
    flat = {v: distribution_from_counts(v, {"Optimistic": 1}) for v in ("expert", *SYSTEMS)}
    table = build_performance_table(summaries, {t: flat for t in TEXT_TYPES})
    for system, cells in SIMILARITY_3DP.items():
        assert tuple(fmt(table.row(system, t).semantic_similarity, 3) for t in TEXT_TYPES) == cells
    for t in TEXT_TYPES:
        assert table.best[("semantic_similarity", t)] == {"deepseek"}


@criterion("cosine: 10,000 pairs symmetric, bounded, scale invariant, identity 1; hand oracle 0.8889")
def test_cosine_suite():
    rng = np.random.default_rng(20240601)
    for _ in range(10_000):
        dim = int(rng.integers(1, 33))
        a = rng.normal(size=dim) * rng.choice([1e-3, 1.0, 1e3])
        b = rng.normal(size=dim)
        s = cosine_similarity(a, b)
        assert s == cosine_similarity(b, a)
        assert abs(s) <= 1 + 1e-9
        scale = float(rng.uniform(1e-3, 1e3))
        assert abs(cosine_similarity(scale * a, b) - s) <= 1e-9
        assert abs(cosine_similarity(a, a) - 1.0) <= 1e-12
    assert abs(cosine_similarity([1, 2, 2], [2, 1, 2]) - 0.8889) <= 1e-4


@criterion("token match: 1,000 matrices equal brute-force maxima; identity F1 = 1; [[1,0]] -> (0.5, 1.0, 0.6667)")
def test_token_match_oracle():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        r, c = (int(x) for x in rng.integers(1, 7, size=2))
        m = rng.uniform(-1, 1, size=(r, c))
        rows = m.tolist()
        recall = sum(max(row) for row in rows) / r
        precision = sum(max(rows[i][j] for i in range(r)) for j in range(c)) / c
        s = greedy_match_score(m)
        assert (s.precision, s.recall) == (precision, recall)
    seq = TokenEmbeddingSequence(("a", "b", "c", "d"), rng.normal(size=(4, 8)))
    assert abs(greedy_match_score(similarity_matrix(seq, seq)).f1 - 1.0) <= 1e-12
    s = greedy_match_score([[1.0, 0.0]])
    assert (s.precision, s.recall) == (0.5, 1.0) and abs(s.f1 - 0.6667) <= 1e-4


@criterion("n-grams: 500 random streams match window enumeration; stopword removal idempotent")
def test_ngram_oracle():
    rng = np.random.default_rng(11)
    vocab = ["the", "of", "river", "boat", "a", "old", "zhou", "and", "sang", "rain"]
    stop, _ = load_stoplist()
    for _ in range(500):
        length = int(rng.integers(0, 51))
        tokens = tuple(vocab[i] for i in rng.integers(0, len(vocab), size=length))
        cuts = sorted({0, *(int(x) for x in rng.integers(1, max(length, 2), size=int(rng.integers(0, 4))) if x < length)})
        stream = TokenStream(tokens, "v", tuple(cuts) if tokens else (0,))
        for n in (2, 3):
            expected = Counter()
            for sent in stream.sentences():
                for i in range(len(sent) - n + 1):
                    expected[sent[i : i + n]] += 1
            assert ngram_counts(stream, n).entries == dict(expected)
        once = remove_stopwords(stream, stop)
        assert remove_stopwords(once, stop) == once


@criterion("sentiment: polarity map total, L1 metric over 1,000 triples, hand case 10.0, sums to 100")
def test_sentiment_metric_suite():
    assert set(POLARITY_OF) == set(EmotionCategory) and set(POLARITY_OF.values()) == set(Polarity)
    rng = np.random.default_rng(3)

    def random_dist():
        counts = {c: int(n) for c, n in zip(EmotionCategory, rng.integers(0, 30, size=9))}
        counts[EmotionCategory.SAD] += 1
        return distribution_from_counts("v", counts)

    for _ in range(1000):
        x, y, z = random_dist(), random_dist(), random_dist()
        for d in (x, y, z):
            assert abs(sum(d.polarity_pct.values()) - 100.0) <= 0.05
        assert sentiment_deviation(x, y) == sentiment_deviation(y, x)
        assert sentiment_deviation(x, x) == 0.0
        assert (sentiment_deviation(x, y) == 0.0) == (x.polarity_pct == y.polarity_pct)
        assert sentiment_deviation(x, z) <= sentiment_deviation(x, y) + sentiment_deviation(y, z) + 1e-9

    def pct(pos, neu, neg):
        return distribution_from_counts("v", {"Optimistic": pos, "Empathetic": neu, "Sad": neg})

    assert sentiment_deviation(pct(50, 30, 20), pct(55, 25, 20)) == 10.0


@criterion("end to end: two runs on the bundled corpus are byte-identical; warm cache makes no calls; under 10 s")
def test_end_to_end_determinism(tmp_path, sample_dir, capsys, no_network, monkeypatch):
    start = time.perf_counter()
    upstream = []
    original = MockTransport.__call__

    def counting(self, cfg, body):
        upstream.append(cfg.name)
        return original(self, cfg, body)

    monkeypatch.setattr(MockTransport, "__call__", counting)
    cache = tmp_path / "cache"
    args = ("--corpus", sample_dir / "ferry", "--providers", sample_dir / "mock_providers.json", "--cache", cache)

    def full_run(out):
        assert run_cli(capsys, "analyze", *args, "--out", out)[0] == 0
        assert run_cli(capsys, "report", "--out", out)[0] == 0
        return tree_bytes(out)

    first = full_run(tmp_path / "run1")
    assert upstream, "cold cache should reach the providers"
    upstream.clear()
    second = full_run(tmp_path / "run2")
    assert upstream == [] and no_network == []
    assert first == second
    assert time.perf_counter() - start < 10.0


@criterion("refusal: a refused unit is flagged, warnings = 1, exit 0")
def test_refusal_handling(tmp_path, sample_dir, capsys):
    refusal = "Sorry, but I can't assist with that"
    profiles = write_profiles(tmp_path / "p.json", {
        "name": "gpt4", "preset": "mock-translation", "system_prompt": "Translate.",
        "responses": {"他从不收钱，只说：“路是大家的。”": refusal},
    })
    code, out, _ = run_cli(capsys, "translate", "--corpus", sample_dir / "ferry", "--providers", profiles,
                           "--out", tmp_path / "t", "--porcelain")
    assert code == 0
    assert json.loads(out)["warnings"] == 1
    flags = json.loads((tmp_path / "t" / "ferry" / "flags.json").read_text())
    assert [(f["chapter"], f["verse"], f["reason"]) for f in flags] == [(1, 3, "refusal")]
