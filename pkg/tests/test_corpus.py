import json

import pytest
from hypothesis import given, strategies as st

from mtfidelity.corpus import (
    EXPERT,
    Language,
    ingest_corpus,
    read_version_file,
    segment_sentences,
    sentence_counts,
    validate_manifest,
    write_version_file,
)
from mtfidelity.errors import (
    AlignmentGap,
    EmptyInput,
    EncodingError,
    MalformedRecord,
    ManifestError,
    MissingVersionFile,
)


def make_corpus(root, versions=("expert", "a"), chapters=(1, 2), verses=2, **manifest_extra):
    root.mkdir(parents=True, exist_ok=True)
    manifest = {"id": "t", "text_type": "News", "chapters": list(chapters), "versions": list(versions), **manifest_extra}
    (root / "manifest.json").write_text(json.dumps(manifest), encoding="utf-8")
    for v in ("source", *versions):
        recs = {(c, k): (f"第{c}章第{k}句。" if v == "source" else f"{v} text {c} {k}.") for c in chapters for k in range(1, verses + 1)}
        write_version_file(root / f"{v}.txt", recs)
    return root


def test_sample_corpus_loads(sample_dir):
    c = ingest_corpus(sample_dir / "ferry")
    assert c.text_type.value == "ModernFiction"
    assert [ch.index for ch in c.chapters] == [1, 2, 3]
    assert c.all_versions[0] == EXPERT
    assert set(c.versions) == {"google", "gpt4", "gpt4o", "deepseek"}
    assert sum(len(ch.units) for ch in c.chapters) == 12


def test_alignment_gap_names_unit(tmp_path):
    root = make_corpus(tmp_path / "c")
    recs = read_version_file(root / "a.txt")
    del recs[(2, 1)]
    write_version_file(root / "a.txt", recs)
    with pytest.raises(AlignmentGap) as info:
        ingest_corpus(root)
    assert (info.value.chapter, info.value.verse, info.value.missing_in) == (2, 1, "a")


def test_missing_version_file(tmp_path):
    root = make_corpus(tmp_path / "c")
    (root / "a.txt").unlink()
    with pytest.raises(MissingVersionFile):
        ingest_corpus(root)


def test_invalid_utf8_reports_offset(tmp_path):
    root = make_corpus(tmp_path / "c")
    (root / "a.txt").write_bytes(b"1\t1\tok\n1\t2\t\xff\n")
    with pytest.raises(EncodingError) as info:
        ingest_corpus(root)
    assert info.value.offset == 11


def test_versions_subset_loads_expert_only(tmp_path):
    root = make_corpus(tmp_path / "c")
    (root / "a.txt").unlink()
    c = ingest_corpus(root, versions=[EXPERT])
    assert c.versions == ()


@pytest.mark.parametrize(
    "patch",
    [
        {"versions": ["a"]},
        {"versions": ["expert", "source"]},
        {"chapters": [1, 3]},
        {"text_type": "Poetry"},
    ],
)
def test_manifest_validation(patch):
    base = {"id": "x", "text_type": "News", "chapters": [1, 2], "versions": ["expert"]}
    with pytest.raises(ManifestError):
        validate_manifest({**base, **patch})


def test_manifest_missing(tmp_path):
    root = make_corpus(tmp_path / "c")
    (root / "manifest.json").unlink()
    with pytest.raises(ManifestError):
        ingest_corpus(root)


def test_undeclared_chapter(tmp_path):
    root = make_corpus(tmp_path / "c", chapters=(1, 2))
    m = json.loads((root / "manifest.json").read_text())
    m["chapters"] = [1]
    (root / "manifest.json").write_text(json.dumps(m))
    with pytest.raises(ManifestError):
        ingest_corpus(root)


def test_malformed_record(tmp_path):
    p = tmp_path / "v.txt"
    p.write_text("1\t1\tfine\nnot a record\n", encoding="utf-8")
    with pytest.raises(MalformedRecord) as info:
        read_version_file(p)
    assert info.value.line_no == 2


def test_paragraph_continuation_roundtrip(tmp_path):
    recs = {(1, 1): "First paragraph.\nSecond paragraph.", (1, 2): "Single."}
    p = tmp_path / "v.txt"
    write_version_file(p, recs)
    assert read_version_file(p) == recs


def test_bom_is_stripped(tmp_path):
    p = tmp_path / "v.txt"
    p.write_bytes("﻿1\t1\thello\n".encode())
    assert read_version_file(p) == {(1, 1): "hello"}


def test_mixed_script_warns(tmp_path, caplog):
    root = make_corpus(tmp_path / "c")
    write_version_file(root / "source.txt", {(c, k): ("这是" if k == 1 else "這是") for c in (1, 2) for k in (1, 2)})
    ingest_corpus(root)
    assert any("simplified and traditional" in r.message for r in caplog.records)


# segmentation


def test_chinese_terminators_and_closers():
    seg = segment_sentences("他说：“走吧。”我们走了！真的？好……")
    assert seg.sentences == ("他说：“走吧。”", "我们走了！", "真的？", "好……")


def test_chinese_comma_splits_optional():
    assert len(segment_sentences("一，二。").sentences) == 1
    assert segment_sentences("一，二。", comma_splits=True).sentences == ("一，", "二。")


def test_chinese_semicolon_is_terminator():
    assert segment_sentences("甲；乙。").sentences == ("甲；", "乙。")


def test_english_abbreviations_and_initials():
    text = 'Mr. Smith met J. K. Rowling at 5 p.m. today. "Really?" She asked. Yes.'
    seg = segment_sentences(text, Language.ENGLISH)
    assert seg.sentences[0].startswith("Mr. Smith met J. K. Rowling")
    assert seg.sentences[-1] == "Yes."


def test_english_quote_closers_stay_with_sentence():
    seg = segment_sentences('He said "go." Then he left.', Language.ENGLISH)
    assert seg.sentences == ('He said "go."', "Then he left.")


def test_newline_ends_paragraph():
    seg = segment_sentences("One. Two\nThree", Language.ENGLISH)
    assert seg.sentences == ("One.", "Two", "Three")
    assert seg.paragraph_of == (0, 0, 1)
    assert seg.paragraphs() == ["One. Two", "Three"]


def test_empty_input_raises():
    with pytest.raises(EmptyInput):
        segment_sentences("  \n ")


@given(st.lists(st.text(alphabet="甲乙丙丁戊", min_size=1, max_size=6), min_size=1, max_size=8),
       st.lists(st.sampled_from(list("。！？；")), min_size=8, max_size=8))
def test_chinese_segmentation_preserves_text(chunks, terms):
    text = "".join(c + t for c, t in zip(chunks, terms))
    seg = segment_sentences(text)
    assert "".join(seg.sentences) == text
    assert len(seg.sentences) == len(chunks)


@given(st.text(alphabet=st.characters(whitelist_categories=("Lu", "Ll", "Lo", "Po", "Zs")), min_size=1, max_size=80))
def test_segmentation_never_loses_non_space_characters(text):
    if not text.strip():
        return
    for lang in Language:
        seg = segment_sentences(text, lang)
        assert "".join(seg.sentences).replace(" ", "") == text.replace(" ", "")


def test_sentence_counts_by_version(sample_dir):
    c = ingest_corpus(sample_dir / "ferry")
    counts = sentence_counts([c], comma_splits=False)
    assert set(counts) == set(c.all_versions)
    assert counts["expert"]["ModernFiction"] == 13  # one verse holds two sentences
