"""Parallel corpus model, on-disk ingestion and sentence segmentation.

A corpus directory looks like::

    <corpus>/manifest.json      # id, text_type, versions, chapters
    <corpus>/source.txt         # Chinese source
    <corpus>/expert.txt         # reference translation
    <corpus>/<version>.txt      # one file per candidate system

Every ``.txt`` file holds ``chapter<TAB>verse<TAB>text`` records. A blank
line followed by a line that is not a record continues the preceding verse
as a new paragraph.
"""

from __future__ import annotations

import enum
import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from .errors import (
    AlignmentGap,
    EmptyInput,
    EncodingError,
    MalformedRecord,
    ManifestError,
    MissingVersionFile,
)

logger = logging.getLogger(__name__)

EXPERT = "expert"
SOURCE = "source"
MANIFEST_NAMES = ("manifest.json", "manifest")

# Bumped whenever a segmentation rule changes; recorded in run manifests.
SEGMENTATION_RULES_VERSION = "seg-1"


class TextType(str, enum.Enum):
    NEWS = "News"
    CLASSICAL_LITERATURE = "ClassicalLiterature"
    MODERN_FICTION = "ModernFiction"

    @classmethod
    def parse(cls, value: str) -> "TextType":
        for member in cls:
            if value in (member.value, member.name) or value.lower() == member.value.lower():
                return member
        raise ManifestError(
            f"unknown text_type {value!r}; expected one of {[m.value for m in cls]}"
        )


class Language(str, enum.Enum):
    CHINESE = "Chinese"
    ENGLISH = "English"


@dataclass(frozen=True)
class AlignedUnit:
    verse: int
    source_zh: str
    reference_en: str
    candidates: Mapping[str, str]

    def __post_init__(self):
        if self.verse < 1:
            raise ValueError(f"verse must be positive, got {self.verse}")
        if not self.source_zh.strip():
            raise ValueError(f"verse {self.verse}: empty source text")
        if not self.reference_en.strip():
            raise ValueError(f"verse {self.verse}: empty reference text")
        for name, text in self.candidates.items():
            if name in (EXPERT, SOURCE):
                raise ValueError(f"{name!r} is reserved and cannot be a candidate")
            if not text.strip():
                raise ValueError(f"verse {self.verse}: empty text for {name!r}")

    def text(self, version: str) -> str:
        if version == EXPERT:
            return self.reference_en
        if version == SOURCE:
            return self.source_zh
        return self.candidates[version]


@dataclass(frozen=True)
class Chapter:
    index: int
    units: tuple[AlignedUnit, ...]

    def __post_init__(self):
        if self.index < 1:
            raise ValueError(f"chapter index must be positive, got {self.index}")
        verses = [u.verse for u in self.units]
        if any(b <= a for a, b in zip(verses, verses[1:])):
            raise ValueError(f"chapter {self.index}: verse indices not strictly increasing")


@dataclass(frozen=True)
class Corpus:
    id: str
    text_type: TextType
    chapters: tuple[Chapter, ...]
    versions: tuple[str, ...] = ()  # candidate versions, expert excluded

    def __post_init__(self):
        indices = [c.index for c in self.chapters]
        if indices != list(range(1, len(indices) + 1)):
            raise ValueError(f"corpus {self.id}: chapter indices must be 1..n, got {indices}")
        if len(set(self.versions)) != len(self.versions):
            raise ValueError(f"corpus {self.id}: duplicate version names")
        if EXPERT in self.versions:
            raise ValueError(f"{EXPERT!r} is reserved for the reference translation")

    @property
    def all_versions(self) -> tuple[str, ...]:
        return (EXPERT, *self.versions)

    def units(self) -> Iterable[tuple[int, AlignedUnit]]:
        for chapter in self.chapters:
            for unit in chapter.units:
                yield chapter.index, unit


@dataclass(frozen=True)
class SegmentedText:
    sentences: tuple[str, ...]
    paragraph_of: tuple[int, ...]
    version: str | None = None

    def __post_init__(self):
        if len(self.sentences) != len(self.paragraph_of):
            raise ValueError("paragraph map length differs from sentence count")
        if any(not s for s in self.sentences):
            raise ValueError("empty sentence")
        if any(b < a for a, b in zip(self.paragraph_of, self.paragraph_of[1:])):
            raise ValueError("paragraph indices must be non-decreasing")

    def paragraphs(self) -> list[str]:
        """Sentences regrouped by paragraph, joined without separators."""
        grouped: dict[int, list[str]] = {}
        for sentence, para in zip(self.sentences, self.paragraph_of):
            grouped.setdefault(para, []).append(sentence)
        return ["".join(v) if _is_cjk_text(v) else " ".join(v) for v in grouped.values()]


# ---------------------------------------------------------------------------
# segmentation

ZH_TERMINATORS = frozenset("。！？…；!?")
ZH_CLOSERS = frozenset("」』\"”’'）)】》")
ZH_COMMAS = frozenset("，,")

EN_TERMINATORS = frozenset(".!?")
EN_CLOSERS = frozenset("\"'”’)]")
EN_OPENERS = frozenset("\"'“‘([")

EN_ABBREVIATIONS = frozenset(
    """mr mrs ms dr prof st jr sr vs etc e.g i.e u.s u.k no mt gen col capt lt
    sgt rev hon inc ltd co corp dept fig jan feb mar apr aug sep sept oct nov dec
    a.m p.m approx cf al""".split()
)

_CJK_RE = re.compile(r"[㐀-䶿一-鿿豈-﫿]")


def _is_cjk_text(parts: list[str]) -> bool:
    return any(_CJK_RE.search(p) for p in parts)


def segment_sentences(
    text: str,
    language: Language | str = Language.CHINESE,
    *,
    comma_splits: bool = False,
    version: str | None = None,
) -> SegmentedText:
    """Split ``text`` into sentences, keeping track of the paragraph of each.

    Every newline ends a paragraph. Delimiters stay attached to the sentence
    they close, so joining the output gives back every non-whitespace
    character of the input in order.
    """
    if not text or not text.strip():
        raise EmptyInput("cannot segment empty text")
    language = Language(language)
    splitter = _split_zh if language is Language.CHINESE else _split_en

    sentences: list[str] = []
    paragraph_of: list[int] = []
    para = 0
    for line in text.splitlines():
        if not line.strip():
            continue
        for sentence in splitter(line, comma_splits):
            sentences.append(sentence)
            paragraph_of.append(para)
        para += 1
    return SegmentedText(tuple(sentences), tuple(paragraph_of), version)


def _cut(line: str, cuts: list[int]) -> list[str]:
    out = []
    start = 0
    for end in [*cuts, len(line)]:
        piece = line[start:end].strip()
        if piece:
            out.append(piece)
        start = end
    return out


def _split_zh(line: str, comma_splits: bool) -> list[str]:
    enders = ZH_TERMINATORS | ZH_COMMAS if comma_splits else ZH_TERMINATORS
    cuts = []
    i, n = 0, len(line)
    while i < n:
        if line[i] in enders:
            while i < n and line[i] in enders:
                i += 1
            while i < n and line[i] in ZH_CLOSERS:
                i += 1
            cuts.append(i)
        else:
            i += 1
    return _cut(line, cuts)


def _preceding_word(line: str, end: int) -> str:
    j = end
    while j > 0 and not line[j - 1].isspace() and line[j - 1] not in EN_OPENERS:
        j -= 1
    return line[j:end]


def _is_abbreviation(line: str, dot: int) -> bool:
    word = _preceding_word(line, dot).rstrip(".")
    if not word:
        return False
    if len(word) == 1 and word.isalpha() and word.isupper():
        return True  # initials: "J. Smith"
    return word.lower() in EN_ABBREVIATIONS


def _starts_new_sentence(line: str, i: int) -> bool:
    n = len(line)
    if i >= n or line[i:].strip() == "":
        return True
    if not line[i].isspace():
        return False
    while i < n and line[i].isspace():
        i += 1
    while i < n and line[i] in EN_OPENERS:
        i += 1
    return i < n and line[i].isupper()


def _split_en(line: str, comma_splits: bool) -> list[str]:
    cuts = []
    i, n = 0, len(line)
    while i < n:
        ch = line[i]
        if ch in EN_TERMINATORS:
            first = i
            while i < n and line[i] in EN_TERMINATORS:
                i += 1
            while i < n and line[i] in EN_CLOSERS:
                i += 1
            single_dot = line[first:i].rstrip("".join(EN_CLOSERS)) == "."
            if _starts_new_sentence(line, i) and not (single_dot and _is_abbreviation(line, first)):
                cuts.append(i)
        elif comma_splits and ch == ",":
            i += 1
            while i < n and line[i] in EN_CLOSERS:
                i += 1
            cuts.append(i)
        else:
            i += 1
    return _cut(line, cuts)


def sentence_counts(
    corpora: Corpus | Iterable[Corpus],
    *,
    comma_splits: bool = False,
) -> dict[str, dict[str, int]]:
    """Sentence totals per version and text type, in the shape of a count table.

    Only English versions (the reference and every candidate) are counted.
    """
    if isinstance(corpora, Corpus):
        corpora = [corpora]
    table: dict[str, dict[str, int]] = {}
    for corpus in corpora:
        for version in corpus.all_versions:
            row = table.setdefault(version, {})
            row.setdefault(corpus.text_type.value, 0)
        for _, unit in corpus.units():
            for version in corpus.all_versions:
                seg = segment_sentences(unit.text(version), Language.ENGLISH, comma_splits=comma_splits)
                table[version][corpus.text_type.value] += len(seg.sentences)
    return table


# ---------------------------------------------------------------------------
# ingestion

_RECORD_RE = re.compile(r"^(\d+)\t(\d+)\t(.*)$")

# (simplified, traditional) pairs frequent enough to show up in any chapter
_SC_TC_PAIRS = ("这這", "说說", "国國", "们們", "来來", "时時", "会會", "为為", "对對", "个個", "门門", "见見")


def find_manifest(corpus_dir: Path) -> Path:
    for name in MANIFEST_NAMES:
        candidate = corpus_dir / name
        if candidate.is_file():
            return candidate
    raise ManifestError(f"no manifest found in {corpus_dir} (looked for {', '.join(MANIFEST_NAMES)})")


def load_manifest(corpus_dir: Path) -> dict:
    path = find_manifest(corpus_dir)
    try:
        manifest = json.loads(_read_utf8(path))
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{path}: invalid JSON: {exc}") from exc
    return validate_manifest(manifest)


def validate_manifest(manifest: Mapping) -> dict:
    if not isinstance(manifest, Mapping):
        raise ManifestError("manifest must be a JSON object")
    manifest = dict(manifest)
    for key in ("id", "text_type", "versions", "chapters"):
        if key not in manifest:
            raise ManifestError(f"manifest lacks required key {key!r}")
    manifest["text_type"] = TextType.parse(str(manifest["text_type"])).value
    versions = list(manifest["versions"])
    if EXPERT not in versions:
        raise ManifestError(f"manifest versions must include {EXPERT!r}")
    if len(set(versions)) != len(versions):
        raise ManifestError("duplicate version names in manifest")
    if SOURCE in versions:
        raise ManifestError(f"{SOURCE!r} is reserved for the Chinese source")
    chapters = [int(c) for c in manifest["chapters"]]
    if chapters != list(range(1, len(chapters) + 1)):
        raise ManifestError(f"chapters must be contiguous from 1, got {chapters}")
    manifest["versions"] = versions
    manifest["chapters"] = chapters
    manifest.setdefault("files", {})
    return manifest


def _read_utf8(path: Path) -> str:
    data = path.read_bytes()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise EncodingError(path, exc.start) from None
    return text.removeprefix("﻿")


def read_version_file(path: Path) -> dict[tuple[int, int], str]:
    """Parse one version file into ``{(chapter, verse): text}``."""
    records: dict[tuple[int, int], str] = {}
    last_key = None
    pending_break = False
    for line_no, raw in enumerate(_read_utf8(path).splitlines(), start=1):
        line = raw.rstrip("\r")
        if not line.strip():
            pending_break = True
            continue
        match = _RECORD_RE.match(line)
        if match:
            key = (int(match.group(1)), int(match.group(2)))
            text = match.group(3).strip()
            if key[0] < 1 or key[1] < 1:
                raise MalformedRecord(path, line_no, "chapter and verse must be positive")
            if not text:
                raise MalformedRecord(path, line_no, "empty text")
            if key in records:
                raise MalformedRecord(path, line_no, f"duplicate record {key[0]}.{key[1]}")
            records[key] = text
            last_key = key
        elif pending_break and last_key is not None:
            records[last_key] += "\n" + line.strip()
        else:
            raise MalformedRecord(path, line_no, "expected 'chapter<TAB>verse<TAB>text'")
        pending_break = False
    return records


def write_version_file(path: Path, records: Mapping[tuple[int, int], str]) -> None:
    lines = []
    for (chapter, verse), text in sorted(records.items()):
        paragraphs = [p.strip() for p in text.split("\n") if p.strip()]
        lines.append(f"{chapter}\t{verse}\t{paragraphs[0]}")
        for para in paragraphs[1:]:
            lines.append("")
            lines.append(para)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def version_path(corpus_dir: Path, manifest: Mapping, version: str) -> Path:
    return corpus_dir / manifest.get("files", {}).get(version, f"{version}.txt")


def _warn_mixed_script(corpus_id: str, texts: Iterable[str]) -> None:
    seen_sc = seen_tc = False
    for text in texts:
        for sc, tc in _SC_TC_PAIRS:
            seen_sc = seen_sc or sc in text
            seen_tc = seen_tc or tc in text
        if seen_sc and seen_tc:
            logger.warning(
                "corpus %s: source mixes simplified and traditional characters; "
                "normalize before ingestion", corpus_id,
            )
            return


def ingest_corpus(
    path: str | Path,
    manifest: Mapping | None = None,
    *,
    versions: Iterable[str] | None = None,
) -> Corpus:
    """Load and validate a corpus directory.

    ``versions`` restricts loading to a subset of the manifest's versions
    (the expert reference is always loaded).
    """
    corpus_dir = Path(path)
    manifest = load_manifest(corpus_dir) if manifest is None else validate_manifest(manifest)
    wanted = list(manifest["versions"]) if versions is None else [EXPERT, *[v for v in versions if v != EXPERT]]

    texts: dict[str, dict[tuple[int, int], str]] = {}
    for version in [SOURCE, *wanted]:
        file_path = version_path(corpus_dir, manifest, version)
        if not file_path.is_file():
            raise MissingVersionFile(version, file_path)
        texts[version] = read_version_file(file_path)

    declared = set(manifest["chapters"])
    all_keys = sorted(set().union(*(t.keys() for t in texts.values())))
    for chapter, verse in all_keys:
        if chapter not in declared:
            raise ManifestError(f"chapter {chapter} appears in the data but not in the manifest")
        for version, records in texts.items():
            if (chapter, verse) not in records:
                raise AlignmentGap(chapter, verse, version)

    _warn_mixed_script(manifest["id"], texts[SOURCE].values())

    candidates = [v for v in wanted if v != EXPERT]
    by_chapter: dict[int, list[AlignedUnit]] = {c: [] for c in manifest["chapters"]}
    for chapter, verse in all_keys:
        by_chapter[chapter].append(
            AlignedUnit(
                verse=verse,
                source_zh=texts[SOURCE][(chapter, verse)],
                reference_en=texts[EXPERT][(chapter, verse)],
                candidates={v: texts[v][(chapter, verse)] for v in candidates},
            )
        )
    for chapter, units in by_chapter.items():
        if not units:
            raise ManifestError(f"chapter {chapter} is declared but has no verses")

    return Corpus(
        id=str(manifest["id"]),
        text_type=TextType(manifest["text_type"]),
        chapters=tuple(Chapter(c, tuple(u)) for c, u in sorted(by_chapter.items())),
        versions=tuple(candidates),
    )
