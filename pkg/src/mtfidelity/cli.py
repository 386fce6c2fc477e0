"""Command line entry point: ``mtfidelity {ingest,translate,analyze,report,sample}``.

Exit codes: 0 success, 2 invalid input or configuration, 3 a translation
provider was unreachable, 4 provider failure during analysis, 5 missing
upstream artifacts for ``report``.
"""

from __future__ import annotations

import argparse
import json
import logging
import shutil
import sys
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

from . import __version__
from .corpus import EXPERT, Corpus, ingest_corpus, load_manifest, sentence_counts, version_path, write_version_file
from .errors import AuthError, CorpusError, IoError, MissingCategory, MTFidelityError, NetworkError, ProviderError, ProviderRefusal
from .pipeline import ANALYSIS_DIR, REPORT_DIR, STAGES, MissingArtifact, Settings, analyze, build_report
from .providers import Embedder, ProviderConfig, ProviderKind, ResponseCache, SentimentClassifier, Translator, load_profiles
from .report import export, render_performance_table

logger = logging.getLogger("mtfidelity")

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_UNREACHABLE = 3
EXIT_PROVIDER = 4
EXIT_MISSING_ARTIFACT = 5

FLAGS_FILE = "flags.json"


@dataclass
class RunConfig:
    corpora: list[str] = field(default_factory=list)
    providers: str | None = None
    out: str | None = None
    cache: str | None = None
    formats: list[str] = field(default_factory=lambda: ["csv", "json"])
    settings: Settings = field(default_factory=Settings)

    def validate(self) -> None:
        self.settings.validate()
        bad = set(self.formats) - {"csv", "json"}
        if bad or not self.formats:
            raise ValueError(f"formats must be a non-empty subset of csv,json; got {self.formats}")

    def to_dict(self) -> dict:
        return {"corpora": self.corpora, "formats": self.formats, "settings": asdict(self.settings)}


class UsageError(Exception):
    pass


def _split_list(values: Sequence[str] | None) -> list[str]:
    out: list[str] = []
    for v in values or []:
        out.extend(x.strip() for x in v.split(",") if x.strip())
    return out


def build_config(args: argparse.Namespace) -> RunConfig:
    """Merge a ``--config`` JSON file with command-line flags (flags win)."""
    data: dict = {}
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
    settings_data = dict(data.get("settings", {}))
    for name in ("threshold", "granularity", "resamples", "seed", "top_k", "extremes_k", "stoplist"):
        value = getattr(args, name, None)
        if value is not None:
            settings_data[name] = value
    if getattr(args, "comma_splits", False):
        settings_data["comma_splits"] = True
    if getattr(args, "one_to_one", False):
        settings_data["one_to_one"] = True
    skip = _split_list(getattr(args, "skip", None))
    if skip:
        settings_data["skip"] = skip
    settings_data["skip"] = tuple(settings_data.get("skip", ()))
    try:
        settings = Settings(**settings_data)
    except TypeError as exc:
        raise UsageError(f"bad settings in config: {exc}") from exc

    cfg = RunConfig(
        corpora=list(getattr(args, "corpus", None) or data.get("corpora", [])),
        providers=getattr(args, "providers", None) or data.get("providers"),
        out=getattr(args, "out", None) or data.get("out"),
        cache=getattr(args, "cache", None) or data.get("cache"),
        formats=_split_list(getattr(args, "formats", None)) or list(data.get("formats", ["csv", "json"])),
        settings=settings,
    )
    try:
        cfg.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return cfg


def _error_report(exc: BaseException) -> str:
    report = {"error": type(exc).__name__, "message": str(exc)}
    for attr in ("chapter", "verse", "missing_in", "version", "offset", "line_no", "path"):
        if hasattr(exc, attr):
            report[attr] = str(getattr(exc, attr)) if attr == "path" else getattr(exc, attr)
    return json.dumps(report, sort_keys=True, ensure_ascii=False)


def _fail(code: int, exc: BaseException, hint: str | None = None) -> int:
    print(_error_report(exc), file=sys.stderr)
    if hint:
        print(hint, file=sys.stderr)
    return code


def _load_corpora(paths: Sequence[str]) -> list[Corpus]:
    if not paths:
        raise UsageError("no corpus given; pass --corpus DIR (repeatable) or set 'corpora' in --config")
    return [ingest_corpus(p) for p in paths]


def _cache(cfg: RunConfig) -> ResponseCache | None:
    return ResponseCache(cfg.cache) if cfg.cache else None


def _profiles(cfg: RunConfig) -> list[ProviderConfig]:
    if not cfg.providers:
        raise UsageError("no provider profiles; pass --providers FILE")
    try:
        return load_profiles(cfg.providers)
    except (OSError, ValueError, TypeError) as exc:
        raise UsageError(f"bad provider profiles {cfg.providers}: {exc}") from exc


def _one(profiles: Sequence[ProviderConfig], kind: ProviderKind) -> ProviderConfig:
    matches = [p for p in profiles if p.kind is kind]
    if len(matches) != 1:
        raise UsageError(f"expected exactly one {kind.value} profile, found {len(matches)}")
    return matches[0]


def _print_counts(counts: dict[str, dict[str, int]], porcelain: bool) -> None:
    if porcelain:
        print(json.dumps({"sentence_counts": counts}, sort_keys=True))
        return
    types = sorted({t for row in counts.values() for t in row})
    width = max([len("Translation Version"), *map(len, counts)])
    print(f"{'Translation Version':<{width}}  " + "  ".join(f"{t:>19}" for t in types))
    for version, row in counts.items():
        print(f"{version:<{width}}  " + "  ".join(f"{row.get(t, 0):>19}" for t in types))


# ---------------------------------------------------------------------------
# subcommands


def cmd_ingest(args: argparse.Namespace) -> int:
    try:
        cfg = build_config(args)
        if args.dry_run:
            for path in cfg.corpora:
                print(f"would validate corpus {path}")
            return EXIT_OK
        corpora = _load_corpora(cfg.corpora)
    except UsageError as exc:
        return _fail(EXIT_INVALID, exc, "usage: mtfidelity ingest --corpus DIR [--corpus DIR ...]")
    except CorpusError as exc:
        return _fail(EXIT_INVALID, exc, "a corpus directory needs manifest.json plus one <version>.txt per version")
    for c in corpora:
        logger.info("corpus %s (%s): %d chapters, %d units, versions %s", c.id, c.text_type.value, len(c.chapters),
                    sum(len(ch.units) for ch in c.chapters), ", ".join(c.all_versions))
    _print_counts(sentence_counts(corpora, comma_splits=cfg.settings.comma_splits), args.porcelain)
    return EXIT_OK


def _read_flags(corpus_dir: Path) -> list[dict]:
    path = corpus_dir / FLAGS_FILE
    if not path.is_file():
        return []
    return json.loads(path.read_text(encoding="utf-8"))


def cmd_translate(args: argparse.Namespace) -> int:
    try:
        cfg = build_config(args)
        translators = [p for p in _profiles(cfg) if p.kind is ProviderKind.TRANSLATION]
        if not translators:
            raise UsageError("no Translation profiles in the provider file")
        if not cfg.corpora:
            raise UsageError("no corpus given; pass --corpus DIR")
        corpora = [(Path(p), load_manifest(Path(p)), ingest_corpus(p, versions=[EXPERT])) for p in cfg.corpora]
    except UsageError as exc:
        return _fail(EXIT_INVALID, exc)
    except CorpusError as exc:
        return _fail(EXIT_INVALID, exc)

    if args.dry_run:
        for corpus_dir, _, corpus in corpora:
            units = sum(len(ch.units) for ch in corpus.chapters)
            for p in translators:
                print(f"would translate {units} units of {corpus.id} with {p.name} ({p.protocol} {p.model})")
        return EXIT_OK

    cache = _cache(cfg)
    warnings = 0
    unreachable: set[str] = set()
    summary = []
    for corpus_dir, manifest, corpus in corpora:
        dest = Path(cfg.out) / corpus.id if cfg.out else corpus_dir
        versions = list(manifest["versions"])
        if dest.resolve() != corpus_dir.resolve():
            # a fresh corpus holding only source, expert and the new versions
            dest.mkdir(parents=True, exist_ok=True)
            for version in ("source", EXPERT):
                src = version_path(corpus_dir, manifest, version)
                shutil.copyfile(src, dest / src.name)
            versions = [EXPERT]
            manifest = {**manifest, "files": {k: v for k, v in manifest["files"].items() if k in ("source", EXPERT)}}
        names = {p.name for p in translators}
        flags = [f for f in _read_flags(corpus_dir) if f.get("version") in versions and f.get("version") not in names]
        for profile in translators:
            translator = Translator(profile, cache)
            records: dict[tuple[int, int], str] = {}
            failures = refusals = 0
            auth_failed = False
            for chapter, unit in corpus.units():
                try:
                    text = translator.translate(unit.source_zh)
                except ProviderRefusal as exc:
                    text = exc.response or "[empty response]"
                    refusals += 1
                    flags.append({"corpus": corpus.id, "chapter": chapter, "verse": unit.verse, "version": profile.name,
                                  "reason": "refusal", "response": exc.response})
                    logger.warning("%s %d.%d: %s refused: %r", corpus.id, chapter, unit.verse, profile.name, exc.response)
                except AuthError as exc:
                    logger.error("%s: %s", profile.name, exc)
                    auth_failed = True
                    break
                except (NetworkError, ProviderError) as exc:
                    failures += 1
                    logger.warning("%s %d.%d: %s failed: %s", corpus.id, chapter, unit.verse, profile.name, exc)
                    continue
                records[(chapter, unit.verse)] = text
            if auth_failed or (failures and not records):
                unreachable.add(profile.name)
                continue
            warnings += failures + refusals
            write_version_file(version_path(dest, manifest, profile.name), records)
            if profile.name not in versions:
                versions.append(profile.name)
            summary.append({"corpus": corpus.id, "version": profile.name, "units": len(records),
                            "refusals": refusals, "failures": failures,
                            "requests": translator.client.requests})
            logger.info("%s: %s translated %d units (%d refusals, %d failures, %d upstream requests)",
                        corpus.id, profile.name, len(records), refusals, failures, translator.client.requests)
        new_manifest = {**manifest, "versions": versions}
        if not new_manifest.get("files"):
            del new_manifest["files"]
        (dest / "manifest.json").write_text(json.dumps(new_manifest, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
        if flags:
            (dest / FLAGS_FILE).write_text(json.dumps(flags, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")

    if args.porcelain:
        print(json.dumps({"translated": summary, "warnings": warnings, "unreachable": sorted(unreachable)}, sort_keys=True))
    else:
        print(f"translation finished with {warnings} warning(s)")
    if unreachable:
        print(f"unreachable providers: {', '.join(sorted(unreachable))}", file=sys.stderr)
        return EXIT_UNREACHABLE
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    try:
        cfg = build_config(args)
        if not cfg.out:
            raise UsageError("pass --out RUN_DIR")
        corpora = _load_corpora(cfg.corpora)
        skip = set(cfg.settings.skip)
        profiles = _profiles(cfg) if {"semantic", "tokenmatch", "sentiment"} - skip else []
        cache = _cache(cfg)
        embed_cfg = _one(profiles, ProviderKind.EMBEDDING) if {"semantic", "tokenmatch"} - skip else None
        senti_cfg = _one(profiles, ProviderKind.SENTIMENT) if "sentiment" not in skip else None
    except UsageError as exc:
        return _fail(EXIT_INVALID, exc)
    except CorpusError as exc:
        return _fail(EXIT_INVALID, exc)

    if args.dry_run:
        stages = [s for s in STAGES if s not in skip]
        for c in corpora:
            print(f"would analyze {c.id} ({', '.join(stages)}) into {Path(cfg.out) / ANALYSIS_DIR}")
        return EXIT_OK

    carried = []
    for path, corpus in zip(cfg.corpora, corpora):
        carried.extend({**f, "corpus": corpus.id} for f in _read_flags(Path(path)))
    used = [p for p in (embed_cfg, senti_cfg) if p is not None]
    try:
        target = analyze(
            corpora,
            cfg.out,
            settings=cfg.settings,
            embedder=Embedder(embed_cfg, cache) if embed_cfg else None,
            classifier=SentimentClassifier(senti_cfg, cache) if senti_cfg else None,
            provider_profiles=[p.redacted() for p in used],
            carried_flags=carried,
        )
    except (ProviderError, MissingCategory) as exc:
        return _fail(EXIT_PROVIDER, exc)
    except ValueError as exc:
        return _fail(EXIT_INVALID, exc)
    if args.porcelain:
        print(json.dumps({"analysis": str(target), "files": sorted(p.name for p in target.iterdir())}, sort_keys=True))
    else:
        print(f"analysis written to {target}")
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    try:
        cfg = build_config(args)
        if not cfg.out:
            raise UsageError("pass --out RUN_DIR (the directory given to analyze)")
    except UsageError as exc:
        return _fail(EXIT_INVALID, exc)
    target = Path(cfg.out) / REPORT_DIR
    try:
        artifacts = build_report(cfg.out)
    except MissingArtifact as exc:
        return _fail(EXIT_MISSING_ARTIFACT, exc, f"run 'mtfidelity analyze --out {cfg.out}' first")
    except (ValueError, MTFidelityError) as exc:
        return _fail(EXIT_INVALID, exc)
    if args.dry_run:
        for name in sorted(artifacts.tables):
            for fmt_ in cfg.formats:
                print(f"would write {target / f'{name}.{fmt_}'}")
        print(f"would write {target / 'manifest.json'}")
        return EXIT_OK
    try:
        written = export(artifacts, target, cfg.formats)
    except IoError as exc:
        return _fail(EXIT_INVALID, exc)
    if args.porcelain:
        print(json.dumps({"report": str(target), "files": [p.name for p in written]}, sort_keys=True))
    else:
        if artifacts.performance is not None:
            print(render_performance_table(artifacts.performance), end="")
        print(f"{len(written)} files written to {target}")
    return EXIT_OK


def cmd_sample(args: argparse.Namespace) -> int:
    dest = Path(args.dest)
    root = resources.files("mtfidelity").joinpath("data", "sample")
    if args.dry_run:
        print(f"would copy the bundled sample corpus to {dest}")
        return EXIT_OK
    for item in root.iterdir():
        if item.is_dir():
            (dest / item.name).mkdir(parents=True, exist_ok=True)
            for f in item.iterdir():
                (dest / item.name / f.name).write_bytes(f.read_bytes())
        else:
            dest.mkdir(parents=True, exist_ok=True)
            (dest / item.name).write_bytes(item.read_bytes())
    print(f"sample corpus written to {dest}")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mtfidelity", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration; command-line flags override it")
    common.add_argument("--corpus", action="append", help="corpus directory (repeatable)")
    common.add_argument("--providers", help="JSON provider profile file")
    common.add_argument("--out", help="run directory (analyze/report) or corpus output directory (translate)")
    common.add_argument("--cache", help="response cache directory")
    common.add_argument("--seed", type=int, help="bootstrap seed (default 0)")
    common.add_argument("--threshold", type=float, help="multi-label sentiment threshold (default 0.5)")
    common.add_argument("--resamples", type=int, help="bootstrap resamples (default 10000)")
    common.add_argument("--skip", action="append", help=f"stage to skip: {', '.join(STAGES)} (repeatable or comma-separated)")
    common.add_argument("--formats", action="append", help="export formats: csv, json (default both)")
    common.add_argument("--granularity", choices=["sentence", "paragraph"], help="sentiment unit (default sentence)")
    common.add_argument("--comma-splits", action="store_true", help="treat commas as sentence boundaries")
    common.add_argument("--one-to-one", action="store_true", help="one-to-one greedy token matching")
    common.add_argument("--top-k", type=int, help="n-grams per version in ngram_top (default 5)")
    common.add_argument("--extremes-k", type=int, help="verses per direction in extremes (default 10)")
    common.add_argument("--stoplist", help="stopword file replacing the bundled list")
    common.add_argument("--dry-run", action="store_true", help="print planned actions without writing anything")
    common.add_argument("--porcelain", action="store_true", help="machine-readable JSON summary on stdout")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")

    for name, func, help_ in (
        ("ingest", cmd_ingest, "validate corpora and print sentence counts"),
        ("translate", cmd_translate, "fill candidate versions from translation providers"),
        ("analyze", cmd_analyze, "n-gram, sentiment, similarity and token-match analysis"),
        ("report", cmd_report, "assemble tables, extremes, combined analysis and manifest"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)

    p = sub.add_parser("sample", help="copy the bundled 3-chapter sample corpus and mock profiles")
    p.add_argument("dest")
    p.add_argument("--dry-run", action="store_true")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_sample)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )
    logging.getLogger("httpx").setLevel(logging.WARNING)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
