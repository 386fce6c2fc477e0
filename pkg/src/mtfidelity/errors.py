"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class MTFidelityError(Exception):
    """Base class for every error raised by this package."""


# corpus


class CorpusError(MTFidelityError):
    pass


class MissingVersionFile(CorpusError):
    def __init__(self, version: str, path):
        self.version = version
        self.path = path
        super().__init__(f"missing file for version {version!r}: {path}")


class EncodingError(CorpusError):
    def __init__(self, path, offset: int, reason: str = "invalid UTF-8"):
        self.path = path
        self.offset = offset
        super().__init__(f"{path}: {reason} at byte offset {offset}")


class AlignmentGap(CorpusError):
    def __init__(self, chapter: int, verse: int, missing_in: str):
        self.chapter = chapter
        self.verse = verse
        self.missing_in = missing_in
        super().__init__(
            f"chapter {chapter}, verse {verse} is absent from version {missing_in!r}"
        )


class MalformedRecord(CorpusError):
    def __init__(self, path, line_no: int, reason: str):
        self.path = path
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {reason}")


class ManifestError(CorpusError):
    pass


class EmptyInput(MTFidelityError, ValueError):
    pass


# semantic / tokenmatch


class DimensionMismatch(MTFidelityError, ValueError):
    pass


class ZeroVector(MTFidelityError, ValueError):
    def __init__(self, message: str, index: int | None = None):
        self.index = index
        super().__init__(message)


class ScoreOutOfRange(MTFidelityError, ValueError):
    pass


class InsufficientChapters(MTFidelityError, ValueError):
    pass


class KeyMismatch(MTFidelityError, ValueError):
    pass


class EmptyMatrix(MTFidelityError, ValueError):
    pass


class EmptyAfterTokenization(MTFidelityError, ValueError):
    pass


# sentiment


class MissingCategory(MTFidelityError, KeyError):
    def __init__(self, categories):
        self.categories = tuple(categories)
        super().__init__(f"classifier output lacks categories: {', '.join(self.categories)}")

    def __str__(self) -> str:
        return self.args[0]


# providers


class ProviderError(MTFidelityError):
    pass


class NetworkError(ProviderError):
    pass


class AuthError(ProviderError):
    pass


class ProviderRefusal(ProviderError):
    """The model answered, but declined to translate."""

    def __init__(self, response: str):
        self.response = response
        super().__init__(f"provider refused: {response!r}")


class DimensionDrift(ProviderError):
    pass


# report


class MissingInput(MTFidelityError, ValueError):
    def __init__(self, metric: str, detail: str = ""):
        self.metric = metric
        msg = f"missing input for {metric}"
        super().__init__(f"{msg}: {detail}" if detail else msg)


class NoOverlap(MTFidelityError, ValueError):
    pass


class IoError(MTFidelityError, OSError):
    def __init__(self, path, reason: str):
        self.path = path
        super().__init__(f"cannot write {path}: {reason}")

    def __str__(self) -> str:
        return self.args[0]
