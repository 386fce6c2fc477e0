"""Greedy token matching between reference and candidate token embeddings."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, Sequence

import numpy as np

from .errors import DimensionMismatch, EmptyAfterTokenization, EmptyMatrix, ZeroVector
from .lexical import tokenize


@dataclass(frozen=True)
class TokenEmbeddingSequence:
    tokens: tuple[str, ...]
    vectors: np.ndarray  # shape (len(tokens), dim)

    def __post_init__(self):
        vectors = np.asarray(self.vectors, dtype=float)
        if vectors.ndim != 2:
            raise DimensionMismatch(f"token vectors must be 2-d, got shape {vectors.shape}")
        if len(self.tokens) < 1 or vectors.shape[0] != len(self.tokens):
            raise ValueError(f"{len(self.tokens)} tokens but {vectors.shape[0]} vectors")
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "tokens", tuple(self.tokens))

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]


@dataclass(frozen=True)
class TokenMatchScore:
    precision: float
    recall: float
    f1: float


class TokenEmbedder(Protocol):
    def embed_tokens(self, texts: Sequence[str]) -> list[TokenEmbeddingSequence]: ...


def _unit_rows(vectors: np.ndarray, side: str) -> np.ndarray:
    norms = np.linalg.norm(vectors, axis=1)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise ZeroVector(f"{side} token {int(zero[0])} has a zero embedding", index=int(zero[0]))
    return vectors / norms[:, None]


def similarity_matrix(ref: TokenEmbeddingSequence, cand: TokenEmbeddingSequence) -> np.ndarray:
    """Cosine similarity of every reference token (rows) with every candidate token (columns)."""
    if ref.dimension != cand.dimension:
        raise DimensionMismatch(f"reference dim {ref.dimension} != candidate dim {cand.dimension}")
    return _unit_rows(ref.vectors, "reference") @ _unit_rows(cand.vectors, "candidate").T


def f1_score(precision: float, recall: float) -> float:
    denom = precision + recall
    return 2.0 * precision * recall / denom if denom != 0 else 0.0


def greedy_match_score(matrix) -> TokenMatchScore:
    """Each token is matched to its most similar counterpart.

    Recall averages row maxima (reference tokens), precision averages column
    maxima (candidate tokens).
    """
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.size == 0:
        raise EmptyMatrix(f"similarity matrix must be non-empty 2-d, got shape {m.shape}")
    recall = float(m.max(axis=1).mean())
    precision = float(m.max(axis=0).mean())
    return TokenMatchScore(precision, recall, f1_score(precision, recall))


def one_to_one_match_score(matrix) -> TokenMatchScore:
    """Greedy one-to-one assignment: repeatedly take the best remaining pair.

    Tokens left without a partner contribute zero.
    """
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.size == 0:
        raise EmptyMatrix(f"similarity matrix must be non-empty 2-d, got shape {m.shape}")
    rows, cols = m.shape
    order = sorted(((-m[i, j], i, j) for i in range(rows) for j in range(cols)))
    used_r: set[int] = set()
    used_c: set[int] = set()
    total = 0.0
    for neg, i, j in order:
        if i in used_r or j in used_c:
            continue
        used_r.add(i)
        used_c.add(j)
        total += -neg
        if len(used_r) == rows or len(used_c) == cols:
            break
    recall = total / rows
    precision = total / cols
    return TokenMatchScore(precision, recall, f1_score(precision, recall))


def score_pair(ref_text: str, cand_text: str, embedder: TokenEmbedder, *, one_to_one: bool = False) -> TokenMatchScore:
    for label, text in (("reference", ref_text), ("candidate", cand_text)):
        if not tokenize(text).tokens:
            raise EmptyAfterTokenization(f"{label} text has no word tokens")
    ref, cand = embedder.embed_tokens([ref_text, cand_text])
    matrix = similarity_matrix(ref, cand)
    return one_to_one_match_score(matrix) if one_to_one else greedy_match_score(matrix)
