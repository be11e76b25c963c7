"""Bag-of-words features: vocabulary fitting and sparse count / tf-idf vectors.

Tokenization is fixed across the package: casefold (optional), then split on
whitespace and punctuation, keeping alphanumeric runs. The tf-idf weight is
count(t) * (ln((1+N)/(1+df(t))) + 1), L2-normalized per sentence; this exact
formula is part of the model-file contract.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError

VECTORIZER_KINDS = ("counts", "tfidf")

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str, lowercase: bool = True) -> list[str]:
    if lowercase:
        text = text.casefold()
    return _TOKEN_RE.findall(text)


@dataclass
class Vocabulary:
    terms: list[str]  # index -> term, lexicographically ordered
    document_frequency: list[int]  # index -> df
    n_documents: int
    min_df: int
    lowercase: bool
    index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.index = {t: i for i, t in enumerate(self.terms)}

    def __len__(self) -> int:
        return len(self.terms)

    def to_dict(self) -> dict:
        return {
            "terms": self.terms,
            "df": self.document_frequency,
            "n_documents": self.n_documents,
            "min_df": self.min_df,
            "lowercase": self.lowercase,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "Vocabulary":
        return cls(
            terms=list(raw["terms"]),
            document_frequency=list(raw["df"]),
            n_documents=int(raw["n_documents"]),
            min_df=int(raw["min_df"]),
            lowercase=bool(raw["lowercase"]),
        )


@dataclass(frozen=True)
class SparseVector:
    """Strictly index-sorted (index, weight) pairs in a `dimension`-dim space."""

    entries: tuple[tuple[int, float], ...]
    dimension: int

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.dimension)
        for idx, w in self.entries:
            dense[idx] = w
        return dense

    def l2_norm(self) -> float:
        return math.sqrt(sum(w * w for _, w in self.entries))


def fit_vocabulary(
    sentences: list[str], min_df: int = 1, lowercase: bool = True
) -> Vocabulary:
    """Fit a vocabulary over `sentences`, dropping terms seen in fewer than
    `min_df` documents. Index assignment is lexicographic, so refitting the
    same corpus always yields the same vocabulary."""
    if min_df < 1:
        raise DataError(f"min_df must be >= 1, got {min_df}")
    if not sentences:
        raise DataError("cannot fit a vocabulary on an empty corpus")
    df: dict[str, int] = {}
    for sent in sentences:
        for term in set(tokenize(sent, lowercase)):
            df[term] = df.get(term, 0) + 1
    terms = sorted(t for t, d in df.items() if d >= min_df)
    return Vocabulary(
        terms=terms,
        document_frequency=[df[t] for t in terms],
        n_documents=len(sentences),
        min_df=min_df,
        lowercase=lowercase,
    )


def _term_counts(sentence: str, vocab: Vocabulary) -> dict[int, int]:
    counts: dict[int, int] = {}
    for tok in tokenize(sentence, vocab.lowercase):
        idx = vocab.index.get(tok)
        if idx is not None:
            counts[idx] = counts.get(idx, 0) + 1
    return counts


def transform_counts(sentence: str, vocab: Vocabulary) -> SparseVector:
    """Raw term counts; out-of-vocabulary tokens are ignored."""
    counts = _term_counts(sentence, vocab)
    entries = tuple((i, float(counts[i])) for i in sorted(counts))
    return SparseVector(entries=entries, dimension=len(vocab))


def transform_tfidf(sentence: str, vocab: Vocabulary) -> SparseVector:
    """Smoothed tf-idf, L2-normalized; all-OOV sentences stay zero vectors."""
    counts = _term_counts(sentence, vocab)
    n = vocab.n_documents
    weights = {
        i: c * (math.log((1.0 + n) / (1.0 + vocab.document_frequency[i])) + 1.0)
        for i, c in counts.items()
    }
    norm = math.sqrt(sum(w * w for w in weights.values()))
    if norm > 0.0:
        weights = {i: w / norm for i, w in weights.items()}
    entries = tuple((i, weights[i]) for i in sorted(weights))
    return SparseVector(entries=entries, dimension=len(vocab))


@dataclass
class Vectorizer:
    """A fitted vectorizer: kind + vocabulary. Embedded in every trained model
    so prediction never needs external state."""

    kind: str
    vocabulary: Vocabulary

    def __post_init__(self):
        if self.kind not in VECTORIZER_KINDS:
            raise DataError(
                f"vectorizer kind must be one of {VECTORIZER_KINDS}, got {self.kind!r}"
            )

    def transform(self, sentence: str) -> SparseVector:
        if self.kind == "counts":
            return transform_counts(sentence, self.vocabulary)
        return transform_tfidf(sentence, self.vocabulary)

    def transform_matrix(self, sentences: list[str]) -> np.ndarray:
        """Dense (n, V) matrix of the transformed sentences."""
        X = np.zeros((len(sentences), len(self.vocabulary)))
        for row, sent in enumerate(sentences):
            for idx, w in self.transform(sent).entries:
                X[row, idx] = w
        return X

    def to_dict(self) -> dict:
        return {"kind": self.kind, "vocabulary": self.vocabulary.to_dict()}

    @classmethod
    def from_dict(cls, raw: dict) -> "Vectorizer":
        return cls(kind=str(raw["kind"]), vocabulary=Vocabulary.from_dict(raw["vocabulary"]))


def fit_vectorizer(
    sentences: list[str], kind: str, min_df: int = 1, lowercase: bool = True
) -> Vectorizer:
    return Vectorizer(kind=kind, vocabulary=fit_vocabulary(sentences, min_df, lowercase))


def save_vocabulary(vocab: Vocabulary, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(vocab.to_dict(), ensure_ascii=False, sort_keys=True) + "\n",
        encoding="utf-8",
    )


def load_vocabulary(path: str | Path) -> Vocabulary:
    try:
        return Vocabulary.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
    except (json.JSONDecodeError, KeyError) as exc:
        raise DataError(f"{path}: not a vocabulary file: {exc}") from exc
