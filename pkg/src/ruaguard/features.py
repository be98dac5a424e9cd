"""Tokenization and L2-normalized TF-IDF features.

Tokens are whitespace-split after normalization, with the punctuation marks
? . ! , detached as standalone tokens. idf(t) = ln((1+N)/(1+df(t))) + 1, raw
term weight = count * idf, and every non-empty vector is L2-normalized; an
input with only unknown tokens maps to the zero vector.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import EmptyAfterNormalizeError, EmptyCorpusError
from .recognizer import normalize

_TOKEN_RE = re.compile(r"[?.!,]|[^\s?.!,]+")


def tokenize(text: str) -> list[str]:
    try:
        norm = normalize(text)
    except EmptyAfterNormalizeError:
        return []
    return _TOKEN_RE.findall(norm)


@dataclass(frozen=True)
class TfIdfVector:
    indices: tuple[int, ...]  # sorted ascending
    values: tuple[float, ...]

    def norm(self) -> float:
        return math.sqrt(sum(v * v for v in self.values))


@dataclass(eq=False)
class Vocabulary:
    token_index: dict[str, int]
    df: np.ndarray  # document frequency per token index
    document_count: int

    def __post_init__(self):
        n = self.document_count
        self.idf = np.log((1.0 + n) / (1.0 + self.df)) + 1.0

    def __len__(self) -> int:
        return len(self.token_index)


def _texts(corpus) -> list[str]:
    return [item if isinstance(item, str) else item.text for item in corpus]


def fit_tfidf(corpus) -> Vocabulary:
    """Build a vocabulary (with document frequencies) from utterances or strings."""
    texts = _texts(corpus)
    if not texts:
        raise EmptyCorpusError("cannot fit a vocabulary on an empty corpus")
    token_index: dict[str, int] = {}
    df_counts: list[int] = []
    for text in texts:
        for token in set(tokenize(text)):
            idx = token_index.get(token)
            if idx is None:
                token_index[token] = len(df_counts)
                df_counts.append(1)
            else:
                df_counts[idx] += 1
    return Vocabulary(
        token_index=token_index,
        df=np.asarray(df_counts, dtype=np.float64),
        document_count=len(texts),
    )


def vectorize(vocab: Vocabulary, text: str) -> TfIdfVector:
    """Sparse L2-normalized TF-IDF vector; zero vector if nothing is known."""
    counts: dict[int, int] = {}
    for token in tokenize(text):
        idx = vocab.token_index.get(token)
        if idx is not None:
            counts[idx] = counts.get(idx, 0) + 1
    if not counts:
        return TfIdfVector(indices=(), values=())
    indices = sorted(counts)
    raw = [counts[i] * vocab.idf[i] for i in indices]
    norm = math.sqrt(sum(v * v for v in raw))
    return TfIdfVector(indices=tuple(indices), values=tuple(v / norm for v in raw))


def vectorize_many(vocab: Vocabulary, texts: list[str]) -> sp.csr_matrix:
    """Stack TF-IDF vectors for ``texts`` into a CSR matrix of unit/zero rows."""
    data: list[float] = []
    indices: list[int] = []
    indptr = [0]
    for text in texts:
        vec = vectorize(vocab, text)
        indices.extend(vec.indices)
        data.extend(vec.values)
        indptr.append(len(indices))
    return sp.csr_matrix(
        (np.asarray(data, dtype=np.float64), indices, indptr),
        shape=(len(texts), len(vocab)),
    )


def dot(a: TfIdfVector, b: TfIdfVector) -> float:
    if not a.indices or not b.indices:
        return 0.0
    lookup = dict(zip(a.indices, a.values))
    return sum(v * lookup.get(i, 0.0) for i, v in zip(b.indices, b.values))
