"""Learned intent classifiers.

Four baselines over the p/a/n label set:

- bag-of-words logistic regression on L2-normalized TF-IDF (mini-batch GD)
- nearest-neighbor retrieval by euclidean distance over TF-IDF vectors
- a hashed word n-gram linear model: mean-pooled learned embeddings into a
  softmax head, trained by per-example SGD with a linearly decaying rate
- a random guesser over the training label distribution

All training is deterministic given a seed. Models save to .npz files and
reload with bit-identical arrays.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .dataset import (
    CLASS_ORDER,
    Label,
    LabeledUtterance,
    Prediction,
    label_distribution,
    one_hot_prediction,
    prediction_from_scores,
)
from .errors import EmptyCorpusError, MissingClassError
from .features import TfIdfVector, Vocabulary, dot, fit_tfidf, tokenize, vectorize_many
from .hashing import derive_seed, fnv1a_64

_LABEL_INDEX = {label: i for i, label in enumerate(CLASS_ORDER)}

NGRAM_JOIN = "\x1f"


def _check_classes(rows: list[LabeledUtterance]) -> None:
    present = {row.label for row in rows}
    for label in CLASS_ORDER:
        if label not in present:
            raise MissingClassError(label)


def _label_codes(rows: list[LabeledUtterance]) -> np.ndarray:
    return np.asarray([_LABEL_INDEX[row.label] for row in rows], dtype=np.int64)


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    expd = np.exp(shifted)
    return expd / expd.sum(axis=-1, keepdims=True)


# ---------------------------------------------------------------------------
# Bag-of-words logistic regression


@dataclass(frozen=True)
class BowLrParams:
    # 1/sqrt(t) decay needs a large starting rate and plenty of epochs for
    # the 10%-share AIC class to get off the ground.
    learning_rate: float = 2.0
    l2: float = 1e-4
    epochs: int = 300
    batch_size: int = 32


def bowlr_loss_and_grad(W, b, X, Y, l2):
    """Mean cross-entropy plus an L2 penalty on W (biases unpenalized).

    X is (B, V) dense or CSR; Y is (B, C) one-hot. Returns (loss, dW, db).
    """
    logits = X @ W.T + b
    probs = _softmax(logits)
    batch = X.shape[0]
    picked = (probs * Y).sum(axis=1)
    loss = -np.log(picked).mean() + 0.5 * l2 * float((W * W).sum())
    G = (probs - Y) / batch
    dW = np.asarray((X.T @ G)).T + l2 * W
    db = G.sum(axis=0)
    return float(loss), dW, db


@dataclass(eq=False)
class BowLrModel:
    vocab: Vocabulary
    weights: np.ndarray  # (C, V)
    biases: np.ndarray  # (C,)
    params: BowLrParams
    loss_history: list[float] = field(default_factory=list)

    def predict_batch(self, texts: list[str]) -> list[Prediction]:
        X = vectorize_many(self.vocab, texts)
        probs = _softmax(X @ self.weights.T + self.biases)
        return [prediction_from_scores(t, row) for t, row in zip(texts, probs)]

    def predict(self, text: str) -> Prediction:
        return self.predict_batch([text])[0]


def train_bow_lr(
    train: list[LabeledUtterance],
    hp: BowLrParams | None = None,
    seed: int = 0,
) -> BowLrModel:
    if not train:
        raise EmptyCorpusError("no training rows")
    _check_classes(train)
    hp = hp or BowLrParams()
    vocab = fit_tfidf(train)
    texts = [row.text for row in train]
    X = vectorize_many(vocab, texts)
    codes = _label_codes(train)
    n = len(train)
    Y = np.zeros((n, len(CLASS_ORDER)), dtype=np.float64)
    Y[np.arange(n), codes] = 1.0

    W = np.zeros((len(CLASS_ORDER), len(vocab)), dtype=np.float64)
    b = np.zeros(len(CLASS_ORDER), dtype=np.float64)
    rng = np.random.Generator(np.random.PCG64(derive_seed(seed, "bowlr:shuffle")))
    history: list[float] = []
    step = 0
    for _ in range(hp.epochs):
        order = rng.permutation(n)
        for start in range(0, n, hp.batch_size):
            idx = order[start : start + hp.batch_size]
            step += 1
            lr = hp.learning_rate / math.sqrt(step)
            loss, dW, db = bowlr_loss_and_grad(W, b, X[idx], Y[idx], hp.l2)
            W -= lr * dW
            b -= lr * db
            history.append(loss)
    return BowLrModel(vocab=vocab, weights=W, biases=b, params=hp, loss_history=history)


# ---------------------------------------------------------------------------
# Nearest-neighbor retrieval


def predict_ir(
    train_vectors: list[tuple[TfIdfVector, Label]],
    query: TfIdfVector,
    text: str = "",
) -> Prediction:
    """Label of the nearest training vector; ties keep the lowest index."""
    if not train_vectors:
        raise EmptyCorpusError("no training vectors")
    q_sq = sum(v * v for v in query.values)
    best_d2 = math.inf
    best_label = train_vectors[0][1]
    for vec, label in train_vectors:
        t_sq = sum(v * v for v in vec.values)
        d2 = q_sq + t_sq - 2.0 * dot(query, vec)
        if d2 < best_d2:
            best_d2 = d2
            best_label = label
    return one_hot_prediction(text, best_label)


@dataclass(eq=False)
class IrModel:
    vocab: Vocabulary
    matrix: sp.csr_matrix  # (n, V), rows unit norm
    labels: np.ndarray  # (n,) class codes

    def predict_batch(self, texts: list[str], chunk: int = 1024) -> list[Prediction]:
        t_sq = np.asarray(self.matrix.multiply(self.matrix).sum(axis=1)).ravel()
        out: list[Prediction] = []
        for start in range(0, len(texts), chunk):
            part = texts[start : start + chunk]
            Q = vectorize_many(self.vocab, part)
            sims = (Q @ self.matrix.T).toarray()
            q_sq = np.asarray(Q.multiply(Q).sum(axis=1)).ravel()
            d2 = q_sq[:, None] + t_sq[None, :] - 2.0 * sims
            # np.argmin keeps the first minimum: lowest training index on ties
            nearest = np.argmin(d2, axis=1)
            for text, j in zip(part, nearest):
                out.append(one_hot_prediction(text, CLASS_ORDER[self.labels[j]]))
        return out

    def predict(self, text: str) -> Prediction:
        return self.predict_batch([text])[0]


def fit_ir(train: list[LabeledUtterance]) -> IrModel:
    if not train:
        raise EmptyCorpusError("no training rows")
    vocab = fit_tfidf(train)
    matrix = vectorize_many(vocab, [row.text for row in train])
    return IrModel(vocab=vocab, matrix=matrix, labels=_label_codes(train))


# ---------------------------------------------------------------------------
# Hashed n-gram linear model


@dataclass(frozen=True)
class NgramParams:
    ngram_max: int = 3
    hash_buckets: int = 2_000_000
    dim: int = 300
    epochs: int = 10
    learning_rate: float = 0.5


def ngram_features(text: str, ngram_max: int, hash_buckets: int) -> list[tuple[int, int]]:
    """Hashed word n-gram buckets with counts, sorted by bucket id."""
    tokens = tokenize(text)
    counts: dict[int, int] = {}
    for n in range(1, ngram_max + 1):
        for i in range(len(tokens) - n + 1):
            gram = NGRAM_JOIN.join(tokens[i : i + n])
            bucket = fnv1a_64(gram) % hash_buckets
            counts[bucket] = counts.get(bucket, 0) + 1
    return sorted(counts.items())


def initial_embedding_row(seed: int, bucket: int, dim: int) -> np.ndarray:
    """Deterministic initial embedding for a bucket, independent of visit order."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, bucket])))
    return rng.uniform(-1.0 / dim, 1.0 / dim, size=dim)


def ngram_loss_and_grad(W, b, emb, feats, codes):
    """Mean cross-entropy over a batch for the n-gram linear model.

    ``emb`` is a dense (R, dim) matrix of the embedding rows in play;
    ``feats`` gives per example a list of (row, count) pairs into it.
    Returns (loss, dW, db, dEmb) with dEmb aligned to ``emb``.
    """
    batch = len(feats)
    dim = emb.shape[1]
    loss = 0.0
    dW = np.zeros_like(W)
    db = np.zeros_like(b)
    dEmb = np.zeros_like(emb)
    for feat, code in zip(feats, codes):
        k = sum(count for _, count in feat)
        if k:
            h = np.zeros(dim)
            for row, count in feat:
                h += count * emb[row]
            h /= k
        else:
            h = np.zeros(dim)
        probs = _softmax(W @ h + b)
        loss -= math.log(probs[code])
        g = probs.copy()
        g[code] -= 1.0
        dW += np.outer(g, h)
        db += g
        if k:
            back = W.T @ g
            for row, count in feat:
                dEmb[row] += (count / k) * back
    scale = 1.0 / batch
    return loss * scale, dW * scale, db * scale, dEmb * scale


@dataclass(eq=False)
class NgramLinearModel:
    params: NgramParams
    seed: int
    embeddings: dict[int, np.ndarray]
    weights: np.ndarray  # (C, dim)
    biases: np.ndarray  # (C,)

    def _pool(self, text: str) -> np.ndarray:
        feats = ngram_features(text, self.params.ngram_max, self.params.hash_buckets)
        h = np.zeros(self.params.dim)
        k = sum(count for _, count in feats)
        if not k:
            return h
        for bucket, count in feats:
            row = self.embeddings.get(bucket)
            if row is None:
                # untrained bucket keeps its deterministic initial value
                row = initial_embedding_row(self.seed, bucket, self.params.dim)
            h += count * row
        return h / k

    def predict(self, text: str) -> Prediction:
        probs = _softmax(self.weights @ self._pool(text) + self.biases)
        return prediction_from_scores(text, probs)

    def predict_batch(self, texts: list[str]) -> list[Prediction]:
        return [self.predict(text) for text in texts]


def train_ngram_linear(
    train: list[LabeledUtterance],
    hp: NgramParams | None = None,
    seed: int = 0,
) -> NgramLinearModel:
    if not train:
        raise EmptyCorpusError("no training rows")
    _check_classes(train)
    hp = hp or NgramParams()
    feats = [
        ngram_features(row.text, hp.ngram_max, hp.hash_buckets) for row in train
    ]
    codes = _label_codes(train)
    emb: dict[int, np.ndarray] = {}

    def row_of(bucket: int) -> np.ndarray:
        got = emb.get(bucket)
        if got is None:
            got = initial_embedding_row(seed, bucket, hp.dim)
            emb[bucket] = got
        return got

    n_classes = len(CLASS_ORDER)
    W = np.zeros((n_classes, hp.dim), dtype=np.float64)
    b = np.zeros(n_classes, dtype=np.float64)
    rng = np.random.Generator(np.random.PCG64(derive_seed(seed, "ngram:shuffle")))
    n = len(train)
    total_steps = hp.epochs * n
    step = 0
    for _ in range(hp.epochs):
        for i in rng.permutation(n):
            lr = hp.learning_rate * (1.0 - step / total_steps)
            feat = feats[i]
            k = sum(count for _, count in feat)
            if k:
                h = np.zeros(hp.dim)
                for bucket, count in feat:
                    h += count * row_of(bucket)
                h /= k
            else:
                h = np.zeros(hp.dim)
            probs = _softmax(W @ h + b)
            g = probs.copy()
            g[codes[i]] -= 1.0
            back = W.T @ g
            W -= lr * np.outer(g, h)
            b -= lr * g
            if k:
                coef = lr / k
                for bucket, count in feat:
                    emb[bucket] -= (coef * count) * back
            step += 1
    return NgramLinearModel(params=hp, seed=seed, embeddings=emb, weights=W, biases=b)


# ---------------------------------------------------------------------------
# Random guess


def predict_random(label_distribution, seed: int, n: int) -> list[Label]:
    """n i.i.d. label draws weighted by ``label_distribution`` (class order)."""
    dist = [float(x) for x in label_distribution]
    if not math.isclose(sum(dist), 1.0, abs_tol=1e-9):
        raise ValueError("label distribution must sum to 1")
    rng = random.Random(seed)
    return rng.choices(CLASS_ORDER, weights=dist, k=n)


@dataclass(eq=False)
class RandomGuessModel:
    distribution: tuple[float, float, float]
    seed: int

    def predict_batch(self, texts: list[str]) -> list[Prediction]:
        labels = predict_random(self.distribution, self.seed, len(texts))
        return [one_hot_prediction(t, lab) for t, lab in zip(texts, labels)]

    def predict(self, text: str) -> Prediction:
        return self.predict_batch([text])[0]


def fit_random_guess(train: list[LabeledUtterance], seed: int = 0) -> RandomGuessModel:
    dist = label_distribution(train)
    return RandomGuessModel(
        distribution=tuple(dist[label] for label in CLASS_ORDER), seed=seed
    )


# ---------------------------------------------------------------------------
# Persistence (arrays round-trip bit-exactly)

_FORMAT_VERSION = 1


def _vocab_arrays(vocab: Vocabulary) -> dict[str, np.ndarray]:
    tokens = [""] * len(vocab)
    for token, idx in vocab.token_index.items():
        tokens[idx] = token
    return {
        "vocab_tokens": np.asarray(tokens, dtype=np.str_),
        "vocab_df": vocab.df,
    }


def _vocab_from_arrays(data, document_count: int) -> Vocabulary:
    tokens = [str(t) for t in data["vocab_tokens"]]
    return Vocabulary(
        token_index={t: i for i, t in enumerate(tokens)},
        df=np.asarray(data["vocab_df"], dtype=np.float64),
        document_count=document_count,
    )


def save_model(model, path) -> None:
    meta = {"version": _FORMAT_VERSION, "classes": [c.value for c in CLASS_ORDER]}
    arrays: dict[str, np.ndarray] = {}
    if isinstance(model, BowLrModel):
        meta["kind"] = "bowlr"
        meta["params"] = vars(model.params) | {}
        meta["document_count"] = model.vocab.document_count
        arrays.update(_vocab_arrays(model.vocab))
        arrays["weights"] = model.weights
        arrays["biases"] = model.biases
    elif isinstance(model, IrModel):
        meta["kind"] = "ir"
        meta["document_count"] = model.vocab.document_count
        arrays.update(_vocab_arrays(model.vocab))
        arrays["mat_data"] = model.matrix.data
        arrays["mat_indices"] = model.matrix.indices
        arrays["mat_indptr"] = model.matrix.indptr
        arrays["mat_shape"] = np.asarray(model.matrix.shape, dtype=np.int64)
        arrays["labels"] = model.labels
    elif isinstance(model, NgramLinearModel):
        meta["kind"] = "ngram"
        meta["params"] = vars(model.params) | {}
        meta["seed"] = model.seed
        buckets = np.asarray(sorted(model.embeddings), dtype=np.int64)
        arrays["buckets"] = buckets
        arrays["embeddings"] = np.stack(
            [model.embeddings[b] for b in buckets]
        ) if len(buckets) else np.zeros((0, model.params.dim))
        arrays["weights"] = model.weights
        arrays["biases"] = model.biases
    elif isinstance(model, RandomGuessModel):
        meta["kind"] = "random"
        meta["seed"] = model.seed
        arrays["distribution"] = np.asarray(model.distribution, dtype=np.float64)
    else:
        raise TypeError(f"cannot save model of type {type(model).__name__}")
    with open(path, "wb") as fh:
        np.savez(fh, meta=np.asarray(json.dumps(meta)), **arrays)


def load_model(path):
    with np.load(path, allow_pickle=False) as data:
        meta = json.loads(str(data["meta"]))
        if meta.get("classes") != [c.value for c in CLASS_ORDER]:
            raise ValueError("model file has an unexpected class order")
        kind = meta["kind"]
        if kind == "bowlr":
            return BowLrModel(
                vocab=_vocab_from_arrays(data, meta["document_count"]),
                weights=np.asarray(data["weights"]),
                biases=np.asarray(data["biases"]),
                params=BowLrParams(**meta["params"]),
            )
        if kind == "ir":
            shape = tuple(int(x) for x in data["mat_shape"])
            matrix = sp.csr_matrix(
                (data["mat_data"], data["mat_indices"], data["mat_indptr"]),
                shape=shape,
            )
            return IrModel(
                vocab=_vocab_from_arrays(data, meta["document_count"]),
                matrix=matrix,
                labels=np.asarray(data["labels"]),
            )
        if kind == "ngram":
            buckets = [int(x) for x in data["buckets"]]
            rows = np.asarray(data["embeddings"])
            return NgramLinearModel(
                params=NgramParams(**meta["params"]),
                seed=int(meta["seed"]),
                embeddings={b: rows[i].copy() for i, b in enumerate(buckets)},
                weights=np.asarray(data["weights"]),
                biases=np.asarray(data["biases"]),
            )
        if kind == "random":
            dist = tuple(float(x) for x in data["distribution"])
            return RandomGuessModel(distribution=dist, seed=int(meta["seed"]))
        raise ValueError(f"unknown model kind {kind!r}")
