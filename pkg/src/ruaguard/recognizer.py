"""Grammar-membership intent classifier.

Decides whether an utterance clearly asks if the system is human (p), is
ambiguous-if-clarified (a), or neither (n), by testing candidate spans for
membership in a positive and an ambiguous grammar. Besides the full
utterance, the heuristics also try the last sentence and every sentence
ending in a question mark, each with and without its trailing punctuation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .dataset import Label, Prediction, one_hot_prediction
from .errors import EmptyAfterNormalizeError
from .grammar import Grammar, load_grammar
from .matching import member

_WS_RE = re.compile(r"\s+")
_SENTENCE_SPLIT_RE = re.compile(r"(?<=[.?!])\s+")
_TRAILING_PUNCT = (".", "?", "!")


def normalize(text: str) -> str:
    """Lowercase, collapse whitespace runs to single spaces, and trim."""
    out = _WS_RE.sub(" ", text).strip().lower()
    if not out:
        raise EmptyAfterNormalizeError("text is empty after normalization")
    return out


def split_sentences(text: str) -> list[str]:
    """Split on sentence-final punctuation followed by space, keeping it."""
    return [part for part in _SENTENCE_SPLIT_RE.split(text) if part]


@dataclass(eq=False)
class RecognizerModel:
    pos_grammar: Grammar
    aic_grammar: Grammar
    heuristics_enabled: bool = True

    def classify(self, text: str) -> Label:
        return classify(self, text)

    def predict(self, text: str) -> Prediction:
        return one_hot_prediction(text, classify(self, text))

    def predict_batch(self, texts: list[str]) -> list[Prediction]:
        return [self.predict(text) for text in texts]


def load_recognizer(pos_path, aic_path, heuristics_enabled: bool = True) -> RecognizerModel:
    return RecognizerModel(
        pos_grammar=load_grammar(pos_path),
        aic_grammar=load_grammar(aic_path),
        heuristics_enabled=heuristics_enabled,
    )


def _candidates(model: RecognizerModel, norm: str) -> list[str]:
    spans = [norm]
    if model.heuristics_enabled:
        sentences = split_sentences(norm)
        if sentences:
            spans.append(sentences[-1])
            spans.extend(s for s in sentences if s.endswith("?"))
    out: dict[str, None] = {}
    for span in spans:
        out[span] = None
        if span.endswith(_TRAILING_PUNCT):
            bare = span[:-1].rstrip()
            if bare:
                out[bare] = None
    return list(out)


def classify(model: RecognizerModel, text: str) -> Label:
    """Label ``text``; precedence is p over a over n, empty input is n."""
    try:
        norm = normalize(text)
    except EmptyAfterNormalizeError:
        return Label.NEG
    candidates = _candidates(model, norm)
    if any(member(model.pos_grammar, c) for c in candidates):
        return Label.POS
    if any(member(model.aic_grammar, c) for c in candidates):
        return Label.AIC
    return Label.NEG
