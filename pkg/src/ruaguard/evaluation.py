"""Metrics, probe recall, and hard-negative mining.

Metrics over the p/a/n labels:

- weighted precision P_w: positive-prediction precision with 0.25 partial
  credit when a gold-a example is predicted p
- recall R over gold-p only
- three-class accuracy
- M, the geometric mean of the three

Mining selects negative candidates from a corpus either uniformly or
weighted by the maximum TF-IDF cosine against the positive examples
(exponential-sort sampling without replacement).
"""

from __future__ import annotations

import json
import math
import random
import warnings
from dataclasses import dataclass

from .dataset import (
    CLASS_ORDER,
    Label,
    LabeledUtterance,
    Prediction,
)
from .errors import (
    EmptyCorpusError,
    LengthMismatchError,
    NoPositivesInGoldError,
    NotEnoughCandidatesError,
    VacuousPrecisionWarning,
)
from .features import fit_tfidf, vectorize_many

_POS, _AIC, _NEG = 0, 1, 2
_INDEX = {label: i for i, label in enumerate(CLASS_ORDER)}


@dataclass(frozen=True)
class MetricsReport:
    p_w: float
    r: float
    acc: float
    m: float
    confusion: tuple  # 3x3 counts, rows gold, columns predicted, class order
    n: int
    vacuous_precision: bool = False


def weighted_precision(preds: list[Prediction], gold: list[Label]) -> float:
    """(|p,p| + 0.25|p,a|) / |predicted p|; vacuously 1.0 with a warning."""
    if len(preds) != len(gold):
        raise LengthMismatchError(
            f"{len(preds)} predictions vs {len(gold)} gold labels"
        )
    if not preds:
        raise ValueError("need at least one prediction")
    pred_pos = sum(1 for p in preds if p.label is Label.POS)
    if pred_pos == 0:
        warnings.warn(
            "no positive predictions; weighted precision is vacuously 1.0",
            VacuousPrecisionWarning,
            stacklevel=2,
        )
        return 1.0
    tp = sum(1 for p, y in zip(preds, gold) if p.label is Label.POS and y is Label.POS)
    partial = sum(
        1 for p, y in zip(preds, gold) if p.label is Label.POS and y is Label.AIC
    )
    return (tp + 0.25 * partial) / pred_pos


def recall_pos(preds: list[Prediction], gold: list[Label]) -> float:
    if len(preds) != len(gold):
        raise LengthMismatchError(
            f"{len(preds)} predictions vs {len(gold)} gold labels"
        )
    gold_pos = sum(1 for y in gold if y is Label.POS)
    if gold_pos == 0:
        raise NoPositivesInGoldError("no gold-positive examples; recall undefined")
    tp = sum(1 for p, y in zip(preds, gold) if p.label is Label.POS and y is Label.POS)
    return tp / gold_pos


def geometric_mean(p_w: float, r: float, acc: float) -> float:
    return (p_w * r * acc) ** (1.0 / 3.0)


def _report_from_confusion(confusion, n: int) -> MetricsReport:
    pred_pos = sum(confusion[g][_POS] for g in range(3))
    gold_pos = sum(confusion[_POS])
    if gold_pos == 0:
        raise NoPositivesInGoldError("no gold-positive examples; recall undefined")
    vacuous = pred_pos == 0
    p_w = 1.0 if vacuous else (
        (confusion[_POS][_POS] + 0.25 * confusion[_AIC][_POS]) / pred_pos
    )
    r = confusion[_POS][_POS] / gold_pos
    acc = sum(confusion[i][i] for i in range(3)) / n
    return MetricsReport(
        p_w=p_w,
        r=r,
        acc=acc,
        m=geometric_mean(p_w, r, acc),
        confusion=tuple(tuple(row) for row in confusion),
        n=n,
        vacuous_precision=vacuous,
    )


def predictions_for(model, texts: list[str]) -> list[Prediction]:
    batch = getattr(model, "predict_batch", None)
    if batch is not None:
        return batch(texts)
    return [model.predict(text) for text in texts]


def evaluate(model, data: list[LabeledUtterance]) -> MetricsReport:
    """Score ``model`` on ``data``; model needs predict or predict_batch."""
    if not data:
        raise EmptyCorpusError("no evaluation rows")
    preds = predictions_for(model, [row.text for row in data])
    confusion = [[0, 0, 0] for _ in range(3)]
    for pred, row in zip(preds, data):
        confusion[_INDEX[row.label]][_INDEX[pred.label]] += 1
    return _report_from_confusion(confusion, len(data))


def merge_reports(reports: list[MetricsReport]) -> MetricsReport:
    """Combine reports by summing confusion matrices and recomputing."""
    if not reports:
        raise ValueError("no reports to merge")
    confusion = [[0, 0, 0] for _ in range(3)]
    for report in reports:
        for g in range(3):
            for p in range(3):
                confusion[g][p] += report.confusion[g][p]
    return _report_from_confusion(confusion, sum(r.n for r in reports))


_REPORT_HEADER = "P_w\tR\tAcc\tM"


def format_report(report: MetricsReport, header: bool = True) -> str:
    row = "\t".join(
        f"{value * 100:.1f}" for value in (report.p_w, report.r, report.acc, report.m)
    )
    return f"{_REPORT_HEADER}\n{row}\n" if header else row + "\n"


def report_audit_json(report: MetricsReport, **extra) -> str:
    payload = {
        "P_w": report.p_w,
        "R": report.r,
        "Acc": report.acc,
        "M": report.m,
        "n": report.n,
        "confusion": [list(row) for row in report.confusion],
        "class_order": [c.value for c in CLASS_ORDER],
        "vacuous_precision": report.vacuous_precision,
    }
    payload.update(extra)
    return json.dumps(payload, sort_keys=True)


# ---------------------------------------------------------------------------
# Probe recall


@dataclass(frozen=True)
class ProbeReport:
    fraction: float
    verdicts: tuple  # (text, predicted label value, detected) per probe


def probe_recall(model, probes: list[str]) -> ProbeReport:
    """Fraction of probe texts classified p, with a per-probe audit table."""
    if not probes:
        raise ValueError("no probes")
    preds = predictions_for(model, probes)
    verdicts = tuple(
        (text, pred.label.value, pred.label is Label.POS)
        for text, pred in zip(probes, preds)
    )
    detected = sum(1 for _, _, hit in verdicts if hit)
    return ProbeReport(fraction=detected / len(probes), verdicts=verdicts)


# ---------------------------------------------------------------------------
# Hard-negative mining


@dataclass(frozen=True)
class MinedNegatives:
    utterances: tuple  # (text, source, score or None)
    method: str


def mine_negatives(
    corpus: list[str],
    positives: list[str],
    n: int,
    method: str = "tfidf_weighted",
    seed: int = 0,
    corpus_name: str = "corpus",
) -> MinedNegatives:
    """Pick ``n`` distinct corpus lines, uniformly or TF-IDF-similarity weighted.

    Weighted scores are max cosine against any positive; zero-score lines are
    never selected, and having fewer than ``n`` scorable lines raises
    NotEnoughCandidatesError.
    """
    if not corpus:
        raise EmptyCorpusError("mining corpus is empty")
    if n < 1:
        raise ValueError("n must be at least 1")
    if n > len(corpus):
        raise NotEnoughCandidatesError(available=len(corpus), requested=n)
    rng = random.Random(seed)
    if method == "random":
        picked = rng.sample(range(len(corpus)), n)
        utterances = tuple((corpus[i], corpus_name, None) for i in picked)
        return MinedNegatives(utterances=utterances, method=method)
    if method != "tfidf_weighted":
        raise ValueError(f"unknown mining method {method!r}")
    if not positives:
        raise EmptyCorpusError("no positive examples to weight against")
    vocab = fit_tfidf(list(corpus) + list(positives))
    C = vectorize_many(vocab, list(corpus))
    P = vectorize_many(vocab, list(positives))
    sims = (C @ P.T).toarray()
    scores = sims.max(axis=1)
    # exponential-sort weighted sampling without replacement:
    # key = -ln(u)/score, the n smallest keys win; zero scores are excluded
    keyed = []
    for i, score in enumerate(scores):
        u = rng.random()
        if score > 0.0:
            keyed.append((-math.log(u) / score, i))
    if len(keyed) < n:
        raise NotEnoughCandidatesError(available=len(keyed), requested=n)
    keyed.sort()
    utterances = tuple(
        (corpus[i], corpus_name, float(scores[i])) for _, i in keyed[:n]
    )
    return MinedNegatives(utterances=utterances, method="tfidf_weighted")


_CANDIDATES_HEADER = "text\tscore\tsource"


def format_mined_candidates(mined: MinedNegatives) -> str:
    """Triage TSV for manual review; scores blank for the random method."""
    lines = [_CANDIDATES_HEADER]
    for text, source, score in mined.utterances:
        rendered = "" if score is None else f"{score:.6f}"
        lines.append(f"{text}\t{rendered}\t{source}")
    return "\n".join(lines) + "\n"


def mined_to_rows(mined: MinedNegatives, split: str = "none") -> list[LabeledUtterance]:
    """Reviewed candidates become negative-labeled dataset rows."""
    return [
        LabeledUtterance(text=text, label=Label.NEG, split=split, source=source)
        for text, source, _ in mined.utterances
    ]
