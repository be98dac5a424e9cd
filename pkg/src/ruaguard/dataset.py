"""Labeled-utterance records and their TSV file format.

Labels: p = clearly asks whether the system is human, a = ambiguous if
clarified (a scripted clarification may be inappropriate), n = clearly not
asking. Files are UTF-8 TSV with a required header row
``text<TAB>label<TAB>split<TAB>source``; writing then reading a file this
module produced is byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import DatasetFormatError, EmptyAfterNormalizeError

SPLIT_VALUES = ("train", "val", "test", "addtest", "none")


class Label(str, Enum):
    POS = "p"
    AIC = "a"
    NEG = "n"


CLASS_ORDER = (Label.POS, Label.AIC, Label.NEG)

_HEADER = "text\tlabel\tsplit\tsource"


@dataclass(frozen=True)
class LabeledUtterance:
    text: str
    label: Label
    split: str = "none"
    source: str = "grammar"

    def __post_init__(self):
        # keep the TSV format unambiguous: cell text never contains tab/newline
        cleaned = (
            self.text.replace("\t", " ").replace("\n", " ").replace("\r", " ")
        )
        if cleaned != self.text:
            object.__setattr__(self, "text", cleaned)
        if not cleaned.strip():
            raise EmptyAfterNormalizeError("utterance text is empty")
        if not isinstance(self.label, Label):
            object.__setattr__(self, "label", Label(self.label))
        if self.split not in SPLIT_VALUES:
            raise ValueError(f"unknown split {self.split!r}")


@dataclass(frozen=True)
class Prediction:
    text: str
    label: Label
    scores: tuple[float, float, float]  # per class, in CLASS_ORDER


def prediction_from_scores(text: str, scores) -> Prediction:
    """Build a Prediction whose label is the argmax, ties broken by class order."""
    values = tuple(float(s) for s in scores)
    if len(values) != len(CLASS_ORDER):
        raise ValueError("need one score per class")
    best = 0
    for i in range(1, len(values)):
        if values[i] > values[best]:
            best = i
    return Prediction(text=text, label=CLASS_ORDER[best], scores=values)


def one_hot_prediction(text: str, label: Label) -> Prediction:
    scores = tuple(1.0 if cls is label else 0.0 for cls in CLASS_ORDER)
    return Prediction(text=text, label=label, scores=scores)


def format_dataset(rows: list[LabeledUtterance]) -> str:
    lines = [_HEADER]
    for row in rows:
        lines.append(f"{row.text}\t{row.label.value}\t{row.split}\t{row.source}")
    return "\n".join(lines) + "\n"


def parse_dataset(text: str) -> list[LabeledUtterance]:
    lines = text.splitlines()
    if not lines or lines[0] != _HEADER:
        raise DatasetFormatError(f"missing header row {_HEADER!r}", line=1)
    rows: list[LabeledUtterance] = []
    for lineno, raw in enumerate(lines[1:], start=2):
        parts = raw.split("\t")
        if len(parts) != 4:
            raise DatasetFormatError(
                f"expected 4 tab-separated fields, got {len(parts)}", lineno
            )
        utterance_text, label_text, split, source = parts
        try:
            label = Label(label_text)
        except ValueError:
            raise DatasetFormatError(f"unknown label {label_text!r}", lineno) from None
        if split not in SPLIT_VALUES:
            raise DatasetFormatError(f"unknown split {split!r}", lineno)
        try:
            rows.append(LabeledUtterance(utterance_text, label, split, source))
        except EmptyAfterNormalizeError:
            raise DatasetFormatError("empty utterance text", lineno) from None
    return rows


def read_dataset(path) -> list[LabeledUtterance]:
    with open(path, encoding="utf-8") as fh:
        return parse_dataset(fh.read())


def write_dataset(rows: list[LabeledUtterance], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_dataset(rows))


def filter_split(rows: list[LabeledUtterance], split: str) -> list[LabeledUtterance]:
    if split not in SPLIT_VALUES:
        raise ValueError(f"unknown split {split!r}")
    return [row for row in rows if row.split == split]


def label_distribution(rows: list[LabeledUtterance]) -> dict[Label, float]:
    """Fraction of rows per label, in class order."""
    if not rows:
        raise ValueError("no rows")
    counts = {label: 0 for label in CLASS_ORDER}
    for row in rows:
        counts[row.label] += 1
    return {label: counts[label] / len(rows) for label in CLASS_ORDER}
