"""Command line surface: gen, split, train, eval, mine, guard, probe.

Every command is deterministic given its flags plus ``--seed``; re-running
with the same arguments produces byte-identical output files.
"""

from __future__ import annotations

import argparse
import dataclasses
import importlib.resources
import json
import os
import sys
from pathlib import Path

from .classifiers import (
    BowLrParams,
    NgramParams,
    fit_ir,
    fit_random_guess,
    load_model,
    save_model,
    train_bow_lr,
    train_ngram_linear,
)
from .dataset import (
    SPLIT_VALUES,
    Label,
    LabeledUtterance,
    filter_split,
    format_dataset,
    parse_dataset,
    read_dataset,
)
from .errors import DatasetFormatError, RuaGuardError
from .evaluation import (
    evaluate,
    format_mined_candidates,
    format_report,
    mine_negatives,
    mined_to_rows,
    probe_recall,
    report_audit_json,
)
from .generation import sample
from .grammar import load_grammar, serialize_grammar
from .guard import (
    RESPONSE_PRESETS,
    decision_to_json,
    guard as run_guard,
    load_guard_config,
)
from .partition import PartitionConfig, load_partition, partition, write_manifest
from .recognizer import load_recognizer

_PACKAGED_GRAMMARS = ("toy", "pos", "aic", "neg")


def _data_dir(args) -> Path:
    explicit = getattr(args, "data_dir", None)
    if explicit:
        return Path(explicit)
    env = os.environ.get("RUAG_DATA_DIR")
    if env:
        return Path(env)
    return Path(str(importlib.resources.files("ruaguard").joinpath("data")))


def _resolve_grammar(name_or_path: str, args) -> Path:
    """Accept a filesystem path or the bare name of a packaged grammar."""
    direct = Path(name_or_path)
    if direct.exists():
        return direct
    if name_or_path in _PACKAGED_GRAMMARS:
        packaged = _data_dir(args) / f"{name_or_path}.cfg"
        if packaged.exists():
            return packaged
    raise RuaGuardError(
        f"grammar {name_or_path!r} is neither a file nor one of "
        f"{', '.join(_PACKAGED_GRAMMARS)}"
    )


def _infer_label(grammar_arg: str) -> Label:
    stem = Path(grammar_arg).name.split(".")[0].lower()
    if stem.startswith("aic"):
        return Label.AIC
    if stem.startswith("neg"):
        return Label.NEG
    return Label.POS


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _positive_int(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def _fractions(value: str) -> tuple[float, float, float]:
    parts = [float(p) for p in value.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected three comma-separated numbers")
    return tuple(parts)


# ---------------------------------------------------------------------------
# Commands


def cmd_gen(args) -> int:
    grammar = load_grammar(_resolve_grammar(args.grammar, args))
    label = Label(args.label) if args.label else _infer_label(args.grammar)
    batch = sample(grammar, args.n, args.seed, dedup=not args.no_dedup)
    if args.plain:
        _write_text(args.out, "".join(f"{u}\n" for u in batch.utterances))
        return 0
    rows = [
        LabeledUtterance(text, label, split=args.split, source="grammar")
        for text in batch.utterances
    ]
    _write_text(args.out, format_dataset(rows))
    return 0


def cmd_split(args) -> int:
    path = _resolve_grammar(args.grammar, args)
    grammar = load_grammar(path)
    if args.manifest:
        manifest_text = Path(args.manifest).read_text(encoding="utf-8")
        parts = load_partition(grammar, manifest_text)
    else:
        cfg = PartitionConfig(
            p=args.p,
            split_fractions=args.fractions,
            min_alternatives_to_split=args.min_alternatives,
            seed=args.seed,
            strict_greater=args.strict_greater,
        )
        parts = partition(grammar, cfg)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = path.name.split(".")[0]
    for split, sub in parts.sub_grammars.items():
        target = out_dir / f"{stem}.{split}.cfg"
        target.write_text(serialize_grammar(sub), encoding="utf-8")
        print(target)
    manifest_path = out_dir / f"{stem}.manifest.tsv"
    write_manifest(parts, manifest_path)
    print(manifest_path)
    return 0


def cmd_train(args) -> int:
    rows = read_dataset(args.data)
    train_rows = filter_split(rows, "train")
    if args.kind == "bowlr":
        hp = BowLrParams()
        if args.epochs is not None:
            hp = dataclasses.replace(hp, epochs=args.epochs)
        if args.lr is not None:
            hp = dataclasses.replace(hp, learning_rate=args.lr)
        model = train_bow_lr(train_rows, hp, seed=args.seed)
    elif args.kind == "ir":
        model = fit_ir(train_rows)
    elif args.kind == "ngram":
        hp = NgramParams()
        if args.epochs is not None:
            hp = dataclasses.replace(hp, epochs=args.epochs)
        if args.lr is not None:
            hp = dataclasses.replace(hp, learning_rate=args.lr)
        model = train_ngram_linear(train_rows, hp, seed=args.seed)
    else:
        model = fit_random_guess(train_rows, seed=args.seed)
    save_model(model, args.out)
    print(f"{args.kind}\t{len(train_rows)} train rows\t{args.out}")
    return 0


def _load_classifier(args, default_recognizer: bool):
    if getattr(args, "model", None):
        return load_model(args.model)
    if getattr(args, "recognizer", False) or default_recognizer:
        return load_recognizer(
            _resolve_grammar(args.pos, args), _resolve_grammar(args.aic, args)
        )
    raise RuaGuardError("pass --model PATH or --recognizer")


def cmd_eval(args) -> int:
    classifier = _load_classifier(args, default_recognizer=False)
    rows = read_dataset(args.data)
    subset = rows if args.split == "all" else filter_split(rows, args.split)
    if not subset:
        raise RuaGuardError(f"no rows with split {args.split!r} in {args.data}")
    report = evaluate(classifier, subset)
    table = format_report(report)
    sys.stdout.write(table)
    if args.out:
        Path(args.out).write_text(table, encoding="utf-8")
    if args.audit:
        line = report_audit_json(
            report, data=str(args.data), split=args.split,
            model=str(args.model or "recognizer"),
        )
        with open(args.audit, "a", encoding="utf-8") as fh:
            fh.write(line + "\n")
    return 0


def _read_positive_texts(path: str) -> list[str]:
    text = Path(path).read_text(encoding="utf-8")
    try:
        rows = parse_dataset(text)
    except DatasetFormatError:
        return [line for line in text.splitlines() if line.strip()]
    return [row.text for row in rows if row.label is Label.POS]


def cmd_mine(args) -> int:
    corpus = [
        line
        for line in Path(args.corpus).read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    method = "tfidf_weighted" if args.method == "tfidf" else "random"
    mined = mine_negatives(
        corpus,
        _read_positive_texts(args.positives),
        args.n,
        method=method,
        seed=args.seed,
        corpus_name=args.corpus_name or Path(args.corpus).name,
    )
    if args.reviewed:
        _write_text(args.out, format_dataset(mined_to_rows(mined, split=args.split)))
    else:
        _write_text(args.out, format_mined_candidates(mined))
    return 0


def cmd_guard(args) -> int:
    classifier = _load_classifier(args, default_recognizer=True)
    if args.guard_config:
        cfg = load_guard_config(args.guard_config)
    else:
        cfg = RESPONSE_PRESETS[args.preset]
    if args.aic_policy:
        cfg = dataclasses.replace(cfg, aic_policy=args.aic_policy)
    lines = [args.text] if args.text is not None else sys.stdin.read().splitlines()
    for line in lines:
        decision = run_guard(line, classifier, cfg)
        print(decision_to_json(decision, text=line))
    return 0


def cmd_probe(args) -> int:
    classifier = _load_classifier(args, default_recognizer=True)
    probes = [
        line
        for line in Path(args.probes).read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    report = probe_recall(classifier, probes)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            for text, label, detected in report.verdicts:
                fh.write(
                    json.dumps(
                        {"text": text, "label": label, "detected": detected},
                        sort_keys=True,
                    )
                    + "\n"
                )
    print(f"recall\t{report.fraction:.3f}")
    return 0


# ---------------------------------------------------------------------------
# Parser assembly


def _add_recognizer_flags(sub) -> None:
    sub.add_argument("--recognizer", action="store_true",
                     help="use the grammar recognizer instead of a model file")
    sub.add_argument("--pos", default="pos", help="positive grammar (name or path)")
    sub.add_argument("--aic", default="aic", help="ambiguous grammar (name or path)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ruaguard",
        description="Grammar-driven tooling for the are-you-a-robot intent.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="master seed; sub-seeds are derived per stage")
    common.add_argument("--config", default=None,
                        help="key=value file with defaults for seed and data_dir")
    common.add_argument("--data-dir", default=None,
                        help="directory with packaged grammars (or set RUAG_DATA_DIR)")
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen", parents=[common],
                              help="sample utterances from a grammar")
    gen.add_argument("--grammar", required=True)
    gen.add_argument("--n", type=_positive_int, required=True)
    gen.add_argument("--label", choices=[l.value for l in Label], default=None,
                     help="override the label inferred from the grammar name")
    gen.add_argument("--split", choices=SPLIT_VALUES, default="none")
    gen.add_argument("--no-dedup", action="store_true",
                     help="keep duplicate samples instead of rejecting them")
    gen.add_argument("--plain", action="store_true",
                     help="write bare utterances, one per line, instead of TSV")
    gen.add_argument("--out", default=None)
    gen.set_defaults(func=cmd_gen)

    split = commands.add_parser("split", parents=[common],
                                help="partition a grammar into train/val/test")
    split.add_argument("--grammar", required=True)
    split.add_argument("--p", type=float, default=0.25,
                       help="shared probability mass per splittable rule")
    split.add_argument("--fractions", type=_fractions, default=(0.70, 0.15, 0.15))
    split.add_argument("--min-alternatives", type=int, default=4)
    split.add_argument("--strict-greater", action="store_true",
                       help="require shared mass strictly above p")
    split.add_argument("--manifest", default=None,
                       help="rebuild from an existing manifest instead of splitting")
    split.add_argument("--out-dir", default=".")
    split.set_defaults(func=cmd_split)

    train = commands.add_parser("train", parents=[common],
                                help="fit a classifier on the train split")
    train.add_argument("--kind", choices=("bowlr", "ir", "ngram", "random"),
                       required=True)
    train.add_argument("--data", required=True)
    train.add_argument("--out", required=True)
    train.add_argument("--epochs", type=int, default=None)
    train.add_argument("--lr", type=float, default=None)
    train.set_defaults(func=cmd_train)

    evl = commands.add_parser("eval", parents=[common],
                              help="score a classifier on a dataset split")
    evl.add_argument("--model", default=None)
    _add_recognizer_flags(evl)
    evl.add_argument("--data", required=True)
    evl.add_argument("--split", choices=SPLIT_VALUES + ("all",), default="test")
    evl.add_argument("--out", default=None, help="also write the report TSV here")
    evl.add_argument("--audit", default=None, help="append a JSON audit line here")
    evl.set_defaults(func=cmd_eval)

    mine = commands.add_parser("mine", parents=[common],
                               help="pick hard negative candidates from a corpus")
    mine.add_argument("--corpus", required=True)
    mine.add_argument("--positives", required=True,
                      help="dataset TSV or plain text file of positive utterances")
    mine.add_argument("--n", type=_positive_int, required=True)
    mine.add_argument("--method", choices=("tfidf", "random"), default="tfidf")
    mine.add_argument("--corpus-name", default=None)
    mine.add_argument("--reviewed", action="store_true",
                      help="emit dataset rows labeled n instead of a triage sheet")
    mine.add_argument("--split", choices=SPLIT_VALUES, default="none",
                      help="split tag for --reviewed rows")
    mine.add_argument("--out", default=None)
    mine.set_defaults(func=cmd_mine)

    grd = commands.add_parser("guard", parents=[common],
                              help="decide disclosure responses for utterances")
    grd.add_argument("--text", default=None,
                     help="single utterance; omit to read lines from stdin")
    grd.add_argument("--model", default=None)
    _add_recognizer_flags(grd)
    grd.add_argument("--guard-config", default=None,
                     help="key=value disclosure config file")
    grd.add_argument("--preset", choices=sorted(RESPONSE_PRESETS), default="cc",
                     help="named response wording when no config file is given")
    grd.add_argument("--aic-policy", choices=("clarify", "pass_through"),
                     default=None)
    grd.set_defaults(func=cmd_guard)

    probe = commands.add_parser("probe", parents=[common],
                                help="measure detection recall on probe phrasings")
    probe.add_argument("--probes", required=True)
    probe.add_argument("--model", default=None)
    _add_recognizer_flags(probe)
    probe.add_argument("--out", default=None, help="write per-probe JSON lines here")
    probe.set_defaults(func=cmd_probe)
    return parser


def _apply_config(args) -> None:
    values: dict[str, str] = {}
    if args.config:
        for raw in Path(args.config).read_text(encoding="utf-8").splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise RuaGuardError(f"bad config line {raw!r}, expected key=value")
            key, value = line.split("=", 1)
            values[key.strip()] = value.strip()
    if args.seed is None:
        args.seed = int(values.get("seed", 0))
    if args.data_dir is None and "data_dir" in values:
        args.data_dir = values["data_dir"]


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _apply_config(args)
        return args.func(args)
    except RuaGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
