"""Weighted sampling from grammars and typo/variant modifiers.

Modifiers rewrite a token inside terminals into a new probabilistic
non-terminal whose alternatives are the original token plus variant forms,
so e.g. common misspellings enter the language at a configurable rate while
the original stays the most likely.
"""

from __future__ import annotations

import random
import re
import warnings
from dataclasses import dataclass

from .errors import ExhaustedLanguageError, NameCollisionError, TargetNotFoundWarning
from .grammar import (
    SPLIT_AUTO,
    Alternative,
    Grammar,
    NonTerminalRef,
    Rule,
    Terminal,
    count_derivations,
    derive_once,
    grammar_fingerprint,
)

DEFAULT_ORIGINAL_WEIGHT = 8.0


@dataclass(frozen=True)
class SampleBatch:
    utterances: tuple[str, ...]
    grammar_id: str
    seed: int
    dedup: bool
    split: str | None = None


@dataclass(frozen=True)
class ModifierSpec:
    target: str
    variants: tuple[tuple[str, float], ...]
    original_weight: float = DEFAULT_ORIGINAL_WEIGHT
    name: str | None = None

    def __post_init__(self):
        if not self.target or re.search(r"\s", self.target):
            raise ValueError("modifier target must be a single whitespace-free token")
        if not self.variants:
            raise ValueError("modifier needs at least one variant")
        for _, weight in self.variants:
            if weight <= 0:
                raise ValueError("variant weights must be positive")
            if self.original_weight <= weight:
                raise ValueError(
                    "original_weight must exceed every variant weight"
                )


def sample(
    g: Grammar,
    n: int,
    seed: int,
    dedup: bool = True,
    max_attempts: int | None = None,
) -> SampleBatch:
    """Draw ``n`` weighted samples from ``g``, deterministic per seed.

    With dedup, rejection-sample until ``n`` distinct strings are found or
    ``max_attempts`` (default 50n) draws are spent. If the language provably
    holds fewer than ``n`` strings, whatever distinct strings were found are
    returned; otherwise falling short raises ExhaustedLanguageError.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = random.Random(seed)
    if not dedup:
        utterances = tuple(derive_once(g, rng) for _ in range(n))
    else:
        if max_attempts is None:
            max_attempts = 50 * n
        seen: dict[str, None] = {}
        language_cannot_reach_n = count_derivations(g) < n
        for _ in range(max_attempts):
            text = derive_once(g, rng)
            if text not in seen:
                seen[text] = None
                if len(seen) == n:
                    break
        if len(seen) < n and not language_cannot_reach_n:
            raise ExhaustedLanguageError(found=len(seen), requested=n)
        utterances = tuple(seen)
    return SampleBatch(
        utterances=utterances,
        grammar_id=grammar_fingerprint(g),
        seed=seed,
        dedup=dedup,
    )


def _fresh_name(g: Grammar, spec: ModifierSpec) -> str:
    if spec.name is not None:
        if spec.name in g.rules:
            raise NameCollisionError(spec.name)
        return spec.name
    base = "Mod_" + re.sub(r"[^A-Za-z0-9_]", "_", spec.target)
    if not re.match(r"[A-Za-z]", base):
        base = "Mod_x"
    name = base
    counter = 2
    while name in g.rules:
        name = f"{base}{counter}"
        counter += 1
    return name


def _rewrite_terminal(text: str, target: str, ref_name: str) -> list:
    """Split a terminal around token-exact occurrences of ``target``."""
    pieces = re.split(r"(\s+)", text)
    symbols: list = []
    buffer: list[str] = []
    hit = False
    for idx, piece in enumerate(pieces):
        if idx % 2 == 0 and piece == target:
            hit = True
            if buffer:
                symbols.append(Terminal("".join(buffer)))
                buffer = []
            symbols.append(NonTerminalRef(ref_name))
        else:
            buffer.append(piece)
    if not hit:
        return []
    if buffer:
        joined = "".join(buffer)
        if joined:
            symbols.append(Terminal(joined))
    return symbols


def apply_modifier(g: Grammar, spec: ModifierSpec) -> Grammar:
    """Rewrite every terminal token equal to ``spec.target`` into a weighted
    choice between the original token and the variant forms.

    If the target occurs nowhere, the input grammar is returned unchanged and
    a TargetNotFoundWarning is emitted.
    """
    new_name = _fresh_name(g, spec)
    new_rules: dict[str, Rule] = {}
    found = False
    for rule in g.rules.values():
        alternatives = []
        for alt in rule.alternatives:
            symbols: list = []
            for sym in alt.symbols:
                if isinstance(sym, Terminal):
                    rewritten = _rewrite_terminal(sym.text, spec.target, new_name)
                    if rewritten:
                        found = True
                        symbols.extend(rewritten)
                    else:
                        symbols.append(sym)
                else:
                    symbols.append(sym)
            alternatives.append(Alternative(tuple(symbols), alt.weight))
        new_rules[rule.name] = Rule(rule.name, tuple(alternatives), rule.splittable)
    if not found:
        warnings.warn(
            f"modifier target {spec.target!r} matched no terminal token",
            TargetNotFoundWarning,
            stacklevel=2,
        )
        return g
    choice_alts = [Alternative((Terminal(spec.target),), spec.original_weight)]
    choice_alts.extend(
        Alternative((Terminal(variant),), weight) for variant, weight in spec.variants
    )
    new_rules[new_name] = Rule(new_name, tuple(choice_alts), SPLIT_AUTO)
    return Grammar(rules=new_rules, start_symbol=g.start_symbol)
