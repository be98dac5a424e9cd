"""Grammar membership with selectable backends.

A grammar is lowered once into an index-based form, then handed to either
the compiled matcher (preferred) or the pure-Python fallback. The backend
is chosen at import time; set RUAG_PURE_PYTHON=1 to force the fallback.
Both backends return identical accept/reject decisions.
"""

from __future__ import annotations

import os
from functools import lru_cache

from ._matcher_py import PyMatcher
from .grammar import Grammar, Terminal

_COMPILED = None
if not os.environ.get("RUAG_PURE_PYTHON"):
    try:
        from ._matcher_c import CompiledMatcher as _COMPILED
    except ImportError:
        _COMPILED = None

BACKEND = "compiled" if _COMPILED is not None else "python"


def lower_grammar(g: Grammar) -> tuple[list[list[list]], int]:
    """Flatten a Grammar into (rules, start_id) for the matcher backends."""
    index = {name: i for i, name in enumerate(g.rules)}
    rules = []
    for rule in g.rules.values():
        alts = []
        for alt in rule.alternatives:
            alts.append(
                [
                    sym.text if isinstance(sym, Terminal) else index[sym.name]
                    for sym in alt.symbols
                ]
            )
        rules.append(alts)
    return rules, index[g.start_symbol]


def make_matcher(g: Grammar, backend: str | None = None):
    """Build a matcher for ``g``; ``backend`` forces 'python' or 'compiled'."""
    rules, start = lower_grammar(g)
    if backend is None:
        backend = BACKEND
    if backend == "compiled":
        if _COMPILED is None:
            raise RuntimeError("compiled matcher backend is not available")
        return _COMPILED(rules, start)
    if backend == "python":
        return PyMatcher(rules, start)
    raise ValueError(f"unknown matcher backend {backend!r}")


# Grammars hash by identity, so each distinct grammar object compiles once.
@lru_cache(maxsize=128)
def compile_matcher(g: Grammar):
    return make_matcher(g)


def member(g: Grammar, text: str) -> bool:
    """True iff ``text`` is in the language of ``g``."""
    return compile_matcher(g).accepts(text)
