"""Pure-Python membership matcher.

Same lowered-grammar input and accept semantics as the compiled extension;
used as the fallback backend and as the reference in parity tests.
"""

from __future__ import annotations


class PyMatcher:
    """Memoized matcher over a lowered grammar.

    ``rules`` is a list (indexed by rule id) of alternatives, each a list of
    symbols; a symbol is a terminal string or an int rule id. ``start`` is
    the start rule id.
    """

    def __init__(self, rules: list[list[list]], start: int):
        self._rules = rules
        self._start = start

    def accepts(self, text: str) -> bool:
        target = len(text)
        rules = self._rules
        memo: dict[tuple[int, int], set[int]] = {}

        def match(rule_id: int, i: int) -> set[int]:
            key = (rule_id, i)
            cached = memo.get(key)
            if cached is not None:
                return cached
            ends: set[int] = set()
            for alt in rules[rule_id]:
                positions = {i}
                for sym in alt:
                    if not positions:
                        break
                    nxt: set[int] = set()
                    if isinstance(sym, str):
                        width = len(sym)
                        for pos in positions:
                            if text.startswith(sym, pos):
                                nxt.add(pos + width)
                    else:
                        for pos in positions:
                            nxt |= match(sym, pos)
                    positions = nxt
                ends |= positions
            memo[key] = ends
            return ends

        return target in match(self._start, 0)
