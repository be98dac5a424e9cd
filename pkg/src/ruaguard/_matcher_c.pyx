# cython: language_level=3
# distutils: language = c++
"""Compiled membership matcher.

Mirrors the pure-Python backend: memoized end-position matching over a
lowered grammar, operating on UTF-8 bytes with sorted unique position
vectors as the memo cells.
"""

from libc.string cimport memcmp
from libcpp.algorithm cimport sort, unique
from libcpp.string cimport string
from libcpp.vector cimport vector


cdef struct Sym:
    int kind        # 0 terminal, 1 rule reference
    int index


cdef class CompiledMatcher:
    cdef vector[vector[vector[Sym]]] _rules
    cdef vector[string] _terminals
    cdef int _start

    def __init__(self, rules, int start):
        cdef vector[vector[Sym]] calts
        cdef vector[Sym] csyms
        cdef Sym s
        self._start = start
        for alts in rules:
            calts.clear()
            for alt in alts:
                csyms.clear()
                for sym in alt:
                    if isinstance(sym, str):
                        s.kind = 0
                        s.index = <int>self._terminals.size()
                        self._terminals.push_back(<string>sym.encode("utf-8"))
                    else:
                        s.kind = 1
                        s.index = <int>sym
                    csyms.push_back(s)
                calts.push_back(csyms)
            self._rules.push_back(calts)

    cdef const vector[int]* _match(self, int rule_id, int i, const string& text,
                                   vector[vector[vector[int]]]& memo,
                                   vector[vector[char]]& done) except NULL:
        cdef vector[int] ends, cur, nxt
        cdef const vector[int]* sub
        cdef const string* term
        cdef size_t a, k, j, width
        cdef int pos
        if done[rule_id][i]:
            return &memo[rule_id][i]
        for a in range(self._rules[rule_id].size()):
            cur.clear()
            cur.push_back(i)
            for k in range(self._rules[rule_id][a].size()):
                if cur.empty():
                    break
                nxt.clear()
                if self._rules[rule_id][a][k].kind == 0:
                    term = &self._terminals[self._rules[rule_id][a][k].index]
                    width = term.size()
                    for j in range(cur.size()):
                        pos = cur[j]
                        if pos + width <= text.size() and (
                            width == 0
                            or memcmp(text.data() + pos, term.data(), width) == 0
                        ):
                            nxt.push_back(pos + <int>width)
                else:
                    for j in range(cur.size()):
                        sub = self._match(
                            self._rules[rule_id][a][k].index, cur[j], text, memo, done
                        )
                        nxt.insert(nxt.end(), sub.begin(), sub.end())
                sort(nxt.begin(), nxt.end())
                nxt.erase(unique(nxt.begin(), nxt.end()), nxt.end())
                cur.swap(nxt)
            ends.insert(ends.end(), cur.begin(), cur.end())
        sort(ends.begin(), ends.end())
        ends.erase(unique(ends.begin(), ends.end()), ends.end())
        memo[rule_id][i].swap(ends)
        done[rule_id][i] = 1
        return &memo[rule_id][i]

    def accepts(self, text: str) -> bool:
        cdef bytes raw = text.encode("utf-8")
        cdef string data = raw
        cdef int n = <int>data.size()
        cdef size_t nrules = self._rules.size()
        cdef vector[vector[vector[int]]] memo = vector[vector[vector[int]]](nrules)
        cdef vector[vector[char]] done = vector[vector[char]](nrules)
        cdef size_t r
        for r in range(nrules):
            memo[r].resize(n + 1)
            done[r].assign(n + 1, 0)
        cdef const vector[int]* result = self._match(self._start, 0, data, memo, done)
        cdef size_t j
        for j in range(result.size()):
            if result[0][j] == n:
                return True
        return False
