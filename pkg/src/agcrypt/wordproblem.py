"""Exact and bounded decision procedures for the word problem.

The exact decider explores the composed transducer of a group word:
its states are tuples of signed automaton states, one per letter of the
word.  The word is the identity iff every reachable tuple outputs every
alphabet letter unchanged.  The reachable set is finite, but may be
exponential in the word length, hence the explicit budget.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional

from .mealy import (
    GroupWord,
    _resolve_word,
    free_reduce,
    inverse_word,
    signed_rows,
)


@dataclass(frozen=True)
class DecisionBudget:
    max_states: int = 2 ** 20
    max_depth: int = 64

    def __post_init__(self):
        if self.max_states < 1 or self.max_depth < 1:
            raise ValueError("budget fields must be >= 1")


DEFAULT_BUDGET = DecisionBudget()


class BudgetExceeded(RuntimeError):
    """The reachable composed-state set outgrew the budget."""


class NotFound(LookupError):
    """Brute-force search exhausted without a witness."""


def _expand(machine, tup):
    """Yield (output_ok, next_tuple) per alphabet letter."""
    rows = signed_rows(machine)
    for letter in machine.alphabet:
        x = letter
        nxt = []
        for sg in tup:
            sg, x = rows[sg][x]
            nxt.append(sg)
        yield x == letter, tuple(nxt)


def acts_trivially_to_depth(machine, w: GroupWord, depth: int) -> bool:
    """True iff act(w, u) == u for every input word of length <= depth."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    start = tuple(_resolve_word(machine, w))
    seen = {start}
    frontier = [start]
    for _ in range(depth):
        nxt = []
        for tup in frontier:
            for ok, new in _expand(machine, tup):
                if not ok:
                    return False
                if new not in seen:
                    seen.add(new)
                    nxt.append(new)
        if not nxt:
            break
        frontier = nxt
    return True


def decide_identity(machine, w: GroupWord,
                    budget: DecisionBudget = DEFAULT_BUDGET) -> tuple[bool, int]:
    """Exact word-problem decision by BFS over reachable composed states.

    Returns (verdict, number of composed states explored).
    """
    start = tuple(_resolve_word(machine, free_reduce(w)))
    seen = {start}
    queue = deque([start])
    while queue:
        tup = queue.popleft()
        for ok, new in _expand(machine, tup):
            if not ok:
                return False, len(seen)
            if new not in seen:
                if len(seen) >= budget.max_states:
                    raise BudgetExceeded(
                        f"more than {budget.max_states} composed states")
                seen.add(new)
                queue.append(new)
    return True, len(seen)


def is_identity(machine, w: GroupWord, budget: DecisionBudget = DEFAULT_BUDGET) -> bool:
    return decide_identity(machine, w, budget)[0]


def reachable_state_count(machine, w: GroupWord,
                          budget: DecisionBudget = DEFAULT_BUDGET) -> int:
    """Number of composed states reachable from the initial tuple of w."""
    start = tuple(_resolve_word(machine, free_reduce(w)))
    seen = {start}
    queue = deque([start])
    while queue:
        tup = queue.popleft()
        for _, new in _expand(machine, tup):
            if new not in seen:
                if len(seen) >= budget.max_states:
                    raise BudgetExceeded(
                        f"more than {budget.max_states} composed states")
                seen.add(new)
                queue.append(new)
    return len(seen)


def are_equal(machine, w1: GroupWord, w2: GroupWord,
              budget: DecisionBudget = DEFAULT_BUDGET) -> bool:
    return is_identity(machine, w1 + inverse_word(w2), budget)


def element_order(machine, w: GroupWord, max_order: int,
                  budget: DecisionBudget = DEFAULT_BUDGET) -> Optional[int]:
    """Least k <= max_order with w^k = 1, else None (unknown).

    Budget exhaustion also maps to None: the caller must never mistake
    "don't know" for a definite order.
    """
    if max_order < 1:
        raise ValueError("max_order must be >= 1")
    w = free_reduce(w)
    power: GroupWord = ()
    for k in range(1, max_order + 1):
        power = free_reduce(power + w)
        try:
            if is_identity(machine, power, budget):
                return k
        except BudgetExceeded:
            return None
    return None


def commutes(machine, u: GroupWord, v: GroupWord,
             budget: DecisionBudget = DEFAULT_BUDGET) -> bool:
    comm = free_reduce(u + v + inverse_word(u) + inverse_word(v))
    return is_identity(machine, comm, budget)


def _reduced_words(generators, length):
    """All freely reduced words of exactly `length`, in length-lex order.

    Letter order: generators as given, each with sign +1 before -1.
    """
    signed = [(g, e) for g in generators for e in (1, -1)]
    if length == 0:
        yield ()
        return

    def rec(prefix):
        if len(prefix) == length:
            yield prefix
            return
        for g, e in signed:
            if prefix and prefix[-1] == (g, -e):
                continue
            yield from rec(prefix + ((g, e),))

    yield from rec(())


def conjugacy_search_bruteforce(machine, a: GroupWord, b: GroupWord,
                                max_len: int,
                                budget: DecisionBudget = DEFAULT_BUDGET) -> GroupWord:
    """Find freely reduced c with |c| <= max_len and c^-1 a c = b.

    Deterministic length-lexicographic search; raises NotFound when the
    ball is exhausted.
    """
    if max_len < 0:
        raise ValueError("max_len must be >= 0")
    a = free_reduce(a)
    b = free_reduce(b)
    for length in range(max_len + 1):
        for c in _reduced_words(machine.generators, length):
            candidate = free_reduce(inverse_word(c) + a + c)
            if are_equal(machine, candidate, b, budget):
                return c
    raise NotFound(f"no conjugator of length <= {max_len}")
