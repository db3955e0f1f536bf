"""Relator-based string rewriting (semi-Thue moves) on group words.

A rewrite system is built from a set of relators (words equal to the
identity).  For a relator r = v1 u v2 the factor u may be swapped with
its complement v1^-1 v2^-1, in either direction; together with free
insertion/cancellation these moves generate exactly the word-problem
congruence of the presented group.

Internally words are encoded as strings over a private-use character
alphabet so that factor occurrence scans run at C speed.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from random import Random
from typing import Iterable, Mapping, Optional, Sequence

from .mealy import GroupWord, SignedGenerator, free_reduce, inverse_word
from .wordproblem import (
    BudgetExceeded,
    DecisionBudget,
    DEFAULT_BUDGET,
    acts_trivially_to_depth,
    is_identity,
)


class SpanOutOfRange(IndexError):
    pass


class InvalidMove(ValueError):
    pass


class InvalidRelator(ValueError):
    """A relator failed the identity check against the platform automaton."""


class UndefinedGeneratorInSubstitution(KeyError):
    pass


KINDS = ("factor_swap", "relator_insert", "relator_delete", "free_insert", "free_cancel")

DEFAULT_WEIGHTS = {
    "factor_swap": 0.5,
    "free_insert": 0.2,
    "free_cancel": 0.2,
    "relator_insert": 0.05,
    "relator_delete": 0.05,
}


@dataclass(frozen=True)
class Relator:
    word: GroupWord

    def __post_init__(self):
        if not self.word:
            raise ValueError("relator must be nonempty")
        if free_reduce(self.word) != self.word:
            raise ValueError("relator must be freely reduced")


@dataclass(frozen=True)
class RewriteMove:
    kind: str
    position: int
    factor: GroupWord
    replacement: GroupWord


def factor_occurrences(w: GroupWord) -> list[tuple[int, int]]:
    """All factor spans of w, empty spans included, ordered by (start, end)."""
    n = len(w)
    spans = []
    for i in range(n + 1):
        for j in range(i, n + 1):
            spans.append((i, j))
    return spans


def complement(r: Relator, span: tuple[int, int]) -> GroupWord:
    """For r = v1 u v2 with u = r[span], return v1^-1 v2^-1 freely reduced."""
    i, j = span
    if not (0 <= i <= j <= len(r.word)):
        raise SpanOutOfRange(f"span {span} out of range for relator of length {len(r.word)}")
    v1 = r.word[:i]
    v2 = r.word[j:]
    return free_reduce(inverse_word(v1) + inverse_word(v2))


class _Codec:
    """Bijection between signed generators and private-use characters."""

    def __init__(self, generators: Sequence):
        self.enc: dict[SignedGenerator, str] = {}
        self.dec: dict[str, SignedGenerator] = {}
        code = 0xE000
        for g in generators:
            for e in (1, -1):
                ch = chr(code)
                code += 1
                self.enc[(g, e)] = ch
                self.dec[ch] = (g, e)

    def encode(self, w: GroupWord) -> str:
        return "".join(self.enc[sg] for sg in w)

    def decode(self, s: str) -> GroupWord:
        return tuple(self.dec[ch] for ch in s)

    def invert_char(self, ch: str) -> str:
        g, e = self.dec[ch]
        return self.enc[(g, -e)]


def _occurrences(text: str, pat: str) -> list[int]:
    out = []
    i = text.find(pat)
    while i >= 0:
        out.append(i)
        i = text.find(pat, i + 1)
    return out


class RewriteSystem:
    """Relator set plus the derived move catalogue.

    `max_word_len` caps the length of words produced by random walks.
    Relators are machine-verified at construction when an automaton is
    supplied: exactly for short relators, depth-bounded (with a warning
    flag) for long ones.
    """

    EXACT_CHECK_MAX_LEN = 20

    def __init__(self, relators: Iterable[Relator], generators: Sequence,
                 max_word_len: int, machine=None, check_depth: int = 16,
                 budget: DecisionBudget = DEFAULT_BUDGET):
        self.relators: tuple[Relator, ...] = tuple(relators)
        if not self.relators:
            raise ValueError("relator set must be nonempty")
        self.generators = tuple(generators)
        longest = max(len(r.word) for r in self.relators)
        if max_word_len < longest:
            raise ValueError("max_word_len must cover the longest relator")
        self.max_word_len = max_word_len
        self.depth_checked_only: tuple[Relator, ...] = ()

        if machine is not None:
            depth_only = []
            for r in self.relators:
                if len(r.word) <= self.EXACT_CHECK_MAX_LEN:
                    try:
                        ok = is_identity(machine, r.word, budget)
                    except BudgetExceeded:
                        ok = acts_trivially_to_depth(machine, r.word, check_depth)
                        depth_only.append(r)
                else:
                    ok = acts_trivially_to_depth(machine, r.word, check_depth)
                    depth_only.append(r)
                if not ok:
                    raise InvalidRelator(f"relator is not the identity: {r.word}")
            self.depth_checked_only = tuple(depth_only)

        self._codec = _Codec(self.generators)
        self._build_tables()

    def _build_tables(self):
        enc = self._codec.encode
        swaps: dict[str, set[str]] = {}
        identity_words: set[str] = set()
        for r in self.relators:
            for span in factor_occurrences(r.word):
                i, j = span
                u = enc(r.word[i:j])
                comp = enc(complement(r, span))
                if u and comp:
                    swaps.setdefault(u, set()).add(comp)
                    swaps.setdefault(comp, set()).add(u)
                elif u and not comp:
                    identity_words.add(u)
                elif comp and not u:
                    identity_words.add(comp)
        # Replacement lists sorted by (length, string) so that the number
        # fitting under a length cap is a bisect away.
        self._swaps: dict[str, list[str]] = {
            p: sorted(repls, key=lambda s: (len(s), s)) for p, repls in swaps.items()
        }
        self._swap_repl_lens: dict[str, list[int]] = {
            p: [len(s) for s in repls] for p, repls in self._swaps.items()
        }
        self._swap_patterns: list[str] = sorted(self._swaps, key=lambda s: (len(s), s))
        self._identity_words: list[str] = sorted(identity_words, key=lambda s: (len(s), s))
        self._identity_word_lens: list[int] = [len(s) for s in self._identity_words]

    def with_cap(self, max_word_len: int) -> "RewriteSystem":
        """Copy sharing the precomputed tables, with a different length cap."""
        clone = object.__new__(RewriteSystem)
        clone.__dict__.update(self.__dict__)
        longest = max(len(r.word) for r in self.relators)
        if max_word_len < longest:
            raise ValueError("max_word_len must cover the longest relator")
        clone.max_word_len = max_word_len
        return clone


def _signed_pairs(system: RewriteSystem):
    return [(g, e) for g in system.generators for e in (1, -1)]


def applicable_moves(w: GroupWord, system: RewriteSystem) -> list[RewriteMove]:
    """Every move applicable to w under the system's length cap.

    Deterministic order: kind (catalogue order), then position, then
    factor, then replacement.
    """
    codec = system._codec
    s = codec.encode(w)
    cap = system.max_word_len
    moves: list[RewriteMove] = []

    swap_moves = []
    for pat in system._swap_patterns:
        if len(pat) > len(s):
            continue
        occs = _occurrences(s, pat)
        if not occs:
            continue
        for repl in system._swaps[pat]:
            if len(s) - len(pat) + len(repl) > cap:
                break
            for pos in occs:
                swap_moves.append((pos, pat, repl))
    swap_moves.sort()
    moves.extend(
        RewriteMove("factor_swap", pos, codec.decode(pat), codec.decode(repl))
        for pos, pat, repl in swap_moves)

    insert_moves = []
    for word_ in system._identity_words:
        if len(s) + len(word_) > cap:
            break
        for gap in range(len(s) + 1):
            insert_moves.append((gap, word_))
    insert_moves.sort()
    moves.extend(
        RewriteMove("relator_insert", gap, (), codec.decode(word_))
        for gap, word_ in insert_moves)

    delete_moves = []
    for word_ in system._identity_words:
        if len(word_) > len(s):
            continue
        for pos in _occurrences(s, word_):
            delete_moves.append((pos, word_))
    delete_moves.sort()
    moves.extend(
        RewriteMove("relator_delete", pos, codec.decode(word_), ())
        for pos, word_ in delete_moves)

    if len(s) + 2 <= cap:
        for gap in range(len(s) + 1):
            for g, e in _signed_pairs(system):
                moves.append(RewriteMove("free_insert", gap, (), ((g, e), (g, -e))))

    for pos in range(len(w) - 1):
        (g1, e1), (g2, e2) = w[pos], w[pos + 1]
        if g1 == g2 and e1 == -e2:
            moves.append(RewriteMove("free_cancel", pos, (w[pos], w[pos + 1]), ()))

    return moves


def apply_move(w: GroupWord, move: RewriteMove) -> GroupWord:
    pos = move.position
    if not (0 <= pos <= len(w)):
        raise InvalidMove(f"position {pos} out of range")
    if w[pos:pos + len(move.factor)] != move.factor:
        raise InvalidMove(f"factor {move.factor} does not occur at {pos}")
    return w[:pos] + move.replacement + w[pos + len(move.factor):]


def _pick_swap(system, s, cap, rng) -> Optional[tuple[int, str, str]]:
    entries = []  # (pattern, occurrence_count, allowed_replacements)
    total = 0
    for pat in system._swap_patterns:
        if len(pat) > len(s):
            continue
        budget_len = cap - (len(s) - len(pat))
        n_repl = bisect.bisect_right(system._swap_repl_lens[pat], budget_len)
        if n_repl == 0:
            continue
        occ = len(_occurrences(s, pat))
        if occ == 0:
            continue
        entries.append((pat, occ, n_repl))
        total += occ * n_repl
    if total == 0:
        return None
    idx = rng.randrange(total)
    for pat, occ, n_repl in entries:
        block = occ * n_repl
        if idx < block:
            occ_idx, repl_idx = divmod(idx, n_repl)
            pos = _occurrences(s, pat)[occ_idx]
            return pos, pat, system._swaps[pat][repl_idx]
        idx -= block
    raise AssertionError("unreachable")


def _pick_insert(system, s, cap, rng) -> Optional[tuple[int, str]]:
    n_words = bisect.bisect_right(system._identity_word_lens, cap - len(s))
    if n_words == 0:
        return None
    gaps = len(s) + 1
    idx = rng.randrange(n_words * gaps)
    word_idx, gap = divmod(idx, gaps)
    return gap, system._identity_words[word_idx]


def _pick_delete(system, s, rng) -> Optional[tuple[int, str]]:
    entries = []
    total = 0
    for word_ in system._identity_words:
        if len(word_) > len(s):
            break
        occs = _occurrences(s, word_)
        if occs:
            entries.append((word_, occs))
            total += len(occs)
    if total == 0:
        return None
    idx = rng.randrange(total)
    for word_, occs in entries:
        if idx < len(occs):
            return occs[idx], word_
        idx -= len(occs)
    raise AssertionError("unreachable")


def obfuscate(w: GroupWord, system: RewriteSystem, steps: int, rng: Random,
              weights: Optional[Mapping[str, float]] = None) -> GroupWord:
    """Random walk in the rewrite graph; the result equals w in the group.

    At each step a move kind is drawn by weight among the kinds currently
    applicable under the length cap, then a move of that kind uniformly.
    Steps with no applicable move are skipped but still counted.
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    weights = dict(DEFAULT_WEIGHTS if weights is None else weights)
    codec = system._codec
    enc_inv = codec.invert_char
    s = codec.encode(w)
    cap = system.max_word_len
    signed_chars = [codec.enc[sg] for sg in _signed_pairs(system)]

    for _ in range(steps):
        cancel_positions = [i for i in range(len(s) - 1)
                            if s[i + 1] == enc_inv(s[i])]
        kind_counts = {
            "factor_swap": 1,  # availability probed lazily below
            "relator_insert": 1,
            "relator_delete": 1,
            "free_insert": 1 if len(s) + 2 <= cap else 0,
            "free_cancel": len(cancel_positions),
        }
        # Try kinds in weighted random order until one yields a move.
        kinds = [k for k in KINDS if kind_counts.get(k) and weights.get(k, 0) > 0]
        applied = False
        while kinds and not applied:
            ws = [weights[k] for k in kinds]
            kind = rng.choices(kinds, weights=ws)[0]
            if kind == "factor_swap":
                pick = _pick_swap(system, s, cap, rng)
                if pick is not None:
                    pos, pat, repl = pick
                    s = s[:pos] + repl + s[pos + len(pat):]
                    applied = True
            elif kind == "relator_insert":
                pick = _pick_insert(system, s, cap, rng)
                if pick is not None:
                    gap, word_ = pick
                    s = s[:gap] + word_ + s[gap:]
                    applied = True
            elif kind == "relator_delete":
                pick = _pick_delete(system, s, rng)
                if pick is not None:
                    pos, word_ = pick
                    s = s[:pos] + s[pos + len(word_):]
                    applied = True
            elif kind == "free_insert":
                gap = rng.randrange(len(s) + 1)
                ch = rng.choice(signed_chars)
                s = s[:gap] + ch + enc_inv(ch) + s[gap:]
                applied = True
            elif kind == "free_cancel":
                pos = cancel_positions[rng.randrange(len(cancel_positions))]
                s = s[:pos] + s[pos + 2:]
                applied = True
            if not applied:
                kinds.remove(kind)
        # if no kind produced a move the step is skipped

    return codec.decode(s)


def expand_lpresentation(fixed_relators: Sequence[GroupWord],
                         iterated_relators: Sequence[GroupWord],
                         substitution: Mapping[object, GroupWord],
                         depth: int) -> tuple[GroupWord, ...]:
    """Fixed relators plus substitution iterates of the others.

    Returns the fixed relators together with phi^k(r) for every iterated
    relator r and k = 0..depth, freely reduced and deduplicated.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")

    def image(w: GroupWord) -> GroupWord:
        out: list[SignedGenerator] = []
        for g, e in w:
            if g not in substitution:
                raise UndefinedGeneratorInSubstitution(repr(g))
            block = substitution[g]
            out.extend(block if e > 0 else inverse_word(block))
        return free_reduce(tuple(out))

    seen: dict[GroupWord, None] = {}
    for w in fixed_relators:
        r = free_reduce(w)
        if r:
            seen.setdefault(r, None)
    for w in iterated_relators:
        current = free_reduce(w)
        for _ in range(depth + 1):
            if current:
                seen.setdefault(current, None)
            current = image(current)
    return tuple(seen)


def reachable_count(w: GroupWord, system: RewriteSystem, n: int,
                    cap: int) -> tuple[list[int], bool]:
    """Sizes of the rewrite balls around w for 0..n steps.

    Returns (counts, truncated): counts[k] = |{words reachable in <= k
    moves}|, truncated once the ball outgrows `cap` (counting stops
    there).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    codec = system._codec
    seen = {codec.encode(w)}
    frontier = list(seen)
    counts = [1]
    for _ in range(n):
        nxt = []
        for s in frontier:
            word_ = codec.decode(s)
            for move in applicable_moves(word_, system):
                t = codec.encode(apply_move(word_, move))
                if t not in seen:
                    seen.add(t)
                    nxt.append(t)
                    if len(seen) > cap:
                        counts.append(len(seen))
                        return counts, True
        counts.append(len(seen))
        if not nxt:
            break
        frontier = nxt
    while len(counts) < n + 1:
        counts.append(counts[-1])
    return counts, False
