"""Invertible Mealy automata, group words, and their tree action.

Conventions used throughout the package:

* A group word is a tuple of ``(generator, sign)`` pairs with sign +1/-1.
  The empty tuple is the identity.
* Input words are plain strings of (single-character) alphabet symbols.
* The leftmost generator of a word acts first: ``act(w1 + w2, u)`` equals
  ``act(w2, act(w1, u))``.  The compatible word inverse is therefore
  "reverse and flip signs" (:func:`inverse_word`).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from random import Random
from typing import Hashable, Iterable, Sequence

Letter = str
InputWord = str
SignedGenerator = tuple[Hashable, int]
GroupWord = tuple[SignedGenerator, ...]

#: The empty word, i.e. the group identity.
IDENTITY: GroupWord = ()


class NotInvertible(ValueError):
    """The automaton is not invertible at some state."""


class EmptyGeneratorSet(ValueError):
    """random_word needs at least one generator."""


@dataclass(frozen=True)
class Alphabet:
    """Ordered finite set of single-character symbols."""

    letters: tuple[str, ...]

    def __post_init__(self):
        if not self.letters:
            raise ValueError("alphabet must be nonempty")
        if len(set(self.letters)) != len(self.letters):
            raise ValueError("alphabet letters must be pairwise distinct")
        for x in self.letters:
            if not (isinstance(x, str) and len(x) == 1):
                raise ValueError(f"alphabet symbols must be single characters, got {x!r}")

    def index(self, letter: str) -> int:
        return self.letters.index(letter)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __contains__(self, letter) -> bool:
        return letter in self.letters


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    problems: tuple[str, ...]


class MealyAutomaton:
    """Finite letter-to-letter transducer given by an explicit table.

    ``transitions[state][letter] == (next_state, output_letter)``.
    """

    def __init__(self, states: Sequence[str], alphabet: Alphabet,
                 transitions: dict[str, dict[str, tuple[str, str]]]):
        self.states: tuple[str, ...] = tuple(states)
        self.alphabet = alphabet
        self.transitions = {s: dict(row) for s, row in transitions.items()}
        self._inverse_rows: dict[str, dict[str, tuple[str, str]]] = {}

    # The generator names usable in group words are exactly the states.
    @property
    def generators(self) -> tuple[str, ...]:
        return self.states

    def resolve(self, name: str) -> str:
        if name not in self.transitions:
            raise KeyError(f"unknown state {name!r}")
        return name

    def step(self, state: str, letter: str) -> tuple[str, str]:
        return self.transitions[state][letter]

    def inverse_step(self, state: str, out_letter: str) -> tuple[str, str]:
        """Return (next_state, input_letter) with step(state, input) = (next, out)."""
        row = self._inverse_rows.get(state)
        if row is None:
            row = {}
            for x, (t, y) in self.transitions[state].items():
                if y in row:
                    raise NotInvertible(f"state {state!r} is not invertible")
                row[y] = (t, x)
            self._inverse_rows[state] = row
        try:
            return row[out_letter]
        except KeyError:
            raise NotInvertible(f"state {state!r} is not invertible") from None

    # -- serialization -------------------------------------------------

    def to_json(self) -> str:
        doc = {
            "alphabet": list(self.alphabet.letters),
            "states": list(self.states),
            "transitions": {
                s: {x: list(self.transitions[s][x]) for x in self.alphabet.letters}
                for s in self.states
            },
        }
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "MealyAutomaton":
        doc = json.loads(text)
        alphabet = Alphabet(tuple(doc["alphabet"]))
        transitions = {
            s: {x: (t, y) for x, (t, y) in row.items()}
            for s, row in doc["transitions"].items()
        }
        return cls(tuple(doc["states"]), alphabet, transitions)


def validate(automaton: MealyAutomaton) -> ValidationReport:
    """Check totality and per-state output permutations."""
    problems = []
    letters = set(automaton.alphabet.letters)
    for s in automaton.states:
        row = automaton.transitions.get(s)
        if row is None:
            problems.append(f"no transitions for state {s!r}")
            continue
        missing = letters - set(row)
        if missing:
            problems.append(f"state {s!r} missing transitions for {sorted(missing)}")
        outputs = [y for x, (t, y) in row.items() if x in letters]
        if set(outputs) != letters or len(outputs) != len(letters):
            if not missing:
                problems.append(f"not a permutation at {s!r}")
        for x, (t, y) in row.items():
            if t not in automaton.transitions:
                problems.append(f"state {s!r} on {x!r} goes to unknown state {t!r}")
            if y not in letters:
                problems.append(f"state {s!r} on {x!r} outputs unknown letter {y!r}")
    return ValidationReport(ok=not problems, problems=tuple(problems))


def invert(automaton: MealyAutomaton) -> MealyAutomaton:
    """Materialize the inverse automaton (swap input with output)."""
    report = validate(automaton)
    if not report.ok:
        raise NotInvertible("; ".join(report.problems))

    def inv_name(name: str) -> str:
        return name[:-3] if name.endswith("^-1") else name + "^-1"

    transitions: dict[str, dict[str, tuple[str, str]]] = {}
    for q in automaton.states:
        row = {}
        for x, (t, y) in automaton.transitions[q].items():
            row[y] = (inv_name(t), x)
        transitions[inv_name(q)] = row
    return MealyAutomaton(tuple(inv_name(q) for q in automaton.states),
                          automaton.alphabet, transitions)


# -- group words -------------------------------------------------------


def word(*names: str) -> GroupWord:
    """Convenience constructor: word('a', 'b^-1') -> ((a,1),(b,-1))."""
    return parse_word(" ".join(names))


def parse_word(text: str) -> GroupWord:
    out = []
    for tok in text.split():
        if tok.endswith("^-1"):
            out.append((tok[:-3], -1))
        else:
            out.append((tok, 1))
    return tuple(out)


def format_word(w: GroupWord) -> str:
    return " ".join(str(g) if e > 0 else f"{g}^-1" for g, e in w)


def free_reduce(w: Iterable[SignedGenerator]) -> GroupWord:
    """Cancel adjacent inverse pairs until none remain."""
    out: list[SignedGenerator] = []
    for g, e in w:
        if out and out[-1][0] == g and out[-1][1] == -e:
            out.pop()
        else:
            out.append((g, e))
    return tuple(out)


def inverse_word(w: GroupWord) -> GroupWord:
    return tuple((g, -e) for g, e in reversed(w))


def conjugate(a: GroupWord, by: GroupWord) -> GroupWord:
    """by . a . by^-1, freely reduced."""
    return free_reduce(by + a + inverse_word(by))


def random_word(generators: Sequence[Hashable], length: int, rng: Random) -> GroupWord:
    """Uniform freely reduced word of exactly the given length."""
    gens = list(generators)
    if not gens:
        raise EmptyGeneratorSet("need at least one generator")
    if length < 0:
        raise ValueError("length must be >= 0")
    out: list[SignedGenerator] = []
    signed = [(g, e) for g in gens for e in (1, -1)]
    for _ in range(length):
        if out:
            g0, e0 = out[-1]
            choices = [se for se in signed if se != (g0, -e0)]
        else:
            choices = signed
        out.append(rng.choice(choices))
    return tuple(out)


# -- the action --------------------------------------------------------


def _step_signed(machine, state, sign: int, letter: str):
    if sign > 0:
        return machine.step(state, letter)
    t, x = machine.inverse_step(state, letter)
    return t, x


def _resolve_word(machine, w: GroupWord) -> list[tuple[Hashable, int]]:
    return [(machine.resolve(g) if isinstance(g, str) else g, e) for g, e in w]


class _SignedRows(dict):
    """(state, sign) -> {input letter -> ((next state, sign), output)}.

    Rows are materialized on first use, so this works for lazy
    transducers as well as table automata, and keeps the hot loops of
    act/BFS down to plain dict lookups.
    """

    def __init__(self, machine):
        super().__init__()
        self.machine = machine

    def __missing__(self, sg):
        s, e = sg
        machine = self.machine
        row = {}
        for x in machine.alphabet:
            if e > 0:
                t, y = machine.step(s, x)
                row[x] = ((t, 1), y)
            else:
                t, orig = machine.inverse_step(s, x)
                row[x] = ((t, -1), orig)
        self[sg] = row
        return row


def signed_rows(machine) -> _SignedRows:
    rows = getattr(machine, "_signed_rows", None)
    if rows is None:
        rows = _SignedRows(machine)
        machine._signed_rows = rows
    return rows


def act(machine, w: GroupWord, u: InputWord) -> InputWord:
    """Image of the input word under the composed tree automorphism."""
    rows = signed_rows(machine)
    states = _resolve_word(machine, w)
    out = []
    for x in u:
        for i, sg in enumerate(states):
            sg, x = rows[sg][x]
            states[i] = sg
        out.append(x)
    return "".join(out)


def restrict(machine, w: GroupWord, u: InputWord) -> GroupWord:
    """Section of w at the tree vertex u.

    Satisfies act(w, u + v) == act(w, u) + act(restrict(w, u), v).
    """
    rows = signed_rows(machine)
    states = _resolve_word(machine, w)
    for x in u:
        for i, sg in enumerate(states):
            sg, x = rows[sg][x]
            states[i] = sg
    return tuple(states)
