"""Platform group constructors.

* the first Grigorchuk group with its finite L-presentation,
* the G_omega family as lazy transducers (eventually periodic omega),
* p-Basilica automata,
* affine groups over d-dimensional n-adic integers as lazy carry
  transducers.

Transition tables follow the standard literature definitions; every
shipped relator is machine-verified by the word-problem oracle in the
test suite.
"""

from __future__ import annotations

import json
import math
import string
from dataclasses import dataclass
from typing import Hashable, Sequence

from .mealy import Alphabet, GroupWord, MealyAutomaton, NotInvertible, parse_word
from .rewriting import Relator, RewriteSystem, expand_lpresentation

_SYMBOLS = string.digits + string.ascii_lowercase + string.ascii_uppercase


class InvalidSpec(ValueError):
    pass


# -- lazy transducers --------------------------------------------------


class LazyTransducer:
    """Transducer whose states are discovered on demand.

    State keys are opaque hashable values; `oracle(key, letter)` returns
    `(next_key, output_letter)`.  Full output rows are materialized per
    discovered state, which both enables inverse stepping and checks
    invertibility locally.
    """

    def __init__(self, alphabet: Alphabet, generators: dict[str, Hashable], oracle):
        self.alphabet = alphabet
        self._starts = dict(generators)
        self._oracle = oracle
        self._rows: dict[Hashable, dict[str, tuple[Hashable, str]]] = {}
        self._inverse_rows: dict[Hashable, dict[str, tuple[Hashable, str]]] = {}

    @property
    def generators(self) -> tuple[str, ...]:
        return tuple(self._starts)

    def resolve(self, name):
        if name in self._starts:
            return self._starts[name]
        return name

    def discovered_states(self) -> tuple[Hashable, ...]:
        return tuple(self._rows)

    def _row(self, state) -> dict[str, tuple[Hashable, str]]:
        row = self._rows.get(state)
        if row is None:
            row = {x: self._oracle(state, x) for x in self.alphabet}
            outputs = {y for _, y in row.values()}
            if len(outputs) != len(self.alphabet):
                raise NotInvertible(f"state {state!r} is not invertible")
            self._rows[state] = row
        return row

    def step(self, state, letter: str):
        state = self.resolve(state)
        return self._row(state)[letter]

    def inverse_step(self, state, out_letter: str):
        state = self.resolve(state)
        inv = self._inverse_rows.get(state)
        if inv is None:
            inv = {y: (t, x) for x, (t, y) in self._row(state).items()}
            self._inverse_rows[state] = inv
        return inv[out_letter]

    def materialize(self, state_cap: int = 1024) -> MealyAutomaton:
        """Explore from the generator start states and emit a table automaton."""
        keys: list[Hashable] = []
        index: dict[Hashable, int] = {}
        queue = []
        for name in self._starts:
            key = self._starts[name]
            if key not in index:
                index[key] = len(keys)
                keys.append(key)
                queue.append(key)
        while queue:
            key = queue.pop(0)
            for x in self.alphabet:
                t, _ = self.step(key, x)
                if t not in index:
                    if len(keys) >= state_cap:
                        raise InvalidSpec(
                            f"more than {state_cap} states reachable")
                    index[t] = len(keys)
                    keys.append(t)
                    queue.append(t)

        names: dict[Hashable, str] = {}
        used = set()
        for name, key in self._starts.items():
            if key not in names:
                names[key] = name
                used.add(name)
        counter = 0
        for key in keys:
            if key not in names:
                while f"q{counter}" in used:
                    counter += 1
                names[key] = f"q{counter}"
                used.add(f"q{counter}")
                counter += 1

        transitions = {
            names[key]: {x: (names[self.step(key, x)[0]], self.step(key, x)[1])
                         for x in self.alphabet}
            for key in keys
        }
        return MealyAutomaton(tuple(names[k] for k in keys), self.alphabet, transitions)


# -- Grigorchuk --------------------------------------------------------

GRIGORCHUK_SIGMA: dict[str, GroupWord] = {
    "a": parse_word("a c a"),
    "b": parse_word("d"),
    "c": parse_word("b"),
    "d": parse_word("c"),
    "e": (),
}

_GRIGORCHUK_FIXED = ("a a", "b b", "c c", "d d", "b c d")
_GRIGORCHUK_ITERATED = (
    "a d a d a d a d",
    "a d a c a c a d a c a c a d a c a c a d a c a c",
)


def grigorchuk_automaton() -> MealyAutomaton:
    alphabet = Alphabet(("0", "1"))
    transitions = {
        "a": {"0": ("e", "1"), "1": ("e", "0")},
        "b": {"0": ("a", "0"), "1": ("c", "1")},
        "c": {"0": ("a", "0"), "1": ("d", "1")},
        "d": {"0": ("e", "0"), "1": ("b", "1")},
        "e": {"0": ("e", "0"), "1": ("e", "1")},
    }
    return MealyAutomaton(("a", "b", "c", "d", "e"), alphabet, transitions)


def grigorchuk_relators(depth: int = 2) -> tuple[GroupWord, ...]:
    """Finite L-presentation relators expanded to the given depth."""
    return expand_lpresentation(
        [parse_word(w) for w in _GRIGORCHUK_FIXED],
        [parse_word(w) for w in _GRIGORCHUK_ITERATED],
        GRIGORCHUK_SIGMA, depth)


def grigorchuk_first(depth: int = 2, max_word_len: int = 256,
                     verify: bool = True) -> tuple[MealyAutomaton, RewriteSystem]:
    machine = grigorchuk_automaton()
    relators = [Relator(w) for w in grigorchuk_relators(depth)]
    cap = max(max_word_len, max(len(r.word) for r in relators))
    system = RewriteSystem(relators, ("a", "b", "c", "d"), cap,
                           machine=machine if verify else None)
    return machine, system


@dataclass(frozen=True)
class OmegaSequence:
    """Eventually periodic sequence over {0,1,2}: preperiod then period."""

    preperiod: tuple[int, ...]
    period: tuple[int, ...]

    def __post_init__(self):
        if not self.period:
            raise ValueError("period must be nonempty")
        for x in self.preperiod + self.period:
            if x not in (0, 1, 2):
                raise ValueError("omega entries must be in {0,1,2}")

    def symbol_at(self, i: int) -> int:
        if i < len(self.preperiod):
            return self.preperiod[i]
        return self.period[(i - len(self.preperiod)) % len(self.period)]

    def next_shift(self, i: int) -> int:
        """Canonical successor index, folded into the periodic part."""
        j = i + 1
        n = len(self.preperiod)
        if j >= n + len(self.period):
            j = n + (j - n) % len(self.period)
        return j


# Which generators are "active" (section a rather than e) at each
# omega symbol: b at {0,1}, c at {0,2}, d at {1,2}.
_OMEGA_ACTIVE = {"b": (0, 1), "c": (0, 2), "d": (1, 2)}


def grigorchuk_omega(omega: OmegaSequence) -> LazyTransducer:
    """G_omega as a lazy transducer on the binary alphabet.

    State keys: ('a',), ('e',), and (sym, shift) for sym in {b,c,d} with
    the shift folded into the eventually periodic structure, so the
    total state count is finite.
    """
    alphabet = Alphabet(("0", "1"))

    def oracle(key, letter):
        sym = key[0]
        if sym == "a":
            return ("e",), "1" if letter == "0" else "0"
        if sym == "e":
            return ("e",), letter
        shift = key[1]
        if letter == "0":
            active = omega.symbol_at(shift) in _OMEGA_ACTIVE[sym]
            return (("a",) if active else ("e",)), "0"
        return (sym, omega.next_shift(shift)), "1"

    generators = {"a": ("a",), "e": ("e",),
                  "b": ("b", 0), "c": ("c", 0), "d": ("d", 0)}
    return LazyTransducer(alphabet, generators, oracle)


# -- Basilica ----------------------------------------------------------


# Shortest relators of the p-Basilica groups for small p, found by
# exhaustive oracle search over words of length <= 8; re-verified against
# the automaton whenever a rewrite system is built.
_BASILICA_RELATORS = (
    "a b a^-1 b a b^-1 a^-1 b^-1",
    "a b a^-1 b^-1 a b^-1 a^-1 b",
    "a b^-1 a^-1 b a b a^-1 b^-1",
    "a b^-1 a^-1 b^-1 a b a^-1 b",
)


def basilica_relators() -> tuple[GroupWord, ...]:
    return tuple(parse_word(w) for w in _BASILICA_RELATORS)


def basilica_platform(p: int = 2, max_word_len: int = 256,
                      verify: bool = True) -> tuple[MealyAutomaton, RewriteSystem]:
    machine = basilica(p)
    relators = [Relator(w) for w in basilica_relators()]
    system = RewriteSystem(relators, ("a", "b"), max_word_len,
                           machine=machine if verify else None)
    return machine, system


def affine_platform(spec: AffineSpec, max_word_len: int = 256,
                    verify: bool = True) -> tuple[LazyTransducer, RewriteSystem]:
    machine, relator_words = affine_group(spec)
    relators = [Relator(w) for w in relator_words]
    cap = max(max_word_len, max(len(r.word) for r in relators))
    gens = tuple(machine.generators)
    system = RewriteSystem(relators, gens, cap,
                           machine=machine if verify else None)
    return machine, system


def basilica(p: int = 2) -> MealyAutomaton:
    """p-Basilica automaton: a = (b,1,...,1) . cycle, b = (a,1,...,1)."""
    if p < 2:
        raise ValueError("p must be >= 2")
    if p > len(_SYMBOLS):
        raise ValueError(f"alphabet of size {p} not representable")
    letters = tuple(_SYMBOLS[i] for i in range(p))
    alphabet = Alphabet(letters)
    transitions: dict[str, dict[str, tuple[str, str]]] = {"a": {}, "b": {}, "e": {}}
    for i, x in enumerate(letters):
        transitions["a"][x] = ("b" if i == 0 else "e", letters[(i + 1) % p])
        transitions["b"][x] = ("a" if i == 0 else "e", x)
        transitions["e"][x] = ("e", x)
    return MealyAutomaton(("a", "b", "e"), alphabet, transitions)


# -- affine groups over n-adics ---------------------------------------


@dataclass(frozen=True)
class AffineSpec:
    """Affine platform: translations e_1..e_d and multiplication by M
    acting on base-n digit streams (least significant digit first)."""

    n: int
    d: int
    M: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 2:
            raise InvalidSpec("base n must be >= 2")
        if self.d < 1:
            raise InvalidSpec("dimension d must be >= 1")
        M = self.M
        if len(M) != self.d or any(len(row) != self.d for row in M):
            raise InvalidSpec("M must be d x d")
        if any(entry < 0 for row in M for entry in row):
            raise InvalidSpec("M entries must be nonnegative")
        if math.gcd(_int_det(M), self.n) != 1:
            raise InvalidSpec("det(M) must be coprime to n")
        if self.n ** self.d > len(_SYMBOLS):
            raise InvalidSpec(f"alphabet of size {self.n ** self.d} not representable")

    @classmethod
    def from_json(cls, text: str) -> "AffineSpec":
        doc = json.loads(text)
        return cls(doc["n"], doc["d"], tuple(tuple(row) for row in doc["M"]))

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "d": self.d, "M": [list(r) for r in self.M]},
                          sort_keys=True)


def _int_det(M) -> int:
    d = len(M)
    if d == 1:
        return M[0][0]
    det = 0
    for j in range(d):
        minor = tuple(tuple(row[k] for k in range(d) if k != j) for row in M[1:])
        det += (-1) ** j * M[0][j] * _int_det(minor)
    return det


def alphabet_packing(spec: AffineSpec):
    """Bijection between Z_n^d digit vectors and alphabet symbols.

    Mixed radix with component 0 least significant: (v_0,...,v_{d-1})
    maps to the symbol with index sum(v_i * n^i).
    """
    n, d = spec.n, spec.d

    def pack(vec: Sequence[int]) -> str:
        idx = 0
        for i in reversed(range(d)):
            idx = idx * n + vec[i]
        return _SYMBOLS[idx]

    def unpack(symbol: str) -> tuple[int, ...]:
        idx = _SYMBOLS.index(symbol)
        out = []
        for _ in range(d):
            idx, r = divmod(idx, n)
            out.append(r)
        return tuple(out)

    return pack, unpack


def affine_group(spec: AffineSpec) -> tuple[LazyTransducer, tuple[GroupWord, ...]]:
    """Lazy carry transducer plus the presentation relators.

    Generators: a1..ad (translation by e_j) and t (multiplication by M).
    State = pending carry vector; carries stay within the row-sum bound,
    asserted at every discovery step.
    """
    n, d, M = spec.n, spec.d, spec.M
    letters = tuple(_SYMBOLS[i] for i in range(n ** d))
    alphabet = Alphabet(letters)
    pack, unpack = alphabet_packing(spec)
    row_bound = [max(1, sum(row)) for row in M]

    def oracle(key, letter):
        tag, carry = key
        x = unpack(letter)
        if tag == "add":
            s = [x[i] + carry[i] for i in range(d)]
        else:
            s = [sum(M[i][j] * x[j] for j in range(d)) + carry[i] for i in range(d)]
        out = tuple(v % n for v in s)
        new_carry = tuple(v // n for v in s)
        for i, c in enumerate(new_carry):
            bound = 1 if tag == "add" else row_bound[i]
            assert c <= bound, f"carry bound violated at {key}"
        return (tag, new_carry), pack(out)

    zero = (0,) * d
    generators: dict[str, Hashable] = {"t": ("mul", zero)}
    for j in range(d):
        e_j = tuple(1 if i == j else 0 for i in range(d))
        generators[f"a{j + 1}"] = ("add", e_j)
    machine = LazyTransducer(alphabet, generators, oracle)

    relators: list[GroupWord] = []
    for i in range(d):
        for j in range(i + 1, d):
            ai, aj = f"a{i + 1}", f"a{j + 1}"
            relators.append(((ai, 1), (aj, 1), (ai, -1), (aj, -1)))
    # Under the leftmost-acts-first convention the conjugation relation
    # t a_j t^-1 = prod_i a_i^{m_ij} is realized by the word below (the
    # reversal of the textbook form); see the affine tests.
    for j in range(d):
        aj = f"a{j + 1}"
        r: list = [("t", -1), (aj, 1), ("t", 1)]
        for i in range(d):
            r.extend([(f"a{i + 1}", -1)] * M[i][j])
        relators.append(tuple(r))
    return machine, tuple(relators)


def binary_odometer() -> tuple[LazyTransducer, tuple[GroupWord, ...]]:
    """The +1 machine on binary digit streams (affine n=2, d=1, M=[1])."""
    return affine_group(AffineSpec(2, 1, ((1,),)))
