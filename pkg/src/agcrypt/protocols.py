"""The three cryptosystems built on automaton groups.

* the conjugacy-based metascheme (meta_*): Alice hides a conjugator
  behind relator rewriting, Bob builds a session key from the public
  base words, and both encrypt with the tree action;
* the Anshel-Anshel-Goldfeld commutator key agreement (aag_exchange);
* the word-problem bit cipher over the G_omega family (wp_*).

Conjugation orientation: this module conjugates as A . x . A^-1
throughout, matching the metascheme's definition of the handshake
words.  The brute-force conjugacy search in `wordproblem` uses the
opposite textbook orientation c^-1 a c.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from random import Random
from typing import Optional, Sequence

from .mealy import (
    GroupWord,
    InputWord,
    act,
    free_reduce,
    inverse_word,
    random_word,
)
from .platforms import OmegaSequence, grigorchuk_omega
from .rewriting import Relator, RewriteSystem, obfuscate
from .wordproblem import (
    BudgetExceeded,
    DecisionBudget,
    DEFAULT_BUDGET,
    acts_trivially_to_depth,
    is_identity,
)


class Rejected(RuntimeError):
    """Bob could not certify a usable session key."""


class DecodeError(ValueError):
    """Ciphertext symbols decode outside the byte range."""


class Undecodable(ValueError):
    """A word-problem ciphertext falls in neither plaintext class."""


class InvalidSeedWords(ValueError):
    pass


# -- message encoding --------------------------------------------------


def _symbols_per_byte(q: int) -> int:
    width = 1
    while q ** width < 256:
        width += 1
    return width


def encode_bytes(alphabet, data: bytes) -> InputWord:
    """Bytes to alphabet symbols: per byte, base-q digits LSB-first."""
    q = len(alphabet)
    width = _symbols_per_byte(q)
    letters = alphabet.letters
    out = []
    for byte in data:
        v = byte
        for _ in range(width):
            v, r = divmod(v, q)
            out.append(letters[r])
    return "".join(out)


def decode_bytes(alphabet, text: InputWord, length: int) -> bytes:
    q = len(alphabet)
    width = _symbols_per_byte(q)
    if len(text) != length * width:
        raise DecodeError(f"payload length {len(text)} != {length} * {width}")
    out = bytearray()
    for k in range(length):
        block = text[k * width:(k + 1) * width]
        v = 0
        for ch in reversed(block):
            v = v * q + alphabet.index(ch)
        if v > 255:
            raise DecodeError(f"block {block!r} decodes to {v} > 255")
        out.append(v)
    return bytes(out)


# -- metascheme --------------------------------------------------------


@dataclass(frozen=True)
class MetaPublicKey:
    machine: object
    base_tuple: tuple[GroupWord, ...]
    relators: RewriteSystem

    def __post_init__(self):
        if len(self.base_tuple) < 2:
            raise ValueError("need at least two base words")


@dataclass(frozen=True)
class MetaPrivateKey:
    A: GroupWord

    def __post_init__(self):
        if not self.A:
            raise ValueError("private keyword must be nonempty")


@dataclass(frozen=True)
class MetaHandshake:
    c_tuple: tuple[GroupWord, ...]
    uA: Optional[GroupWord] = None


@dataclass(frozen=True)
class MetaParams:
    A_len: int = 6
    obf_steps: int = 40
    len_cap_factor: int = 8
    u_blocks: int = 5
    test_words: int = 32
    test_len: int = 64
    sweep_depth: int = 3
    max_retries: int = 16


@dataclass(frozen=True)
class Ciphertext:
    payload: InputWord
    length: int


def meta_alice_keygen(pub: MetaPublicKey, params: MetaParams,
                      rng: Random) -> tuple[MetaPrivateKey, tuple[GroupWord, ...]]:
    """Alice's step: secret keyword A plus the obfuscated conjugates c_i."""
    if params.A_len < 1:
        raise ValueError("A_len must be >= 1")
    # Resample until A visibly fails to commute with some base word;
    # otherwise the conjugates equal the base words in the group and no
    # session can ever be certified (e.g. when A reduces to the identity).
    for _ in range(params.max_retries):
        A = random_word(pub.relators.generators, params.A_len, rng)
        if any(not acts_trivially_to_depth(
                pub.machine,
                free_reduce(A + b + inverse_word(A) + inverse_word(b)),
                params.sweep_depth + 11)
               for b in pub.base_tuple):
            break
    else:
        raise Rejected(
            f"no usable keyword found in {params.max_retries} attempts")
    c_tuple = []
    for b in pub.base_tuple:
        hat = free_reduce(A + b + inverse_word(A))
        cap = max(params.len_cap_factor * max(len(hat), 1),
                  max(len(r.word) for r in pub.relators.relators))
        system = pub.relators.with_cap(cap)
        c_tuple.append(obfuscate(hat, system, params.obf_steps, rng))
    return MetaPrivateKey(A), tuple(c_tuple)


def _expand_blocks(base: Sequence[GroupWord], indices, exponents) -> GroupWord:
    out: list = []
    for i, e in zip(indices, exponents):
        out.extend(base[i] if e > 0 else inverse_word(base[i]))
    return tuple(out)


def meta_bob_session(pub: MetaPublicKey, c_tuple: Sequence[GroupWord],
                     params: MetaParams, rng: Random) -> tuple[GroupWord, GroupWord]:
    """Bob's step: session key u plus its conjugated mirror uA.

    u is a product of base-word blocks; uA is the same block sequence
    over the c-words.  u is accepted as soon as one test word
    distinguishes the actions of u and uA (evidence that u does not
    commute with Alice's keyword); otherwise it is resampled.
    """
    if len(c_tuple) != len(pub.base_tuple):
        raise ValueError("c_tuple length mismatch")
    ell = len(pub.base_tuple)
    alphabet = pub.machine.alphabet
    for _ in range(params.max_retries):
        indices = [rng.randrange(ell) for _ in range(params.u_blocks)]
        exponents = [rng.choice((1, -1)) for _ in range(params.u_blocks)]
        u = _expand_blocks(pub.base_tuple, indices, exponents)
        uA = _expand_blocks(c_tuple, indices, exponents)
        if _find_witness(pub.machine, u, uA, params, rng) is not None:
            return u, uA
    raise Rejected(f"no distinguishing word found in {params.max_retries} attempts")


def _find_witness(machine, u: GroupWord, uA: GroupWord, params: MetaParams,
                  rng: Random) -> Optional[InputWord]:
    letters = machine.alphabet.letters
    for _ in range(params.test_words):
        w = "".join(rng.choice(letters) for _ in range(params.test_len))
        if act(machine, u, w) != act(machine, uA, w):
            return w
    # exhaustive sweep of the shallow levels
    frontier = [""]
    for _ in range(params.sweep_depth):
        frontier = [w + x for w in frontier for x in letters]
        for w in frontier:
            if act(machine, u, w) != act(machine, uA, w):
                return w
    return None


def meta_alice_session(priv: MetaPrivateKey, uA: GroupWord) -> GroupWord:
    """U = A^-1 . uA . A, equal to Bob's u whenever uA was honestly formed."""
    return free_reduce(inverse_word(priv.A) + tuple(uA) + priv.A)


def meta_encrypt(machine, key: GroupWord, plaintext: bytes) -> Ciphertext:
    encoded = encode_bytes(machine.alphabet, plaintext)
    return Ciphertext(payload=act(machine, key, encoded), length=len(plaintext))


def meta_decrypt(machine, key: GroupWord, ct: Ciphertext) -> bytes:
    decoded = act(machine, inverse_word(key), ct.payload)
    return decode_bytes(machine.alphabet, decoded, ct.length)


@dataclass(frozen=True)
class SessionVerification:
    """How far are_equal(U, u) could be certified."""

    equal: bool
    exact: bool
    depth: Optional[int] = None


def verify_session(machine, U: GroupWord, u: GroupWord,
                   budget: DecisionBudget = DEFAULT_BUDGET,
                   fallback_depth: int = 14) -> SessionVerification:
    diff = free_reduce(U + inverse_word(u))
    try:
        return SessionVerification(equal=is_identity(machine, diff, budget), exact=True)
    except BudgetExceeded:
        ok = acts_trivially_to_depth(machine, diff, fallback_depth)
        return SessionVerification(equal=ok, exact=False, depth=fallback_depth)


# -- Anshel-Anshel-Goldfeld -------------------------------------------


@dataclass(frozen=True)
class AagTranscript:
    conjugated_b: tuple[GroupWord, ...]  # Alice -> Bob: a^-1 b_i a
    conjugated_a: tuple[GroupWord, ...]  # Bob -> Alice: b a_j b^-1


def _blocks_over(words: Sequence[GroupWord], picks) -> GroupWord:
    out: list = []
    for idx, e in picks:
        out.extend(words[idx] if e > 0 else inverse_word(words[idx]))
    return free_reduce(tuple(out))


def aag_exchange(a_words: Sequence[GroupWord], b_words: Sequence[GroupWord],
                 alice_picks: Sequence[tuple[int, int]],
                 bob_picks: Sequence[tuple[int, int]],
                 ) -> tuple[GroupWord, GroupWord, AagTranscript]:
    """Run the commutator key agreement; the shared key is [a, b^-1].

    `alice_picks` / `bob_picks` are (index, exponent) sequences selecting
    private words from the public sub-tuples.
    """
    a = _blocks_over(a_words, alice_picks)
    b = _blocks_over(b_words, bob_picks)

    transcript = AagTranscript(
        conjugated_b=tuple(free_reduce(inverse_word(a) + w + a) for w in b_words),
        conjugated_a=tuple(free_reduce(b + w + inverse_word(b)) for w in a_words),
    )

    # Alice: [a, b^-1] = a^-1 (b a b^-1), with b a b^-1 assembled from
    # the received conjugates of her block sequence.
    b_a_b_inv = _blocks_over(transcript.conjugated_a, alice_picks)
    alice_shared = free_reduce(inverse_word(a) + b_a_b_inv)

    # Bob: [a, b^-1] = (a^-1 b a) b^-1 directly from Alice's conjugates.
    a_inv_b_a = _blocks_over(transcript.conjugated_b, bob_picks)
    bob_shared = free_reduce(a_inv_b_a + inverse_word(b))

    return alice_shared, bob_shared, transcript


def random_picks(count: int, length: int, rng: Random) -> list[tuple[int, int]]:
    return [(rng.randrange(count), rng.choice((1, -1))) for _ in range(length)]


# -- word-problem cipher ----------------------------------------------


#: Relators valid in every G_omega.
WP_RELATOR_WORDS = ("a a", "b b", "c c", "d d", "b c d")


@dataclass(frozen=True)
class WpPublicKey:
    relators: RewriteSystem
    w0: GroupWord  # encodes bit 0; not the identity in G_omega
    w1: GroupWord  # encodes bit 1; the identity in G_omega


@dataclass(frozen=True)
class WpParams:
    max_word_len: int = 48
    budget: DecisionBudget = DEFAULT_BUDGET


def wp_keygen(omega: OmegaSequence, params: WpParams = WpParams(),
              w0: Optional[GroupWord] = None,
              w1: Optional[GroupWord] = None) -> tuple[WpPublicKey, OmegaSequence]:
    """Public relators and seed words for the secret G_omega.

    Convention: bit 0 maps to w0 (a non-identity word), bit 1 to w1 (an
    identity word).  Defaults: w0 = a, w1 = b c d.
    """
    from .mealy import parse_word

    machine = grigorchuk_omega(omega)
    if w0 is None:
        w0 = parse_word("a")
    if w1 is None:
        w1 = parse_word("b c d")
    if not is_identity(machine, w1, params.budget):
        raise InvalidSeedWords("w1 must be the identity in G_omega")
    if is_identity(machine, w0, params.budget):
        raise InvalidSeedWords("w0 must not be the identity in G_omega")
    relators = [Relator(parse_word(w)) for w in WP_RELATOR_WORDS]
    system = RewriteSystem(relators, ("a", "b", "c", "d"),
                           params.max_word_len, machine=machine)
    return WpPublicKey(relators=system, w0=w0, w1=w1), omega


def wp_encrypt_bit(pub: WpPublicKey, bit: int, steps: int, rng: Random) -> GroupWord:
    if bit not in (0, 1):
        raise ValueError("bit must be 0 or 1")
    seed = pub.w1 if bit else pub.w0
    return obfuscate(seed, pub.relators, steps, rng)


def wp_decrypt_bit(omega: OmegaSequence, pub: WpPublicKey, word: GroupWord,
                   budget: DecisionBudget = DEFAULT_BUDGET) -> int:
    machine = grigorchuk_omega(omega)
    if is_identity(machine, word, budget):
        return 1
    diff = free_reduce(word + inverse_word(pub.w0))
    if is_identity(machine, diff, budget):
        return 0
    raise Undecodable("ciphertext word falls in neither plaintext class")
