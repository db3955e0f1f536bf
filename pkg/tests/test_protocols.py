from random import Random

import pytest

from agcrypt.mealy import (
    Alphabet,
    act,
    free_reduce,
    inverse_word,
    parse_word,
    random_word,
    word,
)
from agcrypt.platforms import OmegaSequence, grigorchuk_omega
from agcrypt.protocols import (
    Ciphertext,
    DecodeError,
    InvalidSeedWords,
    MetaHandshake,
    MetaParams,
    MetaPrivateKey,
    MetaPublicKey,
    Rejected,
    Undecodable,
    WpParams,
    aag_exchange,
    decode_bytes,
    encode_bytes,
    meta_alice_keygen,
    meta_alice_session,
    meta_bob_session,
    meta_decrypt,
    meta_encrypt,
    random_picks,
    verify_session,
    wp_decrypt_bit,
    wp_encrypt_bit,
    wp_keygen,
)
from agcrypt.wordproblem import are_equal, is_identity


@pytest.fixture(scope="module")
def grig_pub(grig):
    machine, system = grig
    base = (parse_word("a b"), parse_word("a c"), parse_word("a d"))
    return MetaPublicKey(machine=machine, base_tuple=base, relators=system)


class TestByteCodec:
    def test_round_trip_binary_alphabet(self):
        alphabet = Alphabet(("0", "1"))
        for data in (b"", b"\x00", b"\xff", b"hello world", bytes(range(256))):
            assert decode_bytes(alphabet, encode_bytes(alphabet, data),
                                len(data)) == data

    def test_round_trip_ternary_alphabet(self):
        alphabet = Alphabet(("0", "1", "2"))
        data = bytes(range(0, 256, 7))
        assert decode_bytes(alphabet, encode_bytes(alphabet, data),
                            len(data)) == data

    def test_width_is_eight_for_binary(self):
        alphabet = Alphabet(("0", "1"))
        assert len(encode_bytes(alphabet, b"x")) == 8

    def test_length_mismatch_raises(self):
        alphabet = Alphabet(("0", "1"))
        with pytest.raises(DecodeError):
            decode_bytes(alphabet, "0101", 1)

    def test_out_of_range_block_raises(self):
        alphabet = Alphabet(("0", "1", "2"))
        # six base-3 digits can exceed 255
        with pytest.raises(DecodeError):
            decode_bytes(alphabet, "222222", 1)


class TestMetascheme:
    def test_keygen_conjugates_survive_obfuscation(self, grig_pub):
        rng = Random(41)
        priv, c_tuple = meta_alice_keygen(grig_pub, MetaParams(obf_steps=15), rng)
        machine = grig_pub.machine
        for b, c in zip(grig_pub.base_tuple, c_tuple):
            expected = free_reduce(priv.A + b + inverse_word(priv.A))
            assert are_equal(machine, c, expected)

    def test_bob_mirror_is_conjugate_of_u(self, grig_pub):
        rng = Random(42)
        priv, c_tuple = meta_alice_keygen(grig_pub, MetaParams(obf_steps=10), rng)
        u, uA = meta_bob_session(grig_pub, c_tuple, MetaParams(), rng)
        expected = free_reduce(priv.A + u + inverse_word(priv.A))
        assert are_equal(grig_pub.machine, uA, expected)

    def test_alice_recovers_bobs_session_key(self, grig_pub):
        rng = Random(43)
        priv, c_tuple = meta_alice_keygen(grig_pub, MetaParams(obf_steps=10), rng)
        u, uA = meta_bob_session(grig_pub, c_tuple, MetaParams(), rng)
        U = meta_alice_session(priv, uA)
        verdict = verify_session(grig_pub.machine, U, u)
        assert verdict.equal

    def test_rejects_unobfuscated_identity_conjugates(self, grig_pub):
        # handing Bob the base words themselves means u and uA act
        # identically, so no witness can exist
        rng = Random(44)
        with pytest.raises(Rejected):
            meta_bob_session(grig_pub, grig_pub.base_tuple,
                             MetaParams(max_retries=3, test_words=4,
                                        sweep_depth=2), rng)

    def test_tampered_mirror_breaks_round_trip(self, grig_pub):
        rng = Random(45)
        priv, c_tuple = meta_alice_keygen(grig_pub, MetaParams(obf_steps=10), rng)
        u, uA = meta_bob_session(grig_pub, c_tuple, MetaParams(), rng)
        tampered = uA + word("a")
        U = meta_alice_session(priv, tampered)
        assert not verify_session(grig_pub.machine, U, u).equal

    def test_encrypt_decrypt_round_trip(self, grig_pub):
        rng = Random(46)
        priv, c_tuple = meta_alice_keygen(grig_pub, MetaParams(obf_steps=10), rng)
        u, uA = meta_bob_session(grig_pub, c_tuple, MetaParams(), rng)
        U = meta_alice_session(priv, uA)
        message = b"attack at dawn"
        ct = meta_encrypt(grig_pub.machine, u, message)
        assert meta_decrypt(grig_pub.machine, U, ct) == message

    def test_identity_key_encryption_is_transparent(self, grig_machine):
        ct = meta_encrypt(grig_machine, (), b"\x00\x7f\xff")
        assert meta_decrypt(grig_machine, (), ct) == b"\x00\x7f\xff"

    def test_empty_message(self, grig_machine):
        ct = meta_encrypt(grig_machine, word("a"), b"")
        assert ct.payload == "" and meta_decrypt(grig_machine, word("a"), ct) == b""

    def test_kilobyte_round_trip(self, grig_machine):
        rng = Random(47)
        key = random_word("abcd", 12, rng)
        message = bytes(rng.randrange(256) for _ in range(1024))
        ct = meta_encrypt(grig_machine, key, message)
        assert ct.payload != encode_bytes(grig_machine.alphabet, message)
        assert meta_decrypt(grig_machine, key, ct) == message

    def test_public_key_needs_two_base_words(self, grig):
        machine, system = grig
        with pytest.raises(ValueError):
            MetaPublicKey(machine=machine, base_tuple=(word("a"),),
                          relators=system)

    def test_private_key_must_be_nonempty(self):
        with pytest.raises(ValueError):
            MetaPrivateKey(())


class TestAag:
    def test_trivial_instance(self, grig_machine):
        a_words = (word("a"), parse_word("a b"))
        b_words = (word("d"), parse_word("c a"))
        alice, bob, transcript = aag_exchange(
            a_words, b_words, [(0, 1)], [(0, 1)])
        assert are_equal(grig_machine, alice, bob)

    def test_transcript_words_are_conjugates(self, grig_machine):
        a_words = (word("a"), parse_word("b a"))
        b_words = (word("c"), parse_word("d a"))
        alice_picks = [(1, 1), (0, -1)]
        bob_picks = [(0, 1), (1, 1)]
        _, _, transcript = aag_exchange(a_words, b_words, alice_picks, bob_picks)
        from agcrypt.protocols import _blocks_over
        a = _blocks_over(a_words, alice_picks)
        b = _blocks_over(b_words, bob_picks)
        for w, conj in zip(b_words, transcript.conjugated_b):
            assert are_equal(grig_machine,
                             free_reduce(inverse_word(a) + w + a), conj)
        for w, conj in zip(a_words, transcript.conjugated_a):
            assert are_equal(grig_machine,
                             free_reduce(b + w + inverse_word(b)), conj)

    def test_random_instances_agree(self, grig_machine):
        rng = Random(48)
        for _ in range(5):
            a_words = tuple(random_word("abcd", 3, rng) for _ in range(3))
            b_words = tuple(random_word("abcd", 3, rng) for _ in range(3))
            alice, bob, _ = aag_exchange(
                a_words, b_words,
                random_picks(3, 4, rng), random_picks(3, 4, rng))
            assert are_equal(grig_machine, alice, bob)

    def test_shared_key_is_commutator(self, grig_machine):
        from agcrypt.protocols import _blocks_over
        a_words = (parse_word("a b"), word("c"))
        b_words = (word("d"), parse_word("a c"))
        alice_picks = [(0, 1), (1, -1)]
        bob_picks = [(1, 1), (0, 1)]
        alice, bob, _ = aag_exchange(a_words, b_words, alice_picks, bob_picks)
        a = _blocks_over(a_words, alice_picks)
        b = _blocks_over(b_words, bob_picks)
        commutator = free_reduce(
            inverse_word(a) + b + a + inverse_word(b))  # [a, b^-1]
        assert are_equal(grig_machine, alice, commutator)
        assert are_equal(grig_machine, bob, commutator)

    def test_random_picks_shape(self):
        picks = random_picks(4, 10, Random(49))
        assert len(picks) == 10
        assert all(0 <= i < 4 and e in (1, -1) for i, e in picks)


class TestWpCipher:
    OMEGA = OmegaSequence((), (0, 1, 2))

    def test_keygen_defaults(self):
        pub, omega = wp_keygen(self.OMEGA)
        machine = grigorchuk_omega(omega)
        assert is_identity(machine, pub.w1)
        assert not is_identity(machine, pub.w0)

    def test_keygen_rejects_bad_seed_words(self):
        with pytest.raises(InvalidSeedWords):
            wp_keygen(self.OMEGA, w1=word("a"))
        with pytest.raises(InvalidSeedWords):
            wp_keygen(self.OMEGA, w0=parse_word("b c d"))

    def test_zero_step_round_trip(self):
        pub, omega = wp_keygen(self.OMEGA)
        rng = Random(50)
        for bit in (0, 1):
            ct = wp_encrypt_bit(pub, bit, 0, rng)
            assert wp_decrypt_bit(omega, pub, ct) == bit

    def test_obfuscated_round_trip(self):
        pub, omega = wp_keygen(self.OMEGA)
        rng = Random(51)
        for bit in (0, 1, 1, 0, 0, 1):
            ct = wp_encrypt_bit(pub, bit, 25, rng)
            assert wp_decrypt_bit(omega, pub, ct) == bit

    def test_ciphertexts_vary(self):
        pub, _ = wp_keygen(self.OMEGA)
        rng = Random(52)
        seen = {wp_encrypt_bit(pub, 1, 25, rng) for _ in range(6)}
        assert len(seen) > 1

    def test_invalid_bit_rejected(self):
        pub, _ = wp_keygen(self.OMEGA)
        with pytest.raises(ValueError):
            wp_encrypt_bit(pub, 2, 5, Random(0))

    def test_tampered_ciphertext_undecodable(self):
        pub, omega = wp_keygen(self.OMEGA)
        ct = wp_encrypt_bit(pub, 1, 10, Random(53))
        tampered = free_reduce(ct + parse_word("a b"))
        with pytest.raises(Undecodable):
            wp_decrypt_bit(omega, pub, tampered)

    def test_different_omega_decrypts_differently(self):
        # the secret omega matters: decryption uses it as the key
        pub, omega = wp_keygen(self.OMEGA)
        ct = wp_encrypt_bit(pub, 0, 0, Random(54))
        assert wp_decrypt_bit(omega, pub, ct) == 0
