from random import Random

import pytest

from agcrypt.mealy import free_reduce, inverse_word, parse_word, random_word, word
from agcrypt.wordproblem import (
    BudgetExceeded,
    DecisionBudget,
    NotFound,
    acts_trivially_to_depth,
    are_equal,
    commutes,
    conjugacy_search_bruteforce,
    decide_identity,
    element_order,
    is_identity,
    reachable_state_count,
)


class TestActsTrivially:
    def test_identity_word(self, grig_machine):
        assert acts_trivially_to_depth(grig_machine, (), 10)

    def test_a_moves_level_one(self, grig_machine):
        assert not acts_trivially_to_depth(grig_machine, word("a"), 1)

    def test_a_squared_is_trivial(self, grig_machine):
        assert acts_trivially_to_depth(grig_machine, word("a", "a"), 10)

    def test_depth_zero_always_trivial(self, grig_machine):
        assert acts_trivially_to_depth(grig_machine, word("a"), 0)


class TestIsIdentity:
    def test_empty_word(self, grig_machine):
        assert is_identity(grig_machine, ())

    def test_bcd_relator(self, grig_machine):
        assert is_identity(grig_machine, word("b", "c", "d"))
        assert acts_trivially_to_depth(grig_machine, word("b", "c", "d"), 12)

    def test_ab_is_not_identity(self, grig_machine):
        assert not is_identity(grig_machine, word("a", "b"))

    def test_budget_enforced(self, grig_machine):
        with pytest.raises(BudgetExceeded):
            is_identity(grig_machine, word("b", "a", "c", "a"),
                        DecisionBudget(max_states=2))

    def test_explored_state_count_reported(self, grig_machine):
        verdict, explored = decide_identity(grig_machine, word("b", "c", "d"))
        assert verdict and explored >= 1


class TestAreEqual:
    def test_reflexive(self, grig_machine):
        w = parse_word("a b c^-1")
        assert are_equal(grig_machine, w, w)

    def test_bc_equals_d_inverse(self, grig_machine):
        assert are_equal(grig_machine, word("b", "c"), parse_word("d^-1"))

    def test_a_differs_from_b(self, grig_machine):
        assert not are_equal(grig_machine, word("a"), word("b"))

    def test_equivalence_relation_spot_check(self, grig_machine):
        rng = Random(11)
        words = [random_word("abcd", rng.randint(0, 5), rng) for _ in range(8)]
        for w1 in words:
            assert are_equal(grig_machine, w1, w1)
            for w2 in words:
                assert are_equal(grig_machine, w1, w2) == \
                    are_equal(grig_machine, w2, w1)


class TestElementOrder:
    def test_identity_has_order_one(self, grig_machine):
        assert element_order(grig_machine, (), 5) == 1

    def test_generators_are_involutions(self, grig_machine):
        assert element_order(grig_machine, word("a"), 8) == 2
        assert element_order(grig_machine, word("d"), 8) == 2

    def test_ad_has_order_four(self, grig_machine):
        assert element_order(grig_machine, word("a", "d"), 8) == 4

    def test_unknown_when_exceeding_max(self, grig_machine):
        assert element_order(grig_machine, word("a", "d"), 3) is None

    def test_order_is_conjugation_invariant(self, grig_machine):
        rng = Random(12)
        for _ in range(10):
            w = random_word("abcd", 3, rng)
            g = random_word("abcd", 2, rng)
            conj = free_reduce(inverse_word(g) + w + g)
            assert element_order(grig_machine, w, 16) == \
                element_order(grig_machine, conj, 16)


class TestCommutes:
    def test_self_commutes(self, grig_machine):
        w = parse_word("a b")
        assert commutes(grig_machine, w, w)

    def test_identity_commutes(self, grig_machine):
        assert commutes(grig_machine, parse_word("a b"), ())

    def test_a_b_do_not_commute(self, grig_machine):
        assert not commutes(grig_machine, word("a"), word("b"))


class TestSoundnessLink:
    @pytest.mark.parametrize("platform_fixture", ["grig", "basilica2"])
    def test_exact_vs_depth_bounded(self, platform_fixture, request):
        machine = request.getfixturevalue(platform_fixture)[0]
        gens = tuple(g for g in machine.generators if g != "e")
        rng = Random(13)
        for _ in range(40):
            w = random_word(gens, rng.randint(0, 8), rng)
            count = reachable_state_count(machine, w)
            exact = is_identity(machine, w)
            bounded = acts_trivially_to_depth(machine, w, count)
            assert exact == bounded


class TestConjugacySearch:
    def test_equal_words_need_no_conjugator(self, grig_machine):
        w = parse_word("a b")
        assert conjugacy_search_bruteforce(grig_machine, w, w, 2) == ()

    def test_constructed_instance(self, grig_machine):
        rng = Random(14)
        a = word("a", "b")
        g = word("c")
        b = free_reduce(inverse_word(g) + a + g)
        c = conjugacy_search_bruteforce(grig_machine, a, b, 3)
        assert are_equal(grig_machine, free_reduce(inverse_word(c) + a + c), b)

    def test_not_found(self, grig_machine):
        with pytest.raises(NotFound):
            conjugacy_search_bruteforce(grig_machine, word("a"), word("b"), 4)

    def test_result_is_self_verifying(self, grig_machine):
        rng = Random(15)
        for _ in range(5):
            a = random_word("abcd", 2, rng)
            g = random_word("abcd", 2, rng)
            b = free_reduce(inverse_word(g) + a + g)
            c = conjugacy_search_bruteforce(grig_machine, a, b, 3)
            assert len(c) <= 3
            assert are_equal(grig_machine, free_reduce(inverse_word(c) + a + c), b)
