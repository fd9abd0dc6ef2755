import itertools

import numpy as np
import pytest

from mautomata.groups import (
    AffineElement,
    CosetTable,
    GroupError,
    GroupOracle,
    InfiniteDihedral,
    InvolutiveAlphabet,
    SubgroupOracle,
    as_word,
    coset_enumerate,
    count_words,
    enumerate_words,
    evaluate_word,
    formal_inverse,
    in_word_problem,
    parity,
    parse_letter_images,
    subgroup_from_predicate,
)
from mautomata.monoids import FreeAbelian, FreeGroup, SymmetricGroup

D = InfiniteDihedral()
D_ALPHA = InvolutiveAlphabet.symmetric("t", self_inverse="s")
D_ORACLE = GroupOracle(D, D_ALPHA, parse_letter_images(D, D_ALPHA, "[t: (1,1); T: (1,-1); s: (-1,0)]"))

# x -> e*x + n as the matrix [[e, n], [0, 1]] acting on (x, 1)
MATRIX = {
    "t": np.array([[1, 1], [0, 1]]),
    "T": np.array([[1, -1], [0, 1]]),
    "s": np.array([[-1, 0], [0, 1]]),
}


def matrix_of(w):
    m = np.eye(2, dtype=int)
    for x in w:
        m = MATRIX[x] @ m  # the letter read later acts after the earlier ones
    return m


def as_affine(m):
    return AffineElement(int(m[0, 0]), int(m[0, 1]))


def z_oracle():
    Z = FreeAbelian(1)
    alpha = InvolutiveAlphabet.symmetric("a")
    return GroupOracle(Z, alpha, parse_letter_images(Z, alpha, "[a: [1]; A: [-1]]"))


def s3_oracle():
    S = SymmetricGroup(3)
    alpha = InvolutiveAlphabet.from_pairs("srR", [("s", "s"), ("r", "R")])
    return GroupOracle(S, alpha, parse_letter_images(S, alpha, "[s: (0 1); r: (0 1 2); R: (0 2 1)]"))


def f2_oracle():
    F = FreeGroup(2)
    alpha = InvolutiveAlphabet.symmetric("ab")
    return GroupOracle(F, alpha, {x: F.parse(x) for x in alpha.letters})


def test_dihedral_words_against_matrices():
    assert D_ORACLE.evaluate("sts") == AffineElement(1, -1)
    assert D_ORACLE.evaluate("stst") == D.identity
    for w in enumerate_words(D_ALPHA, 6):
        assert D_ORACLE.evaluate(w) == as_affine(matrix_of(w))


def test_dihedral_is_a_homomorphism():
    words = list(enumerate_words(D_ALPHA, 4))
    for u, v in itertools.product(words, repeat=2):
        assert D_ORACLE.evaluate(u + v) == D_ORACLE.multiply(D_ORACLE.evaluate(u), D_ORACLE.evaluate(v))


def test_dihedral_affine_action():
    g = D_ORACLE.evaluate("ts")
    # t first, then s: x -> -(x + 1)
    assert [g(x) for x in range(-2, 3)] == [-(x + 1) for x in range(-2, 3)]


def test_evaluate_simple_cases():
    Z = z_oracle()
    assert Z.evaluate("") == Z.identity
    assert evaluate_word(Z, "aaA") == Z.group.parse("[1]")
    assert D_ORACLE.evaluate(()) == D.identity


def test_word_problem_membership():
    Z2 = FreeAbelian(2)
    alpha = InvolutiveAlphabet.symmetric("ab")
    ab = GroupOracle(Z2, alpha, parse_letter_images(Z2, alpha, "[a: [1,0]; A: [-1,0]; b: [0,1]; B: [0,-1]]"))
    assert in_word_problem(ab, "abAB")
    assert not in_word_problem(f2_oracle(), "abAB")
    assert in_word_problem(D_ORACLE, "ss")
    assert not in_word_problem(D_ORACLE, "s")


def test_free_group_oracle_matches_reduction():
    F = f2_oracle()
    for w in enumerate_words(F.alphabet, 5):
        stack = []
        for x in w:
            if stack and stack[-1] == F.alphabet.involution[x]:
                stack.pop()
            else:
                stack.append(x)
        assert F.in_word_problem(w) == (not stack)


def test_enumerate_words_order_and_counts():
    assert list(enumerate_words("a", 2)) == [(), ("a",), ("a", "a")]
    assert list(enumerate_words(InvolutiveAlphabet.symmetric("a"), 1)) == [(), ("a",), ("A",)]
    assert len(list(enumerate_words("ab", 2))) == 7
    assert count_words(2, 2) == 7
    assert count_words(4, 14) == sum(4**k for k in range(15))


def test_formal_inverse():
    alpha = InvolutiveAlphabet.symmetric("ab")
    assert formal_inverse(alpha, "ab") == ("B", "A")
    assert formal_inverse(alpha, "") == ()
    assert formal_inverse(D_ALPHA, "ts") == ("s", "T")


@pytest.mark.parametrize("oracle", [D_ORACLE, s3_oracle(), z_oracle(), f2_oracle()])
def test_formal_inverse_evaluates_to_inverse(oracle):
    for w in enumerate_words(oracle.alphabet, 5):
        assert oracle.in_word_problem(w + formal_inverse(oracle.alphabet, w))


@pytest.mark.parametrize(
    "letters, pairs",
    [("ab", [("a", "b"), ("b", "c")]), ("ab", [("a", "a")]), ("aa", [("a", "a")]), ("ae", [("a", "e")]), ("a,", [("a", ",")])],
)
def test_bad_alphabets(letters, pairs):
    with pytest.raises(GroupError):
        InvolutiveAlphabet.from_pairs(letters, pairs)


def test_alphabet_rejects_unknown_letters():
    with pytest.raises(GroupError):
        D_ALPHA.check_word("tx")


def test_as_word():
    assert as_word("e") == () and as_word("") == ()
    assert as_word("ab") == ("a", "b")


def test_letter_images_must_cover_alphabet():
    Z = FreeAbelian(1)
    alpha = InvolutiveAlphabet.symmetric("a")
    with pytest.raises((GroupError, ValueError)):
        GroupOracle(Z, alpha, parse_letter_images(Z, alpha, "[a: [1]]"))


def test_letter_images_must_respect_involution():
    Z = FreeAbelian(1)
    alpha = InvolutiveAlphabet.symmetric("a")
    with pytest.raises((GroupError, ValueError)):
        GroupOracle(Z, alpha, parse_letter_images(Z, alpha, "[a: [1]; A: [1]]"))


def test_parity_is_a_homomorphism():
    for oracle in (D_ORACLE, s3_oracle(), z_oracle(), f2_oracle()):
        words = list(enumerate_words(oracle.alphabet, 3))
        for u, v in itertools.product(words, repeat=2):
            pu = parity(oracle.group, oracle.evaluate(u))
            pv = parity(oracle.group, oracle.evaluate(v))
            assert parity(oracle.group, oracle.evaluate(u + v)) == (pu + pv) % 2


def brute_force_index(subgroup, max_len):
    """Count distinct right cosets among elements named by short words."""
    oracle = subgroup.parent
    reps = []
    for w in enumerate_words(oracle.alphabet, max_len):
        h = oracle.evaluate(w)
        if not any(subgroup.contains(oracle.multiply(h, oracle.inverse(r))) for r in reps):
            reps.append(h)
    return len(reps)


@pytest.mark.parametrize(
    "oracle, name, index",
    [(z_oracle(), "parity", 2), (s3_oracle(), "trivial", 6), (s3_oracle(), "parity", 2), (D_ORACLE, "parity", 2),
     (z_oracle(), "full", 1), (f2_oracle(), "parity", 2)],
)
def test_coset_enumeration(oracle, name, index):
    K = subgroup_from_predicate(oracle, name)
    table = coset_enumerate(K, 16)
    assert table.complete
    assert table.index == index == brute_force_index(K, 4)
    assert table.check(K) == []


def test_z_even_table_shape():
    table = coset_enumerate(subgroup_from_predicate(z_oracle(), "parity"), 8)
    assert table.representatives == [(), ("a",)]
    assert table.transitions == [{"a": 1, "A": 1}, {"a": 0, "A": 0}]


def test_full_subgroup_has_self_loops():
    table = coset_enumerate(subgroup_from_predicate(D_ORACLE, "full"), 8)
    assert table.transitions == [{x: 0 for x in D_ALPHA.letters}]


def test_infinite_index_is_reported_incomplete():
    table = coset_enumerate(subgroup_from_predicate(z_oracle(), "trivial"), 10)
    assert not table.complete
    assert table.index == 10


def test_table_check_finds_corruption():
    K = subgroup_from_predicate(s3_oracle(), "parity")
    table = coset_enumerate(K, 8)
    bad = CosetTable(table.representatives, [dict(row) for row in table.transitions])
    bad.transitions[0]["s"] = 0
    assert bad.check(K)


def test_custom_subgroup_oracle():
    Z = z_oracle()
    K = SubgroupOracle(Z, lambda h: h.vector[0] % 3 == 0, 3, "3Z")
    table = coset_enumerate(K, 8)
    assert table.index == 3 and table.check(K) == []


def test_parity_unsupported_group():
    from mautomata.monoids import Polycyclic

    with pytest.raises(GroupError):
        parity(Polycyclic(1), Polycyclic(1).identity)
