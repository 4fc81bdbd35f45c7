import random
from math import comb

import pytest

import oracles
from collapse_lab.words import (
    Alphabet,
    BinomialSignature,
    ColorExhaustionError,
    CountOverflowError,
    DomainError,
    FiniteWord,
    U64_MAX,
    abelian_equivalent,
    binomial,
    binomial_signature,
    color_finite,
    distinct_factors,
    extend_counts,
    factor_count,
    k_binomial_equivalent,
    letter_count,
    pattern_index,
    patterns,
    project,
    signature_extend,
    signature_size,
    word,
)

W = word("11212")


def test_alphabet_validation():
    with pytest.raises(DomainError):
        Alphabet(())
    with pytest.raises(DomainError):
        Alphabet(("a", "a"))
    with pytest.raises(DomainError):
        Alphabet(tuple(str(i) for i in range(256)))
    assert Alphabet(tuple("ab")).index("b") == 1
    with pytest.raises(DomainError):
        Alphabet(tuple("ab")).index("c")


def test_word_parse_and_render():
    w = word("aabaca")
    assert w.alphabet.names == ("a", "b", "c")
    assert len(w) == 6 and w.letters == bytes([0, 0, 1, 0, 2, 0])
    assert str(w) == "aabaca"
    assert len(word("", Alphabet(("1",)))) == 0
    multi = word("x1,x2,x1", sep=",")
    assert multi.alphabet.names == ("x1", "x2")
    with pytest.raises(DomainError):
        multi.to_string()
    assert multi.to_string(" ") == "x1 x2 x1"


def test_word_rejects_foreign_letter():
    with pytest.raises(DomainError):
        word("12a", Alphabet(("1", "2")))
    with pytest.raises(DomainError):
        FiniteWord(Alphabet(("1",)), b"\x01")


def test_letter_count():
    assert letter_count(W, "1") == 3
    assert letter_count(word("", Alphabet(("1", "2"))), "1") == 0
    assert letter_count(word("1212221"), "2") == 4
    assert len(W) == 5


def test_factor_count():
    assert factor_count(W, "12") == 2
    assert factor_count(W, "22") == 0
    assert factor_count(word("aaa"), "aa") == 2
    with pytest.raises(DomainError):
        factor_count(W, "")


def test_binomial_examples():
    assert binomial(W, "12") == 5
    assert binomial(W, "") == 1
    assert binomial(word(""), "") == 1
    assert binomial(word("1212221"), "22") == 6


def test_binomial_against_brute_force():
    rng = random.Random(7)
    for _ in range(300):
        d = rng.randint(1, 3)
        letters = "abc"[:d]
        w = "".join(rng.choice(letters) for _ in range(rng.randint(0, 10)))
        u = "".join(rng.choice(letters) for _ in range(rng.randint(0, 3)))
        fw = word(w, Alphabet(tuple(letters)))
        assert binomial(fw, u) == oracles.binomial(w, u), (w, u)


def test_binomial_overflow_is_detected():
    # C(2^20, 4) > 2^64
    w = FiniteWord(Alphabet(("0",)), bytes(1 << 20))
    assert binomial(w, "00") == comb(1 << 20, 2)
    with pytest.raises(CountOverflowError):
        binomial(w, "0000")
    counts = [U64_MAX - 1, 0]
    with pytest.raises(CountOverflowError):
        extend_counts(counts, 0, 1, 2)
        extend_counts(counts, 0, 1, 2)


def test_pattern_order():
    assert patterns(2, 2) == (b"\x00", b"\x01", b"\x00\x00", b"\x00\x01", b"\x01\x00", b"\x01\x01")
    assert signature_size(3, 3) == 3 + 9 + 27
    for i, p in enumerate(patterns(3, 3)):
        assert pattern_index(p, 3) == i


def test_signature_examples():
    sig = binomial_signature(W, 2)
    assert sig.counts == (3, 2, 3, 5, 1, 1)
    assert binomial_signature(W, 1).counts == (3, 2)
    assert sig.truncate(1).counts == (3, 2)
    empty = binomial_signature(word("", Alphabet(("1", "2"))), 2)
    assert empty.counts == (0,) * 6 and empty.word_length == 0
    assert sig.count("12", W.alphabet) == 5 and sig.count("", W.alphabet) == 1


def test_signature_invariants():
    w = word("0110100110010110")
    sig = binomial_signature(w, 3)
    assert sum(sig.counts[:2]) == len(w)
    for a in "01":
        for m in (1, 2, 3):
            assert sig.count(a * m, w.alphabet) == comb(letter_count(w, a), m)
    for p, c in zip(patterns(2, 3), sig.counts):
        assert c <= comb(len(w), len(p))


def test_signature_extend_examples():
    ab = Alphabet(("1", "2"))
    assert signature_extend(BinomialSignature.empty(2, 2), "1", ab) == binomial_signature(word("1", ab), 2)
    assert signature_extend(binomial_signature(word("1121", ab), 2), "2", ab) == binomial_signature(W, 2)
    s = signature_extend(binomial_signature(word("0110"), 2), "0", Alphabet(("0", "1")))
    assert s == binomial_signature(word("01100"), 2)


def test_signature_extend_matches_scratch_on_random_words():
    rng = random.Random(11)
    for d in (2, 3):
        alpha = Alphabet(tuple("abc"[:d]))
        text = "".join(rng.choice(alpha.names) for _ in range(200))
        sig = BinomialSignature.empty(d, 3)
        for i, g in enumerate(text):
            sig = signature_extend(sig, g, alpha)
            if i % 17 == 0 or i == len(text) - 1:
                assert sig == binomial_signature(word(text[: i + 1], alpha), 3)


def test_equivalence_examples():
    u, v = word("1212221"), word("2112212")
    assert abelian_equivalent(u, v)
    assert k_binomial_equivalent(u, v, 2)
    assert not k_binomial_equivalent(u, v, 3)
    assert k_binomial_equivalent(word("0110"), word("1001"), 2)
    assert k_binomial_equivalent(word("1221"), word("2112"), 2)
    assert not k_binomial_equivalent(word("12"), word("121"), 1)


def test_equivalence_across_alphabets_is_an_error():
    with pytest.raises(DomainError):
        k_binomial_equivalent(word("ab"), word("12"), 1)


def test_project_examples():
    w = word("aabaca")
    assert str(project(w, "ab")) == "aabaa"
    assert project(w, "abc") == w
    assert str(project(w, "bc")) == "bc"
    assert project(w, "ba").alphabet.names == ("a", "b")
    with pytest.raises(DomainError):
        project(w, "z")


def test_color_finite_examples():
    w0 = word("0a00a0a00a")
    assert str(color_finite(w0, "a", word("12112"))) == "0100201001"
    assert str(color_finite(word("000", Alphabet(("0", "a"))), "a", word("", Alphabet(("1", "2"))))) == "000"
    assert str(color_finite(word("aa"), "a", word("12"))) == "12"


def test_color_finite_errors():
    with pytest.raises(ColorExhaustionError):
        color_finite(word("0a0a"), "a", word("1"))
    with pytest.raises(DomainError):
        color_finite(word("0a"), "a", word("01"))


def test_distinct_factors():
    assert {str(f) for f in distinct_factors(W, 2)} == {"11", "12", "21"}
    assert {str(f) for f in distinct_factors(W, 0)} == {""}
    assert {str(f) for f in distinct_factors(word("aaa"), 2)} == {"aa"}
    assert distinct_factors(W, 6) == set()
