import random

import pytest

import oracles
from collapse_lab import analysis
from collapse_lab.analysis import (
    InconsistentProjectionFamily,
    ProjectionFamily,
    abelian_complexity,
    binary_projection_imbalance,
    classes,
    complexity_report,
    find_collisions,
    imbalance,
    is_saturated,
    k_binomial_complexity,
    reconstruct,
    saturation_probe,
    subword_complexity,
)
from collapse_lab.generators import (
    Billiard,
    EventuallyPeriodic,
    Mechanical,
    SubstitutionImage,
    Substitution,
    fibonacci,
    thue_morse,
    tribonacci,
)
from collapse_lab.words import Alphabet, DomainError, k_binomial_equivalent, project, word

FIB = fibonacci().prefix(10_000)
TM = thue_morse().prefix(1 << 12)


def test_subword_complexity():
    assert subword_complexity(FIB, 30) == [n + 1 for n in range(1, 31)]
    assert subword_complexity(word("0" * 50), 10) == [1] * 10
    assert subword_complexity(TM, 4)[3] == 10


def test_abelian_complexity():
    assert abelian_complexity(FIB, 30) == [2] * 30
    assert abelian_complexity(word("0" * 50), 5) == [1] * 5
    assert abelian_complexity(TM, 2)[1] == 3


def test_k_binomial_complexity():
    assert k_binomial_complexity(FIB, 2, 30) == [n + 1 for n in range(1, 31)]
    w = tribonacci().prefix(2000)
    p = subword_complexity(w, 6)
    for n in range(1, 7):
        assert k_binomial_complexity(w, n, n)[n - 1] == p[n - 1]
    assert k_binomial_complexity(TM, 2, 4)[3] < subword_complexity(TM, 4)[3]


def test_nmax_beyond_prefix_is_an_error():
    with pytest.raises(DomainError):
        subword_complexity(word("0101"), 5)


def test_binomial_complexity_matches_pairwise_oracle():
    rng = random.Random(3)
    samples = [
        ("01", str(fibonacci().prefix(120))),
        ("01", str(thue_morse().prefix(128))),
        ("123", str(tribonacci().prefix(150))),
    ]
    for _ in range(3):
        samples.append(("abc", "".join(rng.choice("abc") for _ in range(60))))
    for letters, text in samples:
        w = word(text, Alphabet(tuple(letters)))
        for k in (1, 2, 3):
            got = k_binomial_complexity(w, k, 8)
            assert got == [oracles.class_count(text, k, n, letters) for n in range(1, 9)], (text[:10], k)


def test_find_collisions_examples():
    assert (4, "0110", "1001") in [(c.n, str(c.u), str(c.v)) for c in find_collisions(TM, 2, 4)]
    assert find_collisions(FIB, 2, 50) == []
    sigma = Substitution.from_mapping({"1": "1221", "2": "2112"})
    w = SubstitutionImage(fibonacci("12"), sigma).prefix(5000)
    first = find_collisions(w, 2, 4)[0]
    assert (first.n, str(first.u), str(first.v)) == (4, "1221", "2112")


def test_collisions_are_least_and_consistent_with_complexity():
    w = tribonacci().prefix(3000)
    proj = project(w, "12")
    for k in (1, 2):
        found = {c.n: c for c in find_collisions(proj, k, 20)}
        p = subword_complexity(proj, 20)
        b = k_binomial_complexity(proj, k, 20)
        for n in range(1, 21):
            assert (n in found) == (b[n - 1] < p[n - 1])
            if n in found:
                c = found[n]
                assert c.u < c.v and k_binomial_equivalent(c.u, c.v, k)
                # no colliding pair precedes it lexicographically
                group = classes(proj, k, n).group_of(c.u)
                assert group[0] == c.u and group[1] == c.v


def test_complexity_report_chain_and_columns():
    for w in (FIB, TM, tribonacci().prefix(3000), word("0" * 30)):
        report = complexity_report(w, [1, 2, 3], 12)
        assert report.chain_holds()
        assert report.column("b1") == report.column("rho")
        assert report.prefix_length == len(w)
    fib = complexity_report(FIB, [2], 10)
    assert fib.column("p") == [n + 1 for n in range(1, 11)]
    assert fib.column("rho") == [2] * 10
    assert fib.collisions == ()
    tm = complexity_report(TM, [2], 4)
    assert tm.rows[3].b[2] < tm.rows[3].p


def test_classes():
    part = classes(word("11212"), 1, 2)
    assert [[str(u) for u in g] for g in part.groups] == [["11"], ["12", "21"]]
    w = tribonacci().prefix(3000)
    for g in classes(w, 4, 4).groups:
        assert len(g) == 1
    proj = project(tribonacci().prefix(300_000), "12")[:100_000]
    group = classes(proj, 2, 16).group_of(word("2112112112112112", proj.alphabet))
    assert {str(u) for u in group} >= {"2112112112112112", "1212112112112121"}


def test_classes_partition_is_exact():
    w = thue_morse().prefix(300)
    for k in (1, 2):
        part = classes(w, k, 6)
        members = [u for g in part.groups for u in g]
        assert len(members) == len(set(members)) == subword_complexity(w, 6)[5]
        for g in part.groups:
            assert all(k_binomial_equivalent(g[0], u, k) for u in g)
        reps = [g[0] for g in part.groups]
        for i in range(len(reps)):
            for j in range(i + 1, len(reps)):
                assert not k_binomial_equivalent(reps[i], reps[j], k)


def test_imbalance_examples():
    assert imbalance(word("11212")).overall_c == 1
    assert imbalance(word("11122")).overall_c == 2
    assert imbalance(word("0" * 20)).overall_c == 0
    rng = random.Random(5)
    for _ in range(50):
        text = "".join(rng.choice("abc") for _ in range(rng.randint(1, 14)))
        assert imbalance(word(text)).overall_c == oracles.imbalance(text)


def test_imbalance_of_power_then_constant():
    for m in range(1, 6):
        w = EventuallyPeriodic("1" * m, "2").prefix(60)
        assert imbalance(w, 30).overall_c == m


def test_imbalance_report_details():
    report = imbalance(word("11122"))
    assert report.imbalance("1", 2) == 2
    assert report.least_window(2) == 2
    a, n, u, v = report.witness
    assert (a, n) == ("1", 2)
    assert abs(str(u).count("1") - str(v).count("1")) == 2


def test_binary_projection_imbalance():
    w = tribonacci().prefix(20_000)
    reports = binary_projection_imbalance(w, 50)
    assert reports[("1", "3")].overall_c >= 2
    assert reports[("1", "3")].least_window(2) == 4
    billiard = Billiard(("1/3", "2/7", "1/11"), (1, "14142/10000", "17321/10000")).prefix(20_000)
    assert {pair: r.overall_c for pair, r in binary_projection_imbalance(billiard, 200).items()} == {
        ("1", "2"): 1,
        ("1", "3"): 1,
        ("2", "3"): 1,
    }


def test_reconstruct_examples():
    assert str(reconstruct({"ab": "aabaa", "ac": "aaaca", "bc": "bc"})) == "aabaca"
    assert str(reconstruct({"ab": "abba"})) == "abba"
    with pytest.raises(InconsistentProjectionFamily):
        reconstruct({"ab": "ab", "ac": "ca", "bc": "bc"})
    with pytest.raises(InconsistentProjectionFamily):
        reconstruct({"ab": "ab", "ac": "aac", "bc": "bc"})
    with pytest.raises(DomainError):
        reconstruct({"ab": "ab", "ac": "ac"})


def test_reconstruct_handles_absent_letters():
    fam = ProjectionFamily.from_strings({"ab": "aa", "ac": "aa", "bc": ""}, alphabet="abc")
    assert str(reconstruct(fam)) == "aa"


def test_reconstruct_round_trip_random():
    rng = random.Random(9)
    for _ in range(300):
        d = rng.randint(2, 5)
        alpha = Alphabet(tuple("abcde"[:d]))
        text = "".join(rng.choice(alpha.names) for _ in range(rng.randint(0, 50)))
        u = word(text, alpha)
        assert reconstruct(ProjectionFamily.of(u)) == u


def test_saturation_probe():
    length, stable = saturation_probe(fibonacci(), 30, 1000)
    assert stable and length >= 1000
    assert saturation_probe(EventuallyPeriodic("12", "3"), 10, 20)[1]
    # the probe stops at the largest length within budget and reports instability
    billiard = Billiard(("1/3", "2/7", "1/11"), (1, "14142/10000", "17321/10000"))
    assert saturation_probe(billiard, 60, 100, budget=200) == (200, False)
    assert is_saturated(fibonacci(), 30, 2000)
    assert not is_saturated(Mechanical("233/610"), 60, 100)
    with pytest.raises(DomainError):
        saturation_probe(fibonacci(), 30, 10)


def test_saturated_window_set_covers_shorter_factors():
    spec = tribonacci()
    length, stable = saturation_probe(spec, 20, 100)
    assert stable
    shorter = subword_complexity(spec.prefix(length), 20)
    longer = subword_complexity(spec.prefix(4 * length), 20)
    assert shorter == longer


def test_projection_family_validation():
    with pytest.raises(DomainError):
        ProjectionFamily.from_strings({"aa": "aa"})
    with pytest.raises(InconsistentProjectionFamily):
        ProjectionFamily.from_strings({"ab": "abc"})
    with pytest.raises(DomainError):
        ProjectionFamily.from_strings({"ab": "ab", "ba": "ab"})


def test_collision_free_families():
    # one representative per collapsing class, kept small for unit runtime
    assert analysis.find_collisions(tribonacci().prefix(5000), 2, 40) == []
    assert analysis.find_collisions(Mechanical("233/610").prefix(5000), 2, 40) == []


def test_fibonacci_colored_projection_is_balanced():
    # Two a's one 0 apart in the base word always take colors 1 and 2, so the
    # {0,1}-projection never shows 101 and stays 1-balanced (see README, Known discrepancies).
    from collapse_lab.generators import fibonacci_colored_by_fibonacci
    from collapse_lab.words import factor_count

    proj = project(fibonacci_colored_by_fibonacci().prefix(50_000), "01")
    assert factor_count(proj, "000") > 0
    assert factor_count(proj, "101") == 0
    assert imbalance(proj, 100).overall_c == 1
