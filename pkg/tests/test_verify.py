import json

import pytest

from collapse_lab import verify
from collapse_lab.generators import ArnouxRauzy, CassaigneSelmer, fibonacci, thue_morse, tribonacci
from collapse_lab.words import k_binomial_equivalent, word


def test_check_collapse_examples():
    assert verify.check_collapse(fibonacci(), 2, 50, 10_000).passed
    tribo = verify.check_collapse(tribonacci(), 2, 99, 20_000)
    assert tribo.passed and tribo.measured["saturated"]
    tm = verify.check_collapse(thue_morse(), 2, 4, 4096)
    assert not tm.passed
    assert tm.witnesses == [{"n": 4, "k": 2, "u": "0110", "v": "1001"}]


def test_failed_report_witness_is_recheckable():
    tm = verify.check_collapse(thue_morse(), 2, 4, 4096)
    w = tm.witnesses[0]
    assert k_binomial_equivalent(word(w["u"], "01"), word(w["v"], "01"), w["k"])


def test_known_witnesses_all_pass():
    reports = verify.check_known_witnesses()
    assert len(reports) == 8
    failing = [(r.name, r.note) for r in reports if not r.passed]
    assert failing == []


def test_missing_witness_is_named():
    lang = thue_morse().prefix(64)
    r = verify._witness_report("x", lang, "000", "111", "sim2")
    assert not r.passed and "u and v" in r.note


def test_rho_equals_p():
    from collapse_lab.generators import EventuallyPeriodic

    assert verify.check_rho_equals_p(EventuallyPeriodic("11", "2"), 30, 200).passed
    assert verify.check_rho_equals_p(EventuallyPeriodic("12", "3"), 30, 200).passed
    fib = verify.check_rho_equals_p(fibonacci(), 30, 10_000)
    assert not fib.passed
    assert fib.measured["first_difference"] == {"n": 2, "rho": 2, "p": 3}


def test_lyndon_words():
    assert verify.lyndon_words("12", 3) == ["1", "112", "12", "122", "2"]
    assert verify.lyndon_words("12", 0) == []
    # number of binary Lyndon words of length 5 is 6
    assert sum(1 for p in verify.lyndon_words("12", 5) if len(p) == 5) == 6


def test_sweep_edges():
    empty = verify.sweep_arnoux_rauzy(1)
    assert empty.passed and empty.measured["members"] == 0
    assert verify.sweep_cassaigne_selmer(0).measured["members"] == 0


def test_sweeps_desk_slice():
    ar = verify.sweep_arnoux_rauzy(3)
    assert ar.passed and [d.name for d in ar.details] == ["(123)^w", "(132)^w"]
    cs = verify.sweep_cassaigne_selmer(2)
    assert cs.passed and [d.name for d in cs.details] == ["(12)^w"]


def test_sweep_budget_marks_partial():
    r = verify.sweep_arnoux_rauzy(4, time_budget=0.0)
    assert not r.passed and r.measured["partial"] and "partial" in r.note


def test_cassaigne_selmer_primitivity():
    assert verify.cassaigne_selmer_primitive("12")
    assert verify.cassaigne_selmer_primitive("112")
    assert not verify.cassaigne_selmer_primitive("1122")
    assert not verify.cassaigne_selmer_primitive("2112")
    assert not verify.cassaigne_selmer_primitive("1")
    # the non-primitive directive never uses letter 2
    assert 1 not in CassaigneSelmer("1122").prefix(5000).letters


def test_sanity_gate_flags_generator_suspect():
    member = verify._directive_member(CassaigneSelmer("1122"), "(1122)^w", 2, 20, 2000, 10)
    r = member()
    assert not r.passed and r.note == "generator suspect" and "mismatch" in r.measured


def test_single_directive_member():
    r = verify._directive_member(ArnouxRauzy("123"), "(123)^w", 2, 99, 20_000, None)()
    assert r.passed and r.measured["saturated"]


@pytest.mark.parametrize("j,k,n_max", [(0, 2, 30), (1, 3, 30), (2, 4, 20)])
def test_tm_iterates(j, k, n_max):
    r = verify.check_tm_iterate_scenario(j, k, n_max)
    assert r.passed
    assert len(r.details) == (1 if j == 0 else 2)


def test_class_representatives():
    reports = verify.check_class_representatives()
    assert [r.name for r in reports] == [
        "balanced-ternary",
        "quasi-sturmian-d3",
        "quasi-sturmian-d4",
        "billiard-d2",
        "billiard-d3",
        "billiard-d4",
        "colored-fibonacci",
    ]
    assert all(r.passed for r in reports)


def test_registry_and_determinism():
    assert {"tribonacci-collapse", "thue-morse-collision"} <= set(verify.SCENARIOS)
    assert "sweep-cassaigne-selmer-full" not in verify.default_scenarios()
    assert "sweep-cassaigne-selmer-full" in verify.default_scenarios(include_long=True)
    a = verify.run_scenario("thue-morse-collision").as_dict(timing=False)
    b = verify.run_scenario("thue-morse-collision").as_dict(timing=False)
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    with pytest.raises(KeyError):
        verify.run_scenario("nonexistent")


def test_aggregate_is_conjunction():
    ok = verify.VerificationReport("a", True)
    bad = verify.VerificationReport("b", False)
    assert verify.all_pass("x", [ok, ok]).passed
    assert not verify.all_pass("x", [ok, bad]).passed
    assert verify.all_pass("x", []).passed


def test_parallel_run_keeps_order(monkeypatch):
    monkeypatch.setenv(verify.THREADS_ENV, "2")
    assert verify.worker_count() == 2
    names = ["thue-morse-collision", "rho-equals-p-d2", "billiard-degenerate"]
    reports = verify.run_scenarios(names)
    assert [r.name for r in reports] == names and all(r.passed for r in reports)


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv(verify.THREADS_ENV, "junk")
    assert verify.worker_count() >= 1
    monkeypatch.setenv(verify.THREADS_ENV, "0")
    assert verify.worker_count() == 1


def test_coloring_demonstration_scenario():
    r = verify.run_scenario("coloring-unbalanced-projection")
    assert r.passed
    assert r.details[0].measured["overall_c"] == 2
