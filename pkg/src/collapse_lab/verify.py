"""Named, runnable verification scenarios and directive-sequence sweeps.

Each scenario yields a :class:`VerificationReport`.  Reports are deterministic
apart from ``wall_time``; a failing report always carries either a witness or
the measured and expected values.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

from . import analysis
from .generators import (
    ArnouxRauzy,
    Billiard,
    CassaigneSelmer,
    Colored,
    DegenerateTrajectoryError,
    EventuallyPeriodic,
    GeneratorSpec,
    Mechanical,
    QuasiSturmianFM,
    Substitution,
    SubstitutionImage,
    ThueMorseIterated,
    fibonacci,
    fibonacci_colored_by_fibonacci,
    thue_morse,
    tribonacci,
)
from .words import FiniteWord, WordsError, k_binomial_equivalent, letter_count, project, word

THREADS_ENV = "COLLAPSE_LAB_THREADS"

# Base and projected prefix lengths for witness membership checks.
WITNESS_BASE_LENGTH = 300_000
WITNESS_PROJECTED_LENGTH = 100_000


@dataclass
class VerificationReport:
    name: str
    passed: bool
    measured: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)
    prefix_length: int | None = None
    wall_time: float = 0.0
    details: list["VerificationReport"] = field(default_factory=list)
    note: str = ""

    def as_dict(self, timing: bool = True) -> dict:
        out = {
            "name": self.name,
            "passed": self.passed,
            "prefix_length": self.prefix_length,
            "measured": self.measured,
            "witnesses": self.witnesses,
        }
        if self.note:
            out["note"] = self.note
        if self.details:
            out["details"] = [d.as_dict(timing) for d in self.details]
        if timing:
            out["wall_time"] = round(self.wall_time, 4)
        return out


def _timed(fn: Callable[[], VerificationReport]) -> VerificationReport:
    start = time.perf_counter()
    report = fn()
    report.wall_time = time.perf_counter() - start
    return report


def _first_mismatch(measured: list[int], expected: Callable[[int], int]):
    for n, value in enumerate(measured, start=1):
        if value != expected(n):
            return {"n": n, "measured": value, "expected": expected(n)}
    return None


# -- single-word checks -------------------------------------------------------


def check_collapse(spec: GeneratorSpec, k: int, n_max: int, length: int, name: str = "collapse") -> VerificationReport:
    """Pass iff the prefix shows no k-binomial collision up to n_max."""

    def run():
        w = spec.prefix(length)
        collisions = analysis.find_collisions(w, k, n_max)
        measured = {
            "k": k,
            "n_max": n_max,
            "collision_lengths": [c.n for c in collisions],
            "saturated": analysis.is_saturated(spec, n_max, length),
        }
        return VerificationReport(
            name, not collisions, measured, [c.as_dict() for c in collisions[:1]], length
        )

    return _timed(run)


def check_has_collision(spec: GeneratorSpec, k: int, n_max: int, length: int, witness=None, name="collision") -> VerificationReport:
    """Pass iff a k-collision exists (and, if given, ``witness`` = (n, u, v) is
    among the reported least pairs)."""

    def run():
        w = spec.prefix(length)
        collisions = analysis.find_collisions(w, k, n_max)
        found = [(c.n, str(c.u), str(c.v)) for c in collisions]
        ok = bool(collisions) and (witness is None or tuple(witness) in found)
        measured = {"k": k, "n_max": n_max, "expected_witness": list(witness) if witness else None}
        return VerificationReport(name, ok, measured, [c.as_dict() for c in collisions], length)

    return _timed(run)


def check_rho_equals_p(spec: GeneratorSpec, n_max: int, length: int, name: str = "rho-equals-p") -> VerificationReport:
    def run():
        w = spec.prefix(length)
        report = analysis.complexity_report(w, [1], n_max, witnesses=False)
        first = next((r for r in report.rows if r.rho != r.p), None)
        measured = {"n_max": n_max}
        if first is not None:
            measured["first_difference"] = {"n": first.n, "rho": first.rho, "p": first.p}
        return VerificationReport(name, first is None, measured, [], length)

    return _timed(run)


def check_complexity_form(spec, n_max, length, slope, offset, name="complexity-form") -> VerificationReport:
    """Pass iff p(n) = slope*n + offset for 1 <= n <= n_max."""

    def run():
        w = spec.prefix(length)
        p = analysis.subword_complexity(w, n_max)
        bad = _first_mismatch(p, lambda n: slope * n + offset)
        measured = {"form": f"{slope}n+{offset}", "n_max": n_max}
        if bad:
            measured["mismatch"] = bad
        return VerificationReport(name, bad is None, measured, [], length)

    return _timed(run)


def check_balance(spec, n_max, length, c, name="balance") -> VerificationReport:
    def run():
        w = spec.prefix(length)
        report = analysis.imbalance(w, n_max)
        witnesses = []
        if report.overall_c > c and report.witness:
            a, n, u, v = report.witness
            witnesses.append({"letter": a, "n": n, "u": str(u), "v": str(v)})
        measured = {"n_max": n_max, "overall_c": report.overall_c, "expected_c": c}
        return VerificationReport(name, report.overall_c <= c, measured, witnesses, length)

    return _timed(run)


def check_projection_balance(spec, n_max, length, c, name="projection-balance") -> VerificationReport:
    def run():
        w = spec.prefix(length)
        reports = analysis.binary_projection_imbalance(w, n_max)
        per_pair = {"".join(pair): r.overall_c for pair, r in reports.items()}
        witnesses = []
        for pair, r in reports.items():
            if r.overall_c > c and r.witness:
                a, n, u, v = r.witness
                witnesses.append({"pair": "".join(pair), "letter": a, "n": n, "u": str(u), "v": str(v)})
        ok = all(v <= c for v in per_pair.values())
        measured = {"n_max": n_max, "per_pair": per_pair, "expected_c": c}
        return VerificationReport(name, ok, measured, witnesses, length)

    return _timed(run)


def check_projection_unbalanced(spec, pair, n_max, length, c, name="projection-unbalanced") -> VerificationReport:
    """Pass iff the projection onto ``pair`` has imbalance at least ``c``."""

    def run():
        w = project(spec.prefix(length), pair)
        report = analysis.imbalance(w, n_max)
        witnesses = []
        if report.witness:
            a, n, u, v = report.witness
            witnesses.append({"letter": a, "n": n, "u": str(u), "v": str(v)})
        measured = {"pair": "".join(pair), "n_max": n_max, "overall_c": report.overall_c, "expected_at_least": c}
        return VerificationReport(name, report.overall_c >= c, measured, witnesses, length)

    return _timed(run)


def check_projection_matches_restriction(spec: Billiard, length: int, name="billiard-projection") -> VerificationReport:
    """Every projection of a billiard word is a prefix of the billiard word of
    the restricted sub-cube (compared on the shorter length)."""

    def run():
        from itertools import combinations

        w = spec.prefix(length)
        bad = []
        for r in range(1, len(spec.names)):
            for sub in combinations(spec.names, r):
                proj = project(w, sub)
                direct = spec.restrict(sub).prefix(len(proj))
                if proj.letters != direct.letters:
                    bad.append("".join(sub))
        return VerificationReport(name, not bad, {"mismatched_subalphabets": bad}, [], length)

    return _timed(run)


def all_pass(name: str, reports: list[VerificationReport], note: str = "", **measured) -> VerificationReport:
    report = VerificationReport(
        name,
        all(r.passed for r in reports),
        measured,
        [],
        max((r.prefix_length or 0 for r in reports), default=None),
        sum(r.wall_time for r in reports),
        reports,
        note,
    )
    return report


# -- known witnesses ----------------------------------------------------------

# (pair, u, v, property); property "unbalance:<letter>" means |u|_a - |v|_a = 2.
TRIBONACCI_PROJECTION_WITNESSES = (
    ("12", "11211211211211", "21211211211212", "unbalance:1"),
    ("13", "1111", "3113", "unbalance:1"),
    ("23", "22322322322322", "32322322322323", "unbalance:2"),
    ("12", "2112112112112112", "1212112112112121", "sim2"),
    ("13", "311113", "131131", "sim2"),
    ("23", "3223223223223223", "2323223223223232", "sim2"),
)


def _witness_report(name: str, language: FiniteWord, u: str, v: str, prop: str) -> VerificationReport:
    def run():
        uw, vw = word(u, language.alphabet), word(v, language.alphabet)
        found = {s: language.letters.find(x.letters) >= 0 for s, x in (("u", uw), ("v", vw))}
        if prop.startswith("unbalance:"):
            a = prop.split(":")[1]
            diff = letter_count(uw, a) - letter_count(vw, a)
            holds = len(uw) == len(vw) and diff == 2
            measured = {"letter": a, "difference": diff}
        else:
            holds = uw != vw and k_binomial_equivalent(uw, vw, 2)
            measured = {"equivalent_k2": holds}
        measured["found"] = found
        missing = [s for s, ok in found.items() if not ok]
        note = f"witness {' and '.join(missing)} not found in the prefix" if missing else ""
        return VerificationReport(name, all(found.values()) and holds, measured, [{"u": u, "v": v}], len(language), note=note)

    return _timed(run)


def check_known_witnesses() -> list[VerificationReport]:
    base = tribonacci().prefix(WITNESS_BASE_LENGTH)
    reports = []
    for pair, u, v, prop in TRIBONACCI_PROJECTION_WITNESSES:
        language = project(base, pair)[:WITNESS_PROJECTED_LENGTH]
        tag = "unbalance" if prop.startswith("unbalance") else "sim2"
        reports.append(_witness_report(f"tribonacci-pi{pair}-{tag}-{len(u)}", language, u, v, prop))
    reports.append(_witness_report("thue-morse-0110-1001", thue_morse().prefix(4096), "0110", "1001", "sim2"))
    reports.append(
        _witness_report("quasi-sturmian-1221-2112", QUASI_STURMIAN_NEGATIVE.prefix(10_000), "1221", "2112", "sim2")
    )
    return reports


# -- one representative per collapsing class ---------------------------------------------------

# A 1-balanced ternary word: the rarer letter of a mechanical word colored by (ab)^omega.
BALANCED_TERNARY = Colored(Mechanical("233/610"), "1", EventuallyPeriodic((), "ab"))
FM_D3 = QuasiSturmianFM(fibonacci("12"), "b", "c", "d", 0)
FM_D4 = QuasiSturmianFM(fibonacci("12"), "ab", "c", "d", 1)
BILLIARDS = {
    2: Billiard(("1/3", "2/7"), (1, "14142/10000")),
    3: Billiard(("1/3", "2/7", "1/11"), (1, "14142/10000", "17321/10000")),
    4: Billiard(("1/3", "2/7", "1/11", "3/13"), (1, "14142/10000", "17321/10000", "22361/10000")),
}
# Prefix lengths at which the length-60 factor sets are saturated.
BILLIARD_LENGTHS = {2: 20_000, 3: 100_000, 4: 200_000}
COLORED_FIBONACCI = fibonacci_colored_by_fibonacci()
COLORED_SWAPPED = Colored(fibonacci("0a"), "a", fibonacci("21"))
QUASI_STURMIAN_NEGATIVE = SubstitutionImage(
    fibonacci("12"), Substitution.from_mapping({"1": "1221", "2": "2112"})
)


def check_balanced_ternary() -> VerificationReport:
    spec, length = BALANCED_TERNARY, 20_000
    return all_pass(
        "balanced-ternary",
        [
            check_balance(spec, 200, length, 1, name="balance-c1"),
            check_collapse(spec, 2, 60, length, name="collapse-k2"),
        ],
    )


def check_fm(spec: QuasiSturmianFM, name: str) -> VerificationReport:
    d, length = spec.alphabet.size, 20_000
    return all_pass(
        name,
        [
            check_complexity_form(spec, 40, length, 1, d - 1, name=f"complexity-n+{d - 1}"),
            check_collapse(spec, 2, 40, length, name="collapse-k2"),
        ],
    )


def check_billiard(d: int) -> VerificationReport:
    spec, length = BILLIARDS[d], BILLIARD_LENGTHS[d]
    return all_pass(
        f"billiard-d{d}",
        [
            check_projection_balance(spec, 200, length, 1, name="projection-balance-c1"),
            check_projection_matches_restriction(spec, 20_000, name="projection-is-billiard"),
            check_collapse(spec, 2, 60, length, name="collapse-k2"),
        ],
    )


def check_colored(spec: Colored = COLORED_FIBONACCI, name="colored-fibonacci") -> VerificationReport:
    def projection():
        w = spec.prefix(20_000)
        pw = project(w, ("0", "1"))
        r = analysis.imbalance(pw, 100)
        factors = {f: pw.letters.find(word(f, pw.alphabet).letters) >= 0 for f in ("000", "101")}
        measured = {"overall_c": r.overall_c, "contains": factors}
        return VerificationReport("projection-01", True, measured, [], 20_000, note="informational")

    return all_pass(name, [check_collapse(spec, 2, 40, 20_000, name="collapse-k2"), _timed(projection)])


def check_class_representatives() -> list[VerificationReport]:
    return [
        check_balanced_ternary(),
        check_fm(FM_D3, "quasi-sturmian-d3"),
        check_fm(FM_D4, "quasi-sturmian-d4"),
        *(check_billiard(d) for d in (2, 3, 4)),
        check_colored(),
    ]


def check_degenerate_billiard() -> VerificationReport:
    def run():
        try:
            Billiard((0, 0), (1, 1)).prefix(1)
        except DegenerateTrajectoryError as exc:
            return VerificationReport(
                "billiard-degenerate-tie", True, {"tied": [c + 1 for c in exc.coords], "time": str(exc.time)}, [], 1
            )
        return VerificationReport("billiard-degenerate-tie", False, {"error": "no tie detected"}, [], 1)

    return _timed(run)


# -- Thue-Morse iterates ------------------------------------------------------


def check_tm_iterate_scenario(j: int, k: int, n_max: int = 30) -> VerificationReport:
    """TM^j(Fibonacci): no k-collision up to n_max and, for j >= 1, some
    (k-1)-collision up to n_max."""
    spec = ThueMorseIterated(fibonacci(), j)
    length, stable = analysis.saturation_probe(spec, n_max, max(10_000, (1 << j) * 5_000))
    collapse = check_collapse(spec, k, n_max, length, name=f"collapse-k{k}")
    parts = [collapse]
    if j >= 1 and k >= 2:
        parts.append(check_has_collision(spec, k - 1, n_max, length, name=f"collision-k{k - 1}"))
    return all_pass(f"tm-iterate-j{j}-k{k}", parts, saturated=stable)


# -- sweeps -------------------------------------------------------------------


def lyndon_words(letters: str, max_length: int) -> list[str]:
    """Lyndon words (one representative per primitive necklace) of length
    1..max_length, in Duval's generation order."""
    out = []
    if max_length < 1:
        return out
    k = len(letters)
    w = [-1]
    while w:
        w[-1] += 1
        out.append("".join(letters[i] for i in w))
        m = len(w)
        while len(w) < max_length:
            w.append(w[len(w) - m])
        while w and w[-1] == k - 1:
            w.pop()
    return out


def _swept(name: str, members: list[Callable[[], VerificationReport]], time_budget: float | None, **measured):
    start = time.perf_counter()
    reports = []
    partial = False
    for member in members:
        if time_budget is not None and time.perf_counter() - start > time_budget:
            partial = True
            break
        reports.append(member())
    agg = all_pass(name, reports, members=len(members), completed=len(reports), partial=partial, **measured)
    if partial:
        agg.passed = False
        agg.note = "partial result: time budget exhausted"
    return agg


def _directive_member(spec: GeneratorSpec, label: str, k: int, n_max: int, length: int, gate: int | None):
    def run():
        start = time.perf_counter()
        used, stable = analysis.saturation_probe(spec, n_max, length, budget=max(length, 1 << 20))
        w = spec.prefix(used)
        measured = {"directive": label, "saturated": stable}
        if gate is not None:
            p = analysis.subword_complexity(w, gate)
            bad = _first_mismatch(p, lambda n: 2 * n + 1)
            if bad:
                measured["mismatch"] = bad
                return VerificationReport(
                    label, False, measured, [], used, time.perf_counter() - start, note="generator suspect"
                )
        collisions = analysis.find_collisions(w, k, n_max)
        measured["collision_lengths"] = [c.n for c in collisions]
        return VerificationReport(
            label, not collisions, measured, [c.as_dict() for c in collisions[:1]], used, time.perf_counter() - start
        )

    return run


def sweep_arnoux_rauzy(period_max: int, k: int = 2, n_max: int = 99, length: int = 20_000, letters: str = "123", time_budget=None):
    """All strict periodic directives (period contains every letter, one per
    rotation class) of period <= period_max."""
    directives = [p for p in lyndon_words(letters, period_max) if set(p) == set(letters)]
    members = [
        _directive_member(ArnouxRauzy(p, alphabet=tuple(letters)), f"({p})^w", k, n_max, length, None)
        for p in directives
    ]
    return _swept(f"sweep-arnoux-rauzy-p{period_max}", members, time_budget, period_max=period_max, k=k, n_max=n_max)


def sweep_cassaigne_selmer(period_max: int, k: int = 2, n_max: int = 99, length: int = 20_000, time_budget=None, gate: int = 30):
    """All periodic directives over {1,2} using both morphisms (one per
    rotation class) of period <= period_max, each gated by p(n) = 2n+1."""
    candidates = [p for p in lyndon_words("12", period_max) if set(p) == {"1", "2"}]
    directives = [p for p in candidates if cassaigne_selmer_primitive(p)]
    excluded = [f"({p})^w" for p in candidates if p not in directives]
    members = [
        _directive_member(CassaigneSelmer(p), f"({p})^w", k, n_max, length, gate) for p in directives
    ]
    return _swept(
        f"sweep-cassaigne-selmer-p{period_max}", members, time_budget,
        period_max=period_max, k=k, n_max=n_max, excluded_non_primitive=excluded,
    )


def cassaigne_selmer_primitive(period: str) -> bool:
    """A periodic directive over {1,2} is primitive unless it stays in a single
    morphism or splits cyclically into blocks 11 and 22; both squares keep
    {1,3} closed, so the limit word would never use the letter 2."""
    if len(set(period)) < 2:
        return False
    # rotate so a run starts at position 0, then inspect cyclic run lengths
    start = next(i for i in range(len(period)) if period[i] != period[i - 1])
    rotated = period[start:] + period[:start]
    runs, i = [], 0
    while i < len(rotated):
        j = i
        while j < len(rotated) and rotated[j] == rotated[i]:
            j += 1
        runs.append(j - i)
        i = j
    return any(r % 2 for r in runs)


# -- registry -----------------------------------------------------------------


@dataclass(frozen=True)
class Scenario:
    name: str
    run: Callable[[], VerificationReport]
    description: str
    long: bool = False

    def __call__(self) -> VerificationReport:
        report = self.run()
        report.name = self.name
        return report


def _group(name, fn):
    return lambda: all_pass(name, fn())


SCENARIOS: dict[str, Scenario] = {}


def _register(name, run, description, long=False):
    SCENARIOS[name] = Scenario(name, run, description, long)


_register(
    "fibonacci-collapse",
    lambda: all_pass(
        "fibonacci-collapse",
        [
            check_complexity_form(fibonacci(), 50, 10_000, 1, 1, name="p=n+1"),
            check_collapse(fibonacci(), 2, 50, 10_000, name="collapse-k2"),
        ],
    ),
    "Fibonacci: p(n)=n+1 and no 2-collision up to n=50",
)
_register(
    "tribonacci-collapse",
    lambda: check_collapse(tribonacci(), 2, 99, 20_000),
    "Tribonacci: no 2-collision up to n=99",
)
_register(
    "thue-morse-collision",
    lambda: check_has_collision(thue_morse(), 2, 4, 4096, (4, "0110", "1001")),
    "Thue-Morse: 0110 ~2 1001 is the least 2-collision",
)
_register(
    "quasi-sturmian-collision",
    lambda: check_has_collision(QUASI_STURMIAN_NEGATIVE, 2, 4, 10_000, (4, "1221", "2112")),
    "1->1221, 2->2112 applied to Fibonacci has a length-4 2-collision",
)
_register("known-witnesses", _group("known-witnesses", check_known_witnesses), "Tribonacci projection, Thue-Morse and quasi-Sturmian witnesses")
_register("balanced-ternary", check_balanced_ternary, "1-balanced ternary word: balance 1 and no 2-collision")
_register("quasi-sturmian-d3", lambda: check_fm(FM_D3, "quasi-sturmian-d3"), "complexity n+2 word: form and no 2-collision")
_register("quasi-sturmian-d4", lambda: check_fm(FM_D4, "quasi-sturmian-d4"), "complexity n+3 word: form and no 2-collision")
for _d in (2, 3, 4):
    _register(f"billiard-d{_d}", (lambda d=_d: check_billiard(d)), f"billiard word in dimension {_d}")
_register("colored-fibonacci", check_colored, "Fibonacci colored by Fibonacci: no 2-collision")
_register(
    "coloring-unbalanced-projection",
    lambda: all_pass(
        "coloring-unbalanced-projection",
        [
            check_projection_unbalanced(COLORED_SWAPPED, ("0", "1"), 60, 20_000, 2),
            check_collapse(COLORED_SWAPPED, 2, 40, 20_000, name="collapse-k2"),
        ],
    ),
    "Fibonacci colored by the letter-swapped Fibonacci word: a projection is not 1-balanced, yet no 2-collision",
)
_register("billiard-degenerate", check_degenerate_billiard, "tied crossings raise a degenerate-trajectory error")
_register(
    "rho-equals-p-d2",
    lambda: check_rho_equals_p(EventuallyPeriodic("11", "2"), 30, 200),
    "1^2 2^w: rho = p",
)
_register(
    "rho-equals-p-d3",
    lambda: check_rho_equals_p(EventuallyPeriodic("12", "3"), 30, 200),
    "1 2 3^w: rho = p",
)
_register(
    "rho-below-p-fibonacci",
    lambda: _expect_rho_below_p_at(fibonacci(), 2),
    "Fibonacci: rho(2) < p(2)",
)
_register("tm-iterate-j1-k3", lambda: check_tm_iterate_scenario(1, 3), "TM(Fibonacci): 3-collapse, some 2-collision")
_register("tm-iterate-j2-k4", lambda: check_tm_iterate_scenario(2, 4, 20), "TM^2(Fibonacci): 4-collapse, some 3-collision")
_register("sweep-arnoux-rauzy", lambda: sweep_arnoux_rauzy(3), "strict Arnoux-Rauzy directives of period <= 3")
_register("sweep-cassaigne-selmer", lambda: sweep_cassaigne_selmer(2), "Cassaigne-Selmer directives of period <= 2")
_register("sweep-arnoux-rauzy-full", lambda: sweep_arnoux_rauzy(5), "strict Arnoux-Rauzy directives of period <= 5", long=True)
_register("sweep-cassaigne-selmer-full", lambda: sweep_cassaigne_selmer(5), "Cassaigne-Selmer directives of period <= 5", long=True)


def _expect_rho_below_p_at(spec, n_expected: int) -> VerificationReport:
    inner = check_rho_equals_p(spec, 30, 10_000)
    first = inner.measured.get("first_difference", {})
    inner.passed = first.get("n") == n_expected
    inner.measured["expected_first_difference"] = n_expected
    return inner


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def run_scenario(name: str) -> VerificationReport:
    if name not in SCENARIOS:
        raise KeyError(name)
    try:
        return SCENARIOS[name]()
    except WordsError as exc:
        return VerificationReport(name, False, {"error": f"{type(exc).__name__}: {exc}"})


def run_scenarios(names: list[str], workers: int | None = None) -> list[VerificationReport]:
    """Run scenarios, in parallel when allowed; results keep the given order."""
    for name in names:
        if name not in SCENARIOS:
            raise KeyError(name)
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(names) <= 1:
        return [run_scenario(n) for n in names]
    with ProcessPoolExecutor(max_workers=min(workers, len(names))) as pool:
        return list(pool.map(run_scenario, names))


def default_scenarios(include_long: bool = False) -> list[str]:
    return [name for name, s in SCENARIOS.items() if include_long or not s.long]
