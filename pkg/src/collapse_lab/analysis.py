"""Complexity functions, k-binomial class partitions, balance and projection
reports, and reconstruction of a word from its binary projections.

All quantities are exact for the finite prefix they are computed on and only
lower bounds for the infinite word it comes from.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

import numpy as np

from .generators import GeneratorSpec
from .words import (
    Alphabet,
    BinomialSignature,
    DomainError,
    FiniteWord,
    extend_counts,
    project,
    signature_size,
)


class InconsistentProjectionFamily(DomainError):
    """No word has the given family of binary projections."""


def _check_nmax(w: FiniteWord, n_max: int) -> None:
    if n_max < 0:
        raise DomainError("n_max must be nonnegative")
    if n_max > len(w):
        raise DomainError(f"n_max={n_max} exceeds the prefix length {len(w)}")


def factor_signatures(w: FiniteWord, k: int, n_max: int) -> list[dict[bytes, tuple[int, ...]]]:
    """Map every distinct factor of length 1..n_max to its order-k signature
    counts.  Entry n of the returned list holds the length-n factors.

    Factors are deduplicated first: each distinct length-n_max window (plus the
    short tail suffixes) is walked letter by letter, reusing the signature of
    the longest prefix already seen.
    """
    _check_nmax(w, n_max)
    if k < 1:
        raise DomainError("signature order k must be >= 1")
    d = w.alphabet.size
    size = signature_size(d, k)
    data = w.letters
    tables: list[dict[bytes, tuple[int, ...]]] = [dict() for _ in range(n_max + 1)]
    if n_max == 0:
        return tables
    last = len(data) - n_max
    seeds = {data[i : i + n_max] for i in range(last + 1)}
    seeds.update(data[i:] for i in range(last + 1, len(data)))
    zero = (0,) * size
    for seed in sorted(seeds):
        n = 1
        while n <= len(seed) and seed[:n] in tables[n]:
            n += 1
        if n > len(seed):
            continue
        counts = list(tables[n - 1][seed[: n - 1]]) if n > 1 else list(zero)
        for m in range(n, len(seed) + 1):
            extend_counts(counts, seed[m - 1], d, k)
            tables[m][seed[:m]] = tuple(counts)
    return tables


def _class_count(table: dict[bytes, tuple[int, ...]], size: int) -> int:
    return len({sig[:size] for sig in table.values()})


def subword_complexity(w: FiniteWord, n_max: int) -> list[int]:
    """p(n) for n = 1..n_max (index 0 holds n = 1)."""
    _check_nmax(w, n_max)
    data = w.letters
    return [len({data[i : i + n] for i in range(len(data) - n + 1)}) for n in range(1, n_max + 1)]


def k_binomial_complexity(w: FiniteWord, k: int, n_max: int) -> list[int]:
    tables = factor_signatures(w, k, n_max)
    size = signature_size(w.alphabet.size, k)
    return [_class_count(tables[n], size) for n in range(1, n_max + 1)]


def abelian_complexity(w: FiniteWord, n_max: int) -> list[int]:
    return k_binomial_complexity(w, 1, n_max)


@dataclass(frozen=True)
class Collision:
    """Two distinct factors of length n that are k-binomially equivalent."""

    n: int
    k: int
    u: FiniteWord
    v: FiniteWord

    def as_dict(self) -> dict:
        return {"n": self.n, "k": self.k, "u": str(self.u), "v": str(self.v)}


def _least_pair(table: dict[bytes, tuple[int, ...]], size: int):
    groups: dict[tuple[int, ...], list[bytes]] = {}
    for f, sig in table.items():
        groups.setdefault(sig[:size], []).append(f)
    best = None
    for members in groups.values():
        if len(members) > 1:
            members.sort()
            pair = (members[0], members[1])
            if best is None or pair < best:
                best = pair
    return best


def _collisions_from(tables, alphabet: Alphabet, k: int, n_max: int) -> list[Collision]:
    size = signature_size(alphabet.size, k)
    out = []
    for n in range(1, n_max + 1):
        pair = _least_pair(tables[n], size)
        if pair is not None:
            out.append(Collision(n, k, FiniteWord(alphabet, pair[0]), FiniteWord(alphabet, pair[1])))
    return out


def find_collisions(w: FiniteWord, k: int, n_max: int) -> list[Collision]:
    """Lexicographically least colliding pair for every length n <= n_max
    with b^k(n) < p(n); empty iff the prefix shows no k-collision."""
    return _collisions_from(factor_signatures(w, k, n_max), w.alphabet, k, n_max)


@dataclass(frozen=True)
class ComplexityRow:
    n: int
    p: int
    rho: int
    b: dict[int, int]

    def as_dict(self) -> dict:
        row = {"n": self.n, "p": self.p, "rho": self.rho}
        row.update({f"b{k}": v for k, v in sorted(self.b.items())})
        return row


@dataclass(frozen=True)
class ComplexityReport:
    n_max: int
    prefix_length: int
    ks: tuple[int, ...]
    rows: tuple[ComplexityRow, ...]
    collisions: tuple[Collision, ...] = ()
    saturated: bool | None = None

    def column(self, name: str) -> list[int]:
        if name in ("p", "rho"):
            return [getattr(r, name) for r in self.rows]
        return [r.b[int(name.lstrip("b"))] for r in self.rows]

    def chain_holds(self) -> bool:
        """rho = b^1 <= b^k <= b^(k+1) <= p on every row."""
        for r in self.rows:
            values = [r.rho] + [r.b[k] for k in sorted(r.b)] + [r.p]
            if 1 in r.b and r.b[1] != r.rho:
                return False
            if any(a > b for a, b in zip(values, values[1:])):
                return False
        return True

    def as_dict(self) -> dict:
        return {
            "n_max": self.n_max,
            "prefix_length": self.prefix_length,
            "ks": list(self.ks),
            "saturated": self.saturated,
            "rows": [r.as_dict() for r in self.rows],
            "collisions": [c.as_dict() for c in self.collisions],
        }


def complexity_report(
    w: FiniteWord,
    ks: Iterable[int],
    n_max: int,
    witnesses: bool = True,
    saturated: bool | None = None,
) -> ComplexityReport:
    ks = tuple(sorted(set(ks)))
    if not ks or ks[0] < 1:
        raise DomainError("complexity orders must be >= 1")
    k_top = ks[-1]
    d = w.alphabet.size
    tables = factor_signatures(w, k_top, n_max)
    rows = []
    for n in range(1, n_max + 1):
        table = tables[n]
        b = {k: _class_count(table, signature_size(d, k)) for k in ks}
        rows.append(ComplexityRow(n, len(table), _class_count(table, d), b))
    collisions: list[Collision] = []
    if witnesses:
        for k in ks:
            collisions.extend(_collisions_from(tables, w.alphabet, k, n_max))
    return ComplexityReport(n_max, len(w), ks, tuple(rows), tuple(collisions), saturated)


@dataclass(frozen=True)
class ClassPartition:
    n: int
    k: int
    groups: tuple[tuple[FiniteWord, ...], ...]
    signatures: tuple[BinomialSignature, ...]

    def __len__(self) -> int:
        return len(self.groups)

    def group_of(self, u: FiniteWord) -> tuple[FiniteWord, ...] | None:
        for g in self.groups:
            if u in g:
                return g
        return None


def classes(w: FiniteWord, k: int, n: int) -> ClassPartition:
    """The length-n factors of ``w`` partitioned into k-binomial classes,
    groups and members in lexicographic order."""
    table = factor_signatures(w, k, n)[n] if n else {b"": ()}
    d = w.alphabet.size
    grouped: dict[tuple[int, ...], list[bytes]] = {}
    for f, sig in table.items():
        grouped.setdefault(sig, []).append(f)
    ordered = sorted((sorted(members), sig) for sig, members in grouped.items())
    groups = tuple(tuple(FiniteWord(w.alphabet, f) for f in members) for members, _ in ordered)
    sigs = tuple(
        BinomialSignature(k, d, sig if sig else (0,) * signature_size(d, k), n) for _, sig in ordered
    )
    return ClassPartition(n, k, groups, sigs)


@dataclass(frozen=True)
class BalanceReport:
    n_max: int
    prefix_length: int
    alphabet: Alphabet
    # per letter glyph: imbalance for window lengths 1..n_max
    per_letter: dict[str, tuple[int, ...]]
    overall_c: int
    witness: tuple[str, int, FiniteWord, FiniteWord] | None = None

    def imbalance(self, letter: str, n: int) -> int:
        return self.per_letter[letter][n - 1]

    def least_window(self, c: int) -> int | None:
        """Least window length at which some letter reaches imbalance c."""
        for n in range(1, self.n_max + 1):
            if any(v[n - 1] >= c for v in self.per_letter.values()):
                return n
        return None

    def as_dict(self) -> dict:
        out = {
            "n_max": self.n_max,
            "prefix_length": self.prefix_length,
            "overall_c": self.overall_c,
            "per_letter": {a: list(v) for a, v in self.per_letter.items()},
        }
        if self.witness:
            a, n, u, v = self.witness
            out["witness"] = {"letter": a, "n": n, "u": str(u), "v": str(v)}
        return out


def _window_counts(w: FiniteWord) -> np.ndarray:
    data = np.frombuffer(w.letters, dtype=np.uint8)
    onehot = data[None, :] == np.arange(w.alphabet.size, dtype=np.uint8)[:, None]
    cum = np.zeros((w.alphabet.size, len(w) + 1), dtype=np.int64)
    np.cumsum(onehot, axis=1, out=cum[:, 1:])
    return cum


def imbalance(w: FiniteWord, n_max: int | None = None) -> BalanceReport:
    """Exact per-letter, per-window-length imbalance of a finite word."""
    if n_max is None:
        n_max = len(w)
    _check_nmax(w, n_max)
    cum = _window_counts(w)
    per = np.zeros((w.alphabet.size, n_max), dtype=np.int64)
    best = (0, None)
    for n in range(1, n_max + 1):
        windows = cum[:, n:] - cum[:, :-n]
        hi, lo = windows.max(axis=1), windows.min(axis=1)
        spread = hi - lo
        per[:, n - 1] = spread
        a = int(spread.argmax())
        if spread[a] > best[0]:
            i, j = int(windows[a].argmax()), int(windows[a].argmin())
            best = (int(spread[a]), (w.alphabet.names[a], n, w[i : i + n], w[j : j + n]))
    per_letter = {name: tuple(int(x) for x in per[i]) for i, name in enumerate(w.alphabet.names)}
    return BalanceReport(n_max, len(w), w.alphabet, per_letter, best[0], best[1])


def imbalance_witness(w: FiniteWord, letter, n: int) -> tuple[FiniteWord, FiniteWord]:
    """Windows of length n with the most and the fewest occurrences of ``letter``."""
    a = w.alphabet.letter_id(letter)
    _check_nmax(w, n)
    windows = _window_counts(w)[a]
    windows = windows[n:] - windows[:-n]
    i, j = int(windows.argmax()), int(windows.argmin())
    return w[i : i + n], w[j : j + n]


def letter_pairs(alphabet: Alphabet) -> list[tuple[str, str]]:
    return list(combinations(alphabet.names, 2))


def binary_projection_imbalance(w: FiniteWord, n_max: int) -> dict[tuple[str, str], BalanceReport]:
    if w.alphabet.size < 2:
        raise DomainError("binary projections need at least two letters")
    out = {}
    for pair in letter_pairs(w.alphabet):
        proj = project(w, pair)
        out[pair] = imbalance(proj, min(n_max, len(proj)))
    return out


@dataclass(frozen=True)
class ProjectionFamily:
    """Binary projections of one word, keyed by letter pairs in alphabet order."""

    alphabet: Alphabet
    words: Mapping[tuple[str, str], FiniteWord]

    @classmethod
    def of(cls, u: FiniteWord) -> "ProjectionFamily":
        return cls(u.alphabet, {pair: project(u, pair) for pair in letter_pairs(u.alphabet)})

    @classmethod
    def from_strings(cls, family: Mapping, alphabet=None) -> "ProjectionFamily":
        """Accept keys as 2-glyph strings, tuples or frozensets and values as
        glyph strings or words."""
        words = {}
        for key, value in family.items():
            pair = tuple(key)
            if len(set(pair)) != 2:
                raise DomainError(f"projection key {key!r} is not a pair of distinct letters")
            glyphs = value.glyphs() if isinstance(value, FiniteWord) else list(value)
            if set(glyphs) - set(pair):
                raise InconsistentProjectionFamily(
                    f"projection for {''.join(pair)} contains foreign letters: {''.join(glyphs)}"
                )
            words[pair] = glyphs
        if alphabet is None:
            alphabet = Alphabet(tuple(sorted({g for pair in words for g in pair})))
        alphabet = Alphabet.of(alphabet)
        normalized = {}
        for pair, glyphs in words.items():
            key = tuple(sorted(pair, key=alphabet.index))
            if key in normalized:
                raise DomainError(f"pair {''.join(key)} given twice")
            normalized[key] = FiniteWord(Alphabet(key), bytes(key.index(g) for g in glyphs))
        return cls(alphabet, normalized)


def reconstruct(family: ProjectionFamily | Mapping, alphabet=None) -> FiniteWord:
    """The unique word whose binary projections are ``family``."""
    if not isinstance(family, ProjectionFamily):
        family = ProjectionFamily.from_strings(family, alphabet)
    alpha = family.alphabet
    d = alpha.size
    if d < 2:
        raise DomainError("reconstruction needs an alphabet of size >= 2")
    streams: dict[tuple[int, int], list[int]] = {}
    for i, j in combinations(range(d), 2):
        key = (alpha.names[i], alpha.names[j])
        if key not in family.words:
            raise DomainError(f"projection family misses the pair {''.join(key)}")
        proj = family.words[key]
        streams[(i, j)] = [alpha.index(g) for g in proj.glyphs()]
    extra = set(family.words) - {(alpha.names[i], alpha.names[j]) for i, j in streams}
    if extra:
        raise DomainError(f"pairs outside the alphabet: {sorted(extra)}")

    # each letter must occur equally often in every pair that contains it
    totals: dict[int, set[int]] = {i: set() for i in range(d)}
    for (i, j), s in streams.items():
        totals[i].add(s.count(i))
        totals[j].add(s.count(j))
    for i, seen in totals.items():
        if len(seen) > 1:
            raise InconsistentProjectionFamily(
                f"letter {alpha.names[i]!r} occurs {sorted(seen)} times across its projections"
            )

    pos = {key: 0 for key in streams}

    def head(i: int, j: int) -> int | None:
        key = (i, j) if i < j else (j, i)
        s = streams[key]
        return s[pos[key]] if pos[key] < len(s) else None

    length = sum(next(iter(totals[i])) for i in range(d))
    out = bytearray()
    for step in range(length):
        eligible = [i for i in range(d) if all(head(i, j) == i for j in range(d) if j != i)]
        if len(eligible) != 1:
            raise InconsistentProjectionFamily(
                f"{len(eligible)} candidate letters at position {step}"
            )
        i = eligible[0]
        out.append(i)
        for j in range(d):
            if j != i:
                key = (i, j) if i < j else (j, i)
                pos[key] += 1
    if any(pos[key] != len(s) for key, s in streams.items()):
        raise InconsistentProjectionFamily("symbols left over after reconstruction")
    return FiniteWord(alpha, bytes(out))


def _window_set(spec: GeneratorSpec, n: int, length: int) -> set[bytes]:
    data = spec.prefix(length).letters
    return {data[i : i + n] for i in range(len(data) - n + 1)}


def saturation_probe(
    spec: GeneratorSpec, n_max: int, initial_length: int, budget: int = 1 << 20
) -> tuple[int, bool]:
    """Double the prefix length until the length-<=n_max factor sets stop
    changing.  Returns (final length, stable).  Comparing the length-n_max
    windows suffices: every shorter factor is a prefix or a tail suffix of one.
    """
    if initial_length < max(n_max, 1):
        raise DomainError("the initial length must be at least n_max")
    length = initial_length
    current = _window_set(spec, n_max, length)
    while 2 * length <= budget:
        bigger = _window_set(spec, n_max, 2 * length)
        if bigger == current:
            return length, True
        length, current = 2 * length, bigger
    return length, False


def is_saturated(spec: GeneratorSpec, n_max: int, length: int) -> bool:
    """Whether the first half of the prefix already shows every length-n_max factor."""
    half = length // 2
    if half < n_max:
        return False
    return _window_set(spec, n_max, half) == _window_set(spec, n_max, length)
