"""Finite words, scattered-subword counts and k-binomial signatures.

Letters are dense 0-based ids stored in ``bytes``; glyphs are only used for
display and parsing.  Every value here is immutable.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence, Union

U64_MAX = 2**64 - 1


class WordsError(Exception):
    """Base class for every error raised by collapse_lab."""


class DomainError(WordsError, ValueError):
    """An argument lies outside the domain of an operation."""


class ColorExhaustionError(DomainError):
    """Not enough colors to recolor every occurrence of a letter."""


class CountOverflowError(WordsError, OverflowError):
    """A count left the unsigned 64-bit range."""


def _check(value: int) -> int:
    if value > U64_MAX:
        raise CountOverflowError(f"count {value} exceeds the unsigned 64-bit range")
    return value


@dataclass(frozen=True)
class Alphabet:
    names: tuple[str, ...]

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if not names:
            raise DomainError("alphabet must have at least one letter")
        if len(set(names)) != len(names):
            raise DomainError(f"alphabet glyphs must be distinct: {names}")
        if len(names) > 255:
            raise DomainError("alphabets are limited to 255 letters")

    @classmethod
    def of(cls, glyphs: Union["Alphabet", str, Iterable[str]]) -> "Alphabet":
        if isinstance(glyphs, Alphabet):
            return glyphs
        return cls(tuple(glyphs))

    @property
    def size(self) -> int:
        return len(self.names)

    def __len__(self) -> int:
        return len(self.names)

    def __contains__(self, glyph) -> bool:
        return glyph in self.names

    def index(self, glyph: str) -> int:
        try:
            return self.names.index(glyph)
        except ValueError:
            raise DomainError(f"letter {glyph!r} is not in alphabet {self}") from None

    def letter_id(self, letter: Union[int, str]) -> int:
        """Resolve a glyph or an integer id to an id of this alphabet."""
        if isinstance(letter, str):
            return self.index(letter)
        if not 0 <= letter < self.size:
            raise DomainError(f"letter id {letter} outside alphabet of size {self.size}")
        return letter

    def is_single_glyph(self) -> bool:
        return all(len(n) == 1 for n in self.names)

    def __str__(self) -> str:
        return "{" + ",".join(self.names) + "}"


@dataclass(frozen=True)
class FiniteWord:
    alphabet: Alphabet
    letters: bytes = b""

    def __post_init__(self):
        letters = bytes(self.letters)
        object.__setattr__(self, "letters", letters)
        if letters and max(letters) >= self.alphabet.size:
            raise DomainError(
                f"letter id {max(letters)} outside alphabet of size {self.alphabet.size}"
            )

    @classmethod
    def parse(cls, text: str, alphabet=None, sep: str | None = None) -> "FiniteWord":
        """Build a word from glyphs.  Without an alphabet, the distinct glyphs in
        sorted order form it."""
        glyphs = text.split(sep) if sep else list(text)
        if sep and text == "":
            glyphs = []
        if alphabet is None:
            alphabet = Alphabet(tuple(sorted(set(glyphs))) or ("0",))
        alphabet = Alphabet.of(alphabet)
        return cls(alphabet, bytes(alphabet.index(g) for g in glyphs))

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return FiniteWord(self.alphabet, self.letters[item])
        return self.letters[item]

    def __add__(self, other: "FiniteWord") -> "FiniteWord":
        if other.alphabet != self.alphabet:
            raise DomainError("cannot concatenate words over different alphabets")
        return FiniteWord(self.alphabet, self.letters + other.letters)

    def __lt__(self, other: "FiniteWord") -> bool:
        return self.letters < other.letters

    def glyphs(self) -> list[str]:
        return [self.alphabet.names[c] for c in self.letters]

    def to_string(self, sep: str | None = None) -> str:
        if sep is None:
            if not self.alphabet.is_single_glyph():
                raise DomainError("multi-glyph alphabet needs an explicit separator")
            sep = ""
        return sep.join(self.glyphs())

    def __str__(self) -> str:
        return self.to_string("" if self.alphabet.is_single_glyph() else ",")

    def __repr__(self) -> str:
        return f"FiniteWord({str(self)!r}, alphabet={self.alphabet})"

    def relabel(self, alphabet) -> "FiniteWord":
        """Same letter ids, different glyphs."""
        alphabet = Alphabet.of(alphabet)
        if alphabet.size != self.alphabet.size:
            raise DomainError("relabelling needs an alphabet of the same size")
        return FiniteWord(alphabet, self.letters)


def word(text: str, alphabet=None, sep: str | None = None) -> FiniteWord:
    return FiniteWord.parse(text, alphabet, sep)


def _as_pattern(w: FiniteWord, u: Union[FiniteWord, str, Sequence[int]]) -> bytes:
    if isinstance(u, FiniteWord):
        if u.alphabet != w.alphabet:
            return bytes(w.alphabet.index(g) for g in u.glyphs())
        return u.letters
    if isinstance(u, str):
        return bytes(w.alphabet.index(g) for g in u)
    return bytes(w.alphabet.letter_id(c) for c in u)


def letter_count(w: FiniteWord, a: Union[int, str]) -> int:
    return w.letters.count(w.alphabet.letter_id(a))


def factor_count(w: FiniteWord, u) -> int:
    """Occurrences of ``u`` as a factor, overlaps included."""
    pat = _as_pattern(w, u)
    if not pat:
        raise DomainError("factor_count needs a nonempty pattern")
    data, count, start = w.letters, 0, 0
    while True:
        i = data.find(pat, start)
        if i < 0:
            return count
        count += 1
        start = i + 1


def binomial(w: FiniteWord, u) -> int:
    """Number of occurrences of ``u`` in ``w`` as a scattered subword."""
    pat = _as_pattern(w, u)
    m = len(pat)
    # dp[j] = occurrences of pat[:j] in the part of w scanned so far
    dp = [1] + [0] * m
    for c in w.letters:
        for j in range(m, 0, -1):
            if pat[j - 1] == c:
                dp[j] += dp[j - 1]
    _check(max(dp))
    return dp[m]


@lru_cache(maxsize=None)
def patterns(d: int, k: int) -> tuple[bytes, ...]:
    """All nonempty patterns of length <= k in canonical order."""
    out = []
    for m in range(1, k + 1):
        out.extend(bytes(p) for p in product(range(d), repeat=m))
    return tuple(out)


def signature_size(d: int, k: int) -> int:
    return sum(d**m for m in range(1, k + 1))


def pattern_index(pattern: bytes, d: int) -> int:
    m = len(pattern)
    offset = sum(d**j for j in range(1, m))
    rank = 0
    for c in pattern:
        rank = rank * d + c
    return offset + rank


@lru_cache(maxsize=None)
def _extend_plan(d: int, k: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    # Per letter a: (index of x, index of x minus its last letter) for every x
    # ending in a, longest first so each update reads pre-extension values.
    # Index -1 stands for the empty pattern.
    plans = []
    for a in range(d):
        steps = []
        for m in range(k, 0, -1):
            for head in product(range(d), repeat=m - 1):
                x = bytes(head) + bytes([a])
                y = pattern_index(bytes(head), d) if head else -1
                steps.append((pattern_index(x, d), y))
        plans.append(tuple(steps))
    return tuple(plans)


@dataclass(frozen=True)
class BinomialSignature:
    k: int
    d: int
    counts: tuple[int, ...]
    word_length: int

    def __post_init__(self):
        if self.k < 1:
            raise DomainError("signature order k must be >= 1")
        if len(self.counts) != signature_size(self.d, self.k):
            raise DomainError("signature vector has the wrong length")

    @classmethod
    def empty(cls, d: int, k: int) -> "BinomialSignature":
        return cls(k, d, (0,) * signature_size(d, k), 0)

    def count(self, pattern, alphabet: Alphabet | None = None) -> int:
        """Count for a pattern given as letter ids, or as glyphs with ``alphabet``."""
        if isinstance(pattern, str):
            if alphabet is None:
                raise DomainError("a glyph pattern needs its alphabet")
            pattern = [alphabet.index(g) for g in pattern]
        pattern = bytes(pattern)
        if not pattern:
            return 1
        if len(pattern) > self.k:
            raise DomainError(f"pattern longer than signature order {self.k}")
        return self.counts[pattern_index(pattern, self.d)]

    def truncate(self, k: int) -> "BinomialSignature":
        """Signature of the same word at a lower order."""
        if not 1 <= k <= self.k:
            raise DomainError(f"cannot truncate order {self.k} to {k}")
        return BinomialSignature(k, self.d, self.counts[: signature_size(self.d, k)], self.word_length)

    def as_dict(self, alphabet: Alphabet | None = None) -> dict[str, int]:
        names = alphabet.names if alphabet else [str(i) for i in range(self.d)]
        return {
            "".join(names[c] for c in p): n for p, n in zip(patterns(self.d, self.k), self.counts)
        }


def binomial_signature(w: FiniteWord, k: int) -> BinomialSignature:
    d = w.alphabet.size
    sig = BinomialSignature.empty(d, k)
    counts = list(sig.counts)
    plans = _extend_plan(d, k)
    for a in w.letters:
        for x, y in plans[a]:
            counts[x] += counts[y] if y >= 0 else 1
    for c in counts:
        _check(c)
    return BinomialSignature(k, d, tuple(counts), len(w))


def extend_counts(counts: list[int], a: int, d: int, k: int) -> None:
    """In-place signature update for appending letter id ``a``."""
    for x, y in _extend_plan(d, k)[a]:
        v = counts[x] + (counts[y] if y >= 0 else 1)
        if v > U64_MAX:
            raise CountOverflowError(f"count {v} exceeds the unsigned 64-bit range")
        counts[x] = v


def signature_extend(sig: BinomialSignature, a: Union[int, str], alphabet: Alphabet | None = None) -> BinomialSignature:
    if isinstance(a, str):
        if alphabet is None:
            raise DomainError("a glyph letter needs its alphabet")
        a = alphabet.index(a)
    if not 0 <= a < sig.d:
        raise DomainError(f"letter id {a} outside alphabet of size {sig.d}")
    counts = list(sig.counts)
    extend_counts(counts, a, sig.d, sig.k)
    return BinomialSignature(sig.k, sig.d, tuple(counts), sig.word_length + 1)


def k_binomial_equivalent(u: FiniteWord, v: FiniteWord, k: int) -> bool:
    if u.alphabet != v.alphabet:
        raise DomainError("k-binomial equivalence needs a common alphabet")
    if len(u) != len(v):
        return False
    return binomial_signature(u, k) == binomial_signature(v, k)


def abelian_equivalent(u: FiniteWord, v: FiniteWord) -> bool:
    return k_binomial_equivalent(u, v, 1)


def _subalphabet(alphabet: Alphabet, sub) -> list[int]:
    ids = sorted({alphabet.letter_id(a) for a in sub})
    if not ids:
        raise DomainError("projection onto an empty subalphabet")
    return ids


def project(w: FiniteWord, sub) -> FiniteWord:
    """Erase every letter outside ``sub``; the result lives over ``sub``
    (kept in the order of the original alphabet)."""
    ids = _subalphabet(w.alphabet, sub)
    table = bytearray(range(256))
    for new, old in enumerate(ids):
        table[old] = new
    erased = bytes(c for c in range(w.alphabet.size) if c not in ids)
    letters = w.letters.translate(None, erased).translate(bytes(table))
    return FiniteWord(Alphabet(tuple(w.alphabet.names[i] for i in ids)), letters)


def colored_alphabet(base: Alphabet, a: int, colors: Alphabet) -> Alphabet:
    if set(base.names) & set(colors.names):
        raise DomainError(f"alphabets {base} and {colors} are not disjoint")
    return Alphabet(tuple(n for i, n in enumerate(base.names) if i != a) + colors.names)


def color_finite(w0: FiniteWord, a: Union[int, str], colors: FiniteWord) -> FiniteWord:
    """Replace the i-th occurrence of ``a`` in ``w0`` by the i-th letter of ``colors``."""
    a = w0.alphabet.letter_id(a)
    out_alpha = colored_alphabet(w0.alphabet, a, colors.alphabet)
    needed = w0.letters.count(a)
    if len(colors) < needed:
        raise ColorExhaustionError(
            f"{needed} occurrences of {w0.alphabet.names[a]!r} but only {len(colors)} colors"
        )
    shift_base = bytes(c - (c > a) for c in range(w0.alphabet.size))
    offset = w0.alphabet.size - 1
    out = bytearray(len(w0))
    k = 0
    for i, c in enumerate(w0.letters):
        if c == a:
            out[i] = offset + colors.letters[k]
            k += 1
        else:
            out[i] = shift_base[c]
    return FiniteWord(out_alpha, bytes(out))


def distinct_factors(w: FiniteWord, n: int) -> set[FiniteWord]:
    if n < 0:
        raise DomainError("factor length must be nonnegative")
    if n > len(w):
        return set()
    data = w.letters
    raw = {data[i : i + n] for i in range(len(data) - n + 1)}
    return {FiniteWord(w.alphabet, f) for f in raw}
