"""Prefixes of infinite words: morphic fixed points, mechanical and standard
Sturmian words, Arnoux-Rauzy and Cassaigne-Selmer words, hypercubic billiard
codings, and the projection / coloring / substitution combinators.

Every spec is an immutable dataclass exposing ``alphabet`` and
``prefix(length) -> FiniteWord``.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Union

from .words import (
    Alphabet,
    DomainError,
    FiniteWord,
    color_finite,
    colored_alphabet,
    project,
)

RationalLike = Union[Fraction, int, str]

# Cap on the base prefix length explored by combinators that cannot predict
# how much input they need (projections, erasing substitutions).
MAX_BASE_LENGTH = 1 << 26


class DegenerateTrajectoryError(DomainError):
    """The billiard ball hits a lower-dimensional face (two crossings tie)."""

    def __init__(self, coords: tuple[int, ...], time: Fraction):
        self.coords = coords
        self.time = time
        names = ", ".join(str(c + 1) for c in coords)
        super().__init__(f"degenerate trajectory: coordinates {names} cross simultaneously at t={time}")


class DirectiveTooShortError(DomainError):
    pass


class NonConvergentDirectiveError(DomainError):
    pass


def rational(value: RationalLike) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise DomainError("use exact rationals ('p/q' strings or Fractions), not floats")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"not a rational: {value!r}") from exc


def _glyphs(value) -> tuple[str, ...]:
    if isinstance(value, FiniteWord):
        return tuple(value.glyphs())
    return tuple(value)


def _ids(alphabet: Alphabet, glyphs) -> bytes:
    return bytes(alphabet.index(g) for g in glyphs)


def _default_alphabet(*glyph_groups) -> Alphabet:
    seen = sorted({g for group in glyph_groups for g in group})
    return Alphabet(tuple(seen) or ("0",))


def _numbered(d: int) -> Alphabet:
    return Alphabet(tuple(str(i) for i in range(1, d + 1)))


class GeneratorSpec:
    """Base class of every infinite-word description."""

    alphabet: Alphabet

    def prefix(self, length: int) -> FiniteWord:
        if length < 0:
            raise DomainError("prefix length must be nonnegative")
        letters = self._letters(length)
        assert len(letters) == length, (type(self).__name__, len(letters), length)
        return FiniteWord(self.alphabet, letters)

    def _letters(self, length: int) -> bytes:
        raise NotImplementedError


def prefix(spec: GeneratorSpec, length: int) -> FiniteWord:
    return spec.prefix(length)


@dataclass(frozen=True)
class Substitution:
    """Letter-to-word map.  ``images`` is keyed by domain glyph."""

    domain: Alphabet
    codomain: Alphabet
    images: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "domain", Alphabet.of(self.domain))
        object.__setattr__(self, "codomain", Alphabet.of(self.codomain))
        if len(self.images) != self.domain.size:
            raise DomainError("a substitution needs one image per domain letter")
        images = tuple(_glyphs(img) for img in self.images)
        for img in images:
            for g in img:
                self.codomain.index(g)
        object.__setattr__(self, "images", images)

    @classmethod
    def from_mapping(cls, mapping: dict, domain=None, codomain=None) -> "Substitution":
        if domain is None:
            domain = Alphabet(tuple(mapping))
        domain = Alphabet.of(domain)
        if codomain is None:
            codomain = _default_alphabet(domain.names, *[_glyphs(v) for v in mapping.values()])
        try:
            images = tuple(_glyphs(mapping[a]) for a in domain.names)
        except KeyError as exc:
            raise DomainError(f"substitution has no image for letter {exc.args[0]!r}") from None
        return cls(domain, codomain, images)

    def image_bytes(self) -> tuple[bytes, ...]:
        return tuple(_ids(self.codomain, img) for img in self.images)

    def apply_letters(self, letters: bytes) -> bytes:
        table = self.image_bytes()
        return b"".join([table[c] for c in letters])

    def as_mapping(self) -> dict[str, str]:
        return {a: "".join(img) for a, img in zip(self.domain.names, self.images)}


def morphic_apply(sub: Substitution, w: FiniteWord) -> FiniteWord:
    if w.alphabet != sub.domain:
        raise DomainError(f"word over {w.alphabet} but substitution domain is {sub.domain}")
    return FiniteWord(sub.codomain, sub.apply_letters(w.letters))


@dataclass(frozen=True)
class Morphic(GeneratorSpec):
    """Fixed point of a prolongable substitution, grown from ``seed``."""

    sub: Substitution
    seed: str

    def __post_init__(self):
        if self.sub.domain != self.sub.codomain:
            raise DomainError("a fixed point needs a substitution from an alphabet to itself")
        img = self.sub.images[self.sub.domain.index(self.seed)]
        if len(img) < 2 or img[0] != self.seed:
            raise DomainError(f"substitution is not prolongable on {self.seed!r}")

    @property
    def alphabet(self) -> Alphabet:
        return self.sub.domain

    def _letters(self, length: int) -> bytes:
        w = bytes([self.alphabet.index(self.seed)])
        table = self.sub.image_bytes()
        while len(w) < length:
            grown = b"".join([table[c] for c in w])
            if len(grown) <= len(w):
                raise DomainError("fixed-point iteration stopped growing")
            w = grown[:length]
        return w[:length]


@dataclass(frozen=True)
class EventuallyPeriodic(GeneratorSpec):
    preperiod: tuple[str, ...]
    period: tuple[str, ...]
    alphabet: Alphabet = None

    def __post_init__(self):
        object.__setattr__(self, "preperiod", _glyphs(self.preperiod))
        object.__setattr__(self, "period", _glyphs(self.period))
        if not self.period:
            raise DomainError("the period of an eventually periodic word must be nonempty")
        alpha = self.alphabet or _default_alphabet(self.preperiod, self.period)
        object.__setattr__(self, "alphabet", Alphabet.of(alpha))

    def _letters(self, length: int) -> bytes:
        pre = _ids(self.alphabet, self.preperiod)
        per = _ids(self.alphabet, self.period)
        if length <= len(pre):
            return pre[:length]
        rest = length - len(pre)
        return pre + (per * (rest // len(per) + 1))[:rest]


def mechanical_prefix(alpha: RationalLike, rho: RationalLike, length: int) -> FiniteWord:
    return Mechanical(alpha, rho).prefix(length)


@dataclass(frozen=True)
class Mechanical(GeneratorSpec):
    """Lower mechanical word: letter n is floor(a(n+1)+r) - floor(an+r)."""

    alpha: Fraction
    rho: Fraction = Fraction(0)
    alphabet: Alphabet = field(default_factory=lambda: Alphabet(("0", "1")))

    def __post_init__(self):
        object.__setattr__(self, "alpha", rational(self.alpha))
        object.__setattr__(self, "rho", rational(self.rho))
        object.__setattr__(self, "alphabet", Alphabet.of(self.alphabet))
        if not 0 <= self.alpha <= 1:
            raise DomainError("mechanical slope must lie in [0, 1]")
        if self.alphabet.size != 2:
            raise DomainError("mechanical words are binary")

    def _letters(self, length: int) -> bytes:
        p, q = self.alpha.numerator, self.alpha.denominator
        r, s = self.rho.numerator, self.rho.denominator
        # floor(p n / q + r / s) = (p s n + r q) // (q s)
        num, den = p * s, q * s
        off = r * q
        floors = [(num * n + off) // den for n in range(length + 1)]
        return bytes(floors[n + 1] - floors[n] for n in range(length))


def standard_sturmian_prefix(directive, length: int, periodic: bool = True) -> FiniteWord:
    return StandardSturmian(tuple(directive), periodic).prefix(length)


@dataclass(frozen=True)
class StandardSturmian(GeneratorSpec):
    """Limit of s_{-1}=1, s_0=0, s_k = s_{k-1}^{a_k} s_{k-2}.

    The directive is repeated forever when ``periodic`` is set; otherwise
    running out of entries is an error.
    """

    directive: tuple[int, ...]
    periodic: bool = True
    alphabet: Alphabet = field(default_factory=lambda: Alphabet(("0", "1")))

    def __post_init__(self):
        object.__setattr__(self, "directive", tuple(int(a) for a in self.directive))
        object.__setattr__(self, "alphabet", Alphabet.of(self.alphabet))
        if not self.directive or min(self.directive) < 1:
            raise DomainError("standard Sturmian directive entries must be positive")

    def _letters(self, length: int) -> bytes:
        older, current = b"\x01", b"\x00"
        i = 0
        while len(current) < length:
            if i >= len(self.directive) and not self.periodic:
                raise DirectiveTooShortError(
                    f"finite directive exhausted at length {len(current)}; "
                    f"{length - len(current)} more letters required"
                )
            a = self.directive[i % len(self.directive)]
            older, current = current, current * a + older
            i += 1
        return current[:length]


def palindromic_closure(w: FiniteWord) -> FiniteWord:
    """Shortest palindrome having ``w`` as a prefix."""
    data = w.letters
    n = len(data)
    if n == 0:
        return w
    # Border of rev(w) # w gives the longest palindromic suffix of w.
    s = data[::-1] + b"\xff" + data
    fail = [0] * len(s)
    for i in range(1, len(s)):
        j = fail[i - 1]
        while j and s[i] != s[j]:
            j = fail[j - 1]
        if s[i] == s[j]:
            j += 1
        fail[i] = j
    pal_suffix = fail[-1]
    return FiniteWord(w.alphabet, data + data[: n - pal_suffix][::-1])


def _directive_at(preperiod: tuple, period: tuple, n: int):
    if n < len(preperiod):
        return preperiod[n]
    return period[(n - len(preperiod)) % len(period)]


def arnoux_rauzy_prefix(period, length: int, preperiod=(), alphabet=None) -> FiniteWord:
    return ArnouxRauzy(_glyphs(period), _glyphs(preperiod), alphabet).prefix(length)


@dataclass(frozen=True)
class ArnouxRauzy(GeneratorSpec):
    """Episturmian word directed by preperiod . period^omega (iterated
    palindromic closure)."""

    period: tuple[str, ...]
    preperiod: tuple[str, ...] = ()
    alphabet: Alphabet = None

    def __post_init__(self):
        object.__setattr__(self, "period", _glyphs(self.period))
        object.__setattr__(self, "preperiod", _glyphs(self.preperiod))
        if not self.period:
            raise DomainError("directive period must be nonempty")
        alpha = self.alphabet or _default_alphabet(self.preperiod, self.period)
        object.__setattr__(self, "alphabet", Alphabet.of(alpha))
        for g in self.preperiod + self.period:
            self.alphabet.index(g)

    @property
    def strict(self) -> bool:
        return set(self.period) == set(self.alphabet.names)

    def _letters(self, length: int) -> bytes:
        # Justin's formula: Pal(wx) = Pal(w) x Pal(w) if x is new in w, else
        # Pal(w) Pal(w1)^-1 Pal(w) where w1 precedes the last x in w.
        pal = bytearray()
        pal_len = [0]
        last: dict[int, int] = {}
        n = 0
        while len(pal) < length:
            x = self.alphabet.index(_directive_at(self.preperiod, self.period, n))
            if x in last:
                cut = pal_len[last[x]]
                pal.extend(pal[cut:])
            else:
                old = bytes(pal)
                pal.append(x)
                pal.extend(old)
            last[x] = n
            n += 1
            pal_len.append(len(pal))
        return bytes(pal[:length])


CASSAIGNE_MORPHISMS = {
    "1": {"1": "1", "2": "13", "3": "2"},
    "2": {"1": "2", "2": "13", "3": "3"},
}


def cassaigne_selmer_prefix(period, length: int, preperiod=()) -> FiniteWord:
    return CassaigneSelmer(_glyphs(period), _glyphs(preperiod)).prefix(length)


@dataclass(frozen=True)
class CassaigneSelmer(GeneratorSpec):
    """C-adic word directed by preperiod . period^omega over the two
    Cassaigne morphisms (directive letters '1' and '2')."""

    period: tuple[str, ...]
    preperiod: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "period", tuple(str(c) for c in _glyphs(self.period)))
        object.__setattr__(self, "preperiod", tuple(str(c) for c in _glyphs(self.preperiod)))
        if not self.period:
            raise DomainError("directive period must be nonempty")
        for c in self.preperiod + self.period:
            if c not in CASSAIGNE_MORPHISMS:
                raise DomainError(f"Cassaigne-Selmer directives use letters 1 and 2, got {c!r}")

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(("1", "2", "3"))

    @staticmethod
    def _compose(directive: tuple[str, ...]) -> tuple[bytes, ...]:
        # images of c_{i0} o c_{i1} o ... o c_{in}
        alpha = Alphabet(("1", "2", "3"))
        images = (b"\x00", b"\x01", b"\x02")
        for c in directive:
            step = tuple(_ids(alpha, CASSAIGNE_MORPHISMS[c][a]) for a in alpha.names)
            images = tuple(b"".join([images[x] for x in step[a]]) for a in range(3))
        return images

    def _letters(self, length: int) -> bytes:
        if length == 0:
            return b""
        head = self._compose(self.preperiod)
        period = self._compose(self.period)
        need = length
        # Fixed point of some power of the period product, then the preperiod
        # product on top.  Non-erasing morphisms: `need` letters suffice.
        for a in range(3):
            power = period
            for _ in range(6):
                if len(power[a]) >= 2 and power[a][0] == a:
                    w = _grow_fixed_point(power, a, need)
                    if w is not None:
                        out = b"".join([head[c] for c in w])
                        if len(out) >= length:
                            return out[:length]
                power = tuple(b"".join([power[x] for x in img]) for img in period)
        raise NonConvergentDirectiveError(
            f"directive {''.join(self.preperiod)}({''.join(self.period)})^omega "
            "does not generate an infinite word"
        )


def _grow_fixed_point(images: tuple[bytes, ...], a: int, length: int) -> bytes | None:
    w = bytes([a])
    while len(w) < length:
        grown = b"".join([images[c] for c in w])
        if len(grown) <= len(w):
            return None
        w = grown[:length]
    return w


def billiard_prefix(x, theta, length: int) -> FiniteWord:
    return Billiard(tuple(x), tuple(theta)).prefix(length)


@dataclass(frozen=True)
class Billiard(GeneratorSpec):
    """Hyperface coding of a billiard in the unit d-cube, unfolded.

    Coordinate i (letter i+1) is crossed at times (m - x_i) / theta_i for
    m = 1, 2, ...; momenta must be positive.
    """

    x: tuple[Fraction, ...]
    theta: tuple[Fraction, ...]
    names: tuple[str, ...] = None

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(rational(v) for v in self.x))
        object.__setattr__(self, "theta", tuple(rational(v) for v in self.theta))
        if len(self.x) != len(self.theta) or not self.x:
            raise DomainError("billiard position and momentum dimensions must agree")
        if any(t <= 0 for t in self.theta):
            raise DomainError("billiard momenta must be positive (reflect x_i -> 1-x_i first)")
        if any(not 0 <= v < 1 for v in self.x):
            raise DomainError("billiard start coordinates must lie in [0, 1)")
        names = self.names or _numbered(len(self.x)).names
        object.__setattr__(self, "names", tuple(names))
        if len(self.names) != len(self.x):
            raise DomainError("one letter name per billiard coordinate")

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(self.names)

    def restrict(self, coords) -> "Billiard":
        """The billiard seen in the sub-cube spanned by the given letters."""
        idx = sorted(self.alphabet.letter_id(c) for c in coords)
        return Billiard(
            tuple(self.x[i] for i in idx),
            tuple(self.theta[i] for i in idx),
            tuple(self.names[i] for i in idx),
        )

    def _letters(self, length: int) -> bytes:
        d = len(self.x)
        # Scale crossing times to integers: t_i(m) * D = A_i m - B_i.
        den = lcm(*[x.denominator * t.numerator for x, t in zip(self.x, self.theta)])
        slopes, offsets = [], []
        for x, t in zip(self.x, self.theta):
            unit = den // (x.denominator * t.numerator)
            slopes.append(x.denominator * t.denominator * unit)
            offsets.append(x.numerator * t.denominator * unit)
        heap = [(slopes[i] - offsets[i], i, 1) for i in range(d)]
        heapq.heapify(heap)
        out = bytearray()
        while len(out) < length:
            value, i, m = heapq.heappop(heap)
            if heap and heap[0][0] == value:
                tied = sorted([i] + [j for v, j, _ in heap if v == value])
                raise DegenerateTrajectoryError(tuple(tied), Fraction(value, den))
            out.append(i)
            heapq.heappush(heap, (slopes[i] * (m + 1) - offsets[i], i, m + 1))
        return bytes(out)


def _binary_inner(inner: GeneratorSpec) -> None:
    if inner.alphabet.size != 2:
        raise DomainError(f"expected a binary word, got alphabet {inner.alphabet}")


@dataclass(frozen=True)
class QuasiSturmianFM(GeneratorSpec):
    """Image of a binary word under 1 -> B C, 2 -> B D with the first
    ``shift`` letters dropped (minimal complexity n + d - 1 construction)."""

    inner: GeneratorSpec
    B: tuple[str, ...]
    C: tuple[str, ...] = ()
    D: tuple[str, ...] = ()
    shift: int = 0

    def __post_init__(self):
        for name in ("B", "C", "D"):
            object.__setattr__(self, name, _glyphs(getattr(self, name)))
        _binary_inner(self.inner)
        if not self.B:
            raise DomainError("partition block B must be nonempty")
        if not (self.C or self.D):
            raise DomainError("blocks C and D cannot both be empty")
        letters = self.B + self.C + self.D
        if len(set(letters)) != len(letters):
            raise DomainError("partition blocks B, C, D must be pairwise disjoint")
        sub = self.substitution
        longest = max(len(img) for img in sub.images)
        if not 0 <= self.shift < longest:
            raise DomainError(f"shift must be in [0, {longest})")

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(self.B + self.C + self.D)

    @property
    def substitution(self) -> Substitution:
        return Substitution(self.inner.alphabet, self.alphabet, (self.B + self.C, self.B + self.D))

    def _letters(self, length: int) -> bytes:
        sub = self.substitution
        table = sub.image_bytes()
        need = length + self.shift
        w0 = self.inner.prefix(need)
        image = b"".join([table[c] for c in w0.letters])[:need]
        dropped = image[: self.shift]
        if not any(img.startswith(dropped) for img in table):
            raise DomainError("the dropped prefix is not a prefix of either image")
        return image[self.shift :]


def quasi_sturmian_fm_prefix(inner, B, C, D, shift, length) -> FiniteWord:
    return QuasiSturmianFM(inner, B, C, D, shift).prefix(length)


@dataclass(frozen=True)
class Colored(GeneratorSpec):
    """Successive occurrences of ``letter`` in ``base`` replaced by the
    successive letters of ``colors``."""

    base: GeneratorSpec
    letter: str
    colors: GeneratorSpec

    def __post_init__(self):
        self.base.alphabet.index(self.letter)
        colored_alphabet(self.base.alphabet, self.base.alphabet.index(self.letter), self.colors.alphabet)

    @property
    def alphabet(self) -> Alphabet:
        return colored_alphabet(self.base.alphabet, self.base.alphabet.index(self.letter), self.colors.alphabet)

    def _letters(self, length: int) -> bytes:
        w0 = self.base.prefix(length)
        needed = w0.letters.count(self.base.alphabet.index(self.letter))
        return color_finite(w0, self.letter, self.colors.prefix(needed)).letters


def _grow(base: GeneratorSpec, length: int, transform) -> bytes:
    """Feed longer and longer base prefixes to ``transform`` until it yields
    ``length`` letters."""
    n = max(length, 16)
    while True:
        out = transform(base.prefix(n))
        if len(out) >= length:
            return out[:length]
        if n >= MAX_BASE_LENGTH:
            raise DomainError(
                f"base prefix of length {n} only yields {len(out)} of {length} letters"
            )
        n = min(2 * n, MAX_BASE_LENGTH)


@dataclass(frozen=True)
class Projected(GeneratorSpec):
    base: GeneratorSpec
    sub: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "sub", _glyphs(self.sub))
        if not self.sub:
            raise DomainError("projection onto an empty subalphabet")
        for g in self.sub:
            self.base.alphabet.index(g)

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(tuple(g for g in self.base.alphabet.names if g in self.sub))

    def _letters(self, length: int) -> bytes:
        return _grow(self.base, length, lambda w: project(w, self.sub).letters)


@dataclass(frozen=True)
class SubstitutionImage(GeneratorSpec):
    base: GeneratorSpec
    sub: Substitution
    shift: int = 0

    def __post_init__(self):
        if self.sub.domain != self.base.alphabet:
            raise DomainError("substitution domain must equal the base alphabet")
        if self.shift < 0:
            raise DomainError("shift must be nonnegative")

    @property
    def alphabet(self) -> Alphabet:
        return self.sub.codomain

    def _letters(self, length: int) -> bytes:
        need = length + self.shift
        return _grow(self.base, need, lambda w: self.sub.apply_letters(w.letters))[self.shift :]


@dataclass(frozen=True)
class ThueMorseIterated(GeneratorSpec):
    """TM^j applied to a binary word, TM: first letter -> 01, second -> 10."""

    base: GeneratorSpec
    iterations: int

    def __post_init__(self):
        _binary_inner(self.base)
        if self.iterations < 0:
            raise DomainError("iteration count must be nonnegative")

    @property
    def alphabet(self) -> Alphabet:
        return self.base.alphabet

    def _letters(self, length: int) -> bytes:
        scale = 1 << self.iterations
        w = self.base.prefix(-(-length // scale)).letters
        table = (b"\x00\x01", b"\x01\x00")
        for _ in range(self.iterations):
            w = b"".join([table[c] for c in w])
        return w[:length]


def thue_morse_iterate_prefix(base: GeneratorSpec, j: int, length: int) -> FiniteWord:
    return ThueMorseIterated(base, j).prefix(length)


# Named words used throughout tests, scenarios and the CLI.

def fibonacci(names="01") -> Morphic:
    a, b = tuple(names)
    return Morphic(Substitution.from_mapping({a: a + b, b: a}, domain=(a, b), codomain=(a, b)), a)


def thue_morse(names="01") -> Morphic:
    a, b = tuple(names)
    return Morphic(Substitution.from_mapping({a: a + b, b: b + a}, domain=(a, b), codomain=(a, b)), a)


def tribonacci(names="123") -> Morphic:
    a, b, c = tuple(names)
    return Morphic(
        Substitution.from_mapping({a: a + b, b: a + c, c: a}, domain=(a, b, c), codomain=(a, b, c)), a
    )


def fibonacci_colored_by_fibonacci() -> Colored:
    return Colored(fibonacci("0a"), "a", fibonacci("12"))


PRESETS = {
    "fibonacci": fibonacci,
    "thue-morse": thue_morse,
    "tribonacci": tribonacci,
    "fibonacci-colored": fibonacci_colored_by_fibonacci,
}
