"""JSON word-spec documents.

A document is an object with a ``kind`` field; rationals are ``"p/q"``
strings, glyph sequences are strings (one glyph per character) or lists of
glyph names, and combinators nest sub-documents.  ``parse(render(s)) == s``.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from pathlib import Path

from . import generators as g
from .words import Alphabet, DomainError


class SpecError(DomainError):
    """Malformed spec document."""


def _seq(glyphs) -> str | list[str]:
    glyphs = tuple(glyphs)
    if all(len(x) == 1 for x in glyphs):
        return "".join(glyphs)
    return list(glyphs)


def _frac(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def _sub(sub: g.Substitution) -> dict:
    return {
        "domain": _seq(sub.domain.names),
        "codomain": _seq(sub.codomain.names),
        "images": {a: _seq(img) for a, img in zip(sub.domain.names, sub.images)},
    }


def render(spec: g.GeneratorSpec) -> dict:
    if isinstance(spec, g.Morphic):
        d = _sub(spec.sub)
        del d["codomain"]
        return {"kind": "morphic", **d, "seed": spec.seed}
    if isinstance(spec, g.EventuallyPeriodic):
        return {
            "kind": "eventually-periodic",
            "preperiod": _seq(spec.preperiod),
            "period": _seq(spec.period),
            "alphabet": _seq(spec.alphabet.names),
        }
    if isinstance(spec, g.Mechanical):
        return {"kind": "mechanical", "alpha": _frac(spec.alpha), "rho": _frac(spec.rho), "alphabet": _seq(spec.alphabet.names)}
    if isinstance(spec, g.StandardSturmian):
        return {
            "kind": "standard-sturmian",
            "directive": list(spec.directive),
            "periodic": spec.periodic,
            "alphabet": _seq(spec.alphabet.names),
        }
    if isinstance(spec, g.ArnouxRauzy):
        return {
            "kind": "arnoux-rauzy",
            "period": _seq(spec.period),
            "preperiod": _seq(spec.preperiod),
            "alphabet": _seq(spec.alphabet.names),
        }
    if isinstance(spec, g.CassaigneSelmer):
        return {"kind": "cassaigne-selmer", "period": _seq(spec.period), "preperiod": _seq(spec.preperiod)}
    if isinstance(spec, g.Billiard):
        return {
            "kind": "billiard",
            "x": [_frac(v) for v in spec.x],
            "theta": [_frac(v) for v in spec.theta],
            "names": _seq(spec.names),
        }
    if isinstance(spec, g.QuasiSturmianFM):
        return {
            "kind": "quasi-sturmian-fm",
            "inner": render(spec.inner),
            "B": _seq(spec.B),
            "C": _seq(spec.C),
            "D": _seq(spec.D),
            "shift": spec.shift,
        }
    if isinstance(spec, g.Colored):
        return {"kind": "colored", "base": render(spec.base), "letter": spec.letter, "colors": render(spec.colors)}
    if isinstance(spec, g.Projected):
        return {"kind": "projected", "base": render(spec.base), "sub": _seq(spec.sub)}
    if isinstance(spec, g.SubstitutionImage):
        return {"kind": "substitution-image", "base": render(spec.base), "substitution": _sub(spec.sub), "shift": spec.shift}
    if isinstance(spec, g.ThueMorseIterated):
        return {"kind": "thue-morse-iterated", "base": render(spec.base), "iterations": spec.iterations}
    raise SpecError(f"cannot render {type(spec).__name__}")


def _need(doc: dict, key: str):
    if key not in doc:
        raise SpecError(f"{doc.get('kind', 'spec')} document is missing {key!r}")
    return doc[key]


def _glyph_seq(value) -> tuple[str, ...]:
    if isinstance(value, str):
        return tuple(value)
    if isinstance(value, list) and all(isinstance(x, str) for x in value):
        return tuple(value)
    raise SpecError(f"expected a glyph string or a list of glyphs, got {value!r}")


def _rational(value) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise SpecError(f"rationals are integers or 'p/q' strings, got {value!r}")
    return g.rational(value)


def _parse_sub(doc: dict, codomain=None) -> g.Substitution:
    domain = _glyph_seq(_need(doc, "domain"))
    codomain = _glyph_seq(doc["codomain"]) if "codomain" in doc else codomain
    images = _need(doc, "images")
    if not isinstance(images, dict):
        raise SpecError("substitution images must be an object keyed by letter")
    mapping = {a: _glyph_seq(v) for a, v in images.items()}
    return g.Substitution.from_mapping(mapping, domain, codomain)


def _alphabet(doc: dict, key="alphabet"):
    return Alphabet(_glyph_seq(doc[key])) if key in doc else None


def parse(doc) -> g.GeneratorSpec:
    """Build a GeneratorSpec from a decoded document (or a preset name)."""
    if isinstance(doc, str):
        return preset(doc)
    if not isinstance(doc, dict):
        raise SpecError("a spec document must be an object")
    kind = _need(doc, "kind")
    if kind == "preset":
        return preset(_need(doc, "name"))
    if kind == "morphic":
        domain = _glyph_seq(_need(doc, "domain"))
        return g.Morphic(_parse_sub(doc, domain), _need(doc, "seed"))
    if kind == "eventually-periodic":
        return g.EventuallyPeriodic(_glyph_seq(doc.get("preperiod", "")), _glyph_seq(_need(doc, "period")), _alphabet(doc))
    if kind == "mechanical":
        return g.Mechanical(_rational(_need(doc, "alpha")), _rational(doc.get("rho", 0)), _alphabet(doc) or Alphabet(("0", "1")))
    if kind == "standard-sturmian":
        directive = _need(doc, "directive")
        if not isinstance(directive, list) or not all(isinstance(a, int) and not isinstance(a, bool) for a in directive):
            raise SpecError("standard-sturmian directive must be a list of positive integers")
        return g.StandardSturmian(tuple(directive), bool(doc.get("periodic", True)), _alphabet(doc) or Alphabet(("0", "1")))
    if kind == "arnoux-rauzy":
        return g.ArnouxRauzy(_glyph_seq(_need(doc, "period")), _glyph_seq(doc.get("preperiod", "")), _alphabet(doc))
    if kind == "cassaigne-selmer":
        return g.CassaigneSelmer(_glyph_seq(_need(doc, "period")), _glyph_seq(doc.get("preperiod", "")))
    if kind == "billiard":
        x, theta = _need(doc, "x"), _need(doc, "theta")
        if not isinstance(x, list) or not isinstance(theta, list):
            raise SpecError("billiard x and theta must be lists of rationals")
        names = _glyph_seq(doc["names"]) if "names" in doc else None
        return g.Billiard(tuple(_rational(v) for v in x), tuple(_rational(v) for v in theta), names)
    if kind == "quasi-sturmian-fm":
        return g.QuasiSturmianFM(
            parse(_need(doc, "inner")),
            _glyph_seq(_need(doc, "B")),
            _glyph_seq(doc.get("C", "")),
            _glyph_seq(doc.get("D", "")),
            int(doc.get("shift", 0)),
        )
    if kind == "colored":
        return g.Colored(parse(_need(doc, "base")), _need(doc, "letter"), parse(_need(doc, "colors")))
    if kind == "projected":
        return g.Projected(parse(_need(doc, "base")), _glyph_seq(_need(doc, "sub")))
    if kind == "substitution-image":
        return g.SubstitutionImage(parse(_need(doc, "base")), _parse_sub(_need(doc, "substitution")), int(doc.get("shift", 0)))
    if kind == "thue-morse-iterated":
        return g.ThueMorseIterated(parse(_need(doc, "base")), int(_need(doc, "iterations")))
    raise SpecError(f"unknown spec kind {kind!r}")


def preset(name: str) -> g.GeneratorSpec:
    try:
        return g.PRESETS[name]()
    except KeyError:
        raise SpecError(f"unknown preset {name!r}; known: {', '.join(sorted(g.PRESETS))}") from None


def loads(text: str) -> g.GeneratorSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"spec is not valid JSON: {exc}") from None
    return parse(doc)


def dumps(spec: g.GeneratorSpec) -> str:
    return json.dumps(render(spec), sort_keys=True, separators=(",", ":"))


def load(source: str) -> g.GeneratorSpec:
    """A file path, a preset name, or inline JSON."""
    if source.lstrip().startswith("{"):
        return loads(source)
    path = Path(source)
    if path.is_file():
        return loads(path.read_text())
    if source in g.PRESETS:
        return preset(source)
    raise SpecError(f"no spec file or preset named {source!r}")


def spec_hash(spec: g.GeneratorSpec) -> str:
    return hashlib.sha256(dumps(spec).encode()).hexdigest()[:16]
