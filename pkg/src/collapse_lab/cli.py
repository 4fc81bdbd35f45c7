"""collapse-lab command line.

Exit codes: 0 success, 1 verification failure or inconsistent projection
family, 2 usage or spec-parse error, 3 generator or domain error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path

from . import __version__, analysis, serialization, verify
from .generators import Colored, EventuallyPeriodic, GeneratorSpec
from .words import DomainError, FiniteWord, WordsError, color_finite, project, word

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- output -------------------------------------------------------------------


def _table(header: list[str], rows: list[list]) -> str:
    cells = [[str(h) for h in header]] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() for r in cells)


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue().rstrip("\n")


def _document(kind: str, body: dict, spec: GeneratorSpec | None = None, started: float | None = None) -> dict:
    doc = {"tool": "collapse-lab", "version": __version__, "report": kind}
    if spec is not None:
        doc["spec"] = serialization.render(spec)
        doc["spec_hash"] = serialization.spec_hash(spec)
    doc.update(body)
    if started is not None:
        doc["wall_time"] = round(time.perf_counter() - started, 4)
    return doc


def _emit(fmt: str, header, rows, doc: dict, out) -> None:
    if fmt == "json":
        out.write(json.dumps(doc, indent=2) + "\n")
    elif fmt == "csv":
        out.write(_csv(header, rows) + "\n")
    else:
        out.write(_table(header, rows) + "\n")


# -- inputs -------------------------------------------------------------------


def _spec(args) -> GeneratorSpec:
    if not args.spec:
        raise UsageError("--spec is required")
    return serialization.load(args.spec)


def _word_or_spec(args) -> tuple[FiniteWord, GeneratorSpec | None]:
    if getattr(args, "word", None) is not None:
        return word(args.word, sep=args.sep), None
    spec = _spec(args)
    if args.length is None:
        raise UsageError("--length is required with --spec")
    return spec.prefix(args.length), spec


def _ks(text: str) -> list[int]:
    try:
        ks = [int(x) for x in text.split(",") if x]
    except ValueError:
        raise UsageError(f"--k expects a comma-separated list of integers, got {text!r}") from None
    if not ks or min(ks) < 1:
        raise UsageError("--k values must be positive")
    return ks


def _sub(text: str, sep: str | None) -> tuple[str, ...]:
    return tuple(text.split(sep)) if sep else tuple(text)


# -- commands -----------------------------------------------------------------


def cmd_generate(args, out) -> int:
    spec = _spec(args)
    if args.length is None:
        raise UsageError("--length is required")
    text = spec.prefix(args.length).to_string(args.sep)
    if args.output:
        Path(args.output).write_text(text + "\n")
    else:
        out.write(text + "\n")
    return EXIT_OK


def cmd_complexity(args, out) -> int:
    started = time.perf_counter()
    spec = _spec(args)
    ks = _ks(args.k)
    if args.saturate:
        initial = max(args.length or 1024, args.nmax)
        length, stable = analysis.saturation_probe(spec, args.nmax, initial)
    else:
        if args.length is None:
            raise UsageError("--length or --saturate is required")
        length = args.length
        stable = analysis.is_saturated(spec, args.nmax, length)
    w = spec.prefix(length)
    report = analysis.complexity_report(w, ks, args.nmax, saturated=stable)
    header = ["n", "p", "rho"] + [f"b{k}" for k in report.ks]
    rows = [[r.n, r.p, r.rho] + [r.b[k] for k in report.ks] for r in report.rows]
    _emit(args.format, header, rows, _document("complexity", report.as_dict(), spec, started), out)
    if args.format == "table":
        out.write(f"# prefix length {length}, saturated: {'yes' if stable else 'no'}\n")
    return EXIT_OK


def cmd_balance(args, out) -> int:
    started = time.perf_counter()
    w, spec = _word_or_spec(args)
    n_max = args.nmax if args.nmax is not None else len(w)
    if args.projections:
        reports = analysis.binary_projection_imbalance(w, n_max)
        header = ["pair", "overall_c", "witness"]
        rows = []
        for pair, r in reports.items():
            rows.append(["".join(pair), r.overall_c, _witness_text(r)])
        body = {"projections": {"".join(pair): r.as_dict() for pair, r in reports.items()}}
    else:
        r = analysis.imbalance(w, n_max)
        header = ["letter", "max_imbalance", "witness"]
        rows = [[a, max(v, default=0), ""] for a, v in r.per_letter.items()]
        rows.append(["*", r.overall_c, _witness_text(r)])
        body = {"balance": r.as_dict()}
    body["prefix_length"] = len(w)
    _emit(args.format, header, rows, _document("balance", body, spec, started), out)
    return EXIT_OK


def _witness_text(r: analysis.BalanceReport) -> str:
    if not r.witness or r.overall_c == 0:
        return ""
    a, n, u, v = r.witness
    return f"{a}@{n}:{u}/{v}"


def cmd_classes(args, out) -> int:
    w, spec = _word_or_spec(args)
    part = analysis.classes(w, args.k, args.n)
    header = ["class", "size", "members"]
    rows = [[i + 1, len(g), " ".join(str(u) for u in g)] for i, g in enumerate(part.groups)]
    body = {
        "n": part.n,
        "k": part.k,
        "prefix_length": len(w),
        "classes": [[str(u) for u in g] for g in part.groups],
    }
    _emit(args.format, header, rows, _document("classes", body, spec), out)
    return EXIT_OK


def cmd_project(args, out) -> int:
    w, _ = _word_or_spec(args)
    out.write(project(w, _sub(args.sub, args.sep)).to_string(args.sep) + "\n")
    return EXIT_OK


def cmd_color(args, out) -> int:
    if args.word is not None:
        if args.colors is None:
            raise UsageError("--colors is required with --word")
        base = word(args.word, sep=args.sep)
        colors = word(args.colors, sep=args.sep)
        result = color_finite(base, args.letter, colors)
    else:
        base_spec = _spec(args)
        if args.length is None:
            raise UsageError("--length is required with --spec")
        if args.colors_spec is not None:
            colors_spec = serialization.load(args.colors_spec)
        elif args.colors is not None:
            colors_spec = EventuallyPeriodic((), _sub(args.colors, args.sep))
        else:
            raise UsageError("--colors or --colors-spec is required")
        result = Colored(base_spec, args.letter, colors_spec).prefix(args.length)
    out.write(result.to_string(args.sep) + "\n")
    return EXIT_OK


def _projection_input(item: str) -> tuple[str | None, str]:
    path = Path(item)
    text = path.read_text().strip() if path.is_file() else item
    if "=" in text:
        pair, _, body = text.partition("=")
        return pair.strip(), body.strip()
    return None, text


def cmd_reconstruct(args, out) -> int:
    family = {}
    for item in args.projections:
        pair, body = _projection_input(item)
        if pair is None:
            letters = sorted(set(body))
            if len(letters) != 2:
                raise UsageError(f"cannot infer the letter pair of {body!r}; write it as PAIR=WORD")
            pair = "".join(letters)
        family[tuple(pair)] = body
    if len(family) == 1:
        (only,) = family.values()
        out.write(only + "\n")
        return EXIT_OK
    try:
        result = analysis.reconstruct(family)
    except analysis.InconsistentProjectionFamily as exc:
        sys.stderr.write(f"inconsistent projection family: {exc}\n")
        return EXIT_FAIL
    out.write(str(result) + "\n")
    return EXIT_OK


def cmd_verify(args, out) -> int:
    if args.list:
        for name, s in verify.SCENARIOS.items():
            out.write(f"{name}{' (long)' if s.long else ''}: {s.description}\n")
        return EXIT_OK
    if args.all:
        names = verify.default_scenarios(include_long=args.long)
    elif args.scenario:
        names = args.scenario
    else:
        raise UsageError("give --scenario NAME or --all")
    unknown = [n for n in names if n not in verify.SCENARIOS]
    if unknown:
        raise UsageError(f"unknown scenario: {', '.join(unknown)}")
    reports = verify.run_scenarios(names)
    timing = not args.no_timing
    header = ["scenario", "result", "prefix_length", "wall_time", "note"]
    rows = [
        [r.name, "pass" if r.passed else "FAIL", r.prefix_length or "", f"{r.wall_time:.2f}" if timing else "", r.note]
        for r in reports
    ]
    doc = _document("verification", {"scenarios": [r.as_dict(timing) for r in reports]})
    _emit(args.format, header, rows, doc, out)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="collapse-lab", description="Binomial complexities of infinite words.")
    parser.add_argument("--version", action="version", version=f"collapse-lab {__version__}")
    subs = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, fn, help_text, spec=True, fmt=True):
        p = subs.add_parser(name, help=help_text)
        p.set_defaults(func=fn)
        if spec:
            p.add_argument("--spec", help="spec file, inline JSON, or preset name")
            p.add_argument("--length", type=int, help="prefix length")
        if fmt:
            p.add_argument("--format", choices=("table", "csv", "json"), default="table")
        p.add_argument("--sep", default=None, help="glyph separator for multi-glyph alphabets")
        return p

    p = add("generate", cmd_generate, "print a prefix", fmt=False)
    p.add_argument("--output", help="write to this file instead of stdout")

    p = add("complexity", cmd_complexity, "tabulate p, rho and b^k")
    p.add_argument("--k", default="2", help="comma-separated orders, e.g. 1,2,3")
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--saturate", action="store_true", help="double the prefix until the factor sets stabilize")

    p = add("balance", cmd_balance, "letter imbalance, optionally per binary projection")
    p.add_argument("--word", help="analyse this finite word instead of a spec")
    p.add_argument("--nmax", type=int)
    p.add_argument("--projections", action="store_true")

    p = add("classes", cmd_classes, "k-binomial classes of the length-n factors")
    p.add_argument("--word")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--n", type=int, required=True)

    p = add("project", cmd_project, "erase the letters outside a subalphabet", fmt=False)
    p.add_argument("--word")
    p.add_argument("--sub", required=True, help="letters to keep, e.g. ab")

    p = add("color", cmd_color, "color the occurrences of a letter", fmt=False)
    p.add_argument("--word", help="finite base word")
    p.add_argument("--letter", required=True)
    p.add_argument("--colors", help="finite color word (with --spec it is repeated periodically)")
    p.add_argument("--colors-spec", help="infinite color word spec")

    p = subs.add_parser("reconstruct", help="rebuild a word from its binary projections")
    p.set_defaults(func=cmd_reconstruct)
    p.add_argument("projections", nargs="+", help="files or words, optionally PAIR=WORD")

    p = subs.add_parser("verify", help="run verification scenarios")
    p.set_defaults(func=cmd_verify)
    p.add_argument("--scenario", action="append", help="scenario name (repeatable)")
    p.add_argument("--all", action="store_true")
    p.add_argument("--long", action="store_true", help="with --all, include long-running sweeps")
    p.add_argument("--list", action="store_true")
    p.add_argument("--no-timing", action="store_true", help="omit wall times for byte-stable output")
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")
    return parser


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "func", None):
            raise UsageError("a subcommand is required")
        return args.func(args, out)
    except UsageError as exc:
        sys.stderr.write(f"collapse-lab: {exc}\n")
        return EXIT_USAGE
    except serialization.SpecError as exc:
        sys.stderr.write(f"collapse-lab: {exc}\n")
        return EXIT_USAGE
    except analysis.InconsistentProjectionFamily as exc:
        sys.stderr.write(f"inconsistent projection family: {exc}\n")
        return EXIT_FAIL
    except (WordsError, DomainError) as exc:
        sys.stderr.write(f"collapse-lab: {exc}\n")
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
