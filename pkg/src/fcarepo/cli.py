"""Command-line front end: ``fcarepo <command> [args] [flags]``.

Exit codes: 0 success, 1 data error (invalid file, failed validation,
unknown context), 2 I/O or network failure, 3 budget exceeded.
Payload goes to stdout, diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from typing import Optional, Sequence

from . import __version__
from .algorithms import DEFAULT_BUDGET, canonical_basis, enumerate_concepts
from .client import InvalidRemoteContent, RepoClient, RepoConfig
from .context import compute_statistics
from .derivatives import basis_json, concepts_json, dump_json, generate_derivatives
from .errors import BudgetExceeded, ContextNotFound, MetadataError, ParseError, RepoError
from .formats import ContextFormat, format_for_path, parse, serialize
from .index import validate_repository
from .lattice import build_lattice, layout_layered, reduced_labels, render_dot, render_svg

EXIT_OK, EXIT_DATA, EXIT_IO, EXIT_BUDGET = 0, 1, 2, 3

FORMAT_CHOICES = ["burmeister", "cxt", "csv", "json"]


class _Fail(Exception):
    def __init__(self, code, message):
        self.code = code
        self.message = message


def _err(*lines):
    for line in lines:
        print(line, file=sys.stderr)


def _read_bytes(path):
    if path == "-":
        return sys.stdin.buffer.read()
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise _Fail(EXIT_IO, f"cannot read {path}: {exc.strerror or exc}")


def _emit(data: bytes, output: Optional[str]):
    if output is None:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
        return
    try:
        with open(output, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise _Fail(EXIT_IO, f"cannot write {output}: {exc.strerror or exc}")


def _input_format(args):
    if args.from_format:
        return ContextFormat.coerce(args.from_format)
    try:
        return format_for_path(args.input)
    except ValueError:
        return ContextFormat.BURMEISTER


def _load(args):
    data = _read_bytes(args.input)
    try:
        return parse(data, _input_format(args))
    except ParseError as exc:
        raise _Fail(EXIT_DATA, "\n".join(f"{args.input}: {d}" for d in exc.diagnostics))
    except UnicodeDecodeError as exc:
        raise _Fail(EXIT_DATA, f"{args.input}: not valid UTF-8 ({exc.reason})")


# -- commands ---------------------------------------------------------------


def cmd_validate(args) -> int:
    try:
        report = validate_repository(args.root)
    except OSError as exc:
        raise _Fail(EXIT_IO, f"cannot read repository {args.root}: {exc.strerror or exc}")
    if args.json:
        print(report.to_json())
    else:
        sys.stdout.write(report.to_text())
    return EXIT_OK if report.ok else EXIT_DATA


def cmd_convert(args) -> int:
    ctx = _load(args)
    if args.to_format:
        to = ContextFormat.coerce(args.to_format)
    elif args.output:
        try:
            to = format_for_path(args.output)
        except ValueError as exc:
            raise _Fail(EXIT_DATA, str(exc))
    else:
        to = ContextFormat.BURMEISTER
    _emit(serialize(ctx, to).encode("utf-8"), args.output)
    return EXIT_OK


def cmd_stats(args) -> int:
    ctx = _load(args)
    stats = compute_statistics(ctx)
    stats = replace(stats, concept_count=len(enumerate_concepts(ctx, args.budget)))
    if args.json:
        _emit(dump_json(stats.as_dict()).encode("utf-8"), args.output)
        return EXIT_OK
    d = stats.density
    rows = [
        ("objects", stats.object_count),
        ("attributes", stats.attribute_count),
        ("incidences", stats.incidence_count),
        ("density", f"{d.numerator}/{d.denominator} ({float(d):.6f})"),
        ("concepts", stats.concept_count),
    ]
    text = "".join(f"{k:<12}{v}\n" for k, v in rows)
    if stats.object_count * stats.attribute_count == 0:
        text += "(density is 0 by convention for a context without objects or attributes)\n"
    _emit(text.encode("utf-8"), args.output)
    return EXIT_OK


def _set_text(names):
    return "{" + ", ".join(names) + "}"


def cmd_concepts(args) -> int:
    ctx = _load(args)
    concepts = enumerate_concepts(ctx, args.budget)
    if args.json:
        text = concepts_json(ctx, concepts)
    else:
        text = "".join(
            f"{_set_text(ctx.objects[g] for g in sorted(c.extent))} "
            f"{_set_text(ctx.attributes[m] for m in sorted(c.intent))}\n"
            for c in concepts
        )
    _emit(text.encode("utf-8"), args.output)
    return EXIT_OK


def cmd_basis(args) -> int:
    ctx = _load(args)
    basis = canonical_basis(ctx, args.budget)
    if args.json:
        text = basis_json(ctx, basis)
    else:
        lines = []
        for imp in basis:
            premise, conclusion = imp.names(ctx)
            lines.append(f"{_set_text(premise)} ==> {_set_text(conclusion)}\n")
        text = "".join(lines)
    _emit(text.encode("utf-8"), args.output)
    return EXIT_OK


def cmd_lattice(args) -> int:
    ctx = _load(args)
    kind = (args.to_format or "").lower()
    if not kind and args.output:
        kind = os.path.splitext(args.output)[1].lstrip(".").lower()
    kind = kind or "svg"
    if kind not in ("svg", "dot"):
        raise _Fail(EXIT_DATA, f"lattice output must be svg or dot, not {kind!r}")
    lattice = build_lattice(enumerate_concepts(ctx, args.budget))
    labels = reduced_labels(lattice, ctx)
    if kind == "svg":
        text = render_svg(lattice, layout_layered(lattice), labels)
    else:
        text = render_dot(lattice, labels)
    _emit(text.encode("utf-8"), args.output)
    return EXIT_OK


def cmd_gen_derivatives(args) -> int:
    try:
        report = validate_repository(args.root)
    except OSError as exc:
        raise _Fail(EXIT_IO, f"cannot read repository {args.root}: {exc.strerror or exc}")
    if not report.ok:
        _err(*(f.as_line() for f in report.errors))
        raise _Fail(EXIT_DATA, "repository does not validate; no derivatives written")
    try:
        result = generate_derivatives(args.root, args.out_dir, args.budget, args.strict)
    except OSError as exc:
        raise _Fail(EXIT_IO, f"cannot write derivatives: {exc.strerror or exc}")
    for w in result.warnings:
        _err(f"warning: {w}")
    if args.json:
        rel = sorted(os.path.relpath(p, args.out_dir) for p in result.written)
        print(json.dumps({"warnings": result.warnings, "written": rel}, indent=2, sort_keys=True))
    return EXIT_OK


def _client(args) -> RepoClient:
    kwargs = {"offline": args.offline}
    if args.base_url:
        kwargs["base_url"] = args.base_url
    try:
        return RepoClient(RepoConfig(**kwargs))
    except ValueError as exc:
        raise _Fail(EXIT_DATA, str(exc))


def cmd_fetch(args) -> int:
    try:
        data = _client(args).fetch_raw(args.name)
    except ValueError as exc:
        raise _Fail(EXIT_DATA, str(exc))
    _emit(data, args.output)
    return EXIT_OK


def cmd_list(args) -> int:
    index = _client(args).list_contexts()
    rows = [(f, m.title, m.language_code) for f, m in index.entries.items()]
    if args.json:
        payload = [{"file": f, "language": lang, "title": t} for f, t, lang in rows]
        text = dump_json(payload)
    else:
        w0 = max((len(r[0]) for r in rows), default=0)
        w1 = max((len(r[1]) for r in rows), default=0)
        text = "".join(f"{f:<{w0}}  {t:<{w1}}  {lang}\n" for f, t, lang in rows)
    _emit(text.encode("utf-8"), args.output)
    return EXIT_OK


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fcarepo",
        description="Tools for a repository of formal contexts.",
        epilog="Exit codes: 0 ok, 1 data error, 2 I/O or network error, 3 budget exceeded.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    json_flag = argparse.ArgumentParser(add_help=False)
    json_flag.add_argument("--json", action="store_true", help="machine-readable JSON output")

    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("--output", "-o", metavar="PATH", help="write payload to PATH instead of stdout")

    context_in = argparse.ArgumentParser(add_help=False)
    context_in.add_argument("input", help="context file ('-' for stdin)")
    context_in.add_argument(
        "--from",
        dest="from_format",
        choices=FORMAT_CHOICES,
        help="input format (default: from the file extension, else burmeister)",
    )

    budget = argparse.ArgumentParser(add_help=False)
    budget.add_argument(
        "--budget",
        type=int,
        default=DEFAULT_BUDGET,
        metavar="N",
        help=f"give up after N concepts or closed sets (default {DEFAULT_BUDGET}); exit 3",
    )

    remote = argparse.ArgumentParser(add_help=False)
    remote.add_argument("--base-url", help="repository root URL (default $FCAREPO_BASE_URL or the public repository)")
    remote.add_argument("--offline", action="store_true", help="serve from the cache only, never touch the network")

    p = sub.add_parser("validate", parents=[json_flag], help="check contexts.yaml against contexts/")
    p.add_argument("root", help="repository root directory")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("convert", parents=[context_in, output], help="convert between cxt, csv and json")
    p.add_argument(
        "--to",
        dest="to_format",
        choices=FORMAT_CHOICES,
        help="output format (default: from --output extension, else burmeister)",
    )
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("stats", parents=[context_in, output, json_flag, budget], help="context statistics")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("concepts", parents=[context_in, output, json_flag, budget], help="all formal concepts")
    p.set_defaults(func=cmd_concepts)

    p = sub.add_parser("basis", parents=[context_in, output, json_flag, budget], help="canonical implication basis")
    p.set_defaults(func=cmd_basis)

    p = sub.add_parser("lattice", parents=[context_in, output, budget], help="render the concept lattice")
    p.add_argument(
        "--to",
        dest="to_format",
        choices=["svg", "dot"],
        help="diagram format (default: from --output extension, else svg)",
    )
    p.set_defaults(func=cmd_lattice)

    p = sub.add_parser(
        "gen-derivatives", parents=[json_flag, budget], help="write all derivatives of a repository"
    )
    p.add_argument("root", help="repository root directory")
    p.add_argument("out_dir", help="output directory for the derivatives tree")
    p.add_argument("--strict", action="store_true", help="exit 3 when any context exceeds the budget")
    p.set_defaults(func=cmd_gen_derivatives)

    p = sub.add_parser("fetch", parents=[remote, output], help="download one context")
    p.add_argument("name", help="context name, e.g. livingbeings_en")
    p.set_defaults(func=cmd_fetch)

    p = sub.add_parser("list", parents=[remote, output, json_flag], help="list contexts in the remote index")
    p.set_defaults(func=cmd_list)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Fail as exc:
        _err(exc.message)
        return exc.code
    except BudgetExceeded as exc:
        _err(f"budget exceeded: {exc}")
        return EXIT_BUDGET
    except ContextNotFound as exc:
        _err(str(exc))
        return EXIT_DATA
    except (InvalidRemoteContent, MetadataError, ParseError) as exc:
        _err(str(exc))
        return EXIT_DATA
    except (RepoError, OSError) as exc:
        _err(str(exc))
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
