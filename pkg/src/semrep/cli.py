"""Command-line front end: ``semrep <subcommand> [flags] [files...]``.

Exit status: 0 success, 1 validation errors or merge conflicts, 2 usage,
unreadable input or parse errors.
"""

from __future__ import annotations

import argparse
import contextlib
import sys
import time
from pathlib import Path

from . import data
from .errors import ParseError, SemRepError
from .fusion import ConflictReport, Correspondence, FusionSession, assimilate, merge
from .registry import (CategoryMapping, Registry, default_registry, load_registry,
                       map_categories, registry_diff, validate)
from .underspec import (DEFAULT_CAP, best_selection, bind, distinguishing_values,
                        enumerate_readings, prune, reading_count, realize)
from .xmlio import DEFAULT_PROFILE, FormatProfile, parse, serialize

OK, FAILED, USAGE = 0, 1, 2

SESSION_DOC = "current.xml"
SESSION_LOG = "history.log"


class _Abort(Exception):
    def __init__(self, code: int, message: str = ""):
        self.code = code
        self.message = message


class _Context:
    def __init__(self, args, stdin, stdout, stderr):
        self.args = args
        self.stdin, self.stdout, self.stderr = stdin, stdout, stderr
        self.profile = self._profile()
        self.registry = self._registry()

    def out(self, text: str = ""):
        self.stdout.write(text if text.endswith("\n") else text + "\n")

    def err(self, text: str):
        self.stderr.write(text + "\n")

    def read_bytes(self, name: str) -> bytes:
        if name == "-":
            raw = getattr(self.stdin, "buffer", None)
            return raw.read() if raw is not None else self.stdin.read().encode("utf-8")
        try:
            return Path(name).read_bytes()
        except OSError as e:
            raise _Abort(USAGE, f"cannot read {name}: {e.strerror}") from e

    def read_text(self, name: str) -> str:
        try:
            return self.read_bytes(name).decode("utf-8")
        except UnicodeDecodeError as e:
            raise _Abort(USAGE, f"{name}: not UTF-8") from e

    def _profile(self) -> FormatProfile:
        if not getattr(self.args, "profile", None):
            return DEFAULT_PROFILE
        try:
            return FormatProfile.from_json(self.read_text(self.args.profile))
        except (ParseError, ValueError, TypeError) as e:
            raise _Abort(USAGE, f"{self.args.profile}: {e}") from e

    def _registry(self) -> Registry:
        name = getattr(self.args, "registry", None)
        if not name:
            return default_registry()
        if not Path(name).exists() and data.path(Path(name).name).exists():
            name = str(data.path(Path(name).name))
        elif name == "default":
            return default_registry()
        try:
            return load_registry(self.read_bytes(name))
        except (ParseError, ValueError) as e:
            raise _Abort(USAGE, f"{name}: {e}") from e

    def document(self, name: str):
        raw = self.read_bytes(name)
        base = Path(name).resolve().as_uri() if name != "-" else None
        doc, diags = parse(raw, self.profile, base)
        for d in diags:
            self.err(f"{name}:{d}")
        if doc is None:
            raise _Abort(USAGE)
        return doc

    def emit_doc(self, doc):
        self.stdout.write(serialize(doc, self.profile))


def _fmt_score(x: float) -> str:
    return format(x, ".12g")


def _correspondence(ctx: _Context) -> Correspondence:
    pairs = []
    try:
        pairs += Correspondence.from_args(ctx.args.corr or []).pairs
        if ctx.args.corr_file:
            pairs += Correspondence.parse(ctx.read_text(ctx.args.corr_file)).pairs
        return Correspondence(tuple(pairs))
    except (ValueError, ParseError) as e:
        raise _Abort(USAGE, str(e)) from e


# -- subcommands -----------------------------------------------------------

def cmd_validate(ctx: _Context) -> int:
    code = OK
    many = len(ctx.args.files) > 1
    for name in ctx.args.files:
        doc = ctx.document(name)
        report = validate(doc, ctx.registry, strict=ctx.args.strict)
        prefix = f"{name}: " if many else ""
        for f in report.findings:
            ctx.out(f"{prefix}{f}")
        ctx.out(prefix + report.summary())
        if not report.valid:
            code = FAILED
    return code


def cmd_canon(ctx: _Context) -> int:
    ctx.emit_doc(ctx.document(ctx.args.file))
    return OK


def cmd_readings(ctx: _Context) -> int:
    doc = ctx.document(ctx.args.file)
    rs = enumerate_readings(doc, ctx.args.cap)
    for reading, sel in zip(rs.readings, rs.selections):
        ctx.out(" ".join([_fmt_score(reading.score)] + distinguishing_values(doc, sel)))
    if not rs.exhaustive:
        ctx.err(f"readings truncated at cap {ctx.args.cap} "
                f"(total {reading_count(doc)})")
    return OK


def cmd_best(ctx: _Context) -> int:
    doc = ctx.document(ctx.args.file)
    sel = best_selection(doc, ctx.args.cap)
    reading = realize(doc, sel)
    ctx.out(" ".join([_fmt_score(reading.score)] + distinguishing_values(doc, sel)))
    if ctx.args.output:
        Path(ctx.args.output).write_bytes(serialize(reading, ctx.profile).encode("utf-8"))
    return OK


def cmd_prune(ctx: _Context) -> int:
    ctx.emit_doc(prune(ctx.document(ctx.args.file), ctx.args.group, ctx.args.keep))
    return OK


def cmd_bind(ctx: _Context) -> int:
    ctx.emit_doc(bind(ctx.document(ctx.args.file), ctx.args.var, ctx.args.node))
    return OK


def _report_conflicts(ctx: _Context, report: ConflictReport) -> int:
    for line in report.lines():
        ctx.out(line)
    return FAILED


def cmd_merge(ctx: _Context) -> int:
    left, right = ctx.document(ctx.args.left), ctx.document(ctx.args.right)
    result = merge(left, right, _correspondence(ctx), ctx.registry)
    if isinstance(result, ConflictReport):
        return _report_conflicts(ctx, result)
    ctx.emit_doc(result)
    return OK


def _load_session(ctx: _Context, directory: Path) -> FusionSession:
    session = FusionSession()
    current = directory / SESSION_DOC
    if current.exists():
        session.current = ctx.document(str(current))
    log = directory / SESSION_LOG
    if log.exists():
        for line in log.read_text(encoding="utf-8").splitlines():
            parts = line.split("\t")
            if len(parts) == 3 and parts[2] == "ok":
                session.history.append((parts[0], int(parts[1])))
    return session


def cmd_assimilate(ctx: _Context) -> int:
    directory = Path(ctx.args.session)
    directory.mkdir(parents=True, exist_ok=True)
    session = _load_session(ctx, directory)
    corr = _correspondence(ctx)
    now = ctx.args.now if ctx.args.now is not None else int(time.time() * 1000)
    code = OK
    with open(directory / SESSION_LOG, "a", encoding="utf-8") as log:
        for name in ctx.args.files:
            doc = ctx.document(name)
            result = assimilate(session, doc, corr, ctx.registry, now=now)
            if isinstance(result, ConflictReport):
                stamp = doc.meta.timestamp if doc.meta.timestamp is not None else now
                log.write(f"{doc.id}\t{stamp}\tconflict\n")
                code = _report_conflicts(ctx, result)
                break
            session = result
            doc_id, stamp = session.history[-1]
            log.write(f"{doc_id}\t{stamp}\tok\n")
            ctx.out(f"assimilated {doc_id} at {stamp}")
    (directory / SESSION_DOC).write_bytes(
        serialize(session.current, ctx.profile).encode("utf-8"))
    return code


def cmd_map(ctx: _Context) -> int:
    doc = ctx.document(ctx.args.file)
    try:
        mapping = CategoryMapping.parse(ctx.read_text(ctx.args.mapping))
    except (ParseError, ValueError) as e:
        raise _Abort(USAGE, f"{ctx.args.mapping}: {e}") from e
    ctx.emit_doc(map_categories(doc, mapping))
    return OK


def cmd_regdiff(ctx: _Context) -> int:
    regs = []
    for name in (ctx.args.a, ctx.args.b):
        try:
            regs.append(load_registry(ctx.read_bytes(name)))
        except (ParseError, ValueError) as e:
            raise _Abort(USAGE, f"{name}: {e}") from e
    for line in registry_diff(*regs).lines():
        ctx.out(line)
    return OK


def cmd_stats(ctx: _Context) -> int:
    doc = ctx.document(ctx.args.file)
    s = doc.stats()
    for key in ("events", "participants", "nodes", "relations", "groups",
                "alternatives", "variables"):
        ctx.out(f"{key}: {s[key]}")
    ctx.out(f"readings: {reading_count(doc)}")
    return OK


# -- argument parsing ------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--registry", help="registry file (default: bundled default.reg)")
    common.add_argument("--profile", help="format profile (JSON)")
    common.add_argument("--strict", action="store_true",
                        help="unknown categories are errors")
    common.add_argument("--cap", type=int, default=DEFAULT_CAP,
                        help="reading enumeration cap (default %(default)s)")

    parser = argparse.ArgumentParser(prog="semrep", parents=[common],
                                     description="multimodal semantic representation toolkit")
    sub = parser.add_subparsers(dest="command", metavar="subcommand")
    sub.required = True

    def add(name, func, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=func)
        return p

    def corr_flags(p):
        p.add_argument("--corr", action="append", metavar="LEFT=RIGHT",
                       help="node correspondence (repeatable)")
        p.add_argument("--corr-file", help="file of 'left right' pairs")

    add("validate", cmd_validate, "validate documents against a registry") \
        .add_argument("files", nargs="+")
    add("canon", cmd_canon, "print the canonical serialization").add_argument("file")
    add("readings", cmd_readings, "list readings with scores").add_argument("file")
    p = add("best", cmd_best, "print the best reading")
    p.add_argument("file")
    p.add_argument("-o", "--output", help="also write the reading document here")
    p = add("prune", cmd_prune, "keep one alternative of a group")
    p.add_argument("file")
    p.add_argument("--group", required=True)
    p.add_argument("--keep", type=int, required=True)
    p = add("bind", cmd_bind, "instantiate a label variable")
    p.add_argument("file")
    p.add_argument("--var", required=True)
    p.add_argument("--node", required=True)
    p = add("merge", cmd_merge, "fuse two documents")
    p.add_argument("left")
    p.add_argument("right")
    corr_flags(p)
    p = add("assimilate", cmd_assimilate, "fuse documents into a session directory")
    p.add_argument("--session", required=True, help="session directory")
    p.add_argument("--now", type=int, help=argparse.SUPPRESS)
    p.add_argument("files", nargs="+")
    corr_flags(p)
    p = add("map", cmd_map, "rename categories")
    p.add_argument("file")
    p.add_argument("--mapping", required=True, help="mapping file")
    p = add("regdiff", cmd_regdiff, "compare two registries")
    p.add_argument("a")
    p.add_argument("b")
    add("stats", cmd_stats, "print element and reading counts").add_argument("file")
    return parser


def run(argv, stdin=None, stdout=None, stderr=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            args = parser.parse_args(list(argv))
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else USAGE
    try:
        ctx = _Context(args, stdin, stdout, stderr)
        return args.func(ctx)
    except _Abort as e:
        if e.message:
            stderr.write(f"semrep: {e.message}\n")
        return e.code
    except SemRepError as e:
        stderr.write(f"semrep: {type(e).__name__}: {e}\n")
        return USAGE


def main() -> None:
    for stream in (sys.stdout, sys.stderr):
        reconfigure = getattr(stream, "reconfigure", None)
        if reconfigure is not None:
            reconfigure(encoding="utf-8")
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
