"""Command-line driver: ``compile``, ``run`` and ``bench``.

Runtime and compile flags keep their single-dash spellings (``-qrt nisq``,
``-shots 2048``, ``-emit=mlir``, ``-no-entrypoint``). A bare ``qmlir file.qasm``
means ``compile``.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from qasmir.bench import bench_corpus, format_csv
from qasmir.errors import ConfigError, QasmirError, QirParseError, QirRuntimeError
from qasmir.pipeline import EMIT_KINDS, compile_file
from qasmir.runtime import ExecutionConfig, interpret

EXIT_OK, EXIT_COMPILE, EXIT_RUNTIME = 0, 1, 2
SUBCOMMANDS = ("compile", "run", "bench")

logger = logging.getLogger("qasmir")


def _include_dirs(args) -> list[str]:
    dirs = list(args.include or [])
    env = os.environ.get("QASM_INCLUDE_PATH")
    if env:
        dirs.extend(d for d in env.split(os.pathsep) if d)
    return dirs


def _add_compile_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("-I", dest="include", action="append", metavar="DIR", help="add an include search directory")
    p.add_argument("-no-entrypoint", dest="no_entrypoint", action="store_true", help="emit a library kernel taking a qreg instead of main")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qmlir", description=__doc__.splitlines()[0], allow_abbrev=False)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compile", help="compile OpenQASM to MLIR-style text or .ll", allow_abbrev=False)
    c.add_argument("input")
    c.add_argument("-emit", choices=EMIT_KINDS, help="print this representation to stdout")
    c.add_argument("-o", dest="output", help="output path")
    _add_compile_flags(c)

    r = sub.add_parser("run", help="run a .qasm or .ll program on the built-in simulator", allow_abbrev=False)
    r.add_argument("input")
    r.add_argument("-qrt", dest="mode", default="ftqc", help="nisq or ftqc (default ftqc)")
    r.add_argument("-shots", type=int, default=1)
    r.add_argument("-qpu", dest="backend", default="builtin")
    r.add_argument("-seed", type=int, default=None)
    r.add_argument("-max-qubits", dest="max_qubits", type=int, default=26)
    r.add_argument("-entry", help="function to run when the module has no main")
    r.add_argument("--report-json", dest="report_json", metavar="PATH")
    _add_compile_flags(r)

    b = sub.add_parser("bench", help="time compile phases over a directory of .qasm files", allow_abbrev=False)
    b.add_argument("corpus_dir")
    b.add_argument("-reps", dest="repetitions", type=int, default=5)
    return parser


def _compile(path: str, args, emit: str = "llvm"):
    return compile_file(path, emit=emit, add_entry_point=not args.no_entrypoint, include_dirs=_include_dirs(args))


def cmd_compile(args) -> int:
    try:
        result = _compile(args.input, args, args.emit or "llvm")
    except (QasmirError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPILE
    for d in result.warnings:
        print(d, file=sys.stderr)
    if args.output:
        Path(args.output).write_text(result.text)
    elif args.emit:
        sys.stdout.write(result.text)
    else:
        Path(Path(args.input).stem + ".ll").write_text(result.text)
    return EXIT_OK


def cmd_run(args) -> int:
    try:
        if args.input.endswith(".ll"):
            from qasmir.qir import parse_qir_text

            module = parse_qir_text(Path(args.input).read_text())
        else:
            module = _compile(args.input, args).llvm
    except (QasmirError, OSError) as exc:
        if isinstance(exc, QirRuntimeError) and not isinstance(exc, QirParseError):
            raise
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPILE
    try:
        config = ExecutionConfig(args.mode, args.shots, args.backend, args.seed, args.max_qubits)
        report = interpret(module, config, entry=args.entry)
    except (ConfigError, QirRuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    sys.stdout.write(report.format_counts())
    if args.report_json:
        Path(args.report_json).write_text(report.to_json() + "\n")
    return EXIT_OK


def cmd_bench(args) -> int:
    try:
        rows = bench_corpus(args.corpus_dir, args.repetitions)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPILE
    sys.stdout.write(format_csv(rows))
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    first = next((a for a in argv if a not in ("-v", "--verbose")), None)
    if first is not None and first not in SUBCOMMANDS and first not in ("-h", "--help"):
        argv.insert(argv.index(first), "compile")
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    return {"compile": cmd_compile, "run": cmd_run, "bench": cmd_bench}[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
