"""Command-line interface: ``qmlstt {check,emit,oracle,prove,embed,corpus}``.

Exit codes: 0 valid at bound / suite passed / theorem, 1 countermodel or
failed suite, 2 unknown, 64 usage, 70 internal error, 74 I/O error,
78 no prover configured.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Sequence

from . import corpus, thf
from .check import InternalError, ProblemFile, parse_problem
from .config import OracleConfig, SearchBounds
from .embedding import embed, wrap_valid
from .errors import ConfigurationError, ParseError, ProcessFailure, QmlSttError, ResourceBound, UnparsableOutput
from .stt import beta_eta_normalize, show

EX_OK, EX_FAIL, EX_UNKNOWN = 0, 1, 2
EX_USAGE, EX_SOFTWARE, EX_IOERR, EX_CONFIG = 64, 70, 74, 78


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {n}")
    return n


def _nonneg(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}") from None
    if n < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {n}")
    return n


def _seconds(text: str) -> float:
    try:
        t = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected seconds, got {text!r}") from None
    if t <= 0:
        raise argparse.ArgumentTypeError("timeout must be positive")
    return t


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qmlstt", description="Quantified multimodal logic embedded in simple type theory.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def source(sp: argparse.ArgumentParser, required: bool = True) -> None:
        g = sp.add_mutually_exclusive_group(required=required)
        g.add_argument("file", nargs="?", help=".qml problem file")
        g.add_argument("--builtin", choices=sorted(corpus.BENCHMARKS), help="use a built-in benchmark")

    def bounds(sp: argparse.ArgumentParser, w: int, d: int) -> None:
        sp.add_argument("--max-w", type=_positive, default=w, help=f"maximum number of worlds (default {w})")
        sp.add_argument("--max-d", type=_positive, default=d, help=f"maximum domain size (default {d})")

    c = sub.add_parser("check", help="bounded validity check with countermodel search")
    source(c)
    bounds(c, 3, 2)
    c.add_argument("--p-mode", choices=["powerset", "all"], default="powerset")
    c.add_argument("--timeout", type=_seconds, default=None)
    c.add_argument("--json", action="store_true")

    e = sub.add_parser("emit", help="write a THF problem")
    g = e.add_mutually_exclusive_group(required=True)
    g.add_argument("file", nargs="?", help=".qml problem file")
    g.add_argument("--builtin", choices=sorted(corpus.builtin_problems_names()), help="built-in problem")
    g.add_argument("--operators", action="store_true", help="only the operator definitions")
    e.add_argument("-o", "--out", help="output .p path (default: stdout)")

    o = sub.add_parser("oracle", help="cross-check the Kripke and finite-frame evaluators")
    o.add_argument("suite", choices=["lemma1", "transfer", "lemma3"])
    source(o, required=False)
    o.add_argument("--max-w", type=_positive, default=None)
    o.add_argument("--max-d", type=_positive, default=None)
    o.add_argument("--depth", type=_nonneg, default=3)
    o.add_argument("--max-formulas", type=_positive, default=None, help="cap on lemma1 formulas (default: all)")
    o.add_argument("--json", action="store_true")
    o.add_argument("--report", help="also write the JSON report to this path")

    pr = sub.add_parser("prove", help="run an external THF prover")
    source(pr)
    pr.add_argument("--prover-cmd", default=os.environ.get("QMLSTT_PROVER"), help="command template with {file}")
    pr.add_argument("--timeout", type=_seconds, default=60.0)
    pr.add_argument("--json", action="store_true")

    em = sub.add_parser("embed", help="print the embedding of a formula")
    em.add_argument("formula")
    em.add_argument("--sig", default="rel r; pred p/1; propvar P Q; indvar X Y", help="declarations separated by ';'")
    em.add_argument("--named", action="store_true", help="keep operator constants")
    em.add_argument("--valid", action="store_true", help="wrap in validity and normalize")

    sub.add_parser("corpus", help="list built-in benchmarks")
    return p


def _load(args) -> ProblemFile:
    if getattr(args, "builtin", None):
        b = corpus.BENCHMARKS[args.builtin]
        return ProblemFile(b.signature, b.formula(), tuple(b.axiom_formulas()), b.name)
    path = Path(args.file)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise OSError(f"{path}: {e.strerror or e}") from e
    try:
        return parse_problem(text, path.stem)
    except ParseError as e:
        raise ParseError(e.line, e.col, f"{path}: {e.message}") from None


def _write(path: str | None, text: str, out) -> None:
    if path is None:
        out.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as e:
        raise OSError(f"{path}: {e.strerror or e}") from e


def cmd_check(args, out) -> int:
    pf = _load(args)
    v = SearchBounds(args.max_w, args.max_d, args.p_mode, args.timeout).check(pf)
    out.write((json.dumps(v.to_json(), indent=2, sort_keys=True) if args.json else v.render()) + "\n")
    return v.exit_code


def cmd_emit(args, out) -> int:
    if args.operators:
        problem = thf.emit_operator_axioms()
    elif args.builtin:
        problem = corpus.builtin_problems()[args.builtin]
    else:
        pf = _load(args)
        problem = thf.emit_problem(pf.conjecture, pf.signature, pf.name, pf.axioms)
    _write(args.out, problem.render(), out)
    return EX_OK


def cmd_oracle(args, out) -> int:
    cfg = OracleConfig(args.suite, args.max_w, args.max_d, args.depth, args.max_formulas)
    if cfg.suite == "lemma3" and cfg.bounds[0] > 3:
        raise UsageError("lemma3 enumerates frames exhaustively; --max-w must be at most 3")
    pf = _load(args) if (args.file or args.builtin) else None
    report = cfg.run(pf)
    text = json.dumps(report.to_json(), indent=2, sort_keys=True) if args.json else report.render()
    out.write(text + "\n")
    if args.report:
        _write(args.report, json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n", out)
    return EX_OK if report.passed else EX_FAIL


def cmd_prove(args, out) -> int:
    if args.builtin:
        problem = corpus.builtin_problems()[args.builtin]
    else:
        pf = _load(args)
        problem = thf.emit_problem(pf.conjecture, pf.signature, pf.name, pf.axioms)
    res = thf.run_external_prover(problem, args.prover_cmd, args.timeout)
    if args.json:
        out.write(json.dumps({"status": res.status.value, "szs": res.szs, "elapsed": round(res.elapsed, 3)}) + "\n")
    else:
        out.write(f"{res.status.value} (SZS {res.szs}, {res.elapsed:.2f}s)\n")
    return {
        thf.SzsStatus.THEOREM: EX_OK,
        thf.SzsStatus.COUNTER_SATISFIABLE: EX_FAIL,
        thf.SzsStatus.UNKNOWN: EX_UNKNOWN,
        thf.SzsStatus.ERROR: EX_SOFTWARE,
    }[res.status]


def cmd_embed(args, out) -> int:
    header = "\n".join(part.strip() for part in args.sig.split(";") if part.strip())
    try:
        pf = parse_problem(f"{header}\nconjecture: {args.formula}")
    except ParseError as e:
        raise UsageError(str(e)) from None
    if args.named:
        t = embed(pf.conjecture, pf.signature, named=True, sugar=True)
    elif args.valid:
        t = wrap_valid(embed(pf.conjecture, pf.signature))
    else:
        t = beta_eta_normalize(embed(pf.conjecture, pf.signature))
    out.write(show(t) + "\n")
    return EX_OK


def cmd_corpus(args, out) -> int:
    for name, b in sorted(corpus.BENCHMARKS.items()):
        out.write(f"{name:28} {b.expected:12} {b.conjecture}\n")
    for name in sorted(corpus.meta_problems()):
        out.write(f"{name:28} {'thf-only':12} (STT-level meta problem)\n")
    return EX_OK


COMMANDS = {
    "check": cmd_check,
    "emit": cmd_emit,
    "oracle": cmd_oracle,
    "prove": cmd_prove,
    "embed": cmd_embed,
    "corpus": cmd_corpus,
}


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as e:
        print(f"qmlstt: {e}", file=sys.stderr)
        return EX_USAGE
    except ParseError as e:
        print(f"qmlstt: parse error at {e}", file=sys.stderr)
        return EX_USAGE
    except ConfigurationError as e:
        print(f"qmlstt: {e} (use --prover-cmd or QMLSTT_PROVER)", file=sys.stderr)
        return EX_CONFIG
    except ResourceBound as e:
        print(f"qmlstt: unknown: {e}", file=sys.stderr)
        return EX_UNKNOWN
    except (InternalError, ProcessFailure, UnparsableOutput) as e:
        print(f"qmlstt: internal error: {e}", file=sys.stderr)
        return EX_SOFTWARE
    except OSError as e:
        print(f"qmlstt: I/O error: {e}", file=sys.stderr)
        return EX_IOERR
    except QmlSttError as e:
        print(f"qmlstt: {e}", file=sys.stderr)
        return EX_USAGE


if __name__ == "__main__":
    sys.exit(main())
