"""TPTP THF0 problems: emission, rendering, parsing, and an external prover hook.

Only the fragment this package writes is parsed back: ``thf(name, role,
(body)).`` statements whose bodies are type declarations, ``sym = term``
definitions, or closed formulas built from ``@ ^ ! ? ~ | & = => !!``.
"""

from __future__ import annotations

import enum
import os
import re
import shlex
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

from . import qml
from .embedding import DEFINITIONS, HYBRID, MVALID, close_universally, embed, pred_const, rel_const
from .errors import ConfigurationError, IllTyped, ParseError, ProcessFailure, UnparsableOutput
from .stt import (
    EQ_NAME,
    IOTA,
    LOGICAL_NAMES,
    MU,
    NEG,
    NEG_NAME,
    O,
    OR,
    OR_NAME,
    PI_NAME,
    App,
    Arrow,
    Base,
    Const,
    Lam,
    SttType,
    Term,
    Var,
    eq_const,
    free_vars,
    fresh_name,
    pi_const,
    substitute,
    type_of,
    unwind,
)

# -- problem structure ---------------------------------------------------------


@dataclass(frozen=True)
class TypeDecl:
    name: str
    symbol: str
    type: SttType | None  # None declares a new base type ($tType)


@dataclass(frozen=True)
class DefinitionEntry:
    name: str
    symbol: Const
    definiens: Term


@dataclass(frozen=True)
class FormulaEntry:
    name: str
    role: str  # axiom | conjecture | hypothesis | lemma
    term: Term


Entry = Union[TypeDecl, DefinitionEntry, FormulaEntry]
FORMULA_ROLES = ("axiom", "hypothesis", "lemma", "conjecture")


@dataclass
class ThfProblem:
    entries: list[Entry] = field(default_factory=list)
    header: list[str] = field(default_factory=list)

    def __add__(self, other: "ThfProblem") -> "ThfProblem":
        return ThfProblem(self.entries + other.entries, self.header + other.header)

    @property
    def conjectures(self) -> list[FormulaEntry]:
        return [e for e in self.entries if isinstance(e, FormulaEntry) and e.role == "conjecture"]

    @property
    def conjecture(self) -> FormulaEntry:
        cs = self.conjectures
        if len(cs) != 1:
            raise ValueError(f"expected exactly one conjecture, found {len(cs)}")
        return cs[0]

    def definitions(self) -> dict[Const, Term]:
        return {e.symbol: e.definiens for e in self.entries if isinstance(e, DefinitionEntry)}

    def validate(self, require_conjecture: bool = True) -> None:
        """Check unique names, declaration before use, typing, and the conjecture count."""
        names: set[str] = set()
        base_types = {"o", "i"}
        symbols: dict[str, SttType] = {}
        defined: set[str] = set()
        for e in self.entries:
            if e.name in names:
                raise ValueError(f"duplicate statement name {e.name!r}")
            names.add(e.name)
            if isinstance(e, TypeDecl):
                if e.type is None:
                    base_types.add(e.symbol)
                    continue
                for b in _base_names(e.type):
                    if b not in base_types:
                        raise ValueError(f"type {b} used before declaration in {e.name}")
                if e.symbol in symbols:
                    raise ValueError(f"symbol {e.symbol} declared twice")
                symbols[e.symbol] = e.type
                continue
            term = e.definiens if isinstance(e, DefinitionEntry) else e.term
            for c in _constants(term):
                if c.name in LOGICAL_NAMES:
                    continue
                if symbols.get(c.name) != c.type:
                    raise ValueError(f"{c.name} used before declaration in {e.name}")
            if isinstance(e, DefinitionEntry):
                if symbols.get(e.symbol.name) != e.symbol.type:
                    raise ValueError(f"definition of undeclared {e.symbol.name}")
                if e.symbol.name in defined:
                    raise ValueError(f"{e.symbol.name} defined twice")
                if type_of(e.definiens) != e.symbol.type:
                    raise IllTyped(e.name, e.symbol.type, type_of(e.definiens))
                defined.add(e.symbol.name)
            elif type_of(e.term) != O:
                raise IllTyped(e.name, O, type_of(e.term), "formulas must be of type $o")
        n = len(self.conjectures)
        if n > 1 or (require_conjecture and n == 0):
            raise ValueError(f"expected exactly one conjecture, found {n}")

    def render(self) -> str:
        out = [f"% {h}".rstrip() for h in self.header]
        if out:
            out.append("")
        for e in self.entries:
            if isinstance(e, TypeDecl):
                body = f"{e.symbol}: {'$tType' if e.type is None else render_type(e.type)}"
                role = "type"
            elif isinstance(e, DefinitionEntry):
                body = f"{e.symbol.name} = {render_term(e.definiens)}"
                role = "definition"
            else:
                body = render_term(e.term)
                role = e.role
            out.append(f"thf({e.name},{role},(\n    {body} )).\n")
        return "\n".join(out)


def _base_names(ty: SttType) -> Iterable[str]:
    if isinstance(ty, Base):
        yield ty.name
    else:
        yield from _base_names(ty.dom)
        yield from _base_names(ty.cod)


def _constants(t: Term) -> list[Const]:
    out = []
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Const):
            out.append(s)
        elif isinstance(s, Lam):
            stack.append(s.body)
        elif isinstance(s, App):
            stack.extend((s.fn, s.arg))
    return out


# -- rendering -------------------------------------------------------------


def render_type(ty: SttType) -> str:
    return str(ty)


def _disambiguate(t: Term, scope: dict[str, SttType]) -> Term:
    # THF resolves variables by name only, so a binder that reuses an
    # enclosing name at another type is renamed
    if isinstance(t, Lam):
        v, body = t.var, t.body
        if v.name in scope and scope[v.name] != v.type:
            avoid = set(scope) | {u.name for u in free_vars(body)}
            nv = Var(fresh_name(v.name, avoid), v.type)
            v, body = nv, substitute(body, t.var, nv)
        return Lam(v, _disambiguate(body, {**scope, v.name: v.type}))
    if isinstance(t, App):
        return App(_disambiguate(t.fn, scope), _disambiguate(t.arg, scope))
    return t


def render_term(t: Term) -> str:
    frees: dict[str, SttType] = {}
    for v in free_vars(t):
        if frees.setdefault(v.name, v.type) != v.type:
            raise ValueError(f"free variable {v.name} occurs at two types")
    return _render(_disambiguate(t, frees))


def _render(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Const):
        if t.name in (NEG_NAME, OR_NAME):
            return f"({t.name})"
        if t.name in LOGICAL_NAMES:
            raise ValueError(f"cannot render unapplied {t.name!r}")
        return t.name
    if isinstance(t, Lam):
        return f"(^ [{t.var.name}:{render_type(t.var.type)}]: {_render(t.body)})"
    head, args = unwind(t)
    if isinstance(head, Const) and head.name in LOGICAL_NAMES:
        if head.name == NEG_NAME and len(args) == 1:
            return f"(~ {_render(args[0])})"
        if head.name in (OR_NAME, EQ_NAME) and len(args) == 2:
            return f"({_render(args[0])} {head.name} {_render(args[1])})"
        if head.name == PI_NAME and len(args) == 1:
            a = args[0]
            if isinstance(a, Lam):
                return f"(! [{a.var.name}:{render_type(a.var.type)}]: {_render(a.body)})"
            return f"(!! @ {_render(a)})"
        if head.name == OR_NAME and len(args) == 1:
            return f"((|) @ {_render(args[0])})"
        raise ValueError(f"cannot render {head.name!r} applied to {len(args)} argument(s)")
    return "(" + " @ ".join(_render(x) for x in [head, *args]) + ")"


# -- parsing -----------------------------------------------------------------

_THF_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>%[^\n]*)
  | (?P<op><=>|=>|!!|\$tType|\$o|\$i|[()\[\],.:@^!?~|&=>])
  | (?P<upper>[A-Z][A-Za-z0-9_]*)
  | (?P<lower>[a-z][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _lex(text: str) -> list[_Tok]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _THF_TOKEN.match(text, pos)
        if not m:
            raise ParseError(line, pos - line_start + 1, f"unexpected character {text[pos]!r}")
        kind, val = m.lastgroup, m.group()
        if kind not in ("ws", "comment"):
            toks.append(_Tok(kind, val, line, pos - line_start + 1))  # type: ignore[arg-type]
        nl = val.count("\n")
        if nl:
            line += nl
            line_start = pos + val.rfind("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _ThfParser:
    def __init__(self, text: str):
        self.toks = _lex(text)
        self.i = 0
        self.base_types: dict[str, SttType] = {"$o": O, "$i": IOTA}
        self.symbols: dict[str, Const] = {}
        self.names: set[str] = set()
        self.header: list[str] = []
        for line in text.splitlines():
            if line.startswith("%") and not self.names:
                self.header.append(line[1:].strip())
            elif line.strip():
                break

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def err(self, msg: str, tok: _Tok | None = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(tok.line, tok.col, msg)

    def accept(self, text: str) -> bool:
        if self.tok.text == text and self.tok.kind != "eof":
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> _Tok:
        tok = self.tok
        if not self.accept(text):
            raise self.err(f"expected {text!r}, found {tok.text or 'end of input'!r}")
        return tok

    def word(self, kind: str, what: str) -> _Tok:
        tok = self.tok
        if tok.kind != kind:
            raise self.err(f"expected {what}, found {tok.text or 'end of input'!r}")
        self.i += 1
        return tok

    def problem(self) -> ThfProblem:
        entries: list[Entry] = []
        while self.tok.kind != "eof":
            entries.append(self.statement())
        return ThfProblem(entries, self.header)

    def statement(self) -> Entry:
        start = self.tok
        kw = self.word("lower", "'thf'")
        if kw.text != "thf":
            raise self.err("only thf statements are supported", kw)
        self.expect("(")
        name = self.word("lower", "a statement name")
        if name.text in self.names:
            raise self.err(f"duplicate statement name {name.text!r}", name)
        self.names.add(name.text)
        self.expect(",")
        role = self.word("lower", "a role")
        self.expect(",")
        self.expect("(")
        if role.text == "type":
            entry: Entry = self.type_decl(name.text)
        elif role.text == "definition":
            entry = self.definition(name.text)
        elif role.text in FORMULA_ROLES:
            body = self.term({})
            try:
                ty = type_of(body)
            except IllTyped as e:
                raise self.err(str(e), start) from None
            if ty != O:
                raise self.err(f"{role.text} {name.text} has type {ty}, not $o", start)
            entry = FormulaEntry(name.text, role.text, body)
        else:
            raise self.err(f"unsupported role {role.text!r}", role)
        self.expect(")")
        self.expect(")")
        self.expect(".")
        return entry

    def type_decl(self, name: str) -> TypeDecl:
        sym = self.word("lower", "a symbol")
        self.expect(":")
        if self.accept("$tType"):
            self.base_types[sym.text] = MU if sym.text == "mu" else Base(sym.text)
            return TypeDecl(name, sym.text, None)
        ty = self.type_expr()
        if sym.text in self.symbols:
            raise self.err(f"symbol {sym.text} declared twice", sym)
        self.symbols[sym.text] = Const(sym.text, ty)
        return TypeDecl(name, sym.text, ty)

    def type_expr(self) -> SttType:
        left = self.type_unit()
        if self.accept(">"):
            return Arrow(left, self.type_expr())
        return left

    def type_unit(self) -> SttType:
        if self.accept("("):
            ty = self.type_expr()
            self.expect(")")
            return ty
        tok = self.tok
        if tok.text in self.base_types and tok.kind in ("op", "lower"):
            self.i += 1
            return self.base_types[tok.text]
        raise self.err(f"unknown type {tok.text!r} (types must be declared before use)")

    def definition(self, name: str) -> DefinitionEntry:
        sym = self.word("lower", "the defined symbol")
        if sym.text not in self.symbols:
            raise self.err(f"{sym.text} used before declaration", sym)
        self.expect("=")
        body = self.term({})
        c = self.symbols[sym.text]
        try:
            ty = type_of(body)
        except IllTyped as e:
            raise self.err(str(e), sym) from None
        if ty != c.type:
            raise self.err(f"definition of {c.name} has type {ty}, declared {c.type}", sym)
        return DefinitionEntry(name, c, body)

    # terms: binary := app_chain [op app_chain {op app_chain}]
    def term(self, env: dict[str, Var]) -> Term:
        left = self.app_chain(env)
        tok = self.tok
        for op in ("|", "&", "=", "=>", "<=>"):
            if tok.text == op and tok.kind == "op":
                break
        else:
            return left
        self.i += 1
        right = self.app_chain(env)
        left = self.binop(op, left, right, tok)
        while op in ("|", "&") and self.accept(op):
            left = self.binop(op, left, self.app_chain(env), tok)
        return left

    def binop(self, op: str, a: Term, b: Term, tok: _Tok) -> Term:
        try:
            if op == "|":
                return App(App(OR, a), b)
            if op == "&":
                return App(NEG, App(App(OR, App(NEG, a)), App(NEG, b)))
            if op == "=>":
                return App(App(OR, App(NEG, a)), b)
            ty = type_of(a)
            if op == "=":
                return App(App(eq_const(ty), a), b)
            return App(App(eq_const(O), a), b)  # <=>
        except IllTyped as e:
            raise self.err(str(e), tok) from None

    def app_chain(self, env: dict[str, Var]) -> Term:
        tok = self.tok
        if self.accept("!!"):
            self.expect("@")
            arg = self.unit(env)
            ty = self._type(arg, tok)
            if not (isinstance(ty, Arrow) and ty.cod == O):
                raise self.err("!! needs a predicate argument", tok)
            head: Term = App(pi_const(ty.dom), arg)
        else:
            head = self.unit(env)
        while self.accept("@"):
            at = self.tok
            arg = self.unit(env)
            fty = self._type(head, at)
            if not isinstance(fty, Arrow) or fty.dom != self._type(arg, at):
                raise self.err("ill-typed application", at)
            head = App(head, arg)
        return head

    def _type(self, t: Term, tok: _Tok) -> SttType:
        try:
            return type_of(t)
        except IllTyped as e:
            raise self.err(str(e), tok) from None

    def unit(self, env: dict[str, Var]) -> Term:
        tok = self.tok
        if self.accept("("):
            if self.tok.text in ("~", "|") and self.toks[self.i + 1].text == ")":
                sym = self.tok.text
                self.i += 2
                return NEG if sym == "~" else OR
            t = self.term(env)
            self.expect(")")
            return t
        if self.accept("~"):
            return App(NEG, self.unit(env))
        if tok.text in ("^", "!", "?") and tok.kind == "op":
            self.i += 1
            return self.binder(tok.text, env)
        if tok.kind == "upper":
            self.i += 1
            if tok.text not in env:
                raise self.err(f"unbound variable {tok.text}", tok)
            return env[tok.text]
        if tok.kind == "lower":
            self.i += 1
            if tok.text not in self.symbols:
                raise self.err(f"{tok.text} used before declaration", tok)
            return self.symbols[tok.text]
        raise self.err(f"unexpected {tok.text or 'end of input'!r}")

    def binder(self, kind: str, env: dict[str, Var]) -> Term:
        self.expect("[")
        vs: list[Var] = []
        while True:
            name = self.word("upper", "a variable")
            self.expect(":")
            vs.append(Var(name.text, self.type_expr()))
            if not self.accept(","):
                break
        self.expect("]")
        self.expect(":")
        inner = dict(env)
        for v in vs:
            inner[v.name] = v
        body = self.unit(inner)
        for v in reversed(vs):
            if kind == "^":
                body = Lam(v, body)
            elif kind == "!":
                body = App(pi_const(v.type), Lam(v, body))
            else:
                body = App(NEG, App(pi_const(v.type), Lam(v, App(NEG, body))))
        return body


def parse_thf(text: str, require_conjecture: bool = False) -> ThfProblem:
    """Parse a THF file in the emitted fragment.

    Rejects use before declaration, duplicate names, and more than one
    conjecture (or none, with ``require_conjecture``).
    """
    p = _ThfParser(text)
    problem = p.problem()
    n = len(problem.conjectures)
    if n > 1 or (require_conjecture and n == 0):
        tok = p.toks[-1]
        raise ParseError(tok.line, tok.col, f"expected exactly one conjecture, found {n}")
    return problem


# -- emission ----------------------------------------------------------------

MU_DECL = TypeDecl("mu_type", "mu", None)


def emit_operator_axioms(include_hybrid: bool = False) -> ThfProblem:
    """Type declarations and definitions of the modal operators and of validity."""
    entries: list[Entry] = [MU_DECL]
    for d in DEFINITIONS:
        if d.const.name in HYBRID and not include_hybrid:
            continue
        entries.append(TypeDecl(f"{d.const.name}_type", d.const.name, d.const.type))
        entries.append(DefinitionEntry(d.const.name, d.const, d.definiens))
    header = [
        "Quantified multimodal logic in simple type theory: modal operators and validity.",
        "Worlds have type mu; world-dependent propositions have type mu>$o.",
    ]
    return ThfProblem(entries, header)


def signature_decls(sig: qml.QmlSignature) -> list[Entry]:
    out: list[Entry] = []
    for r in sorted(sig.rels):
        out.append(TypeDecl(f"{r}_type", r, rel_const(r).type))
    for k, n in sorted(sig.preds.items()):
        out.append(TypeDecl(f"{k}_type", k, pred_const(k, n).type))
    return out


def embedded_validity(phi: qml.Formula) -> Term:
    """``mvalid`` applied to the named embedding, universally closed over free variables."""
    return close_universally(App(MVALID, embed(phi, named=True, sugar=True)))


def emit_problem(
    conjecture: qml.Formula,
    sig: qml.QmlSignature,
    name: str = "conj",
    axioms: Sequence[qml.Formula] = (),
    comments: Sequence[str] = (),
) -> ThfProblem:
    qml.check(conjecture, sig)
    problem = emit_operator_axioms()
    problem.header = list(comments) or [f"Problem {name}"]
    problem.header.append(f"Conjecture: {qml.print_qml(conjecture)}")
    problem.entries.extend(signature_decls(sig))
    for i, ax in enumerate(axioms, 1):
        qml.check(ax, sig)
        problem.entries.append(FormulaEntry(f"axiom_{i}", "axiom", embedded_validity(ax)))
    problem.entries.append(FormulaEntry(name, "conjecture", embedded_validity(conjecture)))
    problem.validate()
    return problem


def emit_term_problem(
    conjecture: Term,
    name: str,
    comments: Sequence[str] = (),
    decls: Sequence[Entry] = (),
) -> ThfProblem:
    """A problem whose conjecture is an arbitrary closed STT formula over the operators."""
    problem = emit_operator_axioms()
    problem.header = list(comments)
    problem.entries.extend(decls)
    problem.entries.append(FormulaEntry(name, "conjecture", conjecture))
    problem.validate()
    return problem


# -- external provers ------------------------------------------------------------


class SzsStatus(enum.Enum):
    THEOREM = "Theorem"
    COUNTER_SATISFIABLE = "CounterSatisfiable"
    UNKNOWN = "Unknown"
    ERROR = "Error"


_SZS = re.compile(r"^%?\s*SZS status\s+(\w+)", re.MULTILINE)
_THEOREM = {"Theorem", "Tautology", "Equivalent"}
_COUNTER = {"CounterSatisfiable", "Satisfiable", "CounterTheorem"}
_ERROR = {"Error", "InputError", "SyntaxError", "OSError", "TypeError", "UsageError"}


def parse_szs(output: str) -> tuple[SzsStatus, str]:
    m = _SZS.search(output)
    if m is None:
        raise UnparsableOutput("no SZS status line in prover output")
    word = m.group(1)
    if word in _THEOREM:
        return SzsStatus.THEOREM, word
    if word in _COUNTER:
        return SzsStatus.COUNTER_SATISFIABLE, word
    if word in _ERROR:
        return SzsStatus.ERROR, word
    return SzsStatus.UNKNOWN, word


@dataclass
class ProverResult:
    status: SzsStatus
    szs: str | None
    output: str
    elapsed: float


def run_external_prover(problem: ThfProblem | str, command: str | None, timeout: float = 60.0) -> ProverResult:
    """Write the problem to a temporary ``.p`` file and run ``command`` on it.

    ``command`` is a shell-like template; ``{file}`` is replaced by the
    problem path (appended if absent).  A timeout yields ``Unknown``.
    """
    if not command or not command.strip():
        raise ConfigurationError("no prover command configured")
    text = problem if isinstance(problem, str) else problem.render()
    fd, path = tempfile.mkstemp(suffix=".p", prefix="qmlstt_")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        argv = shlex.split(command)
        if any("{file}" in a for a in argv):
            argv = [a.replace("{file}", path) for a in argv]
        else:
            argv.append(path)
        start = time.perf_counter()
        try:
            proc = subprocess.run(argv, capture_output=True, text=True, timeout=timeout)
        except subprocess.TimeoutExpired as e:
            out = e.stdout.decode() if isinstance(e.stdout, bytes) else (e.stdout or "")
            return ProverResult(SzsStatus.UNKNOWN, "Timeout", out, time.perf_counter() - start)
        except OSError as e:
            raise ProcessFailure(f"cannot run {argv[0]!r}: {e}") from e
        elapsed = time.perf_counter() - start
        try:
            status, word = parse_szs(proc.stdout)
        except UnparsableOutput:
            if proc.returncode != 0:
                raise ProcessFailure(f"prover exited with status {proc.returncode}: {proc.stderr.strip()[:200]}") from None
            raise
        return ProverResult(status, word, proc.stdout, elapsed)
    finally:
        try:
            os.unlink(path)
        except OSError:
            pass
