"""Abstract and concrete syntax of quantified multimodal logic.

Concrete grammar (loosest binding first)::

    formula := impl
    impl    := disj ['=>' impl]
    disj    := conj {'|' conj}
    conj    := unary {'&' unary}
    unary   := '~' unary | '[' r ']' unary | '<' r '>' unary
             | ('forall' | 'exists') Var ':' ('ind' | 'prop') '.' formula
             | atom | 'true' | 'false' | '(' formula ')'
    atom    := Var | pred ['(' [Var {',' Var}] ')']

Derived connectives are desugared while parsing, so the AST only ever holds
the seven primitive forms.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Union

from .errors import ArityMismatch, ParseError, UnknownSymbol


@dataclass(frozen=True)
class PropVar:
    name: str


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple[str, ...] = ()


@dataclass(frozen=True)
class Not:
    sub: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class ForallInd:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class ForallProp:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Box:
    rel: str
    sub: "Formula"


Formula = Union[PropVar, Atom, Not, Or, ForallInd, ForallProp, Box]


# derived forms, as plain constructors
def And(a: Formula, b: Formula) -> Formula:
    return Not(Or(Not(a), Not(b)))


def Implies(a: Formula, b: Formula) -> Formula:
    return Or(Not(a), b)


def Dia(rel: str, a: Formula) -> Formula:
    return Not(Box(rel, Not(a)))


def ExistsInd(var: str, body: Formula) -> Formula:
    return Not(ForallInd(var, Not(body)))


def ExistsProp(var: str, body: Formula) -> Formula:
    return Not(ForallProp(var, Not(body)))


@dataclass(frozen=True)
class QmlSignature:
    """Fixed vocabulary: individual and propositional variables, predicates with arities, modal indices."""

    ind_vars: frozenset[str] = frozenset()
    prop_vars: frozenset[str] = frozenset()
    preds: Mapping[str, int] = field(default_factory=dict)
    rels: frozenset[str] = frozenset({"r"})

    def __post_init__(self) -> None:
        object.__setattr__(self, "ind_vars", frozenset(self.ind_vars))
        object.__setattr__(self, "prop_vars", frozenset(self.prop_vars))
        object.__setattr__(self, "rels", frozenset(self.rels))
        object.__setattr__(self, "preds", dict(sorted(self.preds.items())))
        names = [self.ind_vars, self.prop_vars, frozenset(self.preds), self.rels]
        seen: set[str] = set()
        for group in names:
            clash = seen & group
            if clash:
                raise ValueError(f"signature name sets overlap: {sorted(clash)}")
            seen |= group
        if not self.rels:
            raise ValueError("a signature needs at least one modal index")
        if any(n < 0 for n in self.preds.values()):
            raise ValueError("negative arity")

    def __hash__(self) -> int:
        return hash((self.ind_vars, self.prop_vars, tuple(self.preds.items()), self.rels))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QmlSignature):
            return NotImplemented
        return (self.ind_vars, self.prop_vars, dict(self.preds), self.rels) == (
            other.ind_vars,
            other.prop_vars,
            dict(other.preds),
            other.rels,
        )


# -- free variables & structure ----------------------------------------------


def free_vars(phi: Formula) -> tuple[frozenset[str], frozenset[str]]:
    """Return ``(individual, propositional)`` free variables."""
    if isinstance(phi, PropVar):
        return frozenset(), frozenset({phi.name})
    if isinstance(phi, Atom):
        return frozenset(phi.args), frozenset()
    if isinstance(phi, (Not, Box)):
        return free_vars(phi.sub)
    if isinstance(phi, Or):
        li, lp = free_vars(phi.left)
        ri, rp = free_vars(phi.right)
        return li | ri, lp | rp
    if isinstance(phi, ForallInd):
        iv, pv = free_vars(phi.body)
        return iv - {phi.var}, pv
    if isinstance(phi, ForallProp):
        iv, pv = free_vars(phi.body)
        return iv, pv - {phi.var}
    raise TypeError(f"not a QML formula: {phi!r}")


def depth(phi: Formula) -> int:
    if isinstance(phi, (PropVar, Atom)):
        return 0
    if isinstance(phi, Or):
        return 1 + max(depth(phi.left), depth(phi.right))
    if isinstance(phi, (Not, Box)):
        return 1 + depth(phi.sub)
    return 1 + depth(phi.body)  # type: ignore[union-attr]


def subformulas(phi: Formula) -> Iterator[Formula]:
    yield phi
    if isinstance(phi, (Not, Box)):
        yield from subformulas(phi.sub)
    elif isinstance(phi, Or):
        yield from subformulas(phi.left)
        yield from subformulas(phi.right)
    elif isinstance(phi, (ForallInd, ForallProp)):
        yield from subformulas(phi.body)


def check(phi: Formula, sig: QmlSignature) -> None:
    """Raise if ``phi`` uses a symbol outside ``sig`` or a predicate at the wrong arity."""
    for s in subformulas(phi):
        if isinstance(s, PropVar) and s.name not in sig.prop_vars:
            raise UnknownSymbol(s.name)
        if isinstance(s, Atom):
            if s.pred not in sig.preds:
                raise UnknownSymbol(s.pred)
            if sig.preds[s.pred] != len(s.args):
                raise ArityMismatch(s.pred, sig.preds[s.pred], len(s.args))
            for a in s.args:
                if a not in sig.ind_vars:
                    raise UnknownSymbol(a)
        if isinstance(s, Box) and s.rel not in sig.rels:
            raise UnknownSymbol(s.rel)
        if isinstance(s, ForallInd) and s.var not in sig.ind_vars:
            raise UnknownSymbol(s.var)
        if isinstance(s, ForallProp) and s.var not in sig.prop_vars:
            raise UnknownSymbol(s.var)


def alpha_key(phi: Formula, _env: tuple = ()) -> tuple:
    """Hashable key identifying ``phi`` up to renaming of bound variables."""

    def ref(kind: str, name: str) -> object:
        for i in range(len(_env) - 1, -1, -1):
            if _env[i] == (kind, name):
                return len(_env) - 1 - i
        return name

    if isinstance(phi, PropVar):
        return ("P", ref("p", phi.name))
    if isinstance(phi, Atom):
        return ("A", phi.pred, tuple(ref("i", a) for a in phi.args))
    if isinstance(phi, Not):
        return ("N", alpha_key(phi.sub, _env))
    if isinstance(phi, Or):
        return ("O", alpha_key(phi.left, _env), alpha_key(phi.right, _env))
    if isinstance(phi, Box):
        return ("B", phi.rel, alpha_key(phi.sub, _env))
    if isinstance(phi, ForallInd):
        return ("FI", alpha_key(phi.body, _env + (("i", phi.var),)))
    return ("FP", alpha_key(phi.body, _env + (("p", phi.var),)))  # type: ignore[union-attr]


# -- lexer -----------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<op>=>|[~|&\[\]<>(),.:])
  | (?P<upper>[A-Z][A-Za-z0-9_]*)
  | (?P<lower>[a-z][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)

_KEYWORDS = {"forall", "exists", "true", "false", "ind", "prop"}


@dataclass(frozen=True)
class _Tok:
    kind: str  # op, upper, lower, kw, eof
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(line, pos - line_start + 1, f"unexpected character {text[pos]!r}")
        kind = m.lastgroup
        val = m.group()
        if kind == "ws":
            nl = val.count("\n")
            if nl:
                line += nl
                line_start = pos + val.rfind("\n") + 1
        else:
            if kind == "lower" and val in _KEYWORDS:
                kind = "kw"
            toks.append(_Tok(kind, val, line, pos - line_start + 1))  # type: ignore[arg-type]
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


# -- parser ----------------------------------------------------------------


class _Parser:
    def __init__(self, text: str, sig: QmlSignature):
        self.toks = _tokenize(text)
        self.i = 0
        self.sig = sig

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: _Tok | None = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(tok.line, tok.col, msg)

    def accept(self, text: str) -> bool:
        if self.tok.text == text and self.tok.kind in ("op", "kw"):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> _Tok:
        tok = self.tok
        if not self.accept(text):
            shown = tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {shown!r}")
        return tok

    def expect_kind(self, kind: str, what: str) -> _Tok:
        tok = self.tok
        if tok.kind != kind:
            raise self.error(f"expected {what}, found {tok.text or 'end of input'!r}")
        self.i += 1
        return tok

    def parse(self) -> Formula:
        phi = self.formula()
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r}")
        return phi

    def formula(self) -> Formula:
        left = self.disj()
        if self.accept("=>"):
            return Implies(left, self.formula())
        return left

    def disj(self) -> Formula:
        left = self.conj()
        while self.accept("|"):
            left = Or(left, self.conj())
        return left

    def conj(self) -> Formula:
        left = self.unary()
        while self.accept("&"):
            left = And(left, self.unary())
        return left

    def rel(self) -> str:
        tok = self.expect_kind("lower", "a modal index")
        if tok.text not in self.sig.rels:
            raise UnknownSymbol(tok.text)
        return tok.text

    def unary(self) -> Formula:
        tok = self.tok
        if self.accept("~"):
            return Not(self.unary())
        if self.accept("["):
            r = self.rel()
            self.expect("]")
            return Box(r, self.unary())
        if self.accept("<"):
            r = self.rel()
            self.expect(">")
            return Dia(r, self.unary())
        if tok.kind == "kw" and tok.text in ("forall", "exists"):
            return self.quantifier()
        if self.accept("true"):
            return self.top()
        if self.accept("false"):
            return Not(self.top())
        if self.accept("("):
            phi = self.formula()
            self.expect(")")
            return phi
        if tok.kind == "upper":
            self.i += 1
            if tok.text not in self.sig.prop_vars:
                if tok.text in self.sig.ind_vars:
                    raise self.error(f"individual variable {tok.text} used as a proposition", tok)
                raise UnknownSymbol(tok.text)
            return PropVar(tok.text)
        if tok.kind == "lower":
            return self.atom()
        raise self.error(f"unexpected {tok.text or 'end of input'!r}")

    def top(self) -> Formula:
        if not self.sig.prop_vars:
            raise self.error("'true'/'false' need a propositional variable in the signature")
        p = min(self.sig.prop_vars)
        return ForallProp(p, Or(PropVar(p), Not(PropVar(p))))

    def quantifier(self) -> Formula:
        universal = self.tok.text == "forall"
        self.i += 1
        var = self.expect_kind("upper", "a variable")
        self.expect(":")
        sort = self.tok
        if not (self.accept("ind") or self.accept("prop")):
            raise self.error("expected 'ind' or 'prop'")
        self.expect(".")
        if sort.text == "ind":
            if var.text not in self.sig.ind_vars:
                raise UnknownSymbol(var.text)
            body = self.formula()
            return ForallInd(var.text, body) if universal else ExistsInd(var.text, body)
        if var.text not in self.sig.prop_vars:
            raise UnknownSymbol(var.text)
        body = self.formula()
        return ForallProp(var.text, body) if universal else ExistsProp(var.text, body)

    def atom(self) -> Formula:
        tok = self.expect_kind("lower", "a predicate")
        if tok.text not in self.sig.preds:
            raise UnknownSymbol(tok.text)
        args: list[str] = []
        if self.accept("("):
            if not self.accept(")"):
                while True:
                    a = self.expect_kind("upper", "an individual variable")
                    if a.text not in self.sig.ind_vars:
                        raise UnknownSymbol(a.text)
                    args.append(a.text)
                    if self.accept(")"):
                        break
                    self.expect(",")
        arity = self.sig.preds[tok.text]
        if arity != len(args):
            raise ArityMismatch(tok.text, arity, len(args))
        return Atom(tok.text, tuple(args))


def parse_qml(text: str, sig: QmlSignature) -> Formula:
    return _Parser(text, sig).parse()


# -- printer ----------------------------------------------------------------

_IMPL, _OR, _AND, _PREFIX = 1, 2, 3, 4


def print_qml(phi: Formula, *, sugar: bool = True, full_parens: bool = False) -> str:
    """Render ``phi`` so that :func:`parse_qml` gives back the same tree.

    With ``sugar`` the derived connectives are recovered from their
    desugared shapes; with ``full_parens`` every compound is bracketed.
    """
    return _Printer(sugar, full_parens).fmt(phi, 0, False)


class _Printer:
    def __init__(self, sugar: bool, full: bool):
        self.sugar = sugar
        self.full = full

    def wrap(self, s: str, prec: int, ctx: int) -> str:
        return f"({s})" if self.full or prec < ctx else s

    def fmt(self, phi: Formula, ctx: int, open_right: bool) -> str:
        # open_right: something may follow on the right, so a quantifier must close
        if isinstance(phi, PropVar):
            return phi.name
        if isinstance(phi, Atom):
            if not phi.args:
                return phi.pred
            return f"{phi.pred}({','.join(phi.args)})"
        if self.sugar:
            s = self.sugared(phi, ctx, open_right)
            if s is not None:
                return s
        if isinstance(phi, Not):
            return self.prefix("~", phi.sub, ctx, open_right)
        if isinstance(phi, Box):
            return self.prefix(f"[{phi.rel}] ", phi.sub, ctx, open_right)
        if isinstance(phi, Or):
            return self.binary(phi.left, "|", phi.right, _OR, ctx, open_right, left_assoc=True)
        if isinstance(phi, ForallInd):
            return self.quant(f"forall {phi.var}:ind.", phi.body, ctx, open_right)
        if isinstance(phi, ForallProp):
            return self.quant(f"forall {phi.var}:prop.", phi.body, ctx, open_right)
        raise TypeError(f"not a QML formula: {phi!r}")

    def sugared(self, phi: Formula, ctx: int, open_right: bool) -> str | None:
        if isinstance(phi, Not):
            s = phi.sub
            if isinstance(s, Or) and isinstance(s.left, Not) and isinstance(s.right, Not):
                return self.binary(s.left.sub, "&", s.right.sub, _AND, ctx, open_right, left_assoc=True)
            if isinstance(s, Box) and isinstance(s.sub, Not):
                return self.prefix(f"<{s.rel}> ", s.sub.sub, ctx, open_right)
            if isinstance(s, ForallInd) and isinstance(s.body, Not):
                return self.quant(f"exists {s.var}:ind.", s.body.sub, ctx, open_right)
            if isinstance(s, ForallProp) and isinstance(s.body, Not):
                return self.quant(f"exists {s.var}:prop.", s.body.sub, ctx, open_right)
        if isinstance(phi, Or) and isinstance(phi.left, Not):
            return self.binary(phi.left.sub, "=>", phi.right, _IMPL, ctx, open_right, left_assoc=False)
        return None

    def prefix(self, op: str, sub: Formula, ctx: int, open_right: bool) -> str:
        inner = op + self.fmt(sub, _PREFIX, open_right and not self.full)
        return self.wrap(inner, _PREFIX, ctx)

    def binary(self, l: Formula, op: str, r: Formula, prec: int, ctx: int, open_right: bool, left_assoc: bool) -> str:
        parens = self.full or prec < ctx
        lctx, rctx = (prec, prec + 1) if left_assoc else (prec + 1, prec)
        left = self.fmt(l, lctx, True)
        right = self.fmt(r, rctx, open_right and not parens)
        return self.wrap(f"{left} {op} {right}", prec, ctx)

    def quant(self, head: str, body: Formula, ctx: int, open_right: bool) -> str:
        inner = f"{head} {self.fmt(body, 0, False)}"
        if self.full or open_right:
            return f"({inner})"
        return inner
