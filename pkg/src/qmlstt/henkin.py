"""Evaluation of STT terms in finite standard frames.

``D_o = {False, True}``, ``D_i = {0..n_ind-1}``, ``D_mu = {0..n_worlds-1}``
and ``D_(a>b)`` is the full function space.  Function values are either
lazy :class:`Fn` closures (the result of evaluating an abstraction) or
canonical :class:`Table` values listing the image of every domain element in
enumeration order.  Quantifiers and equality force tables where needed.
"""

from __future__ import annotations

import itertools
from typing import Any, Callable, Iterator, Mapping, Sequence

from . import kripke
from .embedding import pred_const, rel_const
from .errors import UnboundVariable, UnknownConstant, UnsupportedModel
from .kripke import KripkeModel
from .qml import QmlSignature
from .stt import (
    EQ_NAME,
    IOTA,
    MU,
    NEG_NAME,
    O,
    OR_NAME,
    PI_NAME,
    Arrow,
    Base,
    Const,
    Lam,
    SttType,
    Term,
    Var,
    free_vars,
    type_of,
    unwind,
)

Value = Any


class Table:
    """Canonical function value: ``values[i]`` is the image of element ``i`` of the domain."""

    __slots__ = ("frame", "dom", "values", "_hash")

    def __init__(self, frame: "FiniteFrame", dom: SttType, values: tuple):
        self.frame = frame
        self.dom = dom
        self.values = values
        self._hash = hash(values)

    def __call__(self, a: Value) -> Value:
        return self.values[self.frame.index(self.dom, a)]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Table) and self.values == other.values

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Table{self.values!r}"


class Fn:
    """Lazy function value backed by a Python callable."""

    __slots__ = ("frame", "type", "fn")

    def __init__(self, frame: "FiniteFrame", ty: Arrow, fn: Callable[[Value], Value]):
        self.frame = frame
        self.type = ty
        self.fn = fn

    def __call__(self, a: Value) -> Value:
        return self.fn(a)

    def __repr__(self) -> str:
        return f"Fn<{self.type}>"


class FiniteFrame:
    """A finite standard interpretation ``<{D_a}, I>``.

    ``interp`` maps constant names to values; logical constants are built in.
    Element lists and index computations are memoized per frame.
    """

    def __init__(self, n_ind: int, n_worlds: int, interp: Mapping[str, Value] | None = None):
        if n_ind < 1 or n_worlds < 1:
            raise ValueError("base domains must be non-empty")
        self.n_ind = n_ind
        self.n_worlds = n_worlds
        self.interp: dict[str, Value] = dict(interp or {})
        self._elements: dict[SttType, list] = {}
        self._sizes: dict[SttType, int] = {}

    def __repr__(self) -> str:
        return f"FiniteFrame(n_ind={self.n_ind}, n_worlds={self.n_worlds}, constants={sorted(self.interp)})"

    # -- domains --

    def size(self, ty: SttType) -> int:
        n = self._sizes.get(ty)
        if n is None:
            if ty == O:
                n = 2
            elif ty == IOTA:
                n = self.n_ind
            elif ty == MU:
                n = self.n_worlds
            elif isinstance(ty, Arrow):
                n = self.size(ty.cod) ** self.size(ty.dom)
            else:
                raise ValueError(f"unknown base type {ty}")
            self._sizes[ty] = n
        return n

    def elements(self, ty: SttType) -> list:
        els = self._elements.get(ty)
        if els is None:
            if ty == O:
                els = [False, True]
            elif isinstance(ty, Base):
                els = list(range(self.size(ty)))
            else:
                cods = self.elements(ty.cod)
                els = [Table(self, ty.dom, vals) for vals in itertools.product(cods, repeat=self.size(ty.dom))]
            self._elements[ty] = els
        return els

    def index(self, ty: SttType, v: Value) -> int:
        if isinstance(ty, Base):
            return int(v)
        t = self.canon(ty, v)
        base = self.size(ty.cod)
        i = 0
        for x in t.values:
            i = i * base + self.index(ty.cod, x)
        return i

    def canon(self, ty: SttType, v: Value) -> Value:
        """Canonical (hashable, comparable) form of a value of type ``ty``."""
        if isinstance(ty, Base):
            return v
        if isinstance(v, Table):
            return v
        return Table(self, ty.dom, tuple(self.canon(ty.cod, v(z)) for z in self.elements(ty.dom)))

    def table(self, ty: SttType, fn: Callable[..., Value]) -> Value:
        """Build the canonical value of curried type ``ty`` from an uncurried Python function."""

        def build(t: SttType, args: tuple) -> Value:
            if isinstance(t, Base):
                return fn(*args)
            return Table(self, t.dom, tuple(build(t.cod, args + (z,)) for z in self.elements(t.dom)))

        return build(ty, ())

    # -- evaluation --

    def compile(self, t: Term, env_vars: Sequence[Var] = ()) -> Callable[[tuple], Value]:
        """Compile ``t`` into a function of an environment tuple aligned with ``env_vars``."""
        type_of(t)
        return _Compiler(self).term(t, list(env_vars))

    def eval(self, t: Term, assignment: Mapping[Var, Value] | None = None) -> Value:
        assignment = dict(assignment or {})
        missing = free_vars(t) - set(assignment)
        if missing:
            raise UnboundVariable(sorted(v.name for v in missing)[0])
        vs = list(assignment)
        return self.compile(t, vs)(tuple(assignment[v] for v in vs))

    def assignments(self, variables: Sequence[Var]) -> Iterator[dict[Var, Value]]:
        for vals in itertools.product(*(self.elements(v.type) for v in variables)):
            yield dict(zip(variables, vals))

    def is_valid(self, t: Term) -> bool:
        """``t`` (type o) is true under every assignment of its free variables."""
        fv = sorted(free_vars(t), key=lambda v: (v.name, str(v.type)))
        code = self.compile(t, fv)
        return all(code(tuple(vals)) for vals in itertools.product(*(self.elements(v.type) for v in fv)))


class _Compiler:
    def __init__(self, frame: FiniteFrame):
        self.f = frame

    def term(self, t: Term, ctx: list[Var]) -> Callable[[tuple], Value]:
        return self.typed(t, ctx)[0]

    def typed(self, t: Term, ctx: list[Var]) -> tuple[Callable[[tuple], Value], SttType]:
        # types are computed alongside the code so lambdas need no separate type_of pass
        f = self.f
        if isinstance(t, Var):
            for i in range(len(ctx) - 1, -1, -1):
                if ctx[i] == t:
                    return (lambda env, i=i: env[i]), t.type
            raise UnboundVariable(t.name)
        if isinstance(t, Const):
            return self.const(t), t.type
        if isinstance(t, Lam):
            body, bty = self.typed(t.body, ctx + [t.var])
            ty = Arrow(t.var.type, bty)
            return (lambda env: Fn(f, ty, lambda z: body(env + (z,)))), ty
        head, args = unwind(t)
        if isinstance(head, Const):
            special = self.logical(head, args, ctx)
            if special is not None:
                return special, O
        if isinstance(t.fn, Lam):
            # beta-redex: bind the argument directly instead of building a closure
            body, bty = self.typed(t.fn.body, ctx + [t.fn.var])
            arg = self.term(t.arg, ctx)
            return (lambda env: body(env + (arg(env),))), bty
        fn, fty = self.typed(t.fn, ctx)
        arg = self.term(t.arg, ctx)
        return (lambda env: fn(env)(arg(env))), fty.cod  # type: ignore[union-attr]

    def const(self, c: Const) -> Callable[[tuple], Value]:
        f = self.f
        if c.name == NEG_NAME:
            v = Fn(f, c.type, lambda a: not a)  # type: ignore[arg-type]
        elif c.name == OR_NAME:
            v = Fn(f, c.type, lambda a: Fn(f, Arrow(O, O), lambda b: a or b))  # type: ignore[arg-type]
        elif c.name == EQ_NAME:
            ty = c.type.dom  # type: ignore[union-attr]
            v = Fn(f, c.type, lambda a: Fn(f, Arrow(ty, O), lambda b: f.canon(ty, a) == f.canon(ty, b)))  # type: ignore[arg-type]
        elif c.name == PI_NAME:
            ty = c.type.dom.dom  # type: ignore[union-attr]
            els = f.elements(ty)
            v = Fn(f, c.type, lambda p: all(p(z) for z in els))  # type: ignore[arg-type]
        else:
            try:
                v = f.interp[c.name]
            except KeyError:
                raise UnknownConstant(c.name) from None
        return lambda env: v

    def logical(self, head: Const, args: list[Term], ctx: list[Var]) -> Callable[[tuple], Value] | None:
        f = self.f
        n = len(args)
        if head.name == NEG_NAME and n == 1:
            a = self.term(args[0], ctx)
            return lambda env: not a(env)
        if head.name == OR_NAME and n == 2:
            a, b = self.term(args[0], ctx), self.term(args[1], ctx)
            return lambda env: a(env) or b(env)
        if head.name == EQ_NAME and n == 2:
            ty = head.type.dom  # type: ignore[union-attr]
            a, b = self.term(args[0], ctx), self.term(args[1], ctx)
            if isinstance(ty, Base):
                return lambda env: a(env) == b(env)
            return lambda env: f.canon(ty, a(env)) == f.canon(ty, b(env))
        if head.name == PI_NAME and n == 1:
            ty = head.type.dom.dom  # type: ignore[union-attr]
            els = f.elements(ty)
            arg = args[0]
            if isinstance(arg, Lam):
                body = self.term(arg.body, ctx + [arg.var])
                return lambda env: all(body(env + (z,)) for z in els)
            p = self.term(arg, ctx)
            return lambda env: all(p(env)(z) for z in els)
        return None


# -- conversion between Kripke models and frames ----------------------------------


def frame_from_kripke(M: KripkeModel) -> FiniteFrame:
    """Standard frame with ``D_mu = W``, ``D_i = D`` and relations/predicates as characteristic functions."""
    if not M.is_powerset():
        raise UnsupportedModel("only models whose propositional domain is the full powerset have a standard frame")
    F = FiniteFrame(M.n_individuals, M.n_worlds)
    for r, pairs in M.relations.items():
        F.interp[r] = F.table(rel_const(r).type, lambda a, b, pairs=pairs: (a, b) in pairs)
    for k, per_world in M.interp.items():
        n = M.arities.get(k)
        if n is None:
            sample = next((t for rel in per_world for t in rel), None)
            if sample is None:
                raise UnsupportedModel(f"arity of {k} is unknown")
            n = len(sample)
        F.interp[k] = F.table(pred_const(k, n).type, lambda *xs, pw=per_world: xs[:-1] in pw[xs[-1]])
    return F


def kripke_from_frame(F: FiniteFrame, sig: QmlSignature) -> KripkeModel:
    """``W = D_mu``, ``D = D_i``, ``P = D_(mu>o)`` read as sets of worlds."""
    relations = {}
    for r in sorted(sig.rels):
        rv = _lookup(F, r)
        relations[r] = frozenset((a, b) for a in range(F.n_worlds) for b in range(F.n_worlds) if rv(a)(b))
    interp = {}
    for k, n in sorted(sig.preds.items()):
        kv = _lookup(F, k)
        per_world = []
        for w in range(F.n_worlds):
            rel = set()
            for tup in itertools.product(range(F.n_ind), repeat=n):
                v = kv
                for d in tup:
                    v = v(d)
                if v(w):
                    rel.add(tup)
            per_world.append(frozenset(rel))
        interp[k] = tuple(per_world)
    props = frozenset(
        frozenset(w for w in range(F.n_worlds) if t.values[w]) for t in F.elements(Arrow(MU, O))
    )
    return KripkeModel(F.n_worlds, F.n_ind, relations, props, interp, dict(sig.preds))


def _lookup(F: FiniteFrame, name: str) -> Value:
    try:
        return F.interp[name]
    except KeyError:
        raise UnknownConstant(name) from None


def enumerate_frames(sig: QmlSignature, n_worlds: int, n_ind: int = 1) -> Iterator[FiniteFrame]:
    """Every standard frame of the given size interpreting the signature constants."""
    probe = FiniteFrame(n_ind, n_worlds)
    names = [(r, rel_const(r).type) for r in sorted(sig.rels)]
    names += [(k, pred_const(k, n).type) for k, n in sorted(sig.preds.items())]
    for vals in itertools.product(*(probe.elements(ty) for _, ty in names)):
        F = FiniteFrame(n_ind, n_worlds)
        for (name, _), v in zip(names, vals):
            F.interp[name] = Table(F, v.dom, v.values)
        yield F


def qml_assignment_to_stt(g: kripke.QmlAssignment, F: FiniteFrame) -> dict[Var, Value]:
    """The lifted assignment: individual variables to D_i, propositional variables to characteristic tables."""
    out: dict[Var, Value] = {}
    for x, d in g.ind.items():
        out[Var(x, IOTA)] = d
    for p, s in g.prop.items():
        out[Var(p, Arrow(MU, O))] = Table(F, MU, tuple(w in s for w in range(F.n_worlds)))
    return out
