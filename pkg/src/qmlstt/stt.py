"""Simply typed lambda calculus over the base types o, iota and mu.

Terms are immutable dataclass trees with named, type-annotated variables.
Two variables are the same variable when both name and type agree; capture
avoidance is nonetheless decided by name alone, so a term never contains a
binder that hides a free variable of the same name (this keeps printed
forms unambiguous).

The logical constants are ordinary :class:`Const` nodes with reserved names
(``~``, ``|``, ``=``, ``!!``); they are typed by :func:`type_of` according to
their fixed instance types.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

from .errors import IllTyped

# -- types -------------------------------------------------------------------


@dataclass(frozen=True)
class Base:
    name: str

    def __str__(self) -> str:
        return {"o": "$o", "i": "$i"}.get(self.name, self.name)


@dataclass(frozen=True)
class Arrow:
    dom: "SttType"
    cod: "SttType"

    def __str__(self) -> str:
        left = f"({self.dom})" if isinstance(self.dom, Arrow) else str(self.dom)
        return f"{left}>{self.cod}"


SttType = Union[Base, Arrow]

O = Base("o")
IOTA = Base("i")
MU = Base("mu")
BASE_TYPES = (O, IOTA, MU)


def arrow(*types: SttType) -> SttType:
    """Right-nested function type: ``arrow(a, b, c) == a > (b > c)``."""
    if not types:
        raise ValueError("arrow() needs at least one type")
    result = types[-1]
    for t in reversed(types[:-1]):
        result = Arrow(t, result)
    return result


def arg_types(ty: SttType) -> list[SttType]:
    out = []
    while isinstance(ty, Arrow):
        out.append(ty.dom)
        ty = ty.cod
    return out


def result_type(ty: SttType) -> SttType:
    while isinstance(ty, Arrow):
        ty = ty.cod
    return ty


# Frequently used types of the embedding.
PROP = Arrow(MU, O)  # mu > o, world-dependent propositions
REL = arrow(MU, MU, O)  # accessibility relations


def type_order(ty: SttType) -> int:
    if isinstance(ty, Base):
        return 0
    return max(type_order(ty.dom) + 1, type_order(ty.cod))


# -- terms -------------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str
    type: SttType

    def __repr__(self) -> str:
        return f"{self.name}:{self.type}"


@dataclass(frozen=True)
class Const:
    name: str
    type: SttType

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Lam:
    var: Var
    body: "Term"


@dataclass(frozen=True)
class App:
    fn: "Term"
    arg: "Term"


Term = Union[Var, Const, Lam, App]

NEG_NAME, OR_NAME, EQ_NAME, PI_NAME = "~", "|", "=", "!!"
LOGICAL_NAMES = frozenset({NEG_NAME, OR_NAME, EQ_NAME, PI_NAME})

NEG = Const(NEG_NAME, Arrow(O, O))
OR = Const(OR_NAME, arrow(O, O, O))


def eq_const(ty: SttType) -> Const:
    return Const(EQ_NAME, arrow(ty, ty, O))


def pi_const(ty: SttType) -> Const:
    return Const(PI_NAME, Arrow(Arrow(ty, O), O))


def is_logical(t: Term) -> bool:
    return isinstance(t, Const) and t.name in LOGICAL_NAMES


# -- constructors for common shapes -----------------------------------------


def app(fn: Term, *args: Term) -> Term:
    for a in args:
        fn = App(fn, a)
    return fn


def lam(*parts: Var | Term) -> Term:
    """``lam(x, y, body)`` is ``\\x. \\y. body``."""
    *vs, body = parts
    for v in reversed(vs):
        body = Lam(v, body)  # type: ignore[arg-type]
    return body  # type: ignore[return-value]


def neg(s: Term) -> Term:
    return App(NEG, s)


def disj(s: Term, t: Term) -> Term:
    return App(App(OR, s), t)


def conj(s: Term, t: Term) -> Term:
    return neg(disj(neg(s), neg(t)))


def implies(s: Term, t: Term) -> Term:
    return disj(neg(s), t)


def equals(s: Term, t: Term) -> Term:
    return App(App(eq_const(type_of(s)), s), t)


def pi(f: Term) -> Term:
    ty = type_of(f)
    if not isinstance(ty, Arrow):
        raise IllTyped("", "a -> o", ty, "Pi needs a predicate")
    return App(pi_const(ty.dom), f)


def forall(v: Var, body: Term) -> Term:
    return App(pi_const(v.type), Lam(v, body))


def exists(v: Var, body: Term) -> Term:
    return neg(forall(v, neg(body)))


def unwind(t: Term) -> tuple[Term, list[Term]]:
    """Split ``f a1 ... an`` into ``(f, [a1, ..., an])``."""
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fn
    args.reverse()
    return t, args


# -- typing ------------------------------------------------------------------


def _check_logical(c: Const, pos: str) -> None:
    ty = c.type
    if c.name == NEG_NAME and ty != NEG.type:
        raise IllTyped(pos, NEG.type, ty, "negation")
    if c.name == OR_NAME and ty != OR.type:
        raise IllTyped(pos, OR.type, ty, "disjunction")
    if c.name == EQ_NAME:
        ok = isinstance(ty, Arrow) and isinstance(ty.cod, Arrow) and ty.cod.dom == ty.dom and ty.cod.cod == O
        if not ok:
            raise IllTyped(pos, "a>a>$o", ty, "equality")
    if c.name == PI_NAME:
        ok = isinstance(ty, Arrow) and ty.cod == O and isinstance(ty.dom, Arrow) and ty.dom.cod == O
        if not ok:
            raise IllTyped(pos, "(a>$o)>$o", ty, "Pi")


def type_of(t: Term, _pos: str = "") -> SttType:
    """Return the type of ``t``; raise :class:`IllTyped` on a violation.

    Positions are paths of ``f``/``a``/``b`` steps (function, argument, body).
    """
    if isinstance(t, Var):
        return t.type
    if isinstance(t, Const):
        if t.name in LOGICAL_NAMES:
            _check_logical(t, _pos)
        return t.type
    if isinstance(t, Lam):
        return Arrow(t.var.type, type_of(t.body, _pos + "b"))
    if isinstance(t, App):
        fty = type_of(t.fn, _pos + "f")
        aty = type_of(t.arg, _pos + "a")
        if not isinstance(fty, Arrow):
            raise IllTyped(_pos + "f", "a function type", fty)
        if fty.dom != aty:
            raise IllTyped(_pos + "a", fty.dom, aty)
        return fty.cod
    raise TypeError(f"not a term: {t!r}")


# -- variables -----------------------------------------------------------------


def free_vars(t: Term) -> frozenset[Var]:
    if isinstance(t, Var):
        return frozenset((t,))
    if isinstance(t, Const):
        return frozenset()
    if isinstance(t, Lam):
        return free_vars(t.body) - {t.var}
    return free_vars(t.fn) | free_vars(t.arg)


def occurs_free(v: Var, t: Term) -> bool:
    if isinstance(t, Var):
        return t == v
    if isinstance(t, Const):
        return False
    if isinstance(t, Lam):
        return t.var != v and occurs_free(v, t.body)
    return occurs_free(v, t.fn) or occurs_free(v, t.arg)


def var_names(t: Term) -> set[str]:
    """Names of all variables occurring in ``t``, free or bound."""
    out: set[str] = set()
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Var):
            out.add(s.name)
        elif isinstance(s, Lam):
            out.add(s.var.name)
            stack.append(s.body)
        elif isinstance(s, App):
            stack.append(s.fn)
            stack.append(s.arg)
    return out


def constants(t: Term) -> set[Const]:
    out: set[Const] = set()
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Const):
            out.add(s)
        elif isinstance(s, Lam):
            stack.append(s.body)
        elif isinstance(s, App):
            stack.append(s.fn)
            stack.append(s.arg)
    return out


_SUFFIX = re.compile(r"\d+$")


def fresh_name(name: str, avoid: Iterable[str]) -> str:
    """Smallest numeric suffix on the digit-stripped ``name`` that is not in ``avoid``."""
    avoid = set(avoid)
    stem = _SUFFIX.sub("", name) or name
    i = 1
    while f"{stem}{i}" in avoid:
        i += 1
    return f"{stem}{i}"


# -- substitution ------------------------------------------------------------


def substitute(body: Term, var: Var, replacement: Term) -> Term:
    """Capture-avoiding ``[replacement/var] body``."""
    rty = type_of(replacement)
    if rty != var.type:
        raise IllTyped("", var.type, rty, f"substituting for {var.name}")
    return _subst(body, var, replacement, {v.name for v in free_vars(replacement)})


def _subst(t: Term, var: Var, repl: Term, repl_names: set[str]) -> Term:
    if isinstance(t, Var):
        return repl if t == var else t
    if isinstance(t, Const):
        return t
    if isinstance(t, App):
        fn = _subst(t.fn, var, repl, repl_names)
        arg = _subst(t.arg, var, repl, repl_names)
        if fn is t.fn and arg is t.arg:
            return t
        return App(fn, arg)
    # Lam
    if t.var == var or not occurs_free(var, t.body):
        return t
    bound = t.var
    body = t.body
    if bound.name in repl_names:
        avoid = repl_names | var_names(body) | {var.name}
        new = Var(fresh_name(bound.name, avoid), bound.type)
        body = _rename(body, bound, new)
        bound = new
    return Lam(bound, _subst(body, var, repl, repl_names))


def _rename(t: Term, old: Var, new: Var) -> Term:
    # new.name is fresh for t, so no capture is possible here.
    if isinstance(t, Var):
        return new if t == old else t
    if isinstance(t, Const):
        return t
    if isinstance(t, App):
        return App(_rename(t.fn, old, new), _rename(t.arg, old, new))
    if t.var == old:
        return t
    return Lam(t.var, _rename(t.body, old, new))


# -- normalization -------------------------------------------------------------


def rewind(head: Term, args: Iterable[Term]) -> Term:
    for a in args:
        head = App(head, a)
    return head


def beta_normalize(t: Term) -> Term:
    """Leftmost-outermost beta reduction to beta-normal form."""
    while True:
        if isinstance(t, Lam):
            return Lam(t.var, beta_normalize(t.body))
        head, args = unwind(t)
        if isinstance(head, Lam) and args:
            t = rewind(substitute(head.body, head.var, args[0]), args[1:])
            continue
        return rewind(head, [beta_normalize(a) for a in args])


def eta_normalize(t: Term) -> Term:
    """Contract eta-redexes bottom-up.  On beta-normal input no beta-redex is created."""
    if isinstance(t, Lam):
        body = eta_normalize(t.body)
        if isinstance(body, App) and body.arg == t.var and not occurs_free(t.var, body.fn):
            return body.fn
        return Lam(t.var, body)
    if isinstance(t, App):
        return App(eta_normalize(t.fn), eta_normalize(t.arg))
    return t


def beta_eta_normalize(t: Term) -> Term:
    type_of(t)
    return eta_normalize(beta_normalize(t))


def is_beta_normal(t: Term) -> bool:
    return not any(isinstance(s, App) and isinstance(s.fn, Lam) for s in subterms(t))


def is_eta_normal(t: Term) -> bool:
    for s in subterms(t):
        if isinstance(s, Lam) and isinstance(s.body, App):
            if s.body.arg == s.var and not occurs_free(s.var, s.body.fn):
                return False
    return True


def subterms(t: Term) -> Iterator[Term]:
    stack = [t]
    while stack:
        s = stack.pop()
        yield s
        if isinstance(s, Lam):
            stack.append(s.body)
        elif isinstance(s, App):
            stack.append(s.fn)
            stack.append(s.arg)


def size(t: Term) -> int:
    return sum(1 for _ in subterms(t))


# -- alpha equivalence ---------------------------------------------------------


def alpha_eq(a: Term, b: Term) -> bool:
    return _alpha(a, b, {}, {}, 0)


def _alpha(a: Term, b: Term, env_a: dict, env_b: dict, depth: int) -> bool:
    if isinstance(a, Var) and isinstance(b, Var):
        la, lb = env_a.get(a), env_b.get(b)
        if la is None and lb is None:
            return a == b
        return la == lb
    if isinstance(a, Const) and isinstance(b, Const):
        return a == b
    if isinstance(a, App) and isinstance(b, App):
        return _alpha(a.fn, b.fn, env_a, env_b, depth) and _alpha(a.arg, b.arg, env_a, env_b, depth)
    if isinstance(a, Lam) and isinstance(b, Lam):
        if a.var.type != b.var.type:
            return False
        ea = {**env_a, a.var: depth}
        eb = {**env_b, b.var: depth}
        return _alpha(a.body, b.body, ea, eb, depth + 1)
    return False


# -- printing ----------------------------------------------------------------


def show(t: Term) -> str:
    """Church-style debug form, e.g. ``(^[X:mu]: (r @ W @ X))``.

    Pi applied to an abstraction prints as a binder, and negated Pi of a
    negated body prints as ``?``; the tree itself is never sugared.
    """
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Const):
        return t.name if t.name not in LOGICAL_NAMES else f"({t.name})"
    if isinstance(t, Lam):
        return f"(^[{t.var.name}:{t.var.type}]: {show(t.body)})"
    head, args = unwind(t)
    if isinstance(head, Const) and head.name in LOGICAL_NAMES:
        if head.name == NEG_NAME and len(args) == 1:
            inner = args[0]
            if _is_binder(inner, PI_NAME):
                lam_ = inner.arg  # type: ignore[union-attr]
                body = lam_.body
                if isinstance(body, App) and body.fn == NEG:
                    return f"(?[{lam_.var.name}:{lam_.var.type}]: {show(body.arg)})"
            return f"(~ {show(inner)})"
        if head.name in (OR_NAME, EQ_NAME) and len(args) == 2:
            return f"({show(args[0])} {head.name} {show(args[1])})"
        if head.name == PI_NAME and len(args) == 1 and isinstance(args[0], Lam):
            v = args[0].var
            return f"(![{v.name}:{v.type}]: {show(args[0].body)})"
    return "(" + " @ ".join(show(x) for x in [head, *args]) + ")"


def _is_binder(t: Term, name: str) -> bool:
    return isinstance(t, App) and isinstance(t.fn, Const) and t.fn.name == name and isinstance(t.arg, Lam)
