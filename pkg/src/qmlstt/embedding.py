"""Modal operators as lambda terms and the translation from QML into STT.

Every QML connective becomes a closed STT term over worlds (type ``mu``).
Operators are kept as named constants (:data:`OPERATORS`) so that THF
output can ship them as definitions; :func:`inline` swaps the constants for
their definiens and :func:`expand_definitions` additionally normalizes.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import qml
from .errors import IllTyped, NotAnEmbedding, UnknownDefinition
from .qml import Atom, Box, ForallInd, ForallProp, Formula, Not, Or, PropVar, QmlSignature
from .stt import (
    IOTA,
    MU,
    NEG,
    OR,
    PI_NAME,
    PROP,
    REL,
    App,
    Arrow,
    Const,
    Lam,
    O,
    Term,
    Var,
    app,
    arrow,
    beta_eta_normalize,
    conj,
    disj,
    eq_const,
    exists,
    forall,
    free_vars,
    lam,
    neg,
    pi_const,
    subterms,
    type_of,
    unwind,
    var_names,
)

# bound variables used inside the definitions
_phi = Var("Phi", PROP)
_psi = Var("Psi", PROP)
_w = Var("W", MU)
_v = Var("V", MU)
_r = Var("R", REL)
_x = Var("X", IOTA)
_p = Var("P", PROP)
_phi_ind = Var("Phi", Arrow(IOTA, PROP))
_phi_prop = Var("Phi", Arrow(PROP, PROP))

UNARY = Arrow(PROP, PROP)
BINARY = arrow(PROP, PROP, PROP)
MODAL = arrow(REL, PROP, PROP)
Q_IND = Arrow(Arrow(IOTA, PROP), PROP)
Q_PROP = Arrow(Arrow(PROP, PROP), PROP)

MNOT = Const("mnot", UNARY)
MOR = Const("mor", BINARY)
MBOX = Const("mbox", MODAL)
MFORALL_IND = Const("mforall_ind", Q_IND)
MFORALL_PROP = Const("mforall_prop", Q_PROP)
MTRUE = Const("mtrue", PROP)
MFALSE = Const("mfalse", PROP)
MAND = Const("mand", BINARY)
MIMPLIES = Const("mimplies", BINARY)
MDIA = Const("mdia", MODAL)
MEXISTS_IND = Const("mexists_ind", Q_IND)
MEXISTS_PROP = Const("mexists_prop", Q_PROP)
MVALID = Const("mvalid", Arrow(PROP, O))
# hybrid operators: difference D, global (existential) E, nominal !, satisfaction @
MDIFF = Const("mdiff", UNARY)
MGLOBAL = Const("mglobal", UNARY)
MNOMINAL = Const("mnominal", UNARY)
MAT = Const("mat", arrow(MU, PROP, PROP))


@dataclass(frozen=True)
class Definition:
    const: Const
    definiens: Term


def _defs() -> list[Definition]:
    d = [
        (MNOT, lam(_phi, _w, neg(App(_phi, _w)))),
        (MOR, lam(_phi, _psi, _w, disj(App(_phi, _w), App(_psi, _w)))),
        (MBOX, lam(_r, _phi, _w, forall(_v, disj(neg(app(_r, _w, _v)), App(_phi, _v))))),
        (MFORALL_IND, lam(_phi_ind, _w, forall(_x, app(_phi_ind, _x, _w)))),
        (MFORALL_PROP, lam(_phi_prop, _w, forall(_p, app(_phi_prop, _p, _w)))),
        (MTRUE, App(MFORALL_PROP, Lam(_p, app(MOR, _p, App(MNOT, _p))))),
        (MFALSE, App(MNOT, MTRUE)),
        (MAND, lam(_phi, _psi, App(MNOT, app(MOR, App(MNOT, _phi), App(MNOT, _psi))))),
        (MIMPLIES, lam(_phi, _psi, app(MOR, App(MNOT, _phi), _psi))),
        (MDIA, lam(_r, _phi, App(MNOT, app(MBOX, _r, App(MNOT, _phi))))),
        (MEXISTS_IND, Lam(_phi_ind, App(MNOT, App(MFORALL_IND, Lam(_x, App(MNOT, App(_phi_ind, _x))))))),
        (MEXISTS_PROP, Lam(_phi_prop, App(MNOT, App(MFORALL_PROP, Lam(_p, App(MNOT, App(_phi_prop, _p))))))),
        (MVALID, Lam(_phi, forall(_w, App(_phi, _w)))),
        (MDIFF, lam(_phi, _w, exists(_v, conj(neg(app(eq_const(MU), _w, _v)), App(_phi, _v))))),
        (MGLOBAL, Lam(_phi, app(MOR, _phi, App(MDIFF, _phi)))),
        (MNOMINAL, Lam(_phi, App(MGLOBAL, app(MAND, _phi, App(MNOT, App(MDIFF, _phi)))))),
        # constant in the evaluation world, so the result is again a world predicate
        (MAT, lam(_v, _phi, _w, App(_phi, _v))),
    ]
    return [Definition(c, t) for c, t in d]


#: Operator definitions in dependency order.
DEFINITIONS: tuple[Definition, ...] = tuple(_defs())
OPERATORS: dict[str, Const] = {d.const.name: d.const for d in DEFINITIONS}
HYBRID = frozenset({"mdiff", "mglobal", "mnominal", "mat"})


def _replace_consts(t: Term, table: dict[Const, Term]) -> Term:
    # definientia are closed, so plain replacement cannot capture
    if isinstance(t, Const):
        return table.get(t, t)
    if isinstance(t, Var):
        return t
    if isinstance(t, Lam):
        body = _replace_consts(t.body, table)
        return t if body is t.body else Lam(t.var, body)
    fn = _replace_consts(t.fn, table)
    arg = _replace_consts(t.arg, table)
    return t if fn is t.fn and arg is t.arg else App(fn, arg)


def replace_constants(t: Term, table: dict[Const, Term]) -> Term:
    """Replace constants by closed terms (no capture check is needed for closed replacements)."""
    return _replace_consts(t, table)


def _inline_table() -> dict[Const, Term]:
    table: dict[Const, Term] = {}
    for d in DEFINITIONS:
        table[d.const] = _replace_consts(d.definiens, table)
    return table


_INLINE_TABLE = _inline_table()
#: Operator name -> definiens with every referenced operator inlined (not normalized).
INLINED: dict[str, Term] = {c.name: t for c, t in _INLINE_TABLE.items()}


def is_operator(t: Term) -> bool:
    return isinstance(t, Const) and OPERATORS.get(t.name) == t


def inline(t: Term) -> Term:
    """Replace every operator constant by its definiens, without normalizing."""
    return _replace_consts(t, _INLINE_TABLE)


def expand_definitions(t: Term, extra: dict[Const, Term] | None = None) -> Term:
    """Inline operator (and ``extra``) definitions, then beta-eta normalize.

    Raises :class:`UnknownDefinition` for a constant that carries an
    operator name at a type no definition has.
    """
    for c in (s for s in subterms(t) if isinstance(s, Const)):
        if c.name in OPERATORS and OPERATORS[c.name] != c:
            raise UnknownDefinition(c.name)
    table = dict(_INLINE_TABLE)
    if extra:
        for c, body in extra.items():
            table[c] = inline(body)
        # extra definitions may refer to each other in any order
        for _ in range(len(extra)):
            for c in extra:
                table[c] = _replace_consts(table[c], table)
    return beta_eta_normalize(_replace_consts(t, table))


# -- the translation -----------------------------------------------------------


def ind_var(name: str) -> Var:
    return Var(name, IOTA)


def prop_var(name: str) -> Var:
    return Var(name, PROP)


def pred_const(name: str, arity: int) -> Const:
    return Const(name, arrow(*([IOTA] * arity), PROP))


def rel_const(name: str) -> Const:
    return Const(name, REL)


def embed(phi: Formula, sig: QmlSignature | None = None, *, named: bool = False, sugar: bool = False) -> Term:
    """Translate a QML formula into an STT term of type ``mu > o``.

    By default the operators are inlined as lambda terms, so plain
    beta-eta normalization yields the expanded form.  ``named`` keeps the
    operator constants; ``sugar`` (only with ``named``) additionally uses the
    derived operators where the formula has their shape.
    """
    if sig is not None:
        qml.check(phi, sig)
    t = _embed(phi, sugar and named)
    return t if named else inline(t)


def _embed(phi: Formula, sugar: bool) -> Term:
    if sugar:
        t = _embed_sugar(phi)
        if t is not None:
            return t
    if isinstance(phi, PropVar):
        return prop_var(phi.name)
    if isinstance(phi, Atom):
        return app(pred_const(phi.pred, len(phi.args)), *[ind_var(a) for a in phi.args])
    if isinstance(phi, Not):
        return App(MNOT, _embed(phi.sub, sugar))
    if isinstance(phi, Or):
        return app(MOR, _embed(phi.left, sugar), _embed(phi.right, sugar))
    if isinstance(phi, Box):
        return app(MBOX, rel_const(phi.rel), _embed(phi.sub, sugar))
    if isinstance(phi, ForallInd):
        return App(MFORALL_IND, Lam(ind_var(phi.var), _embed(phi.body, sugar)))
    if isinstance(phi, ForallProp):
        return App(MFORALL_PROP, Lam(prop_var(phi.var), _embed(phi.body, sugar)))
    raise TypeError(f"not a QML formula: {phi!r}")


def _embed_sugar(phi: Formula) -> Term | None:
    if isinstance(phi, Not):
        s = phi.sub
        if isinstance(s, Or) and isinstance(s.left, Not) and isinstance(s.right, Not):
            return app(MAND, _embed(s.left.sub, True), _embed(s.right.sub, True))
        if isinstance(s, Box) and isinstance(s.sub, Not):
            return app(MDIA, rel_const(s.rel), _embed(s.sub.sub, True))
        if isinstance(s, ForallInd) and isinstance(s.body, Not):
            return App(MEXISTS_IND, Lam(ind_var(s.var), _embed(s.body.sub, True)))
        if isinstance(s, ForallProp) and isinstance(s.body, Not):
            return App(MEXISTS_PROP, Lam(prop_var(s.var), _embed(s.body.sub, True)))
    if isinstance(phi, Or) and isinstance(phi.left, Not):
        return app(MIMPLIES, _embed(phi.left.sub, True), _embed(phi.right, True))
    return None


def valid(t: Term) -> Term:
    """``mvalid t`` with the operator kept as a named constant."""
    return App(MVALID, t)


def wrap_valid(t: Term) -> Term:
    """Normal form of ``valid t``: ``forall W:mu. t W`` with ``t`` expanded."""
    ty = type_of(t)
    if ty != PROP:
        raise IllTyped("", PROP, ty, "validity applies to world predicates")
    return beta_eta_normalize(App(INLINED["mvalid"], inline(t)))


def close_universally(t: Term) -> Term:
    """Bind every free variable of ``t`` (type o) with a universal quantifier, sorted by name."""
    for v in sorted(free_vars(t), key=lambda v: (v.name, str(v.type)), reverse=True):
        t = forall(v, t)
    return t


# -- hybrid operators ---------------------------------------------------------


def diff(phi: Term) -> Term:
    return App(MDIFF, phi)


def global_(phi: Term) -> Term:
    return App(MGLOBAL, phi)


def nominal(phi: Term) -> Term:
    return App(MNOMINAL, phi)


def at(world: Term, phi: Term) -> Term:
    return app(MAT, world, phi)


# -- the reverse map ---------------------------------------------------------


def unembed(t: Term, sig: QmlSignature | None = None) -> Formula:
    """Invert the translation.

    Terms built from named operators are inverted structurally; terms
    without operator constants are normalized and read back from their
    beta-eta normal form (bound variable names may then differ from the
    original, so compare with :func:`qml.alpha_key`).
    """
    if type_of(t) != PROP:
        raise NotAnEmbedding("not of type mu>o")
    has_ops = any(is_operator(s) for s in subterms(t))
    phi = _unembed_named(t) if has_ops else _unembed_normal(t)
    if sig is not None:
        _check_free(phi, sig)
    return phi


def _check_free(phi: Formula, sig: QmlSignature) -> None:
    iv, pv = qml.free_vars(phi)
    bad = sorted((iv - sig.ind_vars) | (pv - sig.prop_vars))
    if bad:
        raise NotAnEmbedding(f"free variables outside the signature: {bad}")
    for s in qml.subformulas(phi):
        if isinstance(s, Atom) and sig.preds.get(s.pred) != len(s.args):
            raise NotAnEmbedding(f"predicate {s.pred} not in signature")
        if isinstance(s, Box) and s.rel not in sig.rels:
            raise NotAnEmbedding(f"modal index {s.rel} not in signature")


def _atom(t: Term) -> Formula | None:
    if isinstance(t, Var) and t.type == PROP:
        return PropVar(t.name)
    head, args = unwind(t)
    if isinstance(head, Const) and not is_operator(head) and head.type == pred_const(head.name, len(args)).type:
        if all(isinstance(a, Var) and a.type == IOTA for a in args):
            return Atom(head.name, tuple(a.name for a in args))  # type: ignore[union-attr]
    return None


def _binder_body(t: Term, ty) -> tuple[str, Term]:
    if isinstance(t, Lam) and t.var.type == ty:
        return t.var.name, t.body
    raise NotAnEmbedding(f"expected an abstraction over {ty}")


def _unembed_named(t: Term) -> Formula:
    a = _atom(t)
    if a is not None:
        return a
    head, args = unwind(t)
    if not is_operator(head):
        raise NotAnEmbedding(f"unexpected head {head!r}")
    name = head.name  # type: ignore[union-attr]
    n = len(args)
    if name == "mnot" and n == 1:
        return Not(_unembed_named(args[0]))
    if name == "mor" and n == 2:
        return Or(_unembed_named(args[0]), _unembed_named(args[1]))
    if name == "mand" and n == 2:
        return qml.And(_unembed_named(args[0]), _unembed_named(args[1]))
    if name == "mimplies" and n == 2:
        return qml.Implies(_unembed_named(args[0]), _unembed_named(args[1]))
    if name in ("mbox", "mdia") and n == 2:
        r = args[0]
        if not (isinstance(r, Const) and r.type == REL):
            raise NotAnEmbedding("modal index must be a relation constant")
        sub = _unembed_named(args[1])
        return Box(r.name, sub) if name == "mbox" else qml.Dia(r.name, sub)
    if name in ("mforall_ind", "mexists_ind") and n == 1:
        v, body = _binder_body(args[0], IOTA)
        f = _unembed_named(body)
        return ForallInd(v, f) if name == "mforall_ind" else qml.ExistsInd(v, f)
    if name in ("mforall_prop", "mexists_prop") and n == 1:
        v, body = _binder_body(args[0], PROP)
        f = _unembed_named(body)
        return ForallProp(v, f) if name == "mforall_prop" else qml.ExistsProp(v, f)
    raise NotAnEmbedding(f"operator {name} with {n} argument(s) is not a QML connective")


def _unembed_normal(t: Term) -> Formula:
    nf = beta_eta_normalize(t)
    if isinstance(nf, Lam):
        return _from_body(nf.body, nf.var)
    w = Var(_fresh_world(nf), MU)
    return _from_body(App(nf, w), w)


def _fresh_world(t: Term) -> str:
    names = var_names(t)
    name = "W"
    i = 0
    while name in names:
        i += 1
        name = f"W{i}"
    return name


def _is_pi(t: Term, ty) -> bool:
    return isinstance(t, Const) and t.name == PI_NAME and t == pi_const(ty)


def _from_body(b: Term, w: Var) -> Formula:
    head, args = unwind(b)
    if head == NEG and len(args) == 1:
        return Not(_from_body(args[0], w))
    if head == OR and len(args) == 2:
        return Or(_from_body(args[0], w), _from_body(args[1], w))
    if len(args) == 1 and isinstance(args[0], Lam):
        lam_ = args[0]
        if _is_pi(head, MU):
            # forall V. ~(r w V) | body[V]
            v = lam_.var
            h2, a2 = unwind(lam_.body)
            if h2 == OR and len(a2) == 2:
                h3, a3 = unwind(a2[0])
                if h3 == NEG and len(a3) == 1:
                    rh, ra = unwind(a3[0])
                    if isinstance(rh, Const) and rh.type == REL and ra == [w, v] and v != w:
                        return Box(rh.name, _from_body(a2[1], v))
            raise NotAnEmbedding("quantifier over worlds is not a box")
        if _is_pi(head, IOTA):
            return ForallInd(lam_.var.name, _from_body(lam_.body, w))
        if _is_pi(head, PROP):
            return ForallProp(lam_.var.name, _from_body(lam_.body, w))
    if args and args[-1] == w:
        a = _atom(rewind_except_last(b))
        if a is not None:
            return a
    raise NotAnEmbedding(f"unrecognized body shape at world {w.name}")


def rewind_except_last(b: Term) -> Term:
    assert isinstance(b, App)
    return b.fn


def is_qmlstt_proposition(t: Term, sig: QmlSignature | None = None) -> bool:
    """Recognizer for the inductively defined set of embedded propositions."""
    try:
        unembed(t, sig)
    except (NotAnEmbedding, IllTyped):
        return False
    return True
