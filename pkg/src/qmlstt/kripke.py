"""Constant-domain Kripke semantics for QML.

Worlds and individuals are the integers ``0..n-1``.  A model carries its
propositional domain ``props`` explicitly; quantification over
propositional variables ranges over exactly that collection.
"""

from __future__ import annotations

import enum
import itertools
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Mapping, Sequence

from .errors import ResourceBound, UnboundVariable
from .qml import Atom, Box, ForallInd, ForallProp, Formula, Not, Or, PropVar, QmlSignature, free_vars

DEFAULT_MODEL_LIMIT = 5_000_000
DEFAULT_ASSIGNMENT_LIMIT = 1_000_000


@dataclass(frozen=True)
class KripkeModel:
    n_worlds: int
    n_individuals: int
    relations: Mapping[str, frozenset[tuple[int, int]]]
    props: frozenset[frozenset[int]]
    interp: Mapping[str, tuple[frozenset[tuple[int, ...]], ...]] = field(default_factory=dict)
    arities: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.n_worlds < 1:
            raise ValueError("a model needs at least one world")
        if self.n_individuals < 1:
            raise ValueError("the individual domain must be non-empty")
        if not self.props:
            raise ValueError("the propositional domain must be non-empty")
        W = set(range(self.n_worlds))
        for s in self.props:
            if not s <= W:
                raise ValueError(f"propositional domain member {set(s)} is not a set of worlds")
        for r, pairs in self.relations.items():
            for a, b in pairs:
                if a not in W or b not in W:
                    raise ValueError(f"relation {r} mentions a world outside W")
        for k, per_world in self.interp.items():
            if len(per_world) != self.n_worlds:
                raise ValueError(f"interpretation of {k} must list one relation per world")
            n = self.arities.get(k)
            for rel in per_world:
                for tup in rel:
                    if n is not None and len(tup) != n:
                        raise ValueError(f"{k} has arity {n}")
                    if any(not 0 <= d < self.n_individuals for d in tup):
                        raise ValueError(f"{k} mentions an individual outside D")

    @property
    def worlds(self) -> range:
        return range(self.n_worlds)

    @property
    def domain(self) -> range:
        return range(self.n_individuals)

    @cached_property
    def successors(self) -> dict[str, tuple[tuple[int, ...], ...]]:
        return {
            r: tuple(tuple(sorted(v for (u, v) in pairs if u == w)) for w in self.worlds)
            for r, pairs in self.relations.items()
        }

    @cached_property
    def sorted_props(self) -> tuple[frozenset[int], ...]:
        return tuple(sorted(self.props, key=lambda s: (len(s), sorted(s))))

    def is_powerset(self) -> bool:
        return len(self.props) == 2**self.n_worlds

    def key(self) -> tuple:
        """Hashable identity of the model."""
        return (
            self.n_worlds,
            self.n_individuals,
            tuple(sorted((r, tuple(sorted(p))) for r, p in self.relations.items())),
            tuple(sorted(tuple(sorted(s)) for s in self.props)),
            tuple(sorted((k, tuple(tuple(sorted(x)) for x in v)) for k, v in self.interp.items())),
        )


def powerset(n_worlds: int) -> frozenset[frozenset[int]]:
    ws = range(n_worlds)
    return frozenset(
        frozenset(c) for k in range(n_worlds + 1) for c in itertools.combinations(ws, k)
    )


@dataclass(frozen=True)
class QmlAssignment:
    ind: Mapping[str, int] = field(default_factory=dict)
    prop: Mapping[str, frozenset[int]] = field(default_factory=dict)

    def with_ind(self, name: str, d: int) -> "QmlAssignment":
        return QmlAssignment({**self.ind, name: d}, self.prop)

    def with_prop(self, name: str, s: frozenset[int]) -> "QmlAssignment":
        return QmlAssignment(self.ind, {**self.prop, name: s})


# -- satisfaction ------------------------------------------------------------


def satisfies(M: KripkeModel, g: QmlAssignment, w: int, phi: Formula) -> bool:
    """``M, g, w |= phi``."""
    if isinstance(phi, PropVar):
        try:
            return w in g.prop[phi.name]
        except KeyError:
            raise UnboundVariable(phi.name) from None
    if isinstance(phi, Atom):
        try:
            tup = tuple(g.ind[x] for x in phi.args)
        except KeyError as e:
            raise UnboundVariable(e.args[0]) from None
        return tup in M.interp[phi.pred][w]
    if isinstance(phi, Not):
        return not satisfies(M, g, w, phi.sub)
    if isinstance(phi, Or):
        return satisfies(M, g, w, phi.left) or satisfies(M, g, w, phi.right)
    if isinstance(phi, ForallInd):
        return all(satisfies(M, g.with_ind(phi.var, d), w, phi.body) for d in M.domain)
    if isinstance(phi, ForallProp):
        return all(satisfies(M, g.with_prop(phi.var, s), w, phi.body) for s in M.sorted_props)
    if isinstance(phi, Box):
        return all(satisfies(M, g, v, phi.sub) for v in M.successors[phi.rel][w])
    raise TypeError(f"not a QML formula: {phi!r}")


def extension(M: KripkeModel, g: QmlAssignment, phi: Formula) -> frozenset[int]:
    return frozenset(w for w in M.worlds if satisfies(M, g, w, phi))


def assignments(
    M: KripkeModel,
    ind_vars: Sequence[str],
    prop_vars: Sequence[str],
    limit: int = DEFAULT_ASSIGNMENT_LIMIT,
) -> Iterator[QmlAssignment]:
    """Every assignment of the given variables over ``(D, P)``, in a fixed order."""
    ind_vars, prop_vars = sorted(ind_vars), sorted(prop_vars)
    count = M.n_individuals ** len(ind_vars) * len(M.props) ** len(prop_vars)
    if count > limit:
        raise ResourceBound(f"{count} assignments exceed the limit of {limit}")
    for ds in itertools.product(M.domain, repeat=len(ind_vars)):
        for ss in itertools.product(M.sorted_props, repeat=len(prop_vars)):
            yield QmlAssignment(dict(zip(ind_vars, ds)), dict(zip(prop_vars, ss)))


def falsifier(M: KripkeModel, phi: Formula, limit: int = DEFAULT_ASSIGNMENT_LIMIT) -> tuple[QmlAssignment, int] | None:
    """First ``(g, w)`` with ``M, g, w`` not satisfying ``phi``, or ``None``."""
    iv, pv = free_vars(phi)
    for g in assignments(M, list(iv), list(pv), limit):
        for w in M.worlds:
            if not satisfies(M, g, w, phi):
                return g, w
    return None


def is_valid_in_model(M: KripkeModel, phi: Formula, limit: int = DEFAULT_ASSIGNMENT_LIMIT) -> bool:
    return falsifier(M, phi, limit) is None


# -- classification ----------------------------------------------------------


class ModelClass(enum.Enum):
    QKPI_MINUS = "QKpiMinus"
    QKPI = "QKpi"
    QKPI_PLUS = "QKpiPlus"


def _mask(s) -> int:
    m = 0
    for w in s:
        m |= 1 << w
    return m


def definable_closure(M: KripkeModel, max_rounds: int | None = None) -> tuple[set[int], bool]:
    """Close the parameter-definable base sets under the connectives.

    The base holds every member of P and every atom extension
    ``{w | <d1..dn> in I_w(k)}``.  Negation, disjunction and each box give
    complement, union and box-preimage; quantifiers over D and over P are
    finite intersections and therefore already covered.  Returns the
    closure (as world bitmasks) and whether the fixed point was reached.
    """
    full = (1 << M.n_worlds) - 1
    sets = {_mask(s) for s in M.props}
    for k, per_world in M.interp.items():
        n = M.arities.get(k)
        if n is None:
            tuples = {t for rel in per_world for t in rel}
        else:
            tuples = set(itertools.product(M.domain, repeat=n))
        for t in tuples:
            sets.add(_mask(w for w in M.worlds if t in per_world[w]))
    succ_masks = {r: [_mask(vs) for vs in M.successors[r]] for r in M.relations}
    rounds = 0
    while True:
        if max_rounds is not None and rounds >= max_rounds:
            return sets, False
        rounds += 1
        new = set()
        for s in sets:
            new.add(full & ~s)
            for r, sm in succ_masks.items():
                new.add(_mask(w for w in M.worlds if sm[w] & ~s == 0))
        items = list(sets)
        for a, b in itertools.combinations(items, 2):
            new.add(a | b)
        new -= sets
        if not new:
            return sets, True
        sets |= new


def classify(M: KripkeModel, depth_bound: int | None = None) -> ModelClass:
    """Decide whether ``M`` is merely QKpi-, QKpi, or QKpi+.

    ``depth_bound`` caps the closure rounds; if the cap is hit before the
    closure either escapes P or stabilizes, :class:`ResourceBound` is raised.
    """
    pmasks = {_mask(s) for s in M.props}
    closure, done = definable_closure(M, depth_bound)
    if not closure <= pmasks:
        return ModelClass.QKPI_MINUS
    if not done:
        raise ResourceBound("closure not stabilized within the depth bound")
    return ModelClass.QKPI_PLUS if has_atom_cover(M) else ModelClass.QKPI


def atoms(M: KripkeModel) -> list[frozenset[int]]:
    """Minimal non-empty members of P."""
    nonempty = [s for s in M.props if s]
    return [s for s in nonempty if not any(t < s for t in nonempty)]


def has_atom_cover(M: KripkeModel) -> bool:
    covered: set[int] = set()
    for a in atoms(M):
        covered |= a
    return covered == set(M.worlds)


# -- enumeration -------------------------------------------------------------


class _Shape:
    """Bitmask bookkeeping for models with fixed |W|, |D| and signature."""

    def __init__(self, sig: QmlSignature, nw: int, nd: int):
        self.nw, self.nd = nw, nd
        self.rels = sorted(sig.rels)
        self.preds = sorted(sig.preds.items())
        self.tuples = {k: list(itertools.product(range(nd), repeat=n)) for k, n in self.preds}
        self.tuple_index = {k: {t: i for i, t in enumerate(ts)} for k, ts in self.tuples.items()}
        wperms = list(itertools.permutations(range(nw)))
        dperms = list(itertools.permutations(range(nd)))
        self.perms = [(p, q) for p in wperms for q in dperms][1:]  # skip identity
        self._rel_cache: dict[tuple, int] = {}
        self._ext_cache: dict[tuple, int] = {}
        self._p_cache: dict[tuple, int] = {}
        self._set_cache: dict[tuple, int] = {}

    def map_rel(self, mask: int, p: tuple[int, ...]) -> int:
        key = (mask, p)
        out = self._rel_cache.get(key)
        if out is None:
            nw = self.nw
            out = 0
            m, i = mask, 0
            while m:
                if m & 1:
                    a, b = divmod(i, nw)
                    out |= 1 << (p[a] * nw + p[b])
                m >>= 1
                i += 1
            self._rel_cache[key] = out
        return out

    def map_ext(self, k: str, mask: int, q: tuple[int, ...]) -> int:
        key = (k, mask, q)
        out = self._ext_cache.get(key)
        if out is None:
            ts, idx = self.tuples[k], self.tuple_index[k]
            out = 0
            for i, t in enumerate(ts):
                if mask >> i & 1:
                    out |= 1 << idx[tuple(q[d] for d in t)]
            self._ext_cache[key] = out
        return out

    def map_set(self, s: int, p: tuple[int, ...]) -> int:
        key = (s, p)
        out = self._set_cache.get(key)
        if out is None:
            out = 0
            for w in range(self.nw):
                if s >> w & 1:
                    out |= 1 << p[w]
            self._set_cache[key] = out
        return out

    def map_pmask(self, pm: int, p: tuple[int, ...]) -> int:
        key = (pm, p)
        out = self._p_cache.get(key)
        if out is None:
            out = 0
            for s in range(1 << self.nw):
                if pm >> s & 1:
                    out |= 1 << self.map_set(s, p)
            self._p_cache[key] = out
        return out

    def image(self, key: tuple, p: tuple[int, ...], q: tuple[int, ...]) -> tuple:
        rels, exts, pm = key
        new_rels = tuple(self.map_rel(m, p) for m in rels)
        new_exts = []
        for (k, _), vec in zip(self.preds, exts):
            out = [0] * self.nw
            for w, m in enumerate(vec):
                out[p[w]] = self.map_ext(k, m, q)
            new_exts.append(tuple(out))
        return (new_rels, tuple(new_exts), self.map_pmask(pm, p))

    def is_canonical(self, key: tuple) -> bool:
        return all(self.image(key, p, q) >= key for p, q in self.perms)

    def build(self, key: tuple) -> KripkeModel:
        rels, exts, pm = key
        nw = self.nw
        relations = {
            r: frozenset(divmod(i, nw) for i in range(nw * nw) if m >> i & 1) for r, m in zip(self.rels, rels)
        }
        interp = {
            k: tuple(frozenset(t for i, t in enumerate(self.tuples[k]) if m >> i & 1) for m in vec)
            for (k, _), vec in zip(self.preds, exts)
        }
        props = frozenset(
            frozenset(w for w in range(nw) if s >> w & 1) for s in range(1 << nw) if pm >> s & 1
        )
        return KripkeModel(nw, self.nd, relations, props, interp, dict(self.preds))


def count_raw_models(sig: QmlSignature, nw: int, nd: int, p_mode: str) -> int:
    rel = 2 ** (nw * nw * len(sig.rels))
    ext = math.prod(2 ** (nd**n * nw) for n in sig.preds.values())
    p = 1 if p_mode == "powerset" else 2 ** (2**nw) - 1
    return rel * ext * p


def enumerate_models(
    sig: QmlSignature,
    max_w: int,
    max_d: int,
    p_mode: str = "powerset",
    *,
    canonical: bool = True,
    limit: int | None = DEFAULT_MODEL_LIMIT,
    min_w: int = 1,
    min_d: int = 1,
) -> Iterator[KripkeModel]:
    """Yield every model up to the bounds, smallest first.

    ``p_mode`` is ``"powerset"`` (P = all subsets of W) or ``"all"`` (every
    non-empty collection of subsets).  With ``canonical`` only the
    lexicographically least member of each isomorphism class (under world
    and individual permutations) is produced.  ``limit`` bounds the number
    of raw candidates; it is checked before each (|W|, |D|) layer is
    entered, so models from smaller layers are yielded before the error.
    """
    if max_w < 1 or max_d < 1:
        raise ValueError("bounds must be at least 1")
    if p_mode not in ("powerset", "all", "allSubcollections"):
        raise ValueError(f"unknown p_mode {p_mode!r}")
    p_mode = "powerset" if p_mode == "powerset" else "all"
    total = 0
    for nw in range(min_w, max_w + 1):
        for nd in range(min_d, max_d + 1):
            # checked per size layer, so smaller models are still produced
            total += count_raw_models(sig, nw, nd, p_mode)
            if limit is not None and total > limit:
                raise ResourceBound(
                    f"{total} candidate models up to |W|={nw}, |D|={nd} exceed the limit of {limit}"
                )
            shape = _Shape(sig, nw, nd)
            rel_choices = range(1 << (nw * nw))
            ext_choices = [
                list(itertools.product(range(1 << len(shape.tuples[k])), repeat=nw)) for k, _ in shape.preds
            ]
            if p_mode == "powerset":
                p_choices: Sequence[int] = [(1 << (1 << nw)) - 1]
            else:
                p_choices = range(1, 1 << (1 << nw))
            for rels in itertools.product(rel_choices, repeat=len(shape.rels)):
                for exts in itertools.product(*ext_choices):
                    for pm in p_choices:
                        key = (rels, exts, pm)
                        if canonical and not shape.is_canonical(key):
                            continue
                        yield shape.build(key)


# -- serialization -------------------------------------------------------------


def model_to_json(M: KripkeModel) -> dict:
    return {
        "worlds": list(M.worlds),
        "individuals": list(M.domain),
        "relations": {r: sorted([list(p) for p in pairs]) for r, pairs in sorted(M.relations.items())},
        "props": [sorted(s) for s in M.sorted_props],
        "interp": {
            k: {str(w): sorted([list(t) for t in rel]) for w, rel in enumerate(per_world)}
            for k, per_world in sorted(M.interp.items())
        },
        "arities": dict(sorted(M.arities.items())),
    }


def model_from_json(data: Mapping) -> KripkeModel:
    nw = len(data["worlds"])
    interp = {
        k: tuple(frozenset(tuple(t) for t in per_world.get(str(w), [])) for w in range(nw))
        for k, per_world in data.get("interp", {}).items()
    }
    return KripkeModel(
        nw,
        len(data["individuals"]),
        {r: frozenset(tuple(p) for p in pairs) for r, pairs in data["relations"].items()},
        frozenset(frozenset(s) for s in data["props"]),
        interp,
        dict(data.get("arities", {})),
    )


def assignment_to_json(g: QmlAssignment) -> dict:
    return {
        "ind": dict(sorted(g.ind.items())),
        "prop": {p: sorted(s) for p, s in sorted(g.prop.items())},
    }


def assignment_from_json(data: Mapping) -> QmlAssignment:
    return QmlAssignment(dict(data.get("ind", {})), {p: frozenset(s) for p, s in data.get("prop", {}).items()})


def countermodel_to_json(M: KripkeModel, g: QmlAssignment, w: int) -> dict:
    return {"model": model_to_json(M), "assignment": assignment_to_json(g), "world": w}


def dumps_countermodel(M: KripkeModel, g: QmlAssignment, w: int) -> str:
    return json.dumps(countermodel_to_json(M, g, w), indent=2)


def describe(M: KripkeModel) -> str:
    """Short human-readable rendering."""
    lines = [f"W = {{{', '.join(f'w{w}' for w in M.worlds)}}}, D = {{{', '.join(f'd{d}' for d in M.domain)}}}"]
    for r, pairs in sorted(M.relations.items()):
        shown = ", ".join(f"(w{a},w{b})" for a, b in sorted(pairs))
        lines.append(f"R_{r} = {{{shown}}}")
    if not M.is_powerset():
        shown = ", ".join("{" + ",".join(f"w{w}" for w in sorted(s)) + "}" for s in M.sorted_props)
        lines.append(f"P = {{{shown}}}")
    for k, per_world in sorted(M.interp.items()):
        for w, rel in enumerate(per_world):
            shown = ", ".join("(" + ",".join(f"d{d}" for d in t) + ")" for t in sorted(rel))
            lines.append(f"I_w{w}({k}) = {{{shown}}}")
    return "\n".join(lines)
