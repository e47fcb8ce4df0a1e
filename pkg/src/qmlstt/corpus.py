"""Benchmark formulas, frame conditions, and the STT-level meta problems.

Everything here is plain data plus small builders; the checks that use it
live in the CLI, the scripts, and the acceptance tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import kripke, qml
from .embedding import MVALID, embed, pred_const, rel_const, replace_constants
from .qml import QmlSignature
from .stt import MU, REL, App, Term, Var, app, conj, equals, exists, forall, implies
from .thf import ThfProblem, emit_problem, emit_term_problem


@dataclass(frozen=True)
class Benchmark:
    name: str
    signature: QmlSignature
    conjecture: str
    axioms: tuple[str, ...] = ()
    expected: str = "valid"  # or "countermodel"
    note: str = ""

    def formula(self) -> qml.Formula:
        return qml.parse_qml(self.conjecture, self.signature)

    def axiom_formulas(self) -> list[qml.Formula]:
        return [qml.parse_qml(a, self.signature) for a in self.axioms]

    def problem(self) -> ThfProblem:
        return emit_problem(self.formula(), self.signature, self.name, self.axiom_formulas(), [self.note or self.name])


PROP_SIG = QmlSignature(ind_vars=frozenset(), prop_vars={"P"}, preds={}, rels={"r"})
PRED_SIG = QmlSignature(ind_vars={"X"}, prop_vars={"P"}, preds={"p": 1}, rels={"r"})

EXISTS_TRUTH = Benchmark(
    "in_all_worlds_exists_truth", PROP_SIG, "[r] exists P:prop. P",
    note="In all worlds there exists a true proposition",
)
BARCAN = Benchmark("barcan", PRED_SIG, "(forall X:ind. [r] p(X)) => [r] forall X:ind. p(X)", note="Barcan formula")
CONVERSE_BARCAN = Benchmark(
    "converse_barcan", PRED_SIG, "([r] forall X:ind. p(X)) => forall X:ind. [r] p(X)", note="Converse Barcan formula",
)
EXCHANGE_LEFT = Benchmark(
    "exchange_left", PRED_SIG, "(<r> forall X:ind. p(X)) => forall X:ind. <r> p(X)",
    note="If it is possible for everything to be p, then everything is potentially p",
)
EXCHANGE_RIGHT = Benchmark(
    "exchange_right", PRED_SIG, "(exists X:ind. [r] p(X)) => [r] exists X:ind. p(X)",
    note="Dual reading of the quantifier exchange scheme",
)
AXIOM_K = Benchmark(
    "axiom_k", QmlSignature(ind_vars=frozenset(), prop_vars={"P", "Q"}, preds={}, rels={"r"}),
    "[r](P => Q) => ([r]P => [r]Q)", note="Axiom K",
)
AXIOM_T = Benchmark("axiom_t", PROP_SIG, "[r]P => P", expected="countermodel", note="Axiom T (reflexivity)")
AXIOM_4 = Benchmark("axiom_4", PROP_SIG, "[r]P => [r][r]P", expected="countermodel", note="Axiom 4 (transitivity)")
AXIOM_5 = Benchmark("axiom_5", PROP_SIG, "<r>P => [r]<r>P", expected="countermodel", note="Axiom 5 (euclideanness)")
AXIOM_B = Benchmark("axiom_b", PROP_SIG, "P => [r]<r>P", expected="countermodel", note="Axiom B (symmetry)")

CONFLUENCE_SIG = QmlSignature(ind_vars=frozenset(), prop_vars={"P"}, preds={}, rels={"i", "j", "k", "l"})


def confluence_scheme(i: str = "i", j: str = "j", k: str = "k", l: str = "l") -> str:
    return f"forall P:prop. <{i}>[{j}]P => [{k}]<{l}>P"


CONFLUENCE = Benchmark(
    "confluence_axiom", CONFLUENCE_SIG, confluence_scheme(), expected="countermodel",
    note="(i,j,k,l)-confluence scheme, not valid in K",
)

BENCHMARKS: dict[str, Benchmark] = {
    b.name: b
    for b in (
        EXISTS_TRUTH, BARCAN, CONVERSE_BARCAN, EXCHANGE_LEFT, EXCHANGE_RIGHT,
        AXIOM_K, AXIOM_T, AXIOM_4, AXIOM_5, AXIOM_B, CONFLUENCE,
    )
}


# -- frame conditions ----------------------------------------------------------


def is_confluent(M: kripke.KripkeModel, i: str, j: str, k: str, l: str) -> bool:
    """forall a b c. (i a b and k a c) implies exists d. (j b d and l c d)."""
    ri, rj, rk, rl = (M.relations[x] for x in (i, j, k, l))
    for a, b in ri:
        for a2, c in rk:
            if a2 != a:
                continue
            if not any((b, d) in rj and (c, d) in rl for d in M.worlds):
                return False
    return True


def is_reflexive(M: kripke.KripkeModel, r: str = "r") -> bool:
    return all((w, w) in M.relations[r] for w in M.worlds)


def is_transitive(M: kripke.KripkeModel, r: str = "r") -> bool:
    R = M.relations[r]
    return all((a, c) in R for a, b in R for b2, c in R if b == b2)


def is_symmetric(M: kripke.KripkeModel, r: str = "r") -> bool:
    R = M.relations[r]
    return all((b, a) in R for a, b in R)


def is_euclidean(M: kripke.KripkeModel, r: str = "r") -> bool:
    R = M.relations[r]
    return all((b, c) in R for a, b in R for a2, c in R if a == a2)


@dataclass
class CorrespondenceResult:
    frames: int = 0
    scheme_frames: set = field(default_factory=set)
    condition_frames: set = field(default_factory=set)

    @property
    def equal(self) -> bool:
        return self.scheme_frames == self.condition_frames


def confluence_correspondence(
    max_w: int, rels: tuple[str, str, str, str] = ("i", "j", "k", "l"), limit: int | None = kripke.DEFAULT_MODEL_LIMIT
) -> CorrespondenceResult:
    """Frames (powerset models, up to isomorphism) validating the scheme vs. satisfying the condition."""
    names = sorted(set(rels))
    sig = QmlSignature(ind_vars=frozenset(), prop_vars={"P"}, preds={}, rels=frozenset(names))
    phi = qml.parse_qml(confluence_scheme(*rels), sig)
    out = CorrespondenceResult()
    for M in kripke.enumerate_models(sig, max_w, 1, "powerset", limit=limit):
        out.frames += 1
        key = M.key()
        if kripke.is_valid_in_model(M, phi):
            out.scheme_frames.add(key)
        if is_confluent(M, *rels):
            out.condition_frames.add(key)
    return out


# -- STT-level meta problems ----------------------------------------------------

R_VAR = Var("R", REL)
P_PRED_VAR = Var("P", pred_const("p", 1).type)


def _lift(t: Term, table: dict) -> Term:
    return replace_constants(t, table)


def exchange_equivalence() -> Term:
    """forall R P. valid(<R> forall X. P X => forall X. <R> P X) <=> valid(exists X. [R] P X => [R] exists X. P X)."""
    table = {rel_const("r"): R_VAR, pred_const("p", 1): P_PRED_VAR}
    left = _lift(App(MVALID, embed(EXCHANGE_LEFT.formula(), named=True, sugar=True)), table)
    right = _lift(App(MVALID, embed(EXCHANGE_RIGHT.formula(), named=True, sugar=True)), table)
    return forall(R_VAR, forall(P_PRED_VAR, equals(left, right)))


def confluence_condition(i: Term, j: Term, k: Term, l: Term) -> Term:
    A, B, C, D = (Var(n, MU) for n in "ABCD")
    body = implies(conj(app(i, A, B), app(k, A, C)), exists(D, conj(app(j, B, D), app(l, C, D))))
    return forall(A, forall(B, forall(C, body)))


def confluence_equivalence() -> Term:
    """forall I J K L. valid(forall P. <I>[J]P => [K]<L>P) <=> (I,J,K,L)-confluence."""
    rs = [Var(n, REL) for n in "IJKL"]
    table = {rel_const(n): v for n, v in zip("ijkl", rs)}
    scheme = _lift(App(MVALID, embed(CONFLUENCE.formula(), named=True, sugar=True)), table)
    t = equals(scheme, confluence_condition(*rs))
    for v in reversed(rs):
        t = forall(v, t)
    return t


def meta_problems() -> dict[str, ThfProblem]:
    return {
        "quantifier_exchange": emit_term_problem(
            exchange_equivalence(), "quantifier_exchange",
            ["Equivalence of two quantifier exchange schemes, for every relation and predicate"],
        ),
        "confluence": emit_term_problem(
            confluence_equivalence(), "confluence",
            ["Correspondence between the (i,j,k,l) scheme and (i,j,k,l)-confluence"],
        ),
    }


META_PROBLEMS = ("quantifier_exchange", "confluence")


def builtin_problems_names() -> list[str]:
    return sorted([*BENCHMARKS, *META_PROBLEMS])


def builtin_problems() -> dict[str, ThfProblem]:
    out = {name: b.problem() for name, b in BENCHMARKS.items()}
    out.update(meta_problems())
    return out

