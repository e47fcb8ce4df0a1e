import itertools
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import naive
from qmlstt import kripke, qml
from qmlstt.errors import ResourceBound, UnboundVariable
from qmlstt.kripke import KripkeModel, ModelClass, QmlAssignment, classify, powerset, satisfies
from qmlstt.qml import Box, Dia, Not, PropVar, QmlSignature, parse_qml
from strategies import SIG, assignments, formulas, models

ONE_REL = QmlSignature(prop_vars={"P"}, rels={"r"})


def model(n, r=(), props=None, **kw):
    return KripkeModel(n, 1, {"r": frozenset(r)}, props or powerset(n), **kw)


def test_vacuous_box():
    M = model(2)
    g = QmlAssignment({}, {"P": frozenset()})
    bottom = parse_qml("false", ONE_REL)
    assert satisfies(M, g, 0, Box("r", bottom))


def test_propositional_variable_clause():
    M = model(2, [(0, 1)])
    g = QmlAssignment({}, {"P": frozenset({1})})
    assert satisfies(M, g, 1, PropVar("P")) and not satisfies(M, g, 0, PropVar("P"))
    assert satisfies(M, g, 0, Box("r", PropVar("P")))


def test_unbound_variable():
    with pytest.raises(UnboundVariable):
        satisfies(model(1), QmlAssignment(), 0, PropVar("P"))


def test_propositional_quantifier_ranges_over_p_only():
    # with P = {{0,1}} "exists P. ~P" is false; with the powerset it is true
    phi = parse_qml("exists P:prop. ~P", ONE_REL)
    g = QmlAssignment({}, {})
    assert not satisfies(model(2, props=frozenset({frozenset({0, 1})})), g, 0, phi)
    assert satisfies(model(2), g, 0, phi)


def test_excluded_middle_valid_and_axiom_t_refuted():
    assert kripke.is_valid_in_model(model(2, [(0, 1)]), parse_qml("P | ~P", ONE_REL))
    T = parse_qml("[r]P => P", ONE_REL)
    M = model(2, [(0, 1)])
    assert not kripke.is_valid_in_model(M, T)
    g, w = kripke.falsifier(M, T)
    assert not satisfies(M, g, w, T)
    assert kripke.is_valid_in_model(model(2, [(0, 0), (1, 1)]), T)


def test_assignment_ceiling():
    big = QmlSignature(prop_vars={"P", "Q", "R"}, rels={"r"})
    phi = parse_qml("P | Q | R", big)
    with pytest.raises(ResourceBound):
        kripke.is_valid_in_model(model(3), phi, limit=100)


# -- classification ---------------------------------------------------------


def test_classify_powerset_is_qkpi_plus():
    for n in (1, 2, 3):
        assert classify(model(n, [(0, n - 1)])) is ModelClass.QKPI_PLUS


def test_classify_detects_missing_complement():
    M = model(2, props=frozenset({frozenset({0})}))
    assert classify(M) is ModelClass.QKPI_MINUS


def test_classify_coarse_but_closed_collection():
    # {{}, W} is closed when R is empty; its only atom W covers every world
    M = model(2, props=frozenset({frozenset(), frozenset({0, 1})}))
    assert classify(M) is ModelClass.QKPI_PLUS
    M2 = KripkeModel(2, 1, {"r": frozenset({(1, 0)})}, frozenset({frozenset(), frozenset({0, 1}), frozenset({0})}))
    assert classify(M2) is ModelClass.QKPI_MINUS  # complement {1} missing


@settings(max_examples=300, deadline=None)
@given(models(powerset=False, max_w=3))
def test_finite_closed_collections_always_have_an_atom_cover(M):
    # a finite Boolean algebra of sets containing W is atomic
    assert classify(M) is not ModelClass.QKPI


def test_closure_includes_predicate_extensions():
    # an atom extension outside P makes the model non-closed
    M = KripkeModel(
        2, 1, {"r": frozenset()}, frozenset({frozenset(), frozenset({0, 1})}),
        {"p": (frozenset({(0,)}), frozenset())}, {"p": 1},
    )
    assert classify(M) is ModelClass.QKPI_MINUS


@settings(max_examples=200, deadline=None)
@given(models(powerset=False, max_w=3))
def test_classify_matches_definability_of_formulas(M):
    """Every set defined by a small formula lies in P whenever classify says QKpi."""
    cls = classify(M)
    if cls is ModelClass.QKPI_MINUS:
        return
    sig = QmlSignature(ind_vars={"X"}, prop_vars={"P"}, preds={"p": 1}, rels={"r", "s"})
    for phi in _small_formulas(sig):
        for g in kripke.assignments(M, sorted(qml.free_vars(phi)[0]), sorted(qml.free_vars(phi)[1])):
            assert kripke.extension(M, g, phi) in M.props


def _small_formulas(sig):
    from qmlstt.oracle import enumerate_formulas

    return enumerate_formulas(sig, 2, max_formulas=150)


# -- independent evaluator, duality, locality ---------------------------------


@settings(max_examples=1000, deadline=None)
@given(st.data())
def test_agrees_with_naive_set_evaluator(data):
    M = data.draw(models())
    g = data.draw(assignments(M))
    phi = data.draw(formulas())
    w = data.draw(st.integers(0, M.n_worlds - 1))
    assert satisfies(M, g, w, phi) == naive.holds(M, g.ind, g.prop, w, phi)


@settings(max_examples=500, deadline=None)
@given(st.data())
def test_diamond_box_duality(data):
    M = data.draw(models())
    g = data.draw(assignments(M))
    phi = data.draw(formulas(depth=3))
    r = data.draw(st.sampled_from(sorted(SIG.rels)))
    for w in M.worlds:
        assert satisfies(M, g, w, Dia(r, phi)) == (not satisfies(M, g, w, Box(r, Not(phi))))


@settings(max_examples=300, deadline=None)
@given(st.data())
def test_assignment_locality(data):
    M = data.draw(models())
    g1 = data.draw(assignments(M))
    g2 = data.draw(assignments(M))
    phi = data.draw(formulas(depth=3))
    iv, pv = qml.free_vars(phi)
    mixed = QmlAssignment(
        {x: (g1.ind[x] if x in iv else g2.ind[x]) for x in g1.ind},
        {p: (g1.prop[p] if p in pv else g2.prop[p]) for p in g1.prop},
    )
    for w in M.worlds:
        assert satisfies(M, g1, w, phi) == satisfies(M, mixed, w, phi)


def test_axiom_k_valid_in_every_enumerated_model():
    sig = QmlSignature(prop_vars={"P", "Q"}, rels={"r"})
    K = parse_qml("[r](P => Q) => ([r]P => [r]Q)", sig)
    n = 0
    for M in kripke.enumerate_models(sig, 3, 1):
        assert kripke.is_valid_in_model(M, K)
        n += 1
    assert n == 2 + 10 + 104


# -- enumeration ----------------------------------------------------------------


def test_enumeration_counts():
    assert len(list(kripke.enumerate_models(ONE_REL, 1, 1))) == 2
    two = list(kripke.enumerate_models(ONE_REL, 2, 1, min_w=2))
    assert len(two) == 10 <= 16
    assert len(list(kripke.enumerate_models(ONE_REL, 2, 1, min_w=2, canonical=False))) == 16


def _brute_force_classes(sig, nw, nd, p_mode):
    """Count isomorphism classes by applying every permutation to every raw model."""
    seen = set()
    classes = 0
    for M in kripke.enumerate_models(sig, nw, nd, p_mode, canonical=False, min_w=nw, min_d=nd):
        key = _key(M)
        if key in seen:
            continue
        classes += 1
        for pw in itertools.permutations(range(nw)):
            for pd in itertools.permutations(range(nd)):
                seen.add(_key(_permute(M, pw, pd)))
    return classes


def _key(M):
    return (
        tuple(sorted((r, tuple(sorted(p))) for r, p in M.relations.items())),
        tuple(sorted(tuple(sorted(s)) for s in M.props)),
        tuple(sorted((k, tuple(tuple(sorted(x)) for x in v)) for k, v in M.interp.items())),
    )


def _permute(M, pw, pd):
    inv = {w: i for i, w in enumerate(pw)}
    rels = {r: frozenset((pw[a], pw[b]) for a, b in p) for r, p in M.relations.items()}
    props = frozenset(frozenset(pw[w] for w in s) for s in M.props)
    interp = {
        k: tuple(frozenset(tuple(pd[d] for d in t) for t in v[inv[w]]) for w in range(M.n_worlds))
        for k, v in M.interp.items()
    }
    return KripkeModel(M.n_worlds, M.n_individuals, rels, props, interp, dict(M.arities))


@pytest.mark.parametrize(
    "sig, nw, nd, p_mode",
    [
        (ONE_REL, 2, 1, "powerset"),
        (ONE_REL, 3, 1, "powerset"),
        (ONE_REL, 2, 1, "all"),
        (QmlSignature(ind_vars={"X"}, prop_vars={"P"}, preds={"p": 1}, rels={"r"}), 2, 2, "powerset"),
        (QmlSignature(prop_vars={"P"}, rels={"r", "s"}), 2, 1, "powerset"),
        (QmlSignature(ind_vars={"X"}, preds={"q": 2}, rels={"r"}), 1, 2, "powerset"),
    ],
)
def test_canonical_enumeration_matches_brute_force(sig, nw, nd, p_mode):
    got = list(kripke.enumerate_models(sig, nw, nd, p_mode, min_w=nw, min_d=nd))
    assert len(got) == len({_key(M) for M in got})
    assert len(got) == _brute_force_classes(sig, nw, nd, p_mode)


def test_enumeration_respects_ceiling_per_layer():
    sig = QmlSignature(prop_vars={"P"}, rels={"i", "j", "k", "l"})
    it = kripke.enumerate_models(sig, 3, 1, limit=100_000)
    first = [next(it) for _ in range(3)]
    assert all(M.n_worlds == 1 for M in first)
    with pytest.raises(ResourceBound):
        list(it)


def test_enumeration_rejects_bad_bounds():
    with pytest.raises(ValueError):
        list(kripke.enumerate_models(ONE_REL, 0, 1))
    with pytest.raises(ValueError):
        list(kripke.enumerate_models(ONE_REL, 1, 1, "sometimes"))


def test_four_has_a_countermodel_within_three_worlds():
    four = parse_qml("[r]P => [r][r]P", ONE_REL)
    hit = next(M for M in kripke.enumerate_models(ONE_REL, 3, 1) if not kripke.is_valid_in_model(M, four))
    assert hit.n_worlds == 2  # w0 <-> w1 with P = {w1}
    assert hit.relations["r"] == {(0, 1), (1, 0)}


# -- serialization ----------------------------------------------------------------


@settings(max_examples=200, deadline=None)
@given(models())
def test_model_json_round_trip(M):
    data = json.loads(json.dumps(kripke.model_to_json(M)))
    assert kripke.model_from_json(data) == M


def test_countermodel_serialization_is_self_contained():
    M = model(2, [(0, 1)])
    g = QmlAssignment({}, {"P": frozenset({1})})
    data = json.loads(kripke.dumps_countermodel(M, g, 0))
    assert set(data) == {"model", "assignment", "world"}
    assert kripke.assignment_from_json(data["assignment"]) == g
    assert "R_r = {(w0,w1)}" in kripke.describe(M)
