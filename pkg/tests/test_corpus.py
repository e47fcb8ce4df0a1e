import pytest

from qmlstt import corpus, henkin, kripke, qml
from qmlstt.embedding import inline
from qmlstt.kripke import KripkeModel, powerset

ONE = qml.QmlSignature(prop_vars={"P"}, rels={"r"})


def frame(n, r):
    return KripkeModel(n, 1, {"r": frozenset(r)}, powerset(n))


def test_every_benchmark_parses_and_has_an_expectation():
    for name, b in corpus.BENCHMARKS.items():
        phi = b.formula()
        qml.check(phi, b.signature)
        assert b.expected in ("valid", "countermodel"), name


def test_frame_condition_predicates():
    assert corpus.is_reflexive(frame(2, [(0, 0), (1, 1)]))
    assert not corpus.is_reflexive(frame(2, [(0, 0)]))
    assert corpus.is_transitive(frame(3, [(0, 1), (1, 2), (0, 2)]))
    assert not corpus.is_transitive(frame(3, [(0, 1), (1, 2)]))
    assert corpus.is_symmetric(frame(2, [(0, 1), (1, 0)]))
    assert corpus.is_euclidean(frame(3, [(0, 1), (0, 2), (1, 2), (2, 1), (1, 1), (2, 2)]))
    assert not corpus.is_euclidean(frame(2, [(0, 1)]))


@pytest.mark.parametrize(
    "axiom, condition",
    [("axiom_t", corpus.is_reflexive), ("axiom_4", corpus.is_transitive),
     ("axiom_5", corpus.is_euclidean), ("axiom_b", corpus.is_symmetric)],
)
def test_classical_correspondences_on_small_frames(axiom, condition):
    phi = corpus.BENCHMARKS[axiom].formula()
    for M in kripke.enumerate_models(ONE, 3, 1):
        assert kripke.is_valid_in_model(M, phi) == condition(M)


def test_confluence_predicate():
    M = KripkeModel(3, 1, {x: frozenset() for x in "ijkl"}, powerset(3))
    assert corpus.is_confluent(M, "i", "j", "k", "l")
    rels = {"i": {(0, 1)}, "k": {(0, 2)}, "j": {(1, 1)}, "l": {(2, 1)}}
    M = KripkeModel(3, 1, {x: frozenset(v) for x, v in rels.items()}, powerset(3))
    assert corpus.is_confluent(M, "i", "j", "k", "l")
    rels["l"] = set()
    M = KripkeModel(3, 1, {x: frozenset(v) for x, v in rels.items()}, powerset(3))
    assert not corpus.is_confluent(M, "i", "j", "k", "l")


def test_confluence_correspondence_single_relation_three_worlds():
    res = corpus.confluence_correspondence(3, ("r", "r", "r", "r"))
    assert res.frames == 116 and res.equal


def test_confluence_correspondence_two_relations():
    res = corpus.confluence_correspondence(2, ("i", "j", "i", "j"))
    assert res.equal and res.scheme_frames


def test_exchange_schemes_have_the_same_models():
    left, right = corpus.EXCHANGE_LEFT, corpus.EXCHANGE_RIGHT
    for M in kripke.enumerate_models(left.signature, 3, 2):
        assert kripke.is_valid_in_model(M, left.formula()) == kripke.is_valid_in_model(M, right.formula())


@pytest.mark.parametrize("n_worlds, n_ind", [(1, 1), (1, 2), (2, 1), (2, 2), (3, 1)])
def test_exchange_equivalence_holds_in_standard_frames(n_worlds, n_ind):
    assert henkin.FiniteFrame(n_ind, n_worlds).eval(inline(corpus.exchange_equivalence())) is True


@pytest.mark.parametrize("n_worlds", [1, 2])
def test_confluence_equivalence_holds_in_standard_frames(n_worlds):
    assert henkin.FiniteFrame(1, n_worlds).eval(inline(corpus.confluence_equivalence())) is True


def test_meta_problems_are_closed_and_valid_thf():
    for name, p in corpus.meta_problems().items():
        p.validate()
        assert p.conjecture.name == name


def test_builtin_names():
    names = corpus.builtin_problems_names()
    assert names == sorted(names)
    assert set(corpus.META_PROBLEMS) <= set(names)
