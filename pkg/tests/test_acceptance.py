"""Acceptance criteria, one test per criterion.

Each test prints a single ``[PASS]``/``[FAIL]`` line with its timing and the
time limit.  Run alone with ``pytest tests/test_acceptance.py -v -s`` or as a
script: ``python3 tests/test_acceptance.py``.
"""

import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qmlstt import corpus, henkin, kripke, qml  # noqa: E402
from qmlstt.check import ProblemFile, check_problem  # noqa: E402
from qmlstt.embedding import INLINED, embed, inline, rel_const  # noqa: E402
from qmlstt.kripke import KripkeModel, ModelClass, classify  # noqa: E402
from qmlstt.oracle import LEMMA3_SIGNATURE, check_lemma1, check_lemma3, check_validity_transfer  # noqa: E402
from qmlstt.stt import MU, PROP, Lam, Var, alpha_eq, app, beta_eta_normalize, disj, eq_const, forall, neg  # noqa: E402
from qmlstt.thf import emit_operator_axioms  # noqa: E402


def _problem(b):
    return ProblemFile(b.signature, b.formula(), tuple(b.axiom_formulas()), b.name)


def _report(capsys, number, title, ok, elapsed, limit, detail=""):
    status = "PASS" if ok else "FAIL"
    limit_text = f" (limit {limit:g}s)" if limit is not None else ""
    line = f"[{status}] criterion {number}: {title}: {elapsed:.2f}s{limit_text} {detail}".rstrip()
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)
    return ok


def _timed(fn):
    start = time.perf_counter()
    ok, detail = fn()
    return ok, detail, time.perf_counter() - start


# -- the criteria -------------------------------------------------------------------


def crit1():
    W, Y = Var("W", MU), Var("Y", MU)
    P = Var("P", PROP)
    phi = qml.parse_qml("[r] exists P:prop. P", corpus.PROP_SIG)
    expected = Lam(W, forall(Y, disj(neg(app(rel_const("r"), W, Y)), neg(forall(P, neg(app(P, Y)))))))
    ok = alpha_eq(beta_eta_normalize(embed(phi)), expected)
    return ok, "alpha-equal" if ok else "normal form differs"


def crit2():
    b = corpus.EXISTS_TRUTH
    v = check_problem(_problem(b), 3, 2)
    t = check_validity_transfer(b.formula(), b.signature, 3, 2)
    ok = v.status == "valid" and t.passed and t.extra["valid_at_bound"]
    return ok, f"check={v.status} models={v.models}; transfer agreements={t.agreements}/{t.instances}"


def crit3():
    parts = []
    ok = True
    for name in ("barcan", "converse_barcan", "exchange_left", "exchange_right"):
        v = check_problem(_problem(corpus.BENCHMARKS[name]), 3, 2)
        ok &= v.status == "valid"
        parts.append(f"{name}={v.status}")
    left, right = corpus.EXCHANGE_LEFT, corpus.EXCHANGE_RIGHT
    agree = models = 0
    for M in kripke.enumerate_models(left.signature, 3, 2):
        models += 1
        agree += kripke.is_valid_in_model(M, left.formula()) == kripke.is_valid_in_model(M, right.formula())
    ok &= agree == models
    meta = all(
        henkin.FiniteFrame(nd, nw).eval(inline(corpus.exchange_equivalence()))
        for nw in (1, 2, 3) for nd in (1, 2) if (nw, nd) != (3, 2)
    )
    ok &= meta
    parts.append(f"exchange agreement {agree}/{models} models; STT equivalence in frames: {meta}")
    return ok, "; ".join(parts)


def crit4():
    res = corpus.confluence_correspondence(2)
    meta = henkin.FiniteFrame(1, 2).eval(inline(corpus.confluence_equivalence()))
    ok = res.equal and meta
    return ok, (
        f"frames={res.frames} scheme={len(res.scheme_frames)} condition={len(res.condition_frames)} "
        f"equal={res.equal}; STT equivalence at |W|=2: {meta}"
    )


def crit5():
    r = check_lemma1(LEMMA3_SIGNATURE, 2, 1, 3)
    ok = r.passed and r.instances >= 10_000
    return ok, f"formulas={r.formulas} models={r.models} instances={r.instances} disagreements={r.disagreements}"


def crit6():
    r = check_lemma3(3)
    bad = KripkeModel(2, 1, {"r": frozenset()}, frozenset({frozenset({1})}))
    rejected = classify(bad) is ModelClass.QKPI_MINUS
    ok = r.passed and rejected
    return ok, f"frames={r.models} classes={r.extra['classes']}; P={{{{w1}}}} rejected={rejected}"


def crit7():
    parts, ok = [], True
    for name in ("axiom_t", "axiom_4", "axiom_5", "axiom_b"):
        b = corpus.BENCHMARKS[name]
        v = check_problem(_problem(b), 3, 1)
        good = v.status == "countermodel" and v._model is not None
        if good:
            M = v._model
            g = kripke.assignment_from_json(v.countermodel["assignment"])
            w = v.countermodel["world"]
            good = M.n_worlds <= 3 and not kripke.satisfies(M, g, w, b.formula())
            parts.append(f"{name}: |W|={M.n_worlds}")
        else:
            parts.append(f"{name}: {v.status}")
        ok &= good
    return ok, ", ".join(parts)


PROPERTY_TESTS = [
    ("test_stt", "test_normalization_is_idempotent"),
    ("test_stt", "test_normalization_preserves_type_and_free_vars"),
    ("test_qml", "test_print_parse_round_trip"),
    ("test_thf", "test_arbitrary_terms_round_trip_through_thf"),
    ("test_henkin", "test_evaluation_is_invariant_under_beta_eta"),
    ("test_kripke", "test_diamond_box_duality"),
]


def crit8():
    import importlib

    parts, ok = [], True
    for mod_name, fn_name in PROPERTY_TESTS:
        fn = getattr(importlib.import_module(mod_name), fn_name)
        inner = fn.hypothesis.inner_test
        count = [0]

        def counting(*a, _inner=inner, **kw):
            count[0] += 1
            return _inner(*a, **kw)

        fn.hypothesis.inner_test = counting
        try:
            fn()
            passed = True
        except Exception:
            passed = False
        finally:
            fn.hypothesis.inner_test = inner
        good = passed and count[0] >= 500
        ok &= good
        parts.append(f"{fn_name}={count[0]}{'' if passed else ' FAILED'}")
    return ok, ", ".join(parts)


def crit9():
    # the prover timing table is excluded; its substitute is a model of the
    # operator axiom set in a one-world standard frame
    problem = emit_operator_axioms(include_hybrid=True)
    F = henkin.FiniteFrame(1, 1)
    for name, t in INLINED.items():
        F.interp[name] = F.eval(t)
    defs = problem.definitions()
    ok = all(F.eval(app(eq_const(c.type), c, d)) for c, d in defs.items())
    return ok, f"prover timing table excluded; {len(defs)} operator definitions hold in the 1-world frame"


CRITERIA = [
    (1, "normal form of [r] exists P:prop. P", crit1, 1),
    (2, "validity of [r] exists P:prop. P and transfer at maxW=3 maxD=2", crit2, 30),
    (3, "Barcan suite and quantifier exchange", crit3, 120),
    (4, "confluence correspondence, 4 relations, |W|<=2", crit4, 300),
    (5, "lemma1 suite, depth 3, exhaustive", crit5, 300),
    (6, "lemma3 suite, |D_mu|<=3", crit6, 60),
    (7, "countermodels for T, 4, 5, B", crit7, 60),
    (8, "property suites, >=500 instances each", crit8, None),
    (9, "excluded prover table; operator axioms in a 1-world frame", crit9, None),
]


@pytest.mark.slow
@pytest.mark.parametrize("number, title, fn, limit", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(number, title, fn, limit, capsys):
    ok, detail, elapsed = _timed(fn)
    within = limit is None or elapsed < limit
    _report(capsys, number, title, ok and within, elapsed, limit, detail)
    assert ok, detail
    assert within, f"took {elapsed:.1f}s, limit {limit}s"


if __name__ == "__main__":
    failures = 0
    for number, title, fn, limit in CRITERIA:
        ok, detail, elapsed = _timed(fn)
        ok = ok and (limit is None or elapsed < limit)
        failures += not _report(None, number, title, ok, elapsed, limit, detail)
    sys.exit(1 if failures else 0)
