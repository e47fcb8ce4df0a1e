import sys
import textwrap
from pathlib import Path

import pytest
from hypothesis import given, settings

from qmlstt import corpus, henkin, qml
from qmlstt.embedding import INLINED, close_universally, embed, expand_definitions
from qmlstt.errors import ConfigurationError, ParseError, ProcessFailure, UnparsableOutput
from qmlstt.stt import (
    LOGICAL_NAMES,
    MU,
    Const,
    Lam,
    Var,
    alpha_eq,
    app,
    beta_eta_normalize,
    eq_const,
    forall,
    free_vars,
    subterms,
    type_of,
)
from qmlstt.thf import (
    MU_DECL,
    DefinitionEntry,
    TypeDecl,
    FormulaEntry,
    SzsStatus,
    ThfProblem,
    embedded_validity,
    emit_operator_axioms,
    emit_problem,
    parse_szs,
    parse_thf,
    render_term,
    run_external_prover,
)
from strategies import SIG, formulas, typed_terms

GOLDEN = Path(__file__).parent / "golden"


def test_round_trip_of_every_builtin_problem():
    for name, problem in corpus.builtin_problems().items():
        text = problem.render()
        back = parse_thf(text, require_conjecture=True)
        assert back.render() == text, name
        assert back.entries == problem.entries, name


def test_emission_is_deterministic():
    a = corpus.EXISTS_TRUTH.problem().render()
    b = corpus.EXISTS_TRUTH.problem().render()
    assert a == b and a.endswith(")).\n")


@pytest.mark.parametrize("name", sorted(corpus.builtin_problems_names()))
def test_golden_files(name):
    expected = (GOLDEN / f"{name}.p").read_text()
    assert corpus.builtin_problems()[name].render() == expected


def test_exists_truth_conjecture_expands_to_the_normal_form():
    p = corpus.EXISTS_TRUTH.problem()
    expanded = expand_definitions(p.conjecture.term, p.definitions())
    assert render_term(expanded) == "(! [W:mu]: (! [V:mu]: ((~ (r @ W @ V)) | (~ (! [P:mu>$o]: (~ (P @ V)))))))"


@settings(max_examples=300, deadline=None)
@given(formulas(depth=3))
def test_emitted_conjecture_means_validity_of_the_embedding(phi):
    problem = emit_problem(phi, SIG)
    back = parse_thf(problem.render(), require_conjecture=True)
    expanded = expand_definitions(back.conjecture.term, back.definitions())
    direct = beta_eta_normalize(close_universally(forall(Var("W", MU), app(embed(phi), Var("W", MU)))))
    assert alpha_eq(expanded, direct)


def test_axioms_are_emitted_before_the_conjecture():
    b = corpus.BENCHMARKS["axiom_4"]
    sig = qml.QmlSignature(prop_vars={"P"}, rels={"r"})
    t = qml.parse_qml("[r]P => P", sig)
    p = emit_problem(b.formula(), sig, "four", axioms=[t])
    roles = [(e.name, e.role) for e in p.entries if isinstance(e, FormulaEntry)]
    assert roles == [("axiom_1", "axiom"), ("four", "conjecture")]


# -- parser rejections --------------------------------------------------------------

HEAD = "thf(mu_type,type,(\n    mu: $tType )).\n"


def test_parser_rejects_two_conjectures():
    text = HEAD + "thf(a,conjecture,(\n    $true )).\nthf(b,conjecture,(\n    $true )).\n"
    with pytest.raises(ParseError):
        parse_thf(text)


def test_parser_requires_a_conjecture_on_request():
    with pytest.raises(ParseError):
        parse_thf(HEAD, require_conjecture=True)
    assert parse_thf(HEAD).entries


def test_parser_rejects_use_before_declaration():
    text = "thf(c,conjecture,(\n    ! [W:mu]: (r @ W @ W) )).\n" + HEAD
    with pytest.raises(ParseError) as e:
        parse_thf(text)
    assert e.value.line == 2


def test_parser_rejects_duplicate_names_and_ill_typed_formulas():
    with pytest.raises(ParseError):
        parse_thf(HEAD + HEAD)
    with pytest.raises(ParseError):
        parse_thf(HEAD + "thf(c,conjecture,(\n    ! [W:mu]: W )).\n")


def test_parser_accepts_derived_connectives():
    text = HEAD + "thf(c,conjecture,(\n    ! [W:mu]: ? [V:mu]: ((W = V) => ((W = V) & ((V = W) <=> (W = V)))) )).\n"
    p = parse_thf(text, require_conjecture=True)
    F = henkin.FiniteFrame(1, 2)
    assert F.eval(p.conjecture.term) is True


def test_operator_problem_validates_without_conjecture():
    p = emit_operator_axioms(include_hybrid=True)
    p.validate(require_conjecture=False)
    names = [e.name for e in p.entries]
    assert "mat" in names and "mglobal" in names
    assert "mat" not in [e.name for e in emit_operator_axioms().entries]


@pytest.mark.parametrize("n_worlds", [1, 2])
def test_operator_definitions_hold_in_small_frames(n_worlds):
    # interpret every operator by its definiens and check the definition
    # equations, which is a model of the emitted axioms
    problem = emit_operator_axioms(include_hybrid=True)
    F = henkin.FiniteFrame(1, n_worlds)
    for name, t in INLINED.items():
        F.interp[name] = F.eval(t)
    for sym, definiens in problem.definitions().items():
        assert F.eval(app(eq_const(sym.type), sym, definiens)) is True, sym.name


# -- SZS and external provers ---------------------------------------------------------


@pytest.mark.parametrize(
    "output, status",
    [
        ("% SZS status Theorem for conj\n", SzsStatus.THEOREM),
        ("SZS status CounterSatisfiable for x", SzsStatus.COUNTER_SATISFIABLE),
        ("noise\n% SZS status Timeout\n", SzsStatus.UNKNOWN),
        ("% SZS status GaveUp", SzsStatus.UNKNOWN),
        ("% SZS status InputError", SzsStatus.ERROR),
    ],
)
def test_parse_szs(output, status):
    assert parse_szs(output)[0] is status


def test_parse_szs_without_status_line():
    with pytest.raises(UnparsableOutput):
        parse_szs("proof found, probably")


def _mock(tmp_path, body):
    script = tmp_path / "prover.py"
    script.write_text(textwrap.dedent(body))
    return f"{sys.executable} {script} {{file}}"


def test_mock_prover_reports_theorem_and_sees_the_problem(tmp_path):
    cmd = _mock(tmp_path, """
        import sys
        text = open(sys.argv[1]).read()
        assert "conjecture" in text
        print("% SZS status Theorem for", sys.argv[1])
    """)
    r = run_external_prover(corpus.EXISTS_TRUTH.problem(), cmd, timeout=30)
    assert r.status is SzsStatus.THEOREM and r.szs == "Theorem"


def test_mock_prover_without_placeholder_gets_file_appended(tmp_path):
    script = tmp_path / "p.py"
    script.write_text("import sys\nprint('SZS status CounterSatisfiable', sys.argv[1].endswith('.p'))\n")
    r = run_external_prover("thf(a,conjecture,$true).", f"{sys.executable} {script}", timeout=30)
    assert r.status is SzsStatus.COUNTER_SATISFIABLE and "True" in r.output


def test_mock_prover_timeout_is_unknown(tmp_path):
    cmd = _mock(tmp_path, "import time\ntime.sleep(30)\n")
    r = run_external_prover(corpus.EXISTS_TRUTH.problem(), cmd, timeout=0.5)
    assert r.status is SzsStatus.UNKNOWN and r.szs == "Timeout"


def test_mock_prover_garbage_output(tmp_path):
    with pytest.raises(UnparsableOutput):
        run_external_prover("x", _mock(tmp_path, "print('hello')\n"), timeout=30)
    with pytest.raises(ProcessFailure):
        run_external_prover("x", _mock(tmp_path, "import sys\nprint('boom')\nsys.exit(3)\n"), timeout=30)


def test_missing_prover():
    with pytest.raises(ConfigurationError):
        run_external_prover("x", None)
    with pytest.raises(ConfigurationError):
        run_external_prover("x", "   ")
    with pytest.raises(ProcessFailure):
        run_external_prover("x", "/nonexistent/prover {file}", timeout=5)


def test_problem_concatenation():
    a = emit_operator_axioms()
    b = ThfProblem([FormulaEntry("c", "conjecture", embedded_validity(corpus.AXIOM_K.formula()))])
    with pytest.raises(ValueError):
        (a + b).validate()  # r is not declared


@settings(max_examples=500, deadline=None)
@given(typed_terms())
def test_arbitrary_terms_round_trip_through_thf(t):
    closed = t
    for v in sorted(free_vars(t), key=lambda v: (v.name, str(v.type)), reverse=True):
        closed = Lam(v, closed)
    sym = Const("d", type_of(closed))
    decls = [MU_DECL] + [
        TypeDecl(f"{c.name}_type", c.name, c.type)
        for c in sorted({c for c in subterms(closed) if isinstance(c, Const)}, key=lambda c: c.name)
        if c.name not in LOGICAL_NAMES
    ]
    problem = ThfProblem(decls + [TypeDecl("d_type", "d", sym.type), DefinitionEntry("d", sym, closed)])
    problem.validate(require_conjecture=False)
    back = parse_thf(problem.render())
    (definiens,) = back.definitions().values()
    assert alpha_eq(definiens, closed)
    assert back.render() == problem.render()


def test_binders_shadowing_at_another_type_are_renamed():
    from qmlstt.stt import IOTA, O

    X, Xo = Var("X", IOTA), Var("X", O)
    t = Lam(X, Lam(Xo, app(eq_const(IOTA), X, X)))
    assert render_term(t) == "(^ [X:$i]: (^ [X1:$o]: (X = X)))"
    decls = [TypeDecl("d_type", "d", type_of(t)), DefinitionEntry("d", Const("d", type_of(t)), t)]
    back = parse_thf(ThfProblem(decls).render())
    assert alpha_eq(back.definitions()[Const("d", type_of(t))], t)
