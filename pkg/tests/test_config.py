import pytest

from qmlstt import corpus
from qmlstt.check import ProblemFile
from qmlstt.config import OracleConfig, SearchBounds


def test_search_bounds_validate():
    with pytest.raises(ValueError):
        SearchBounds(max_w=0)
    with pytest.raises(ValueError):
        SearchBounds(p_mode="some")


def test_search_bounds_check():
    b = corpus.AXIOM_T
    v = SearchBounds(max_w=2, max_d=1).check(ProblemFile(b.signature, b.formula(), (), b.name))
    assert v.status == "countermodel" and v.bound == {"max_w": 2, "max_d": 1, "p_mode": "powerset"}


def test_oracle_defaults_per_suite():
    assert OracleConfig("lemma1").bounds == (2, 1)
    assert OracleConfig("transfer").bounds == (3, 2)
    assert OracleConfig("lemma3", max_w=2).bounds == (2, 1)
    with pytest.raises(ValueError):
        OracleConfig("lemma2")


def test_oracle_config_runs_transfer_on_exists_truth_by_default():
    r = OracleConfig("transfer", max_w=2, max_d=1).run()
    assert r.passed and r.extra["valid_at_bound"]
    assert r.params["formula"] == "[r] exists P:prop. P"
