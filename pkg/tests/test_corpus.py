from pathlib import Path

import pytest

from annulus_split.annulus_core import Annulus
from annulus_split.config import load_config
from annulus_split.corpus import CorpusEntry, build_function, load_corpus, run_entry_oracles, summarize
from annulus_split.errors import FormatError, ParameterError
from annulus_split.validation import OracleReport

CORPUS_FILE = Path(__file__).resolve().parents[1] / "corpus.json"


@pytest.fixture(scope="module")
def corpus():
    return load_corpus(CORPUS_FILE)


def test_repository_corpus_loads(corpus):
    names = [entry.name for entry in corpus.entries]
    assert names[:3] == ["inverse_pair", "rotating_pair", "random_seed7"]
    assert {"identity", "real_part", "modulus_squared", "cusp"} <= set(names)


def test_corpus_file_errors(tmp_path):
    path = tmp_path / "corpus.json"
    path.write_text("{")
    with pytest.raises(FormatError):
        load_corpus(path)
    path.write_text('{"entries": [{"name": "x", "kind": "mystery"}]}')
    with pytest.raises(FormatError):
        load_corpus(path)


@pytest.mark.parametrize(
    "entry",
    [
        CorpusEntry(name="a", kind="named", function="sinc"),
        CorpusEntry(name="b", kind="coefficients"),
        CorpusEntry(name="c", kind="random", seed=3),
    ],
    ids=["unknown-name", "no-harmonics", "no-order"],
)
def test_build_function_errors(entry):
    with pytest.raises(ParameterError):
        build_function(entry, Annulus(1.0, 2.0))


def test_coefficient_entry_builds_series(corpus, rotating_pair_coeffs):
    entry = next(e for e in corpus.entries if e.name == "rotating_pair")
    fn, coeffs = build_function(entry, Annulus(1.0, 2.0))
    assert coeffs.max_abs_difference(rotating_pair_coeffs) == 0.0
    assert fn(1.5j) == pytest.approx(-1.0 + 1j / 1.5)


def test_unknown_oracle_group():
    entry = CorpusEntry(name="x", kind="named", function="z", oracles=["astrology"])
    with pytest.raises(ParameterError):
        run_entry_oracles(entry, load_config())


def test_detector_entry_is_tagged():
    reports = run_entry_oracles(CorpusEntry(name="id", kind="named", function="z", expect_zero_mean=False), load_config())
    assert [r.identity_name for r in reports] == ["zero_mean_detector"]
    assert reports[0].passed
    assert reports[0].details["entry"] == "id"
    assert reports[0].details["verdict"] is False


@pytest.mark.slow
def test_every_corpus_entry_passes(corpus):
    config = load_config()
    reports = [report for entry in corpus.entries for report in run_entry_oracles(entry, config)]
    summary = summarize(reports)
    assert summary["failed"] == []
    assert summary["total"] == summary["passed"] == len(reports)


def test_summarize_names_failures():
    reports = [
        OracleReport("a", 0.0, 1, 0.0, details={"entry": "one"}),
        OracleReport("b", 1.0, 1, 0.0, details={"entry": "two"}),
        OracleReport("c", 1.0, 1, 0.0),
    ]
    assert summarize(reports) == {"total": 3, "passed": 1, "failed": ["two/b", "-/c"]}


def test_zero_mean_entry_checks_lemma_61_against_closed_form():
    entry = CorpusEntry(name="pair", kind="named", function="inverse_pair")
    reports = {r.identity_name: r for r in run_entry_oracles(entry, load_config())}
    assert reports["lemma_61"].passed, reports["lemma_61"].max_abs_error
    assert reports["path_agreement"].passed
    assert reports["path_agreement"].details["profile_agreement"] <= 1e-12


def test_cusp_entry_hoelder_range(corpus):
    (entry,) = [e for e in corpus.entries if e.name == "cusp"]
    (report,) = run_entry_oracles(entry, load_config())
    assert report.identity_name == "hoelder"
    assert report.passed, report.details
    assert 0.4 <= report.details["alpha_hat"] <= 0.6
