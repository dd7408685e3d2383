import csv
import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from annulus_split.annulus_core import EvaluableFunction, make_grid, sample
from annulus_split.cli import main
from annulus_split.io_formats import load_sampled, save_coefficients, save_sampled


@pytest.fixture
def run(tmp_path):
    def invoke(*argv: str) -> int:
        return main([*argv, "--log-dir", str(tmp_path / "logs")])

    return invoke


@pytest.fixture
def sampled_file(tmp_path, sampled_random):
    path = tmp_path / "f.json"
    save_sampled(path, sampled_random)
    return path


def _csv_rows(text: str) -> list[dict[str, str]]:
    lines = text.splitlines()
    assert lines[0].startswith("# schema:")
    return list(csv.DictReader(lines[1:]))


def test_synthesize_from_coefficients(run, tmp_path, capsys):
    coeffs = tmp_path / "c.json"
    coeffs.write_text(json.dumps({"plus": [[[1.0, 0.0]]], "minus": [[[0.0, 0.0]]]}))
    out = tmp_path / "f.json"
    assert run("synthesize", "--coeffs", str(coeffs), "--out", str(out)) == 0
    assert load_sampled(out).values[0, 0] == pytest.approx(1.0)
    assert json.loads(capsys.readouterr().out)["n_max"] == 1
    assert (tmp_path / "f.coeffs.json").exists()


def test_synthesize_random_is_reproducible(run, tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    assert run("synthesize", "--random", "7", "--out", str(first)) == 0
    assert run("synthesize", "--random", "7", "--out", str(second)) == 0
    assert first.read_bytes() == second.read_bytes()


def test_synthesize_rejects_empty_coefficients(run, tmp_path):
    coeffs = tmp_path / "c.json"
    coeffs.write_text("{}")
    assert run("synthesize", "--coeffs", str(coeffs), "--out", str(tmp_path / "f.json")) == 2


def test_check_accepts_series(run, sampled_file):
    assert run("check", str(sampled_file)) == 0


def test_check_rejects_identity(run, tmp_path, grid):
    path = tmp_path / "z.json"
    save_sampled(path, sample(EvaluableFunction(lambda z: z), grid))
    out = tmp_path / "report.json"
    assert run("check", str(path), "--out", str(out)) == 1
    report = json.loads(out.read_text())
    assert report["verdict"] is False
    assert report["residuals"]["1"] >= 1e-2


def test_check_rejects_shape_mismatch(run, sampled_file):
    data = json.loads(sampled_file.read_text())
    data["values"] = data["values"][:-1]
    sampled_file.write_text(json.dumps(data))
    assert run("check", str(sampled_file)) == 2


def test_missing_input_file(run, tmp_path):
    assert run("check", str(tmp_path / "nowhere.json")) == 2


def test_decompose_inverse_pair(run, tmp_path, sampled_inverse_pair):
    path, out = tmp_path / "f.json", tmp_path / "dec.json"
    save_sampled(path, sampled_inverse_pair)
    assert run("decompose", str(path), "--out", str(out), "--verify", "50", "--write-parts") == 0
    dec = json.loads(out.read_text())
    assert_allclose(dec["coeffs"]["plus"][0], [[1.0, 0.0]], atol=1e-12)
    assert dec["diagnostics"]["extension"]["circles"] == 50
    plus = load_sampled(tmp_path / "dec.plus.json")
    assert_allclose(plus.values, 1.0 / np.conj(plus.grid.points), atol=1e-12)
    assert (tmp_path / "dec.minus.json").exists()


def test_decompose_rejects_identity(run, tmp_path, grid):
    path = tmp_path / "z.json"
    save_sampled(path, sample(EvaluableFunction(lambda z: z), grid))
    assert run("decompose", str(path)) == 1


def test_synthesize_decompose_round_trip(run, tmp_path):
    f, dec, g = tmp_path / "f.json", tmp_path / "dec.json", tmp_path / "g.json"
    assert run("synthesize", "--random", "7", "--out", str(f)) == 0
    assert run("decompose", str(f), "--out", str(dec)) == 0
    assert run("synthesize", "--coeffs", str(dec), "--out", str(g)) == 0
    assert_allclose(load_sampled(g).values, load_sampled(f).values, atol=1e-9)


def test_omega_member(run, capsys):
    assert run("omega", "member", "--r1", "1", "--r2", "3", "--z", "1", "--w", "4") == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["region"] == "plus"
    assert payload["witness"] == pytest.approx([0.0, 0.0], abs=1e-8)


def test_omega_member_bad_point(run):
    assert run("omega", "member", "--z", "abc", "--w", "1") == 2


@pytest.mark.parametrize("kind, expected", [("pp", True), ("pm", False)])
def test_omega_intersect(run, capsys, kind, expected):
    assert run("omega", "intersect", "--c1", "0", "1", "--c2", "0.2", "1.5", "--kind", kind) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["predicate"] is expected
    assert payload["agree"] is True


def test_omega_psi_path(run, tmp_path, capsys, inverse_pair_coeffs):
    coeffs = tmp_path / "c.json"
    save_coefficients(coeffs, inverse_pair_coeffs)
    assert run("omega", "psi", "--coeffs", str(coeffs), "--z0", "1.5") == 0
    rows = _csv_rows(capsys.readouterr().out)
    assert len(rows) == 13
    assert float(rows[-1]["abs_error"]) <= 2e-3
    assert float(rows[-1]["abs_error"]) < float(rows[0]["abs_error"])


def test_omega_cloud(run, tmp_path):
    out = tmp_path / "cloud.csv"
    assert run("omega", "cloud", "--n", "30", "--out", str(out)) == 0
    rows = _csv_rows(out.read_text())
    assert len(rows) == 30
    assert {row["region"] for row in rows} <= {"plus", "minus", "boundary_sigma", "outside"}
    assert sum(row["region"] == "plus" for row in rows) >= 10
