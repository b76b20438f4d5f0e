from __future__ import annotations

import json

import pytest
from typer.testing import CliRunner

from app import app
from config import Config, ExperimentConfig
from lib.cayley import clear_memo
from lib.reports import read_csv_rows
from lib.runner import EXIT_BUDGET, EXIT_USAGE, run

runner = CliRunner()


def _invoke(*args):
    return runner.invoke(app, [str(a) for a in args])


def test_growth_writes_reports(tmp_path):
    res = _invoke("growth", "--radius", 4, "--out", tmp_path)
    assert res.exit_code == 0, res.output
    assert "growth" in res.output
    assert (tmp_path / "growth.csv").exists()
    summary = json.loads((tmp_path / "growth.summary.json").read_text(encoding="utf-8"))
    assert summary["summary"]["radius"] == 4
    assert (tmp_path / "run.log").exists()


def test_reports_are_reproducible(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert _invoke("growth", "--radius", 3, "--out", a).exit_code == 0
    assert _invoke("growth", "--radius", 3, "--out", b).exit_code == 0
    for name in ("growth.csv", "growth.summary.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_json_report_format(tmp_path):
    res = _invoke("growth", "--radius", 2, "--format", "json", "--group", "Free", "--out", tmp_path)
    assert res.exit_code == 0, res.output
    payload = json.loads((tmp_path / "growth.json").read_text(encoding="utf-8"))
    sizes = [row["ball_size"] for row in payload["rows"]]
    assert sizes == [1, 5, 17]


def test_print_config_is_valid_json(tmp_path):
    res = _invoke("--print-config", "--seed", 5, "--out", tmp_path)
    assert res.exit_code == 0
    data = json.loads(res.output)
    assert data["run"]["seed"] == 5


def test_decompose_check(tmp_path):
    res = _invoke("decompose-check", "--out", tmp_path)
    assert res.exit_code == 0, res.output
    assert "mismatches: 0" in res.output
    assert (tmp_path / "decompose_check.csv").exists()


def test_length_inequality(tmp_path):
    res = _invoke("length-ineq", "--radius", 5, "--out", tmp_path)
    assert res.exit_code == 0, res.output
    rows = read_csv_rows(tmp_path / "length_ineq.csv")
    assert rows[0] == ["n", "max_ratio"]
    assert len(rows) == 1 + 6


@pytest.mark.parametrize(
    "args",
    [
        ["growth", "--group", "Nope"],
        ["section", "--group", "Lamplighter"],
        ["frobnicate"],
        [],
        ["growth", "--format", "xml"],
    ],
)
def test_usage_errors(tmp_path, args):
    res = _invoke(*args, "--out", tmp_path)
    assert res.exit_code == EXIT_USAGE, res.output


def test_bad_config_file(tmp_path):
    path = tmp_path / "bad.json5"
    path.write_text("{radii: {ball: ", encoding="utf-8")
    assert _invoke("growth", "--config", path, "--out", tmp_path).exit_code == EXIT_USAGE
    assert _invoke("growth", "--config", tmp_path / "missing.json5").exit_code == EXIT_USAGE


def test_budget_exit_code(tmp_path, monkeypatch):
    clear_memo()
    monkeypatch.setattr(Config, "MAX_ELEMENTS", 500)
    path = tmp_path / "free3.json5"
    path.write_text("{group: {name: 'Free', params: {rank: 3}}, radii: {ball: 8}}", encoding="utf-8")
    res = _invoke("growth", "--config", path, "--out", tmp_path / "out")
    assert res.exit_code == EXIT_BUDGET
    assert "completed radius" in res.output
    clear_memo()


def test_run_directly(tmp_path):
    cfg = ExperimentConfig().with_overrides(out=tmp_path, group="Zn", radius={"ball": 5})
    result = run("growth", cfg)
    assert result.status == 0
    assert len(result.files) == 2
    rows = read_csv_rows(tmp_path / "growth.csv")
    assert [r[1] for r in rows[1:]] == ["1", "3", "5", "7", "9", "11"]


def test_run_unknown_subcommand(tmp_path):
    result = run("nope", ExperimentConfig().with_overrides(out=tmp_path))
    assert result.status == EXIT_USAGE
    assert "unknown subcommand" in result.error


def _rerun_matches(name, *args, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    first = _invoke(*args, "--out", a)
    assert first.exit_code == 0, first.output
    assert _invoke(*args, "--out", b).exit_code == 0
    for suffix in (".csv", ".summary.json"):
        assert (a / f"{name}{suffix}").read_bytes() == (b / f"{name}{suffix}").read_bytes()
    return first


def test_aut_growth_cli(tmp_path):
    res = _rerun_matches("aut_growth", "aut-growth", tmp_path=tmp_path)
    assert "mismatches: 0" in res.output
    summary = json.loads((tmp_path / "a" / "aut_growth.summary.json").read_text(encoding="utf-8"))
    assert summary["summary"]["identities"]["checked"] > 0


def test_cocycles_cli(tmp_path):
    res = _rerun_matches("cocycles", "cocycles", "--radius", 4, tmp_path=tmp_path)
    assert "mismatches: 0" in res.output
    rows = read_csv_rows(tmp_path / "a" / "cocycles.csv")
    assert rows[0] == ["r", "beta_amplitude", "theta_growth"]
    assert len(rows) == 1 + 9


def test_distortion_cli(tmp_path):
    _rerun_matches("distortion", "distortion", "--radius", 8, tmp_path=tmp_path)
    rows = read_csv_rows(tmp_path / "a" / "distortion.csv")
    assert rows[0] == ["n", "D", "witness_word", "relative_growth", "partial"]


def test_rd_profile_cli_on_bs(tmp_path):
    path = tmp_path / "bs.json5"
    path.write_text("{group: {name: 'BS1m'}, radii: {rd: 8}, thresholds: {fit_min_radius: 3}}", encoding="utf-8")
    res = _rerun_matches("rd_profile", "rd-profile", "--config", path, tmp_path=tmp_path)
    assert "superpolynomial=True" in res.output
    summary = json.loads((tmp_path / "a" / "rd_profile.summary.json").read_text(encoding="utf-8"))
    assert summary["summary"]["adaptive"] is True
    rows = read_csv_rows(tmp_path / "a" / "rd_profile.csv")
    assert [r[3] for r in rows[1:]] == [str(n) for n in range(1, 9)]
