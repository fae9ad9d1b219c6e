import json

import pytest

from obc_lib import run, utils
from obc_lib.config import load as load_config
from obc_lib.utils import CapExceeded, flow, normalize_word


def _json(capsys):
    return json.loads(capsys.readouterr().out)


def test_normalize_json(capsys):
    assert run(["normalize", "--expr", "c . c", "--format", "json"]) == 0
    report = _json(capsys)
    assert report["verb"] == "normalize"
    assert report["status"] == "pass"
    assert report["result"]["text"] == "[b0>t0]"
    assert [t["coeff"] for t in report["result"]["normal_form"]["terms"]] == ["1"]


def test_dim_text(capsys):
    assert run(["dim", "--src", "uu", "--dst", "uu", "--max-dots", "0"]) == 0
    assert capsys.readouterr().out.strip() == "8"
    assert run(["dim", "--src", "1", "--dst", "1", "--max-dots", "3", "--filtered"]) == 0
    assert capsys.readouterr().out.strip() == "5"


def test_compose_from_file(tmp_path, capsys):
    path = tmp_path / "inner.txt"
    path.write_text("s", encoding="utf-8")
    assert run(["compose", "--expr", "s", "--expr-file", str(path), "--format", "json"]) == 0
    assert _json(capsys)["result"]["text"] == "[b0>t0 | b1>t1]"


def test_psi_and_central(capsys):
    assert run(["psi", "--n", "1", "--expr", "x", "--module", "u", "--format", "json"]) == 0
    matrix = _json(capsys)["result"]["matrix"]
    assert matrix["rows"] == 4
    assert run(["central", "--n", "1", "--k", "1", "--src", "u"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines == ["# 2 x 2", "0 0 2 0", "1 1 2 0"]


def test_cyclo(capsys):
    assert run(["cyclo", "--expr", "x . x", "--f", "t^2-3", "--src", "u", "--dst", "u", "--format", "json"]) == 0
    result = _json(capsys)["result"]
    assert result["dim"] == 4
    assert list(result["normal_form"].values()) == ["3"]
    assert result["data"]["l"] == 2


def test_verify_reports_checks(capsys):
    assert run(["verify", "--suite", "sergeev", "--r", "2", "--format", "json"]) == 0
    report = _json(capsys)
    assert report["status"] == "pass"
    assert report["result"]["passed"] == report["result"]["total"] > 0
    assert report["seed"] == 0


def test_verify_text_table(capsys):
    assert run(["verify", "--suite", "central", "--n", "1"]) == 0
    out = capsys.readouterr().out
    assert "checks passed" in out


@pytest.mark.parametrize("argv", [
    ["normalize", "--expr", "cup . cup"],
    ["normalize"],
    ["dim", "--src", "uq", "--dst", "u"],
    ["verify"],
    ["compose", "--expr", "s"],
    ["normalize", "--expr-file", "/nonexistent/expr.txt"],
])
def test_usage_errors_exit_two(argv, capsys):
    assert run(argv) == 2
    assert capsys.readouterr().out.startswith("[Error]")


def test_schema(capsys):
    assert run(["--schema"]) == 0
    schema = _json(capsys)
    assert "checks" in schema["properties"]


def test_bad_config_is_reported(monkeypatch, capsys):
    monkeypatch.setenv("OBC_MAX_DOTS", "many")
    with pytest.raises(RuntimeError):
        load_config()
    assert run(["dim", "--src", "u", "--dst", "u", "--max-dots", "1"]) == 2
    assert "OBC_MAX_DOTS" in capsys.readouterr().out


def test_log_level_is_validated(monkeypatch):
    monkeypatch.setenv("OBC_LOG_LEVEL", "chatty")
    with pytest.raises(RuntimeError):
        load_config()
    monkeypatch.setenv("OBC_LOG_LEVEL", "debug")
    assert load_config()["OBC_LOG_LEVEL"] == "DEBUG"


def test_words():
    assert normalize_word("↑↓") == "ud"
    assert normalize_word(None) == ""
    assert normalize_word("1") == ""
    assert flow("uud") == 1
    with pytest.raises(ValueError):
        normalize_word("ux")
    with pytest.raises(CapExceeded):
        normalize_word("u" * 100)


def test_cap_flags_override_config(monkeypatch, capsys):
    monkeypatch.setattr(utils, "MAX_ELL", utils.MAX_ELL)
    monkeypatch.setattr(utils, "DELTA_PRECISION", utils.DELTA_PRECISION)
    assert run(["cyclo", "--f", "t^2-3", "--max-ell", "1"]) == 2
    assert "OBC_MAX_ELL=1" in capsys.readouterr().out
    assert run(["cyclo", "--f", "t^2-3", "--precision", "3", "--format", "json"]) == 0
    data = _json(capsys)["result"]["data"]
    assert len(data["delta"]) == 4


def test_word_cap_is_the_configured_length(monkeypatch):
    monkeypatch.setattr(utils, "MAX_WORD", 6)
    assert normalize_word("u" * 6) == "uuuuuu"
    with pytest.raises(CapExceeded):
        normalize_word("u" * 7)
    assert run(["dim", "--src", "u" * 7, "--dst", "u" * 7, "--max-dots", "0"]) == 2


def test_psim_truncation_flag(capsys):
    assert run(["psim", "--n", "3", "--expr", "x", "--format", "json"]) == 0
    assert _json(capsys)["result"]["truncated"] is False
    assert run(["psim", "--n", "3", "--expr", "x", "--truncation", "0", "--max-dots", "5", "--format", "json"]) == 0
    assert _json(capsys)["result"]["truncated"] is True
