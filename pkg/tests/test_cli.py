from __future__ import annotations

import json

import pytest

from hurwitz_components import cli


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.CACHE_ENV_VAR, str(tmp_path / "cache"))
    return tmp_path / "cache"


def run_cli(capsys, *argv: str):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_invariants_example(capsys):
    code, out, _ = run_cli(
        capsys, "invariants", "--group", "Zn:2", "--type1", "1|2,2", "--type2", "2|"
    )
    assert code == 0
    doc = json.loads(out)
    assert (doc["chi"], doc["q"], doc["pg"], doc["ksq"]) == (1, 3, 3, 8)
    assert doc["schema_version"] == 1
    assert doc["beauville"] is False


def test_enumerate_lists_systems(capsys):
    code, out, _ = run_cli(capsys, "enumerate", "--group", "Sym:3", "--type", "0|2,2,3")
    assert code == 0
    doc = json.loads(out)
    assert doc["count"] == 6
    assert len(doc["systems"]) == 6
    assert all(len(ent) == 3 for ent in doc["systems"])


def test_enumerate_budget_exit_code(capsys):
    code, _, err = run_cli(
        capsys, "enumerate", "--group", "Zn:11,11", "--type", "0|11,11,11", "--budget", "100"
    )
    assert code == 2
    assert "budget" in err.lower()


def test_count_byte_identical_across_threads(capsys):
    outs = []
    for threads in ("1", "4", "8"):
        code, out, _ = run_cli(
            capsys,
            "count", "--group", "Zn:5,5", "--type1", "0|5,5,5", "--type2", "0|5,5,5",
            "--threads", threads, "--no-cache",
        )
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1] == outs[2]
    doc = json.loads(outs[0])
    assert doc["h"] == 1 and doc["total_pairs"] == 11520


def test_count_cache_replays_bytes(capsys, isolated_cache):
    argv = ("count", "--group", "Sym:3", "--type1", "0|2,2,3", "--type2", "0|2,2,3")
    code1, out1, err1 = run_cli(capsys, *argv)
    code2, out2, err2 = run_cli(capsys, *argv)
    assert code1 == code2 == 0
    assert out1 == out2
    assert "cache hit" not in err1
    assert "cache hit" in err2
    assert len(list(isolated_cache.glob("*.json"))) == 1


def test_count_cache_dir_flag_overrides_env(capsys, tmp_path):
    other = tmp_path / "elsewhere"
    argv = (
        "count", "--group", "Zn:1", "--type1", "2|", "--type2", "2|",
        "--cache-dir", str(other),
    )
    code, _, _ = run_cli(capsys, *argv)
    assert code == 0
    assert len(list(other.glob("*.json"))) == 1


def test_count_no_cache_leaves_no_files(capsys, isolated_cache):
    code, _, _ = run_cli(
        capsys, "count", "--group", "Zn:1", "--type1", "2|", "--type2", "2|", "--no-cache"
    )
    assert code == 0
    assert not isolated_cache.exists()


def test_count_cache_key_tracks_engine_version(capsys, isolated_cache, monkeypatch):
    argv = ("count", "--group", "Zn:1", "--type1", "2|", "--type2", "2|")
    run_cli(capsys, *argv)
    monkeypatch.setattr(cli, "__version__", "0.0.0-test")
    _, _, err = run_cli(capsys, *argv)
    assert "cache hit" not in err
    assert len(list(isolated_cache.glob("*.json"))) == 2


def test_count_one_stage_oracle_flag(capsys):
    code, out, _ = run_cli(
        capsys,
        "count", "--group", "Zn:5,5", "--type1", "0|5,5,5", "--type2", "0|5,5,5",
        "--oracle", "one-stage", "--no-cache",
    )
    assert code == 0
    assert json.loads(out)["h"] == 1


def test_count_one_stage_budget_exit(capsys):
    code, _, err = run_cli(
        capsys,
        "count", "--group", "Zn:11,11", "--type1", "0|11,11,11", "--type2", "0|11,11,11",
        "--oracle", "one-stage", "--no-cache",
    )
    assert code == 2
    assert "174240000" in err


def test_user_error_exit_codes(capsys):
    assert run_cli(capsys, "count", "--group", "Zn:x", "--type1", "2|", "--type2", "2|")[0] == 1
    assert run_cli(capsys, "theta", "--n", "11", "--bogus")[0] == 1
    assert run_cli(capsys, "theta", "--n", "6")[0] == 1
    assert run_cli(capsys)[0] == 1
    assert run_cli(capsys, "abelian-exists", "--group", "Sym:3", "--r1", "3", "--r2", "3")[0] == 1


def test_theta_reports_value_and_bounds(capsys):
    code, out, _ = run_cli(capsys, "theta", "--n", "35")
    assert code == 0
    doc = json.loads(out)
    assert doc["theta"] == 132
    assert doc["integral"] is True
    assert doc["n_count"] == 8640
    code, out, err = run_cli(capsys, "theta", "--n", "11")
    doc = json.loads(out)
    assert doc["theta"] == "701/9"
    assert doc["integral"] is False
    assert "ground truth" in err


def test_theta_cross_check(capsys):
    code, out, _ = run_cli(capsys, "theta", "--n", "13", "--cross-check")
    assert code == 0
    doc = json.loads(out)
    assert doc["quadruple_count"] == doc["n_count"] == 11880
    assert doc["quadruple_count_agrees"] is True
    assert doc["quadruple_classes"] == 178
    assert doc["classes_match_theta"] is None
    code, _, _ = run_cli(capsys, "theta", "--n", "65", "--cross-check")
    assert code == 2


def test_abelian_exists_reports_clauses(capsys):
    code, out, _ = run_cli(capsys, "abelian-exists", "--group", "Zn:5,5", "--r1", "3", "--r2", "3")
    assert code == 0
    doc = json.loads(out)
    assert doc["admits"] is True
    assert doc["chain"] == [5, 5]
    assert all(c["holds"] for c in doc["clauses"])


def test_scan_catalog_ingestion(capsys, tmp_path):
    cat = tmp_path / "groups.txt"
    cat.write_text("Zn:2\n\n# note\nbogus-line\nZn:3\n")
    code, out, err = run_cli(capsys, "scan", "--catalog", str(cat), "--chi", "1", "--q", "3")
    assert code == 0
    doc = json.loads(out)
    assert doc["warning_count"] == 1
    assert "bogus-line" in err
    assert doc["total_h"] == 1
    assert doc["rows"][0]["group"] == "Zn:2"


def test_scan_empty_catalog_warns(capsys, tmp_path):
    cat = tmp_path / "empty.txt"
    cat.write_text("")
    code, out, err = run_cli(capsys, "scan", "--catalog", str(cat), "--chi", "1", "--q", "4")
    assert code == 0
    doc = json.loads(out)
    assert doc["rows"] == []
    assert doc["warning_count"] == 1
    assert "empty" in err


def test_scan_csv_format(capsys):
    code, out, _ = run_cli(
        capsys, "scan", "--group", "Zn:1", "--chi", "1", "--q", "4", "--format", "csv"
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "group,type1,type2,h,g1,g2"
    assert lines[1] == "Zn:1,2|,2|,1,2,2"


def test_scan_missing_source_is_user_error(capsys):
    assert run_cli(capsys, "scan", "--chi", "1", "--q", "4")[0] == 1
    assert run_cli(capsys, "scan", "--catalog", "/nonexistent", "--chi", "1", "--q", "4")[0] == 1


def test_output_is_canonical_json(capsys):
    _, out, _ = run_cli(capsys, "theta", "--n", "35")
    doc = json.loads(out)
    assert out == json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def test_verify_runs_property_suites(capsys):
    code, out, err = run_cli(capsys, "verify")
    assert code == 0
    doc = json.loads(out)
    assert doc["passed"] is True
    names = {c["name"] for c in doc["checks"]}
    assert {"move-invariants", "inner-automorphism-lemma", "two-route-agreement"} <= names
    assert all(c["passed"] for c in doc["checks"])
    assert "[ok]" in err
