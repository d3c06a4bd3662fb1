import csv
import io
import json
import os

import pytest

from devolab import cli, core, harness
from devolab.core import ControlParams, VariantSpec
from devolab.harness import ExperimentPlan, execute


def run_cli(args, capsys):
    code = cli.main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_list_human(capsys):
    code, out, _ = run_cli(["list"], capsys)
    assert code == 0
    for name in core.VARIANT_NAMES:
        assert name in out
    assert "multimodal nonseparable" in out
    assert "[-500, 500]^30" in out


def test_list_machine(capsys):
    code, out, _ = run_cli(["list", "--machine"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert len(payload["variants"]) == 14
    assert len(payload["functions"]) == 14
    assert sorted(payload["classes"]["unimodal separable"]) == [
        "f1", "f2", "f4", "f6", "f7"]


def test_run_writes_store(tmp_path, capsys):
    out = str(tmp_path / "exp")
    code, _, _ = run_cli(["run", "--variant", "rand/1/bin", "--function", "f6",
                          "--runs", "2", "--seed", "7", "--out", out], capsys)
    assert code == 0
    with open(os.path.join(out, "runs.csv"), newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 2
    assert all(row["cr"] == "0.2" for row in rows)  # tuned table value for f6
    assert all(row["success"] == "True" for row in rows)
    expected = {str(core.derive_seed(7, "rand/1/bin", "f6", i)) for i in range(2)}
    assert {row["seed"] for row in rows} == expected
    assert os.path.exists(os.path.join(out, "summary.csv"))
    with open(os.path.join(out, "manifest.json")) as fh:
        assert json.load(fh)["base_seed"] == 7


def test_env_seed_overrides_flag(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("DEVOLAB_SEED", "123")
    out = str(tmp_path / "env")
    code, _, _ = run_cli(["run", "--variant", "rand/1/bin", "--function", "f6",
                          "--runs", "1", "--seed", "7", "--out", out], capsys)
    assert code == 0
    with open(os.path.join(out, "manifest.json")) as fh:
        assert json.load(fh)["base_seed"] == 123
    with open(os.path.join(out, "runs.csv"), newline="") as fh:
        row = next(csv.DictReader(fh))
    assert row["seed"] == str(core.derive_seed(123, "rand/1/bin", "f6", 0))


def test_unknown_variant_is_configuration_error(tmp_path, capsys):
    out = str(tmp_path / "nope")
    code, _, err = run_cli(["run", "--variant", "rand/7/bin", "--out", out], capsys)
    assert code == 2
    assert "rand/1/bin" in err  # message lists valid names
    assert not os.path.exists(os.path.join(out, "runs.csv"))


def test_cr_flags_are_mutually_exclusive(tmp_path, capsys):
    code, _, err = run_cli(["run", "--variant", "rand/1/bin", "--function", "f1",
                            "--runs", "1", "--cr", "0.5", "--cr-map", "x.json",
                            "--out", str(tmp_path / "x")], capsys)
    assert code == 2
    assert "mutually exclusive" in err


def _small_store(tmp_path, functions=("f3",), variants=("rand/1/bin", "best/2/bin")):
    out = str(tmp_path / "store")
    plan = ExperimentPlan(
        variants=[VariantSpec.parse(v) for v in variants],
        functions=list(functions),
        runs=2,
        params=ControlParams(np=16, max_gen=25, max_fe=400),
        cr_source="fixed",
        cr_value=0.9,
        base_seed=1,
    )
    execute(plan, out_dir=out)
    return out


def test_report_markdown_complete_store(tmp_path, capsys):
    out = _small_store(tmp_path)
    code, text, err = run_cli(["report", "--out", out], capsys)
    assert code == 0, err
    assert "## MOV — unimodal nonseparable" in text
    assert "## Convergence speed" in text
    assert "*" in text  # per-function minimum is starred
    assert "−" in text  # no successes at this tiny budget: Qm renders dashes
    assert "## Q-measure — unimodal nonseparable" in text


def test_report_incomplete_store_exits_3(tmp_path, capsys):
    out = _small_store(tmp_path, functions=("f1",))  # f1's class needs 5 functions
    code, text, err = run_cli(["report", "--out", out], capsys)
    assert code == 3
    assert "missing" in err
    assert "## MOV — unimodal separable" in text  # still rendered


def test_report_csv_format(tmp_path, capsys):
    out = _small_store(tmp_path)
    code, text, _ = run_cli(["report", "--out", out, "--format", "csv"], capsys)
    assert code == 0
    parsed = list(csv.reader(io.StringIO(text)))
    assert parsed[0] == harness.SUMMARY_HEADER
    scopes = {row[0] for row in parsed[1:]}
    assert scopes == {"cell", "class"}


def test_report_empty_dir_is_error(tmp_path, capsys):
    code, _, err = run_cli(["report", "--out", str(tmp_path / "void")], capsys)
    assert code == 2
    assert "no runs.csv" in err


def test_tune_cr_roundtrip(tmp_path, capsys):
    out = str(tmp_path / "tune")
    code, text, _ = run_cli([
        "tune-cr", "--variant", "best/2/bin", "--function", "f6",
        "--grid", "0.2,0.8", "--runs", "2", "--seed", "3", "--out", out,
    ], capsys)
    assert code == 0
    path = os.path.join(out, "cr_map.json")
    with open(path) as fh:
        payload = json.load(fh)
    entry = payload["best/2/bin"]["f6"]
    assert entry["cr"] in (0.2, 0.8)
    assert entry["ci_lo"] <= entry["ci_hi"]
    # the map file feeds straight back into run --cr-map
    run_out = str(tmp_path / "mapped")
    code, _, _ = run_cli(["run", "--variant", "best/2/bin", "--function", "f6",
                          "--runs", "1", "--seed", "3", "--cr-map", path,
                          "--out", run_out], capsys)
    assert code == 0
    with open(os.path.join(run_out, "runs.csv"), newline="") as fh:
        row = next(csv.DictReader(fh))
    assert float(row["cr"]) == entry["cr"]


def test_preset_sets_runs(tmp_path, capsys):
    out = str(tmp_path / "desk")
    code, _, _ = run_cli(["run", "--variant", "rand/1/bin", "--function", "f6",
                          "--preset", "desk", "--seed", "2", "--out", out], capsys)
    assert code == 0
    with open(os.path.join(out, "runs.csv"), newline="") as fh:
        assert len(list(csv.DictReader(fh))) == 10
