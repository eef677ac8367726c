import json
import subprocess
import sys

import pytest

from conftest import synthetic_records
from newsshare.cli import main
from newsshare.data import write_records
from newsshare.model import BASE_PARAMS, Article, builtin_distribution, population_sharing_probability


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture(scope="module")
def fixture_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "cells.csv"
    write_records(path, synthetic_records(n_domains=60, exposures=500000, seed=12))
    return path


def test_eval_half_scale(capsys):
    code, out, _ = run(["eval", "--b", 0.45, "--t", 0, "--belief", 0.45, "--fr", 1, "--kr", 10], capsys)
    assert code == 0 and out == "0.5\n"


def test_eval_population_matches_library(capsys):
    code, out, _ = run(["eval", "--b", 0, "--t", 1, "--dist", "centrist_unimodal"], capsys)
    p = population_sharing_probability(Article(0, 1), builtin_distribution("centrist_unimodal"), BASE_PARAMS)
    assert code == 0 and out == f"{p:.6g}\n"


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", "--b", 2, "--t", 0.5, "--belief", 0.1],
        ["eval", "--b", 0.1, "--t", 0.5],
        ["eval", "--b", 0.1, "--t", 0.5, "--belief", 0.1, "--fl", 0],
        ["eval", "--t", 0.5, "--belief", 0.1],
        ["eval", "--b", "x"],
        ["optimize", "--dist", "empirical", "--grid-step", 0.5],
        ["sweep-levels", "--fixed", "B"],
        ["partisan-report", "--b", 0.4, "--belief", 0.6, "--q", 2],
    ],
)
def test_validation_exit_code(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2
    assert "error" in err


def test_optimize_single_reader_json(capsys):
    code, out, _ = run(["optimize", "--belief", 0.8, "--fl", 0.5, "--kl", 1, "--fr", 1, "--kr", 10], capsys)
    d = json.loads(out)
    assert code == 0
    assert d["closed_form"]["bias_star"] == pytest.approx(0.3, abs=1e-12)
    assert d["bias_star"] == pytest.approx(0.3, abs=1e-6)
    assert d["active_boundary"] == "truth_bias_tradeoff"


def test_optimize_fixed_truth(capsys):
    code, out, _ = run(["optimize", "--dist", "hyperpartisan", "--t", 0.1, "--side", "right"], capsys)
    d = json.loads(out)
    assert code == 0 and 0.6 <= d["bias_star"] <= 0.9
    assert d["variance"] == pytest.approx(0.643, abs=1e-3)


def test_fit_recovers_embedded_params(fixture_csv, capsys):
    code, out, _ = run(["fit", "--data", fixture_csv, "--side", "right"], capsys)
    d = json.loads(out)
    assert code == 0 and d["converged"]
    assert d["parameters"]["f"]["estimate"] == pytest.approx(BASE_PARAMS.f_right, rel=0.05)
    assert d["parameters"]["k"]["estimate"] == pytest.approx(BASE_PARAMS.k_right, rel=0.05)


def test_validate_command(fixture_csv, capsys):
    code, out, _ = run(["validate", "--data", fixture_csv], capsys)
    d = json.loads(out)
    assert code == 0
    assert d["slope_misalignment_left"]["coefficient"] < 0
    assert d["slope_truth_right"]["coefficient"] > 0


def test_fit_io_errors(tmp_path, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    code, _, err = run(["fit", "--data", empty, "--side", "right"], capsys)
    assert code == 3 and "empty" in err
    code, _, _ = run(["fit", "--data", tmp_path / "missing.csv", "--side", "right"], capsys)
    assert code == 3
    bad = tmp_path / "bad.csv"
    bad.write_text("domain_id,bias,truth,group,exposures,shares\nx,0.1,0.2,left,ten,1\n")
    code, _, err = run(["validate", "--data", bad], capsys)
    assert code == 3 and ":2:" in err


def test_fit_insufficient_side(tmp_path, capsys):
    path = tmp_path / "left.csv"
    lines = ["domain_id,bias,truth,group,exposures,shares"]
    lines += [f"d{i},{i / 10 - 0.5},0.4,left,1000,{i + 1}" for i in range(8)]
    path.write_text("\n".join(lines) + "\n")
    code, _, err = run(["fit", "--data", path, "--side", "right"], capsys)
    assert code == 2 and "right-side" in err


def test_config_supplies_and_flags_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"b": 0.45, "t": 0, "belief": 0.45, "fr": 1, "kr": 10}))
    assert run(["eval", "--config", cfg], capsys)[1] == "0.5\n"
    assert run(["eval", "--config", cfg, "--fr", 0.5], capsys)[1] == "0.25\n"
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(["eval", "--config", cfg], capsys)[0] == 2
    cfg.write_text("{not json")
    assert run(["eval", "--config", cfg], capsys)[0] == 3


def test_tables_have_metadata_line(tmp_path, capsys):
    out = tmp_path / "levels.csv"
    code, _, _ = run(["sweep-levels", "--fixed", "B", "--belief", 0.45, "--fr", 1, "--kr", 10, "--out", out], capsys)
    lines = out.read_text().splitlines()
    assert code == 0
    assert lines[0].startswith("# newsshare sweep-levels ")
    assert "fr=1.0" in lines[0] and "value=0.45" in lines[0]
    assert lines[1] == "b,t,p"
    assert len(lines) == 2 + 5 * 201


def test_partisan_report_table(capsys):
    code, out, _ = run(["partisan-report", "--b", 0.4, "--belief", 0.6, "--q", 0.3], capsys)
    lines = out.splitlines()
    assert code == 0 and lines[1] == "t,p_unimodal,p_partisan,abs_gap,rel_gap"
    rows = [list(map(float, l.split(","))) for l in lines[2:]]
    assert len(rows) == 21
    assert all(r[1] >= r[2] for r in rows)
    assert all(b[4] < a[4] for a, b in zip(rows, rows[1:]))


def test_partisan_report_sign_warning(capsys):
    code, _, err = run(["partisan-report", "--b", -0.4, "--belief", 0.6], capsys)
    assert code == 0 and "opposite signs" in err


def test_population_curves_outputs(tmp_path, capsys):
    code, out, _ = run(
        ["population-curves", "--dist", "partisan,centrist_unimodal", "--points", 21, "--out", tmp_path], capsys
    )
    assert code == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == [
        "centrist_unimodal_right_bias.csv",
        "centrist_unimodal_right_truth.csv",
        "manifest.json",
        "partisan_right_bias.csv",
        "partisan_right_truth.csv",
    ]
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert 0.35 <= manifest["low_truth"]["partisan"]["bias_star"] <= 0.65
    assert "partisan: argmax bias" in out


def test_sensitivity_small(tmp_path, capsys):
    code, out, _ = run(
        ["sensitivity", "--dist", "partisan", "--points", 11, "--grid-step", 0.02, "--out", tmp_path], capsys
    )
    assert code == 0
    tables = sorted(tmp_path.glob("combo*.csv"))
    assert len(tables) == 16
    assert tables[0].name == "combo00_fl-low_kl-low_fr-low_kr-low_partisan.csv"
    summary = (tmp_path / "summary.csv").read_text().splitlines()
    assert summary[0].startswith("# newsshare sensitivity ")
    assert len(summary) == 2 + 16


def _run_twice(argv, tmp_path, capsys, directory=False):
    outputs = []
    for k in range(2):
        target = tmp_path / f"run{k}"
        if not directory:
            target = target.with_suffix(".out")
        assert main([str(a) for a in argv] + ["--out", str(target)]) == 0
        stdout = capsys.readouterr().out
        if directory:
            files = {p.name: p.read_bytes() for p in sorted(target.iterdir())}
        else:
            files = {"out": target.read_bytes()}
        outputs.append((stdout, files))
    return outputs


@pytest.mark.parametrize(
    "argv,directory",
    [
        (["eval", "--b", 0.2, "--t", 0.3, "--dist", "empirical"], False),
        (["optimize", "--dist", "empirical"], False),
        (["sweep-levels", "--fixed", "t", "--t", 0.45, "--points", 51], False),
        (["sweep-moments", "--weight-step", 0.25, "--grid-step", 0.05], False),
        (["partisan-report", "--b", 0.3, "--belief", 0.5], False),
        (["population-curves", "--points", 21, "--grid-step", 0.05], True),
        (["sensitivity", "--dist", "partisan,empirical", "--points", 11, "--grid-step", 0.05], True),
    ],
)
def test_commands_deterministic(argv, directory, tmp_path, capsys):
    a, b = _run_twice(argv, tmp_path, capsys, directory)
    assert a == b


def test_fit_deterministic(fixture_csv, tmp_path, capsys):
    a, b = _run_twice(["fit", "--data", fixture_csv, "--side", "left"], tmp_path, capsys)
    assert a == b
    a, b = _run_twice(["validate", "--data", fixture_csv], tmp_path, capsys)
    assert a == b


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "newsshare", "eval", "--b", "0.45", "--t", "0", "--belief", "0.45", "--fr", "1", "--kr", "10"],
        capture_output=True,
        text=True,
    )
    assert res.returncode == 0 and res.stdout == "0.5\n"
