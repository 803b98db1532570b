"""End-to-end checks of the command-line interface.

Covers the documented contract: report format chosen by the --out
extension, JSON to stdout otherwise, figures next to table/simulation
reports unless --no-fig, exit codes 0/2/3, FREEPROB_SEED overriding
--seed, and byte-level determinism of reports under identical flags.
"""
import json
from fractions import Fraction

import pytest

from freepoisson import cli
from freepoisson.modes import decode_number


def run_cli(*argv):
    return cli.main([str(a) for a in argv])


def write_json(path, obj):
    path.write_text(json.dumps(obj))
    return path


@pytest.fixture
def fp_spec(tmp_path):
    return write_json(tmp_path / "fp.json",
                      {"type": "free_poisson", "lambda": "1", "alpha": "1"})


@pytest.fixture
def step_file(tmp_path):
    pieces = [{"lo": "0", "hi": "1", "c": "2"}, {"lo": "1", "hi": "3", "c": "-1"}]
    return write_json(tmp_path / "step.json", {"pieces": pieces})


# ---------------------------------------------------------------------------
# documented examples


def test_nc_count_4(capsys):
    assert run_cli("nc", "--count", 4) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["count"] == 14
    assert report["catalan"] == 14
    assert decode_number(report["mobius_top"], field="mobius") == -5


def test_dist_moments_example(fp_spec, capsys):
    assert run_cli("dist", "--spec", fp_spec, "--order", 6, "--emit", "moments") == 0
    report = json.loads(capsys.readouterr().out)
    values = [decode_number(v, field="values") for v in report["values"]]
    assert values == [1, 2, 5, 14, 42, 132]
    assert report["mode"] == "exact"


def test_limit_error_column_example(tmp_path):
    out = tmp_path / "limit.csv"
    assert run_cli("limit", "--lambda", 1, "--alpha", 1, "--Ns", "10,100,1000",
                   "--n", 2, "--out", out) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "N,n,kappa,error"
    errors = [float(line.split(",")[3]) for line in lines[1:]]
    assert errors == [0.1, 0.01, 0.001]
    assert (tmp_path / "limit.png").exists()


def test_limit_exact_rows(tmp_path):
    out = tmp_path / "limit.csv"
    assert run_cli("limit", "--lambda", 1, "--alpha", 1, "--Ns", "10",
                   "--n", 2, "--exact", "--no-fig", "--out", out) == 0
    assert out.read_text().splitlines()[1] == "10,2,9/10,1/10"
    assert not (tmp_path / "limit.png").exists()


# ---------------------------------------------------------------------------
# remaining subcommands


def test_cumulants_roundtrip_via_files(tmp_path, capsys):
    seq = {"order": 4, "mode": "exact", "values": ["1", "2", "5", "14"]}
    infile = write_json(tmp_path / "seq.json", seq)
    assert run_cli("cumulants", "--in", infile, "--direction", "m2c") == 0
    cums = json.loads(capsys.readouterr().out)
    assert cums["values"] == ["1", "1", "1", "1"]

    back = write_json(tmp_path / "cums.json",
                      {"order": 4, "mode": "exact", "values": cums["values"]})
    assert run_cli("cumulants", "--in", back, "--direction", "c2m") == 0
    moments = json.loads(capsys.readouterr().out)
    assert moments["values"] == seq["values"]


def test_dist_classify(fp_spec, capsys):
    assert run_cli("dist", "--spec", fp_spec, "--order", 6, "--emit", "classify") == 0
    report = json.loads(capsys.readouterr().out)
    assert report["classification"]["type"] == "free_poisson"


def test_process_sum_classifies_free_poisson(tmp_path, capsys):
    procs = write_json(tmp_path / "procs.json",
                       [{"rate": 1, "alpha": "1"}, {"rate": 1, "alpha": "1"}])
    assert run_cli("process", "--sum", procs, "--s", 0, "--t", 1, "--order", 4) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["classification"] == {"type": "free_poisson", "lambda": "2", "alpha": "1"}
    assert report["values"] == ["2", "2", "2", "2"]
    assert report["process"]["rate"] == 2


def test_process_mixed_jumps_not_free_poisson(tmp_path, capsys):
    procs = write_json(tmp_path / "procs.json",
                       [{"rate": 1, "alpha": "1"}, {"rate": 1, "alpha": "-1"}])
    assert run_cli("process", "--sum", procs, "--order", 6) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["classification"] == {"type": "not_free_poisson"}


def test_kl_eigen_report(tmp_path):
    out = tmp_path / "kl.json"
    assert run_cli("kl", "--alpha", 1, "--T", 1, "--count", 5, "--out", out) == 0
    report = json.loads(out.read_text())
    import math

    assert report["eigenvalues"][0] == pytest.approx(4 / math.pi**2)
    assert len(report["eigenvalues"]) == 5
    assert (tmp_path / "kl.png").exists()


def test_kl_mercer_csv(tmp_path):
    out = tmp_path / "mercer.csv"
    assert run_cli("kl", "--emit", "mercer", "--Ns", "25,50", "--grid", 51,
                   "--count", 10, "--out", out) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "N,error"
    errs = [float(line.split(",")[1]) for line in lines[1:]]
    assert errs[0] > errs[1] > 0


def test_integrate_step_report(step_file, capsys):
    assert run_cli("integrate", "--step", step_file, "--order", 4) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["values"] == ["0", "6", "6", "18"]
    assert report["l2_moment_bound"] == {"lhs": "6", "rhs": "22"}
    assert report["centered_l1_bound"] == "8"


def test_integrate_poly_report(tmp_path, capsys):
    poly = write_json(tmp_path / "poly.json",
                      {"pieces": [{"lo": "0", "hi": "1", "coeffs": ["0", "1"]}]})
    assert run_cli("integrate", "--f", poly, "--order", 4, "--no-fig") == 0
    report = json.loads(capsys.readouterr().out)
    values = [decode_number(v, field="values") for v in report["values"]]
    assert values == [Fraction(1, m + 1) for m in range(1, 5)]


def test_simulate_report_schema(step_file, tmp_path):
    out = tmp_path / "sim.json"
    assert run_cli("simulate", "--step", step_file, "--d", 60, "--samples", 2,
                   "--order", 3, "--seed", 7, "--out", out) == 0
    report = json.loads(out.read_text())
    assert report["d"] == 60 and report["seed"] == 7 and report["samples"] == 2
    assert len(report["predicted"]) == 3
    assert report["predicted"][1] == pytest.approx(6.0)
    assert (tmp_path / "sim.png").exists()


# ---------------------------------------------------------------------------
# exit codes and diagnostics


def test_malformed_json_exits_2_and_names_field(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    assert run_cli("dist", "--spec", bad, "--order", 4) == 2
    err = capsys.readouterr().err
    assert "spec" in err and "malformed JSON" in err


def test_missing_input_file_exits_2(tmp_path, capsys):
    assert run_cli("dist", "--spec", tmp_path / "nope.json", "--order", 4) == 2
    assert "spec" in capsys.readouterr().err


def test_schema_violation_names_offending_field(tmp_path, capsys):
    spec = write_json(tmp_path / "spec.json", {"type": "free_poisson", "alpha": "1"})
    assert run_cli("dist", "--spec", spec, "--order", 4) == 2
    assert "spec.lambda" in capsys.readouterr().err


def test_resource_limit_exits_3(capsys):
    assert run_cli("nc", "--count", 20) == 3
    assert "maximum" in capsys.readouterr().err


def test_refinement_failure_exits_3(tmp_path, capsys):
    # steep integrand: order-6 powers reach 1e18, so an absolute 1e-6
    # tolerance exhausts the cell budget instead of converging
    poly = write_json(tmp_path / "poly.json",
                      {"pieces": [{"lo": "0", "hi": "1", "coeffs": ["0", "1000"]}]})
    assert run_cli("integrate", "--f", poly, "--order", 6, "--tol", "1e-6") == 3
    assert "refinement" in capsys.readouterr().err


def test_bad_out_extension_exits_2(fp_spec, tmp_path, capsys):
    assert run_cli("dist", "--spec", fp_spec, "--order", 4,
                   "--out", tmp_path / "x.tsv") == 2
    assert ".tsv" in capsys.readouterr().err


def test_limit_requires_exactly_one_of_order_n(capsys):
    assert run_cli("limit", "--lambda", 1, "--alpha", 1, "--Ns", "10") == 2
    assert run_cli("limit", "--lambda", 1, "--alpha", 1, "--Ns", "10",
                   "--order", 3, "--n", 2) == 2
    assert run_cli("limit", "--lambda", "x", "--alpha", 1, "--Ns", "10", "--n", 2) == 2


def test_invalid_Ns_exits_2(capsys):
    assert run_cli("limit", "--lambda", 1, "--alpha", 1, "--Ns", "10,-3", "--n", 2) == 2
    assert "Ns" in capsys.readouterr().err


def test_row_size_not_exceeding_lambda_exits_2(capsys):
    assert run_cli("limit", "--lambda", 5, "--alpha", 1, "--Ns", "3", "--n", 2) == 2


# ---------------------------------------------------------------------------
# seed resolution and determinism


def test_env_seed_overrides_flag(step_file, tmp_path, monkeypatch):
    kwargs = ("simulate", "--step", step_file, "--d", 60, "--order", 2, "--no-fig")
    monkeypatch.setenv("FREEPROB_SEED", "5")
    assert run_cli(*kwargs, "--seed", 99, "--out", tmp_path / "env.json") == 0
    monkeypatch.delenv("FREEPROB_SEED")
    assert run_cli(*kwargs, "--seed", 5, "--out", tmp_path / "flag.json") == 0
    assert (tmp_path / "env.json").read_bytes() == (tmp_path / "flag.json").read_bytes()
    assert json.loads((tmp_path / "env.json").read_text())["seed"] == 5


def test_invalid_env_seed_exits_2(step_file, monkeypatch, capsys):
    monkeypatch.setenv("FREEPROB_SEED", "not-a-number")
    assert run_cli("simulate", "--step", step_file, "--d", 60, "--order", 2) == 2
    assert "FREEPROB_SEED" in capsys.readouterr().err


def test_default_seed_documented_constant(step_file, tmp_path, monkeypatch):
    monkeypatch.delenv("FREEPROB_SEED", raising=False)
    out = tmp_path / "default.json"
    assert run_cli("simulate", "--step", step_file, "--d", 60, "--order", 2,
                   "--no-fig", "--out", out) == 0
    assert json.loads(out.read_text())["seed"] == cli.DEFAULT_SEED


def test_reports_are_byte_deterministic(step_file, tmp_path):
    """Identical flags (and file names) reproduce every artifact byte for byte."""
    runs = []
    for name in ("a", "b"):
        d = tmp_path / name
        d.mkdir()
        assert run_cli("simulate", "--step", step_file, "--d", 60, "--samples", 2,
                       "--order", 3, "--seed", 11, "--out", d / "report.json") == 0
        assert run_cli("limit", "--lambda", 1, "--alpha", 1, "--Ns", "10,100",
                       "--order", 3, "--out", d / "table.csv") == 0
        runs.append(d)
    a, b = runs
    for name in ("report.json", "report.png", "table.csv", "table.png"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_threads_flag_does_not_change_results(step_file, tmp_path):
    out1, out2 = tmp_path / "t1.json", tmp_path / "t2.json"
    base = ("simulate", "--step", step_file, "--d", 60, "--order", 2,
            "--seed", 3, "--no-fig")
    assert run_cli(*base, "--out", out1) == 0
    assert run_cli(*base, "--threads", 1, "--out", out2) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_stdout_json_is_sorted_and_parseable(fp_spec, capsys):
    assert run_cli("dist", "--spec", fp_spec, "--order", 3) == 0
    out = capsys.readouterr().out
    report = json.loads(out)
    assert json.dumps(report, sort_keys=True, indent=2) + "\n" == out
