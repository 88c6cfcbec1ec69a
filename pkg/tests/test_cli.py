import csv
import io
import json

import numpy as np
import pytest

from nbldpc.cli import main, parse_epsilons, ValidationError
from nbldpc.codes import build_regular, read_code
from nbldpc.decoder import DecoderConfig
from nbldpc.simulate import TrialRecord, run_trial, simulate, summarize, wilson_interval


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_epsilons():
    assert parse_epsilons(["0.1", "0.05:0.15:0.05"]) == [0.1, 0.05, 0.1, 0.15]
    for bad in (["1.5"], ["0.3:0.1:0.1"], ["0:1"], ["0:1:0"]):
        with pytest.raises(ValidationError):
            parse_epsilons(bad)


# -- simulation helpers

@pytest.mark.parametrize("k,n", [(0, 10), (5, 10), (10, 10), (3, 200)])
def test_wilson_interval_brackets_estimate(k, n):
    lo, hi = wilson_interval(k, n)
    assert 0.0 <= lo <= k / n <= hi <= 1.0


def test_wilson_interval_reference_value():
    # k=5, n=10 -> centre 0.5, half width z*sqrt(0.025 + z^2/400)/(1 + z^2/10)
    lo, hi = wilson_interval(5, 10)
    assert (lo, hi) == pytest.approx((0.2365930, 0.7634070), abs=1e-6)
    assert wilson_interval(0, 0) == (0.0, 1.0)


def test_trial_depends_only_on_seed_and_index():
    code = build_regular(3, 6, 4, 6, 2, np.random.default_rng(0))
    cfg = DecoderConfig()
    a = run_trial(code, 0.3, 11, 5, cfg).primary()
    b = run_trial(code, 0.3, 11, 5, cfg).primary()
    c = run_trial(code, 0.3, 11, 6, cfg).primary()
    assert a == b
    assert a["trial"] == 5 and c["trial"] == 6


def test_summary_recomputes_from_records():
    code = build_regular(3, 6, 4, 6, 2, np.random.default_rng(0))
    recs = simulate(code, [0.1, 0.5], 15, seed=4)
    assert [r.trial for r in recs] == list(range(30))
    summ = summarize(recs, [0.1, 0.5])
    for row in summ:
        rows = [r for r in recs if r.epsilon == row["epsilon"]]
        assert row["trials"] == len(rows) == 15
        assert row["block_errors"] == sum(r.status != "decoded" for r in rows)
        assert row["bler"] == row["block_errors"] / 15
    assert summ[0]["bler"] < summ[1]["bler"]


def test_empty_simulation_summary():
    code = build_regular(3, 6, 2, 4, 2, np.random.default_rng(0))
    assert simulate(code, [0.2], 0, seed=1) == []
    (row,) = summarize([], [0.2])
    assert row["trials"] == 0 and row["bler"] is None


def test_trial_record_primary_excludes_timing():
    r = TrialRecord(0, 0.1, "decoded", 2, 0, 0, 1.23)
    assert "wall_time" not in r.primary()


# -- construct

def test_construct_coupled_sizes(tmp_path, capsys):
    out = tmp_path / "c.json"
    code, _, _ = run(capsys, "construct", "--dl", "4", "--dr", "8", "--L", "9", "--M", "2", "--m", "4", "--seed", "3", "--out", str(out))
    assert code == 0
    c = read_code(out)
    assert (c.n_checks, c.n_vars) == (24, 36)
    assert c.meta["seed"] == 3


def test_construct_is_byte_identical(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        run(capsys, "construct", "--dl", "3", "--dr", "6", "--M", "5", "--m", "3", "--q", "3", "--seed", "8", "--out", str(p))
    assert paths[0].read_bytes() == paths[1].read_bytes()


@pytest.mark.parametrize(
    "argv",
    [
        ["construct", "--dl", "3", "--dr", "6", "--M", "4", "--m", "4", "--q", "4"],
        ["construct", "--dl", "3", "--dr", "5", "--M", "4", "--m", "4"],
        ["construct", "--dl", "3", "--dr", "6", "--M", "0", "--m", "4"],
        ["de", "closed-form", "--dl", "3", "--dr", "6", "--epsilon", "0.3"],
        ["simulate", "--epsilon", "0.1"],
        ["simulate", "--dl", "3", "--dr", "6", "--M", "4", "--epsilon", "2"],
        ["concentration", "--m", "8", "--q", "6", "--d1", "2", "--d2", "2", "--k", "1"],
    ],
)
def test_validation_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err.startswith("error:")


def test_missing_code_file_exit_2(tmp_path, capsys):
    code, _, err = run(capsys, "simulate", "--code", str(tmp_path / "nope.json"), "--epsilon", "0.1")
    assert code == 2 and "cannot read" in err


# -- de

def test_de_trace_csv(capsys):
    code, out, _ = run(capsys, "de", "trace", "--dl", "3", "--dr", "6", "--epsilon", "0.19", "--T", "3")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["t", "xi"]
    assert [float(r["xi"]) for r in rows] == pytest.approx([0.19, 0.09, 0.0, 0.0])


def test_de_closed_form_json(capsys):
    code, out, _ = run(capsys, "de", "closed-form", "--dl", "3", "--dr", "6", "--epsilon", "0.19", "--T", "2", "--format", "json")
    report = json.loads(out)
    assert report["schema"] == 1
    assert [r["xi"] for r in report["trace"]] == pytest.approx([0.19, 0.09, 0.0])


def test_de_threshold(capsys):
    code, out, _ = run(capsys, "de", "threshold", "--dl", "3", "--dr", "6")
    (row,) = json.loads(out)["results"]
    assert row["threshold"] == pytest.approx(0.2, abs=1e-6)


def test_de_coupled_threshold(capsys):
    code, out, _ = run(capsys, "de", "coupled-threshold", "--dl", "3", "--dr", "6", "--L", "64", "--format", "csv")
    (row,) = list(csv.DictReader(io.StringIO(out)))
    assert 0.48 <= float(row["threshold"]) <= 0.5
    assert float(row["design_rate"]) == pytest.approx(0.484375)


def test_de_coupled_run(capsys):
    code, out, _ = run(capsys, "de", "coupled-run", "--dl", "3", "--dr", "6", "--L", "16", "--epsilon", "0.45")
    report = json.loads(out)
    assert report["converged"] and len(report["sections"]) == 16


def test_de_subspace_mc(capsys):
    code, out, _ = run(capsys, "de", "subspace-mc", "--dl", "3", "--dr", "6", "--m", "40", "--epsilon", "0.1", "--T", "2", "--trials", "30")
    rows = json.loads(out)["rows"]
    assert code == 0 and len(rows) == 3 and rows[0]["mc_mean"] == 0.1


# -- simulate

SIM = ["simulate", "--dl", "3", "--dr", "6", "--M", "4", "--m", "10", "--trials", "6", "--seed", "2"]


def test_simulate_json_is_deterministic(tmp_path, capsys):
    outs = []
    for workers in ("1", "2"):
        p = tmp_path / f"s{workers}.json"
        assert run(capsys, *SIM, "--epsilon", "0.1:0.3:0.1", "--workers", workers, "--out", str(p))[0] == 0
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]
    report = json.loads(outs[0])
    assert report["schema"] == 1 and len(report["records"]) == 18
    assert [r["epsilon"] for r in report["summary"]] == [0.1, 0.2, 0.3]
    assert "wall_time" not in report["records"][0]


def test_simulate_csv_records_and_meta(tmp_path, capsys):
    rec, meta = tmp_path / "r.csv", tmp_path / "m.json"
    code, out, _ = run(capsys, *SIM, "--epsilon", "0.2", "--format", "csv", "--records", str(rec), "--meta", str(meta))
    assert code == 0
    (row,) = list(csv.DictReader(io.StringIO(out)))
    records = list(csv.DictReader(rec.open()))
    assert int(row["trials"]) == len(records) == 6
    assert int(row["block_errors"]) == sum(r["status"] != "decoded" for r in records)
    assert len(json.loads(meta.read_text())["wall_times"]) == 6


def test_simulate_zero_trials(capsys):
    code, out, _ = run(capsys, *SIM[:-4], "--trials", "0", "--epsilon", "0.2")
    report = json.loads(out)
    assert code == 0 and report["records"] == []
    assert report["summary"][0]["trials"] == 0


def test_simulate_from_code_file_warns_on_fractional_noise(tmp_path, capsys, caplog):
    p = tmp_path / "c.json"
    run(capsys, "construct", "--dl", "3", "--dr", "6", "--M", "3", "--m", "10", "--out", str(p))
    code, out, _ = run(capsys, "simulate", "--code", str(p), "--epsilon", "0.15", "--trials", "2")
    assert code == 0 and "not an integer" in caplog.text
    assert json.loads(out)["summary"][0]["noise_dim"] == 2


# -- concentration

def test_concentration_report(capsys):
    code, out, _ = run(capsys, "concentration", "--m", "20", "--d1", "12", "--d2", "12", "--k", "1", "--k", "3", "--trials", "200")
    results = json.loads(out)["results"]
    assert code == 0 and [r["k"] for r in results] == [1, 3]
    assert all(r["passes"] for r in results)
    assert results[1]["bound"] == pytest.approx(1 - 2.0**-3)
