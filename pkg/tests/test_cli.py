import json
import subprocess
import sys

from clusterbus.cli import CSV_HEADER, main


def run_cli(args):
    proc = subprocess.run(
        [sys.executable, "-m", "clusterbus.cli", *args],
        capture_output=True,
        text=True,
    )
    return proc


def test_csv_header_is_pinned():
    assert CSV_HEADER == (
        "experiment,protocol,d,R,p,noise,trials,seed,"
        "n00,n01,n10,n11,nu00_hat,ci_low,ci_high,bound_value,verdict"
    )


def test_bounds_values(tmp_path):
    proc = run_cli(["bounds", "--name", "max-R", "--d", "5", "--p", "1e-4"])
    assert proc.returncode == 0
    assert float(proc.stdout.splitlines()[0]) == 200.0
    proc = run_cli(["bounds", "--name", "latency-max-R", "--p0", "0.5",
                    "--delta", "4", "--m", "1"])
    assert float(proc.stdout.splitlines()[0]) == 81.0


def test_bounds_missing_flag_is_usage_error():
    proc = run_cli(["bounds", "--name", "p-fail"])
    assert proc.returncode == 1


def test_unknown_flag_is_usage_error():
    proc = run_cli(["simulate", "--frobnicate"])
    assert proc.returncode == 1


def test_simulate_csv(tmp_path):
    out = tmp_path / "sim.csv"
    proc = run_cli([
        "simulate", "--protocol", "surface", "--d", "2", "--p", "0.002",
        "--noise", "depolarizing", "--trials", "2000", "--seed", "3",
        "--out", str(out),
    ])
    assert proc.returncode == 0, proc.stderr
    lines = out.read_text().splitlines()
    assert lines[0] == CSV_HEADER
    fields = lines[1].split(",")
    row = dict(zip(CSV_HEADER.split(","), fields))
    assert row["experiment"] == "simulate" and row["protocol"] == "surface"
    assert int(row["n00"]) + int(row["n01"]) + int(row["n10"]) + int(row["n11"]) == 2000
    assert row["verdict"] == "pass"


def test_simulate_thread_determinism(tmp_path):
    args = ["simulate", "--protocol", "surface", "--d", "3", "--p", "0.005",
            "--noise", "depolarizing", "--trials", "1500", "--seed", "11"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run_cli(args + ["--threads", "1", "--out", str(a)]).returncode == 0
    assert run_cli(args + ["--threads", "8", "--out", str(b)]).returncode == 0
    assert a.read_bytes() == b.read_bytes()


def test_resilience_json(tmp_path):
    out = tmp_path / "res.json"
    proc = run_cli(["resilience", "--d", "3", "--p", "0.001,0.005",
                    "--format", "json", "--out", str(out)])
    assert proc.returncode == 0
    rows = json.loads(out.read_text())
    assert len(rows) == 4  # 2 recovery sets x 2 p values
    assert all(r["verdict"] == "pass" for r in rows)


def test_oracle_check_identities(tmp_path):
    out = tmp_path / "oc.csv"
    proc = run_cli(["oracle-check", "--level", "identities", "--out", str(out)])
    assert proc.returncode == 0
    assert "pass" in out.read_text()


def test_oracle_check_exhaustive_d2(tmp_path):
    out = tmp_path / "oc2.csv"
    proc = run_cli(["oracle-check", "--level", "exhaustive-d2", "--out", str(out)])
    assert proc.returncode == 0
    assert "pass" in out.read_text()


def test_resilience_census_dump(tmp_path):
    prefix = str(tmp_path / "census")
    proc = run_cli(["resilience", "--d", "3", "--p", "0.005",
                    "--census-out", prefix, "--out", str(tmp_path / "r.csv")])
    assert proc.returncode == 0
    text = (tmp_path / "census_T_dec_d3.csv").read_text()
    assert text.splitlines()[0] == "length,count"


def test_converse_runs(tmp_path):
    out = tmp_path / "con.csv"
    proc = run_cli(["converse", "--d", "2", "--len", "3", "--p", "0.2",
                    "--trials", "400", "--seed", "5", "--out", str(out)])
    assert proc.returncode in (0, 2)
    lines = out.read_text().splitlines()
    assert len(lines) == 4  # header + appr/half/bz rows


def test_main_entry_direct(tmp_path, capsys):
    rc = main(["bounds", "--name", "surface-failure", "--p", str(1 / 144)])
    assert rc == 0
    assert "0.652" in capsys.readouterr().out


def test_cluster_simulate_verdict(tmp_path):
    out = tmp_path / "cl.csv"
    proc = run_cli([
        "simulate", "--protocol", "cluster", "--d", "3", "--len", "11",
        "--p", "1e-4", "--noise", "depolarizing", "--trials", "3000",
        "--seed", "2", "--out", str(out),
    ])
    assert proc.returncode == 0, proc.stderr
    row = dict(zip(CSV_HEADER.split(","), out.read_text().splitlines()[1].split(",")))
    assert row["verdict"] == "pass"
    assert float(row["bound_value"]) > 0


def test_cluster_simulate_requires_len():
    proc = run_cli(["simulate", "--protocol", "cluster", "--d", "3",
                    "--p", "1e-4", "--trials", "10"])
    assert proc.returncode == 1


def test_threads_env_default(tmp_path, monkeypatch):
    import os
    import subprocess

    out = tmp_path / "env.csv"
    env = dict(os.environ, CLUSTERBUS_THREADS="3")
    proc = subprocess.run(
        [sys.executable, "-m", "clusterbus.cli", "simulate", "--protocol",
         "surface", "--d", "2", "--p", "0.05", "--noise", "bitflip",
         "--trials", "600", "--seed", "1", "--out", str(out)],
        capture_output=True, text=True, env=env,
    )
    assert proc.returncode == 0
    ref = tmp_path / "ref.csv"
    proc2 = subprocess.run(
        [sys.executable, "-m", "clusterbus.cli", "simulate", "--protocol",
         "surface", "--d", "2", "--p", "0.05", "--noise", "bitflip",
         "--trials", "600", "--seed", "1", "--threads", "1", "--out", str(ref)],
        capture_output=True, text=True,
    )
    assert proc2.returncode == 0
    assert out.read_bytes() == ref.read_bytes()
