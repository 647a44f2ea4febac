"""Command-line interface contract tests.

Runs the installed module as a subprocess for the user-facing contract
(columns, config handling, output routing, exit codes) and in-process
for error-path dispatch.
"""

import json
import os
import subprocess
import sys

import pytest

import bestcell.cli as cli
from bestcell.numerics import ConvergenceError

CMD = [sys.executable, "-m", "bestcell.cli"]


def run_cli(*args, env_extra=None):
    env = dict(os.environ)
    env.pop("BESTCELL_OUTDIR", None)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(CMD + list(args), capture_output=True, text=True,
                          env=env)


def parse_csv(text):
    comments, header, rows = [], None, []
    for line in text.splitlines():
        if line.startswith("#"):
            comments.append(line)
        elif header is None:
            header = line
        elif line:
            rows.append(line.split(","))
    return comments, header, rows


# ---------------------------------------------------------------------------
# attach
# ---------------------------------------------------------------------------

def test_attach_csv_contract():
    res = run_cli("attach", "--grid-points", "50")
    assert res.returncode == 0
    comments, header, rows = parse_csv(res.stdout)
    assert comments[0] == "# bestcell attach"
    assert any(c.startswith("# eta = 3") for c in comments)
    assert any(c.startswith("# attached_fraction = ") for c in comments)
    assert header == "rb_m,rb_over_rc,p_attach,mobile_density_per_m,xi_bmax_db"
    assert len(rows) == 50
    p = [float(r[2]) for r in rows]
    assert all(0.0 < x <= 1.0 for x in p)
    assert p == sorted(p, reverse=True)


def test_attach_json_contract():
    res = run_cli("attach", "--grid-points", "20", "--format", "json")
    assert res.returncode == 0
    obj = json.loads(res.stdout)
    assert obj["command"] == "attach"
    assert obj["columns"][0] == "rb_m"
    assert len(obj["rows"]) == 20
    assert "config" in obj and obj["config"]["eta"].startswith("3")


def test_attach_deterministic_output():
    a = run_cli("attach", "--grid-points", "10")
    b = run_cli("attach", "--grid-points", "10")
    assert a.stdout == b.stdout


# ---------------------------------------------------------------------------
# coverage / pmax column contracts
# ---------------------------------------------------------------------------

def test_coverage_columns():
    res = run_cli("coverage", "--samples", "20000", "--grid-points", "100",
                  "--gamma-min-db", "-10", "--gamma-max-db", "20",
                  "--gamma-step-db", "10")
    assert res.returncode == 0
    _, header, rows = parse_csv(res.stdout)
    assert header == "gamma_db,coverage_analytic,coverage_mc,mc_stderr"
    assert len(rows) == 4
    assert [float(r[0]) for r in rows] == [-10.0, 0.0, 10.0, 20.0]
    for r in rows:
        assert 0.0 <= float(r[1]) <= 1.0
        assert 0.0 <= float(r[2]) <= 1.0


def test_pmax_columns_and_monotonicity():
    res = run_cli("pmax", "--rc-list", "125,250,500,1000,2000",
                  "--grid-points", "100")
    assert res.returncode == 0
    _, header, rows = parse_csv(res.stdout)
    assert header == "rc_m,pmax_w,power_density_w_per_km2"
    assert [float(r[0]) for r in rows] == [125.0, 250.0, 500.0, 1000.0, 2000.0]
    pmax = [float(r[1]) for r in rows]
    dens = [float(r[2]) for r in rows]
    assert pmax == sorted(pmax) and pmax[0] < pmax[-1]
    assert dens == sorted(dens) and dens[0] < dens[-1]
    # Doubling rc scales pmax by 2^eta and the density by 2^(eta-2).
    assert pmax[1] / pmax[0] == pytest.approx(8.0, rel=1e-6)
    assert dens[1] / dens[0] == pytest.approx(2.0, rel=1e-6)


def test_powerdensity_columns():
    res = run_cli("powerdensity", "--rc-list", "500,1000",
                  "--grid-points", "80")
    assert res.returncode == 0
    _, header, rows = parse_csv(res.stdout)
    assert header == "rc_m,power_density_w_per_km2"
    assert len(rows) == 2


def test_ratedensity_columns_and_scaling():
    res = run_cli("ratedensity", "--rc-list", "500,1000",
                  "--grid-points", "100")
    assert res.returncode == 0
    comments, header, rows = parse_csv(res.stdout)
    assert header == ("rc_m,cell_density_per_km2,"
                      "rate_density_bps_per_hz_per_km2,rate_density_bps_per_m2")
    assert any(c.startswith("# gamma_star_db = ") for c in comments)
    assert any(c.startswith("# c_cell_bps_per_hz = ") for c in comments)
    r500 = [float(x) for x in rows[0]]
    r1000 = [float(x) for x in rows[1]]
    assert r500[2] / r1000[2] == pytest.approx(4.0, rel=1e-6)


# ---------------------------------------------------------------------------
# ocif / iopr smoke
# ---------------------------------------------------------------------------

def test_ocif_columns():
    res = run_cli("ocif", "--samples", "20000", "--bins", "20",
                  "--grid-points", "60")
    assert res.returncode == 0
    comments, header, rows = parse_csv(res.stdout)
    assert header == "rb_m,rb_over_rc,ocif_analytic,ocif_mc,mc_stderr,n_attached"
    assert len(rows) == 20
    assert any(c.startswith("# mu_g = ") for c in comments)


def test_iopr_columns():
    res = run_cli("iopr", "--samples", "20000", "--bins", "20",
                  "--grid-points", "60")
    assert res.returncode == 0
    comments, header, rows = parse_csv(res.stdout)
    assert header == ("rb_m,rb_over_rc,fbar_analytic,fbar_mc,fbar_mc_stderr,"
                      "fsq_analytic,fsq_mc,fsq_mc_stderr,n_attached")
    assert len(rows) == 20
    assert any(c.startswith("# mu_f = ") for c in comments)


# ---------------------------------------------------------------------------
# configuration handling
# ---------------------------------------------------------------------------

def test_config_file_and_flag_precedence(tmp_path):
    cfgfile = tmp_path / "run.cfg"
    cfgfile.write_text("# comment line\nsigma_db = 12\ngrid_points = 30\n")
    res = run_cli("attach", "--config", str(cfgfile), "--sigma-db", "10")
    assert res.returncode == 0
    comments, _, rows = parse_csv(res.stdout)
    assert any(c == "# sigma_db = 10" for c in comments)
    assert len(rows) == 30  # file value survives where no flag overrides


def test_unknown_config_key(tmp_path):
    cfgfile = tmp_path / "bad.cfg"
    cfgfile.write_text("sigma_db = 9\nnot_a_key = 1\n")
    res = run_cli("attach", "--config", str(cfgfile))
    assert res.returncode == 2
    assert "unknown config key" in res.stderr


def test_invalid_domain_exits_config_error():
    res = run_cli("attach", "--eta", "1.5")
    assert res.returncode == 2
    assert res.stderr.startswith("error:")


def test_unparsable_flag_exits_config_error():
    res = run_cli("attach", "--eta", "abc")
    assert res.returncode == 2


def test_simulate_rejects_csv():
    res = run_cli("simulate", "--samples", "2000", "--format", "csv")
    assert res.returncode == 2
    assert "json" in res.stderr


def test_verify_rejects_format():
    res = run_cli("verify", "--samples", "2000", "--format", "json")
    assert res.returncode == 2


# ---------------------------------------------------------------------------
# output routing
# ---------------------------------------------------------------------------

def test_output_env_dir(tmp_path):
    res = run_cli("attach", "--grid-points", "10",
                  env_extra={"BESTCELL_OUTDIR": str(tmp_path)})
    assert res.returncode == 0
    assert res.stdout == ""
    out = tmp_path / "attach.csv"
    assert out.exists()
    _, header, rows = parse_csv(out.read_text())
    assert header.startswith("rb_m,")
    assert len(rows) == 10


def test_output_explicit_path_wins_over_env(tmp_path):
    target = tmp_path / "custom.csv"
    res = run_cli("attach", "--grid-points", "10", "--output", str(target),
                  env_extra={"BESTCELL_OUTDIR": str(tmp_path / "ignored")})
    assert res.returncode == 0
    assert target.exists()
    assert not (tmp_path / "ignored").exists()


def test_output_dash_forces_stdout(tmp_path):
    res = run_cli("attach", "--grid-points", "10", "--output", "-",
                  env_extra={"BESTCELL_OUTDIR": str(tmp_path)})
    assert res.returncode == 0
    assert "rb_m," in res.stdout
    assert not (tmp_path / "attach.csv").exists()


# ---------------------------------------------------------------------------
# simulate command
# ---------------------------------------------------------------------------

def test_simulate_json_shape():
    res = run_cli("simulate", "--samples", "5000", "--bins", "10")
    assert res.returncode == 0
    obj = json.loads(res.stdout)
    assert obj["command"] == "simulate"
    assert obj["n_sites"] == 37
    assert len(obj["bin_edges_m"]) == 11
    assert len(obj["attach_freq"]) == 10
    assert sum(obj["n_total"]) == 5000
    assert "raw" not in obj


def test_simulate_raw_arrays():
    res = run_cli("simulate", "--samples", "2000", "--bins", "10", "--raw")
    assert res.returncode == 0
    obj = json.loads(res.stdout)
    raw = obj["raw"]
    assert len(raw["f"]) == sum(obj["n_attached"])
    assert len(raw["rb_m"]) == len(raw["g_own"]) == len(raw["f"])


# ---------------------------------------------------------------------------
# verify command
# ---------------------------------------------------------------------------

def test_verify_smoke_and_repeatability():
    a = run_cli("verify", "--samples", "3000", "--seed", "9")
    b = run_cli("verify", "--samples", "3000", "--seed", "9")
    assert a.returncode in (0, 4)
    assert a.returncode == b.returncode
    assert a.stdout == b.stdout
    assert a.stdout.startswith("# bestcell verify")
    assert "passed" in a.stdout
    assert sum(1 for line in a.stdout.splitlines()
               if line.startswith("[")) == 10
    # worker count must not appear in the echoed configuration
    assert "# workers" not in a.stdout


def test_verify_writes_file_and_stdout(tmp_path):
    res = run_cli("verify", "--samples", "3000", "--seed", "9",
                  env_extra={"BESTCELL_OUTDIR": str(tmp_path)})
    out = tmp_path / "verify.txt"
    assert out.exists()
    assert res.stdout == out.read_text()


# ---------------------------------------------------------------------------
# exit-code dispatch (in-process)
# ---------------------------------------------------------------------------

def test_convergence_error_maps_to_exit_3(monkeypatch, capsys):
    def boom(rcfg, args):
        raise ConvergenceError("forced failure", best_estimate=0.0)

    monkeypatch.setitem(cli._HANDLERS, "attach", boom)
    code = cli.main(["attach"])
    assert code == cli.EXIT_CONVERGENCE == 3
    assert "integration failed" in capsys.readouterr().err


def test_exit_code_constants():
    assert (cli.EXIT_OK, cli.EXIT_CONFIG, cli.EXIT_CONVERGENCE,
            cli.EXIT_VERIFY) == (0, 2, 3, 4)
