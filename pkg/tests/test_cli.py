import csv
import json
import subprocess
import sys

import pytest

from trustgame.cli import FLAGS, build_parser, main, overrides_from_args
from trustgame.scenario import apply_overrides, load_file, resolve

BASE = ["--p", "0.4", "--q", "0.2", "--r", "0.2"]

# fixed column order per mode
SCHEMAS = {
    "solve-static": ("trajectory.csv", "t,x_1,x_2,alpha_1,alpha_2,beta_1,beta_2,profit_1,profit_2"),
    "solve-dynamic": (
        "trajectory.csv",
        "t,x_1,x_2,alpha_1,alpha_2,beta_1,beta_2,lambda_1,lambda_2,profit_1,profit_2",
    ),
    "simulate-abm": ("abm.csv", "t,share_1,stderr_1,ode_x_1,share_2,stderr_2,ode_x_2"),
    "maneuver": ("maneuver.csv", "node,p,q,r,target_beta,achieved_beta"),
    "sweep": (
        "sweep.csv",
        "value,node,alpha_static,beta_static,alpha_steady,beta_steady,converged",
    ),
}
MODE_ARGS = {
    "solve-static": [],
    "solve-dynamic": ["--horizon", "6"],
    "simulate-abm": ["--N", "500", "--runs", "2", "--horizon", "1"],
    "maneuver": ["--target-beta", "0.45"],
    "sweep": ["--parameter", "q", "--grid", "0.1,0.2"],
}


def run(tmp_path, *args):
    out = tmp_path / "out"
    code = main([*args, "--output", str(out)])
    return code, out


def read_summary(out):
    return json.loads((out / "summary.json").read_text())


def test_static_single_node(tmp_path, capsys):
    code, out = run(tmp_path, "solve-static", *BASE)
    assert code == 0
    summary = read_summary(out)
    assert summary["alpha"] == pytest.approx([0.5]) and summary["beta"] == pytest.approx([0.5])
    assert "alpha: 0.5" in capsys.readouterr().out
    for name in ("manifest.json", "summary.json", "summary.txt", "trajectory.csv", "trajectory.svg"):
        assert (out / name).exists()


def test_maneuver_single_node(tmp_path):
    code, out = run(tmp_path, "maneuver", *BASE, "--target-beta", "0.5")
    assert code == 0
    summary = read_summary(out)
    assert summary["r"] == pytest.approx([0.2], abs=1e-15)
    assert summary["residual"] < 1e-12


def test_maneuver_two_node_reports_closed_form(tmp_path):
    code, out = run(tmp_path, "maneuver", *BASE, "--n", "2", "--target-beta", "0.5")
    summary = read_summary(out)
    assert code == 0
    assert summary["r"] == pytest.approx([0.2, 0.2])
    assert summary["two_node_closed_form_r"] == pytest.approx(2.05)


def test_infeasible_target_exits_1(tmp_path, capsys):
    code, _ = run(tmp_path, "maneuver", *BASE, "--target-beta", "0.9")
    assert code == 1
    assert "feasible interval is (0, 0.666666666667)" in capsys.readouterr().err


def test_forced_non_convergence_exits_2(tmp_path):
    code, out = run(tmp_path, "solve-dynamic", *BASE, "--max-iter", "1")
    assert code == 2
    assert read_summary(out)["converged"] is False


def test_bad_file_exits_1(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text('mode = "static"\n[nodes]\np = 0.4\nq = 0.2\nr = 0.2\nsize = 3\n')
    assert main(["run", str(bad)]) == 1
    assert "line 6" in capsys.readouterr().err


def test_json_flag(tmp_path, capsys):
    run(tmp_path, "solve-static", *BASE, "--n", "2", "--json")
    assert json.loads(capsys.readouterr().out)["nash_verified"] is True


@pytest.mark.parametrize("command", sorted(SCHEMAS))
def test_csv_schema(tmp_path, command):
    code, out = run(tmp_path, command, *BASE, "--n", "2", *MODE_ARGS[command])
    assert code == 0
    name, header = SCHEMAS[command]
    with open(out / name, newline="") as fh:
        rows = list(csv.reader(fh))
    assert ",".join(rows[0]) == header
    assert all(len(row) == len(rows[0]) for row in rows)
    raw = (out / name).read_bytes()
    assert b"\r\n" not in raw


def test_sweep_dynamic_adds_columns(tmp_path):
    code, out = run(tmp_path, "sweep", *BASE, "--parameter", "n", "--grid", "1,2", "--dynamic", "--horizon", "6")
    assert code == 0
    header = (out / "sweep.csv").read_text().splitlines()[0]
    assert header == "value,node,alpha_static,beta_static,alpha_steady,beta_steady,alpha_dynamic,beta_dynamic,converged"


def test_csv_round_trips_floats(tmp_path):
    _, out = run(tmp_path, "solve-static", "--p", "0.3", "--q", "0.7", "--r", "0.1")
    summary = read_summary(out)
    rows = list(csv.DictReader(open(out / "trajectory.csv")))
    assert float(rows[0]["alpha_1"]) == summary["alpha"][0]


@pytest.mark.parametrize(
    "command, extra",
    [
        ("solve-static", ["--n", "2"]),
        ("solve-dynamic", ["--n", "2", "--x0", "0.5,0", "--horizon", "6"]),
        ("simulate-abm", ["--n", "2", "--N", "500", "--runs", "3", "--horizon", "1", "--seed", "4"]),
        ("sweep", ["--parameter", "r", "--grid", "0.1,0.3"]),
    ],
)
def test_manifest_reproduces_csv_bytes(tmp_path, command, extra):
    code, first = run(tmp_path, command, *BASE, *extra)
    assert code == 0
    second = tmp_path / "again"
    assert main(["run", str(first / "manifest.json"), "--output", str(second)]) == 0
    csvs = sorted(p.name for p in first.glob("*.csv"))
    assert csvs
    for name in csvs:
        assert (first / name).read_bytes() == (second / name).read_bytes()


FILE_VALUES = """\
mode = "static"
n = 2
x0 = [0.1, 0.1]
horizon = 10.0
seed = 1
output = "from-file"

[nodes]
p = 0.4
q = 0.2
r = 0.2

[solver]
tol = 1e-6
damping = 0.5
max_iter = 100
step = 0.01

[abm]
N = 100
dt = 0.01
runs = 2
alpha = [0.5, 0.5]

[maneuver]
target_beta = 0.4

[sweep]
parameter = "p"
grid = [0.1]
"""

FLAG_CASES = {
    "n": ("3", lambda d: d["n"], 3),
    "p": ("0.6", lambda d: d["nodes"][0]["p"], 0.6),
    "q": ("0.3", lambda d: d["nodes"][1]["q"], 0.3),
    "r": ("0.1", lambda d: d["nodes"][0]["r"], 0.1),
    "x0": ("0.2,0.3", lambda d: d["x0"], [0.2, 0.3]),
    "horizon": ("5", lambda d: d["horizon"], 5.0),
    "seed": ("9", lambda d: d["seed"], 9),
    "output": ("flagged", lambda d: d["output"], "flagged"),
    "tol": ("1e-9", lambda d: d["solver"]["tol"], 1e-9),
    "damping": ("0.25", lambda d: d["solver"]["damping"], 0.25),
    "max_iter": ("7", lambda d: d["solver"]["max_iter"], 7),
    "step": ("0.02", lambda d: d["solver"]["step"], 0.02),
    "N": ("321", lambda d: d["abm"]["N"], 321),
    "dt": ("0.005", lambda d: d["abm"]["dt"], 0.005),
    "runs": ("4", lambda d: d["abm"]["runs"], 4),
    "abm_alpha": ("0.3,0.4", lambda d: d["abm"]["alpha"], [0.3, 0.4]),
    "target_beta": ("0.35", lambda d: d["maneuver"]["target_beta"], 0.35),
    "parameter": ("q", lambda d: d["sweep"]["parameter"], "q"),
    "grid": ("0.2,0.4", lambda d: d["sweep"]["grid"], [0.2, 0.4]),
}


def test_every_flag_has_a_precedence_case():
    assert set(FLAG_CASES) == set(FLAGS)


@pytest.mark.parametrize("dest", sorted(FLAG_CASES))
def test_flag_overrides_file(tmp_path, dest):
    path = tmp_path / "s.toml"
    path.write_text(FILE_VALUES)
    value, get, expected = FLAG_CASES[dest]
    flag = "--" + dest.replace("_", "-")
    extra = ["--x0", "0,0,0"] if dest == "n" else []
    args = build_parser().parse_args(["run", str(path), flag, value, *extra])
    raw = apply_overrides(load_file(path), overrides_from_args(args))
    data = resolve(raw).data
    baseline = resolve(load_file(path)).data
    assert get(data) == expected
    assert get(baseline) != expected
    # untouched keys keep their file value
    assert data["mode"] == "static" and baseline["solver"]["damping"] == 0.5


def test_file_overrides_defaults(tmp_path):
    path = tmp_path / "s.toml"
    path.write_text(FILE_VALUES)
    data = resolve(load_file(path)).data
    assert data["abm"]["N"] == 100  # default is 10000
    assert data["output"] == "from-file"  # default is "results"


def test_reproduce_entrant(tmp_path):
    code, out = run(tmp_path, "reproduce", "entrant")
    assert code == 0
    summary = read_summary(out)
    assert summary["final_gap"] < 2e-3
    assert summary["plateau_end_x"] == pytest.approx([1 / 3, 1 / 3], abs=2e-3)
    assert (out / "entrant.svg").read_text().count("<polyline") == 2


def test_reproduce_maneuver_compare(tmp_path):
    code, out = run(tmp_path, "reproduce", "maneuver-compare")
    summary = read_summary(out)
    assert code == 0
    assert summary["plateau_beta"][1] < summary["plateau_beta"][0]
    assert summary["higher_penalty_lower_beta"] is True
    assert (out / "maneuver_controls.svg").exists() and (out / "maneuver_states.svg").exists()


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "trustgame", "solve-static", *BASE, "--output", str(tmp_path / "m"), "--json"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["alpha"] == [0.5]
