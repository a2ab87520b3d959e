"""Command-line front end: scenario runs, CSV/SVG/JSON artifacts, figure reproduction.

Exit codes: 0 success, 1 configuration error or infeasible target, 2 solver
did not converge.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .abm import meanfield_gap, simulate_population
from .core import ConfigError, GameConfig, NodeParams, ParamArrays, drift_multi, others_sum, profit_density
from .equilibrium import static_nash_fixed_point, verify_nash
from .maneuver import (
    ManeuverError,
    maneuver_general,
    maneuver_single,
    maneuver_symmetric,
    maneuver_two_symmetric_literal,
)
from .ode import IntegratorSpec, integrate_forward, make_grid
from .plot import emit_plot
from .pontryagin import GRID_INTERVALS, pontryagin_residuals, solve_open_loop, steady_state_open_loop
from .scenario import Scenario, ScenarioError, apply_overrides, load_file, resolve

EXIT_OK, EXIT_CONFIG, EXIT_NONCONVERGED = 0, 1, 2
PLATEAU = (0.4, 0.6)
REPORTED_NSWEEP_LIMIT = {"alpha": 0.35, "beta": 0.65}


@dataclass
class ResultBundle:
    manifest: dict
    summary: dict
    tables: dict[str, dict[str, np.ndarray]] = field(default_factory=dict)
    plots: dict[str, str] = field(default_factory=dict)
    exit_code: int = EXIT_OK

    def write(self, out_dir: Path) -> list[Path]:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        written = [
            _write_text(out_dir / "manifest.json", json.dumps(self.manifest, indent=2, sort_keys=True) + "\n"),
            _write_text(out_dir / "summary.json", summary_json(self.summary) + "\n"),
            _write_text(out_dir / "summary.txt", summary_text(self.summary)),
        ]
        for name, table in self.tables.items():
            written.append(write_csv(out_dir / f"{name}.csv", table))
        for name, svg in self.plots.items():
            written.append(_write_text(out_dir / f"{name}.svg", svg))
        return written


def _write_text(path: Path, text: str) -> Path:
    with open(path, "w", newline="\n") as fh:
        fh.write(text)
    return path


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "%.17g" % float(v)


def write_csv(path: Path, table: dict[str, np.ndarray]) -> Path:
    columns = list(table)
    rows = zip(*(np.asarray(table[c]).tolist() for c in columns))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    return v


def summary_json(summary: dict) -> str:
    return json.dumps(_jsonable(summary), indent=2, sort_keys=True)


def _flatten(summary: dict, prefix: str = "") -> dict:
    flat = {}
    for key, value in summary.items():
        if isinstance(value, dict):
            flat.update(_flatten(value, f"{prefix}{key}."))
        else:
            flat[prefix + key] = value
    return flat


def summary_text(summary: dict) -> str:
    lines = []
    for key, value in _flatten(_jsonable(summary)).items():
        if isinstance(value, float):
            value = f"{value:.10g}"
        elif isinstance(value, list):
            value = ", ".join(f"{v:.10g}" if isinstance(v, float) else str(v) for v in value)
        lines.append(f"{key}: {value}")
    return "\n".join(lines) + "\n"


def _manifest(scenario: Scenario) -> dict:
    return {"tool": "trustgame", "version": __version__, "seed": scenario.data["seed"], "scenario": scenario.data}


def _grid_step(cfg: GameConfig) -> float:
    return cfg.step if cfg.step is not None else cfg.horizon / GRID_INTERVALS


def _trajectory_table(times, x, alpha, params, lam=None) -> dict[str, np.ndarray]:
    n = x.shape[1]
    profit = profit_density(x, alpha, ParamArrays.of(params))
    table = {"t": times}
    for name, values in (("x", x), ("alpha", alpha), ("beta", 1.0 - alpha), ("lambda", lam), ("profit", profit)):
        if values is None:
            continue
        for i in range(n):
            table[f"{name}_{i + 1}"] = values[:, i]
    return table


def _node_cols(prefix: str, n: int) -> list[str]:
    return [f"{prefix}_{i + 1}" for i in range(n)]


# -- modes -------------------------------------------------------------------


def run_static(scenario: Scenario, workers: int = 1) -> ResultBundle:
    cfg = scenario.game_config()
    profile = static_nash_fixed_point(cfg)
    report = verify_nash(profile, cfg)
    alphas = profile.alphas
    S = others_sum(alphas)
    grid = make_grid(0.0, cfg.horizon, _grid_step(cfg))
    traj = integrate_forward(lambda t, x, u: drift_multi(x, u), cfg.x0, 0.0, cfg.horizon,
                             IntegratorSpec(), controls=alphas, grid=grid)
    alpha_grid = np.tile(alphas, (len(grid), 1))
    table = _trajectory_table(grid, traj.values, alpha_grid, cfg.params)
    summary = {
        "mode": "static",
        "converged": profile.converged,
        "iterations": profile.iterations,
        "residual": profile.residual,
        "alpha": alphas,
        "beta": profile.betas,
        "steady_x": alphas / (1.0 + S),
        "nash_max_gain": float(report.gains.max()),
        "nash_verified": report.passed,
        "alternative_equilibria": [a.tolist() for a in profile.alternatives],
    }
    plot = emit_plot(table, _node_cols("x", cfg.n), title="Trust shares under static equilibrium",
                     ylabel="trust share")
    return ResultBundle(_manifest(scenario), summary, {"trajectory": table}, {"trajectory": plot},
                        EXIT_OK if profile.converged else EXIT_NONCONVERGED)


def _dynamic_summary(sol, cfg: GameConfig) -> dict:
    mask = sol.window(*PLATEAU)
    plateau_alpha = sol.alpha[mask].mean(axis=0)
    return {
        "converged": sol.converged,
        "sweeps": sol.sweeps,
        "control_residual": sol.control_residual,
        "plateau_alpha": plateau_alpha,
        "plateau_beta": 1.0 - plateau_alpha,
        "plateau_x": sol.x[mask].mean(axis=0),
        "plateau_end_x": sol.x[np.flatnonzero(mask)[-1]],
        "steady_state_alpha": steady_state_open_loop(cfg.params),
        "pontryagin_residuals": pontryagin_residuals(sol),
    }


def run_dynamic(scenario: Scenario, workers: int = 1) -> ResultBundle:
    cfg = scenario.game_config()
    sol = solve_open_loop(cfg)
    table = _trajectory_table(sol.times, sol.x, sol.alpha, cfg.params, sol.lam)
    summary = {"mode": "dynamic", **_dynamic_summary(sol, cfg)}
    plots = {
        "states": emit_plot(table, _node_cols("x", cfg.n), title="Trust shares", ylabel="trust share"),
        "controls": emit_plot(table, _node_cols("alpha", cfg.n), title="Benign rates", ylabel="alpha"),
    }
    return ResultBundle(_manifest(scenario), summary, {"trajectory": table}, plots,
                        EXIT_OK if sol.converged else EXIT_NONCONVERGED)


def run_abm(scenario: Scenario, workers: int = 1) -> ResultBundle:
    cfg = scenario.game_config()
    abm = scenario.section("abm")
    if "alpha" in abm:
        alphas = np.asarray(abm["alpha"], dtype=float)
        converged = True
    else:
        profile = static_nash_fixed_point(cfg)
        alphas, converged = profile.alphas, profile.converged
    emp = simulate_population(cfg, int(abm["N"]), alphas, dt=float(abm["dt"]), runs=int(abm["runs"]),
                              workers=workers)
    ode = integrate_forward(lambda t, x, u: drift_multi(x, u), cfg.x0, 0.0, cfg.horizon,
                            IntegratorSpec(), controls=alphas, grid=emp.times)
    gap = meanfield_gap(emp, ode.times, ode.values)
    table = {"t": emp.times}
    for i in range(cfg.n):
        table[f"share_{i + 1}"] = emp.shares[:, i]
        table[f"stderr_{i + 1}"] = emp.stderr[:, i]
        table[f"ode_x_{i + 1}"] = ode.values[:, i]
    summary = {
        "mode": "abm",
        "N": emp.N,
        "runs": emp.runs,
        "dt": float(abm["dt"]),
        "alpha": alphas,
        "meanfield_gap": gap,
        "final_share": emp.shares[-1],
        "final_ode_x": ode.values[-1],
    }
    series = _node_cols("share", cfg.n) + _node_cols("ode_x", cfg.n)
    plot = emit_plot(table, series, title=f"Agent-based shares vs mean field (N={emp.N})", ylabel="share",
                     styles={c: "dashed" for c in _node_cols("ode_x", cfg.n)})
    return ResultBundle(_manifest(scenario), summary, {"abm": table}, {"abm": plot},
                        EXIT_OK if converged else EXIT_NONCONVERGED)


def run_maneuver(scenario: Scenario, workers: int = 1) -> ResultBundle:
    cfg = scenario.game_config()
    targets = np.atleast_1d(np.asarray(scenario.section("maneuver")["target_beta"], dtype=float))
    if targets.size == 1:
        targets = np.full(cfg.n, targets[0])
    identical = all(p == cfg.params[0] for p in cfg.params) and np.all(targets == targets[0])
    first = cfg.params[0]
    if cfg.n == 1:
        result, method = maneuver_single(first.p, first.q, float(targets[0])), "single closed form"
    elif identical:
        result, method = maneuver_symmetric(cfg.n, first.p, first.q, float(targets[0])), "symmetric inversion"
    else:
        result, method = maneuver_general(cfg, targets), "per-node bisection"
    summary = {
        "mode": "maneuver",
        "method": method,
        "r": result.r,
        "target_beta": result.target_beta,
        "achieved_beta": result.achieved_beta,
        "total_beta": result.total_beta,
        "residual": result.residual,
        "converged": result.converged,
    }
    if cfg.n == 2 and identical:
        literal = maneuver_two_symmetric_literal(first.p, first.q, float(targets[0]))
        summary["two_node_closed_form_r"] = literal
        summary["two_node_closed_form_note"] = (
            "published two-node closed form; it disagrees with the round-trip inversion "
            f"({literal:.6g} vs {result.r[0]:.6g}) and is not used"
        )
    table = {
        "node": np.arange(1, cfg.n + 1),
        "p": np.array([p.p for p in cfg.params]),
        "q": np.array([p.q for p in cfg.params]),
        "r": result.r,
        "target_beta": result.target_beta,
        "achieved_beta": result.achieved_beta,
    }
    return ResultBundle(_manifest(scenario), summary, {"maneuver": table}, {},
                        EXIT_OK if result.converged else EXIT_NONCONVERGED)


def _sweep_config(cfg: GameConfig, parameter: str, value) -> GameConfig:
    base = cfg.params[0]
    if parameter == "n":
        n = int(value)
        return GameConfig(params=(base,) * n, x0=np.zeros(n), horizon=cfg.horizon, step=cfg.step,
                          tol=cfg.tol, max_iter=cfg.max_iter, damping=cfg.damping, seed=cfg.seed)
    if parameter == "horizon":
        return GameConfig(params=cfg.params, x0=cfg.x0, horizon=float(value), step=cfg.step, tol=cfg.tol,
                          max_iter=cfg.max_iter, damping=cfg.damping, seed=cfg.seed)
    params = tuple(NodeParams(**{**prm.__dict__, parameter: float(value)}) for prm in cfg.params)
    return GameConfig(params=params, x0=cfg.x0, horizon=cfg.horizon, step=cfg.step, tol=cfg.tol,
                      max_iter=cfg.max_iter, damping=cfg.damping, seed=cfg.seed)


def _sweep_point(args):
    cfg, dynamic = args
    static_cfg = GameConfig(params=cfg.params, x0=cfg.x0, damping=cfg.damping, seed=cfg.seed)
    profile = static_nash_fixed_point(static_cfg)
    steady = steady_state_open_loop(cfg.params)
    row = {"alpha_static": profile.alphas, "alpha_steady": steady, "converged": profile.converged}
    if dynamic:
        sol = solve_open_loop(cfg)
        row["alpha_dynamic"] = sol.alpha[sol.window(*PLATEAU)].mean(axis=0)
        row["converged"] = row["converged"] and sol.converged
    return row


def _map(fn, jobs, workers: int):
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, jobs))
    return [fn(job) for job in jobs]


def run_sweep(scenario: Scenario, workers: int = 1) -> ResultBundle:
    cfg = scenario.game_config()
    sweep = scenario.section("sweep")
    parameter, grid, dynamic = sweep["parameter"], list(sweep["grid"]), bool(sweep["dynamic"])
    configs = [_sweep_config(cfg, parameter, v) for v in grid]
    rows = _map(_sweep_point, [(c, dynamic) for c in configs], workers)

    cols: dict[str, list] = {"value": [], "node": [], "alpha_static": [], "beta_static": [],
                             "alpha_steady": [], "beta_steady": []}
    if dynamic:
        cols.update({"alpha_dynamic": [], "beta_dynamic": []})
    cols["converged"] = []
    for value, c, row in zip(grid, configs, rows):
        for i in range(c.n):
            cols["value"].append(float(value))
            cols["node"].append(i + 1)
            for kind in ("static", "steady", "dynamic"):
                if f"alpha_{kind}" in row:
                    cols[f"alpha_{kind}"].append(float(row[f"alpha_{kind}"][i]))
                    cols[f"beta_{kind}"].append(1.0 - float(row[f"alpha_{kind}"][i]))
            cols["converged"].append(bool(row["converged"]))
    table = {k: np.array(v) for k, v in cols.items()}
    first = table["node"] == 1
    plot_table = {parameter: table["value"][first], **{k: table[k][first] for k in table if k.startswith(("alpha", "beta"))}}
    series = [k for k in plot_table if k != parameter]
    plot = emit_plot(plot_table, series, x=parameter, title=f"Equilibrium rates of node 1 vs {parameter}",
                     ylabel="rate", styles={s: "markers" for s in series})
    summary = {
        "mode": "sweep",
        "parameter": parameter,
        "grid": [float(v) for v in grid],
        "alpha_node1_static": plot_table["alpha_static"],
        "alpha_node1_steady": plot_table["alpha_steady"],
        "all_converged": bool(np.all(table["converged"])),
    }
    if dynamic:
        summary["alpha_node1_dynamic"] = plot_table["alpha_dynamic"]
    return ResultBundle(_manifest(scenario), summary, {"sweep": table}, {"sweep": plot},
                        EXIT_OK if summary["all_converged"] else EXIT_NONCONVERGED)


# -- figure reproduction -------------------------------------------------------


def _with_params(cfg: GameConfig, params, x0) -> GameConfig:
    return GameConfig(params=tuple(params), x0=x0, horizon=cfg.horizon, step=cfg.step, tol=cfg.tol,
                      max_iter=cfg.max_iter, damping=cfg.damping, seed=cfg.seed)


def _reproduce_entrant(scenario: Scenario, base: GameConfig, workers: int) -> ResultBundle:
    prm = NodeParams(0.4, 0.2, 0.2)
    cfg = _with_params(base, (prm, prm), [0.5, 0.0])
    sol = solve_open_loop(cfg)
    table = _trajectory_table(sol.times, sol.x, sol.alpha, cfg.params, sol.lam)
    summary = {"mode": "reproduce", "figure": "entrant", **_dynamic_summary(sol, cfg)}
    end = summary["plateau_end_x"]
    summary["final_gap"] = float(abs(end[0] - end[1]))
    summary["expected_common_x"] = 1.0 / 3.0
    summary["common_value_error"] = float(np.max(np.abs(end - 1.0 / 3.0)))
    plots = {"entrant": emit_plot(table, ["x_1", "x_2"], title="Incumbent (x_1) vs entrant (x_2)",
                                  ylabel="trust share")}
    return ResultBundle(_manifest(scenario), summary, {"entrant": table}, plots,
                        EXIT_OK if sol.converged else EXIT_NONCONVERGED)


def _nsweep_point(cfg: GameConfig):
    sol = solve_open_loop(cfg)
    return float(sol.alpha[sol.window(*PLATEAU)].mean(axis=0)[0]), sol.converged


def _reproduce_nsweep(scenario: Scenario, base: GameConfig, workers: int) -> ResultBundle:
    prm = NodeParams(0.4, 0.2, 0.2)
    ns = list(range(1, 11))
    configs = [_with_params(base, (prm,) * n, np.zeros(n)) for n in ns]
    results = _map(_nsweep_point, configs, workers)
    dyn = np.array([a for a, _ in results])
    steady = np.array([steady_state_open_loop((prm,) * n)[0] for n in ns])
    table = {"n": np.array(ns), "alpha_dynamic": dyn, "beta_dynamic": 1.0 - dyn,
             "alpha_steady": steady, "beta_steady": 1.0 - steady}
    converged = all(c for _, c in results)
    summary = {
        "mode": "reproduce",
        "figure": "n-sweep",
        "alpha_dynamic": dyn,
        "alpha_steady": steady,
        "converged": converged,
        "max_deviation_from_half": float(np.max(np.abs(dyn - 0.5))),
        "reported_limit_alpha": REPORTED_NSWEEP_LIMIT["alpha"],
        "reported_limit_beta": REPORTED_NSWEEP_LIMIT["beta"],
        "discrepancy_note": (
            "a limiting alpha of 0.35 (beta 0.65) has been reported for this sweep, but with q = r "
            "the steady-state equations are solved by alpha = 0.5 for every n, and the sweep "
            "solver reproduces 0.5; the 0.35 value is not targeted"
        ),
    }
    plot = emit_plot(table, ["alpha_dynamic", "beta_dynamic", "alpha_steady", "beta_steady"], x="n",
                     title="Equilibrium rates vs number of nodes", ylabel="rate",
                     styles={"alpha_dynamic": "markers", "beta_dynamic": "markers",
                             "alpha_steady": "dashed", "beta_steady": "dashed"})
    return ResultBundle(_manifest(scenario), summary, {"n_sweep": table}, {"n_sweep": plot},
                        EXIT_OK if converged else EXIT_NONCONVERGED)


def _reproduce_maneuver_compare(scenario: Scenario, base: GameConfig, workers: int) -> ResultBundle:
    params = (NodeParams(0.5, 0.1, 0.2), NodeParams(0.5, 0.1, 0.3))
    cfg = _with_params(base, params, [0.0, 0.0])
    sol = solve_open_loop(cfg)
    static = static_nash_fixed_point(GameConfig(params=params))
    table = _trajectory_table(sol.times, sol.x, sol.alpha, params, sol.lam)
    summary = {"mode": "reproduce", "figure": "maneuver-compare", **_dynamic_summary(sol, cfg),
               "static_beta": static.betas}
    summary["higher_penalty_lower_beta"] = bool(
        summary["plateau_beta"][1] < summary["plateau_beta"][0] and static.betas[1] < static.betas[0]
    )
    plots = {
        "maneuver_controls": emit_plot(table, ["beta_1", "beta_2", "alpha_1", "alpha_2"],
                                       title="Controls, r = (0.2, 0.3)", ylabel="rate"),
        "maneuver_states": emit_plot(table, ["x_1", "x_2"], title="Trust shares, r = (0.2, 0.3)",
                                     ylabel="trust share"),
    }
    return ResultBundle(_manifest(scenario), summary, {"maneuver_compare": table}, plots,
                        EXIT_OK if sol.converged else EXIT_NONCONVERGED)


REPRODUCERS = {
    "entrant": _reproduce_entrant,
    "n-sweep": _reproduce_nsweep,
    "maneuver-compare": _reproduce_maneuver_compare,
}


def reproduce(figure: str, scenario: Scenario | None = None, workers: int = 1) -> ResultBundle:
    if scenario is None:
        scenario = resolve({"mode": "reproduce", "reproduce": {"figure": figure}})
    if figure not in REPRODUCERS:
        raise ScenarioError(f"unknown figure '{figure}' (allowed: {', '.join(REPRODUCERS)})")
    return REPRODUCERS[figure](scenario, scenario.game_config(), workers)


def run_reproduce(scenario: Scenario, workers: int = 1) -> ResultBundle:
    return reproduce(scenario.section("reproduce")["figure"], scenario, workers)


RUNNERS = {
    "static": run_static,
    "dynamic": run_dynamic,
    "abm": run_abm,
    "maneuver": run_maneuver,
    "sweep": run_sweep,
    "reproduce": run_reproduce,
}


def run_scenario(path: str | Path | None = None, overrides: dict[str, Any] | None = None,
                 mode: str | None = None, workers: int = 1) -> ResultBundle:
    """Load (optional) file, apply overrides (flag > file > default), run its mode."""
    raw = load_file(path) if path is not None else {}
    raw = apply_overrides(raw, overrides or {})
    scenario = resolve(raw, mode)
    return RUNNERS[scenario.mode](scenario, workers)


# -- argument parsing ------------------------------------------------------------

SUBCOMMANDS = {
    "solve-static": "static",
    "solve-dynamic": "dynamic",
    "maneuver": "maneuver",
    "simulate-abm": "abm",
    "sweep": "sweep",
    "reproduce": "reproduce",
    "run": None,
}


def _floats(text: str):
    values = [float(v) for v in text.split(",") if v.strip()]
    return values[0] if len(values) == 1 else values


def _float_list(text: str):
    return [float(v) for v in text.split(",") if v.strip()]


# flag dest -> (scenario key, parser)
FLAGS = {
    "n": ("n", int),
    "p": ("nodes.p", _floats),
    "q": ("nodes.q", _floats),
    "r": ("nodes.r", _floats),
    "x0": ("x0", _float_list),
    "horizon": ("horizon", float),
    "seed": ("seed", int),
    "output": ("output", str),
    "tol": ("solver.tol", float),
    "damping": ("solver.damping", float),
    "max_iter": ("solver.max_iter", int),
    "step": ("solver.step", float),
    "N": ("abm.N", int),
    "dt": ("abm.dt", float),
    "runs": ("abm.runs", int),
    "abm_alpha": ("abm.alpha", _float_list),
    "target_beta": ("maneuver.target_beta", _floats),
    "parameter": ("sweep.parameter", str),
    "grid": ("sweep.grid", _float_list),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", "-c", help="scenario file (TOML) or run manifest (JSON)")
    for dest, (key, kind) in FLAGS.items():
        flag = "--" + dest.replace("_", "-")
        common.add_argument(flag, dest=dest, type=kind, default=None, help=f"override '{key}'")
    common.add_argument("--dynamic", action="store_true", default=None,
                        help="sweep: also solve the dynamic game at each point")
    common.add_argument("--json", action="store_true", help="print the summary as JSON")
    common.add_argument("--workers", type=int, default=1, help="processes for sweeps and replicates")
    common.add_argument("--no-write", action="store_true", help="do not write the result bundle")

    parser = argparse.ArgumentParser(prog="trustgame", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "run":
            p.add_argument("scenario", help="scenario file or manifest to run")
        if name == "reproduce":
            p.add_argument("figure", choices=sorted(REPRODUCERS))
    return parser


def overrides_from_args(args: argparse.Namespace) -> dict[str, Any]:
    overrides = {key: getattr(args, dest) for dest, (key, _) in FLAGS.items()}
    overrides["sweep.dynamic"] = args.dynamic
    if getattr(args, "figure", None):
        overrides["reproduce.figure"] = args.figure
    return {k: v for k, v in overrides.items() if v is not None}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    path = args.scenario if args.command == "run" else args.config
    try:
        bundle = run_scenario(path, overrides_from_args(args), SUBCOMMANDS[args.command], args.workers)
    except (ConfigError, ManeuverError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if not args.no_write:
        out_dir = Path(bundle.manifest["scenario"]["output"])
        bundle.write(out_dir)
    print(summary_json(bundle.summary) if args.json else summary_text(bundle.summary), end="\n" if args.json else "")
    return bundle.exit_code


if __name__ == "__main__":
    sys.exit(main())
