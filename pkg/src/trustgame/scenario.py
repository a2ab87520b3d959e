"""Scenario files: strict TOML schema, CLI overrides, resolution to solver inputs.

Example::

    mode = "dynamic"
    n = 2
    x0 = [0.5, 0.0]
    horizon = 30.0

    [nodes]          # one table shared by all nodes, or [[nodes]] per node
    p = 0.4
    q = 0.2
    r = 0.2

    [solver]
    tol = 1e-8
"""

from __future__ import annotations

import copy
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .core import ConfigError, GameConfig, NodeParams

MODES = ("static", "dynamic", "abm", "maneuver", "sweep", "reproduce")
FIGURES = ("entrant", "n-sweep", "maneuver-compare")
SWEEP_PARAMETERS = ("n", "p", "q", "r", "horizon")

SCHEMA: dict[str, Any] = {
    "mode": str,
    "n": int,
    "nodes": None,  # table or array of tables, checked separately
    "x0": list,
    "horizon": float,
    "seed": int,
    "output": str,
    "solver": {"tol": float, "damping": float, "max_iter": int, "step": float},
    "abm": {"N": int, "dt": float, "runs": int, "alpha": list},
    "maneuver": {"target_beta": None},
    "sweep": {"parameter": str, "grid": list, "dynamic": bool},
    "reproduce": {"figure": str},
}
NODE_KEYS = ("p", "q", "r")

DEFAULTS: dict[str, Any] = {
    "mode": "static",
    "horizon": 30.0,
    "seed": 0,
    "output": "results",
    "solver": {"damping": 0.5},
    "abm": {"N": 10_000, "dt": 0.01, "runs": 20},
    "sweep": {"dynamic": False},
}


class ScenarioError(ConfigError):
    pass


def _line_of(text: str, key: str) -> int | None:
    """1-based line of ``key`` (dotted keys are searched below their table header)."""
    start = 0
    *tables, name = key.split(".")
    for table in tables:
        header = re.compile(rf"^\s*\[\[?\s*{re.escape(table)}\s*\]", re.MULTILINE).search(text, start)
        if header:
            start = header.end()
    pattern = re.compile(rf"^\s*(\[\[?\s*)?{re.escape(name)}\s*(=|\]|\.)", re.MULTILINE)
    m = pattern.search(text, start)
    return text.count("\n", 0, m.start()) + 1 if m else None


def _fail(msg: str, text: str = "", key: str | None = None, path: str = "<scenario>"):
    line = _line_of(text, key) if (text and key) else None
    where = f"{path}, line {line}" if line else path
    raise ScenarioError(f"{where}: {msg}")


def _check_type(value, kind, name, text, path):
    if kind is None:
        return
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        return
    if kind is int and isinstance(value, bool):
        _fail(f"'{name}' must be an integer", text, name, path)
    if not isinstance(value, kind):
        _fail(f"'{name}' must be of type {kind.__name__}, got {type(value).__name__}", text, name, path)


def validate(raw: dict, text: str = "", path: str = "<scenario>") -> None:
    """Reject unknown keys and wrongly typed values."""
    for key, value in raw.items():
        if key not in SCHEMA:
            _fail(f"unknown key '{key}' (allowed: {', '.join(SCHEMA)})", text, key, path)
        kind = SCHEMA[key]
        if isinstance(kind, dict):
            if not isinstance(value, dict):
                _fail(f"'{key}' must be a table", text, key, path)
            for sub, subval in value.items():
                if sub not in kind:
                    _fail(f"unknown key '{key}.{sub}' (allowed: {', '.join(kind)})", text, f"{key}.{sub}", path)
                _check_type(subval, kind[sub], f"{key}.{sub}", text, path)
        elif key == "nodes":
            tables = value if isinstance(value, list) else [value]
            for table in tables:
                if not isinstance(table, dict):
                    _fail("'nodes' must be a table or an array of tables", text, key, path)
                for sub, subval in table.items():
                    if sub not in NODE_KEYS:
                        _fail(f"unknown node key '{sub}' (allowed: p, q, r)", text, f"nodes.{sub}", path)
                    _check_type(subval, float, f"nodes.{sub}", text, path)
        else:
            _check_type(value, kind, key, text, path)


def load_file(path: str | Path) -> dict:
    """Parse a TOML scenario, or the scenario stored inside a JSON run manifest."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from exc
    if path.suffix == ".json":
        try:
            raw = json.loads(text)["scenario"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ScenarioError(f"{path}: not a run manifest ({exc})") from exc
        validate(raw, "", str(path))
        return raw
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        line = getattr(exc, "lineno", None)
        if line is None:
            m = re.search(r"line (\d+)", str(exc))
            line = m and int(m.group(1))
        where = f"{path}, line {line}" if line else str(path)
        raise ScenarioError(f"{where}: parse error: {getattr(exc, 'msg', exc)}") from exc
    validate(raw, text, str(path))
    return raw


def set_key(raw: dict, dotted: str, value) -> None:
    """Apply one override, e.g. ``solver.tol``; node fields fan out over nodes."""
    head, _, tail = dotted.partition(".")
    if head == "nodes":
        nodes = raw.get("nodes")
        if nodes is None:
            nodes = raw["nodes"] = {}
        values = value if isinstance(value, list) else None
        if isinstance(nodes, dict):
            if values is not None:
                raw["nodes"] = [dict(nodes, **{tail: v}) for v in values]
            else:
                nodes[tail] = value
        else:
            if values is not None:
                if len(values) != len(nodes):
                    raise ScenarioError(f"--{tail} has {len(values)} values for {len(nodes)} nodes")
                for table, v in zip(nodes, values):
                    table[tail] = v
            else:
                for table in nodes:
                    table[tail] = value
        return
    if tail:
        raw.setdefault(head, {})[tail] = value
    else:
        raw[head] = value


def apply_overrides(raw: dict, overrides: dict[str, Any]) -> dict:
    merged = copy.deepcopy(raw)
    for key, value in overrides.items():
        if value is not None:
            set_key(merged, key, value)
    return merged


@dataclass(frozen=True)
class Scenario:
    """A fully resolved scenario; ``data`` is what the manifest records."""

    data: dict

    @property
    def mode(self) -> str:
        return self.data["mode"]

    @property
    def output(self) -> Path:
        return Path(self.data["output"])

    @property
    def n(self) -> int:
        return self.data["n"]

    def game_config(self) -> GameConfig:
        d = self.data
        solver = d["solver"]
        return GameConfig(
            params=tuple(NodeParams(float(t["p"]), float(t["q"]), float(t["r"])) for t in d["nodes"]),
            x0=d["x0"],
            horizon=float(d["horizon"]),
            step=solver.get("step"),
            tol=solver.get("tol"),
            max_iter=solver.get("max_iter"),
            damping=float(solver["damping"]),
            seed=int(d["seed"]),
        )

    def section(self, name: str) -> dict:
        return self.data.get(name, {})


def resolve(raw: dict, mode: str | None = None) -> Scenario:
    """Fill defaults (file > default), expand nodes, and check consistency."""
    validate(raw)
    data = copy.deepcopy(raw)
    if mode is not None:
        data["mode"] = mode
    for key, value in DEFAULTS.items():
        if isinstance(value, dict):
            data[key] = {**value, **data.get(key, {})}
        else:
            data.setdefault(key, value)
    if data["mode"] not in MODES:
        raise ScenarioError(f"unknown mode '{data['mode']}' (allowed: {', '.join(MODES)})")

    if data["mode"] == "reproduce":
        figure = data.get("reproduce", {}).get("figure")
        if figure not in FIGURES:
            raise ScenarioError(f"reproduce.figure must be one of {', '.join(FIGURES)}, got {figure!r}")
        data.setdefault("nodes", {"p": 0.4, "q": 0.2, "r": 0.2})

    nodes = data.get("nodes")
    if nodes is None:
        raise ScenarioError("scenario must define node parameters under 'nodes'")
    if isinstance(nodes, dict):
        n = data.get("n", 1)
        nodes = [dict(nodes) for _ in range(n)]
    n = data.setdefault("n", len(nodes))
    if n < 1:
        raise ScenarioError(f"n must be at least 1, got {n}")
    if len(nodes) != n:
        raise ScenarioError(f"n = {n} but {len(nodes)} node tables were given")
    for i, table in enumerate(nodes):
        missing = [k for k in NODE_KEYS if k not in table]
        if missing:
            raise ScenarioError(f"node {i + 1} is missing {', '.join(missing)}")
        for k in NODE_KEYS:
            table[k] = float(table[k])
    data["nodes"] = nodes
    data["x0"] = [float(v) for v in data.get("x0", [0.0] * n)]
    data["horizon"] = float(data["horizon"])

    if data["mode"] == "maneuver" and "target_beta" not in data.get("maneuver", {}):
        raise ScenarioError("maneuver mode needs maneuver.target_beta")
    if data["mode"] == "sweep":
        sweep = data["sweep"]
        if sweep.get("parameter") not in SWEEP_PARAMETERS:
            raise ScenarioError(
                f"sweep.parameter must be one of {', '.join(SWEEP_PARAMETERS)}, got {sweep.get('parameter')!r}"
            )
        if not sweep.get("grid"):
            raise ScenarioError("sweep.grid must be a non-empty list")

    scenario = Scenario(data)
    scenario.game_config()  # surfaces any remaining domain error now
    return scenario
