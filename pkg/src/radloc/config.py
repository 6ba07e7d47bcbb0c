"""JSON scenario and sweep configuration files.

Scenario file::

    {
      "schema_version": 1,
      "label": "spurious",
      "anchors": [[1, 1], [1, 3], [3, 1]],
      "source": [0, 0],                  # optional when "ranges" is given
      "ranges": [1.414, 3.162, 3.162],   # optional; noise-free from "source" otherwise
      "noise": {"sigma_db": 2.0, "seed": 3, "source_strength": 1.0,
                "path_loss_exponent": 3.0, "samples": 1},   # optional
      "algorithm": "convex",             # convex | baseline | direct
      "weights": [1, 1, 1],              # baseline only
      "solver": {"mu": 0.001, "max_iters": 200000, "grad_tol": null,
                 "initial": [3, 2], "auto_step": false}
    }

Sweep file::

    {
      "schema_version": 1,
      "anchors": [[-2, -1], [-1, -3], [-1, 1], [1, 0]],
      "rss": {"source_strength": 1.0, "path_loss_exponent": 3.0, "samples": 1},
      "sigma_grid": [0, 1, 2, 3, 4, 5],
      "trials": 1000,
      "sample_box": {"lower": [-10, -10], "upper": [10, 10]},
      "master_seed": 0,
      "algorithms": ["convex", "baseline"],
      "solver": {"mu": 0.001, "auto_step": false, "max_iters": 200000},
      "ellipse": {"center": [0, 0], "semi_axes": [3, 2], "rotation_deg": 0},  # optional
      "workers": 1
    }

(Comments above are explanatory only; the files are plain JSON.)
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from radloc.errors import ConfigError, InvalidScenario
from radloc.geometry import as_point, as_points
from radloc.harness import ALGORITHMS, Ellipse, SweepConfig
from radloc.measurement import RssModel, ShadowingSpec, noisy_ranges
from radloc.scenario import Scenario

SCHEMA_VERSION = 1

SCENARIO_KEYS = {"schema_version", "label", "anchors", "source", "ranges", "noise", "algorithm", "weights", "solver"}
SOLVER_KEYS = {"mu", "max_iters", "grad_tol", "initial", "auto_step"}
NOISE_KEYS = {"sigma_db", "seed", "source_strength", "path_loss_exponent", "samples"}
SWEEP_KEYS = {"schema_version", "anchors", "rss", "sigma_grid", "trials", "sample_box", "master_seed",
              "algorithms", "solver", "ellipse", "workers"}


@dataclass
class SolveJob:
    scenario: Scenario
    algorithm: str = "convex"
    weights: Optional[list] = None
    mu: float = 0.001
    max_iters: int = 200_000
    grad_tol: Optional[float] = None
    initial: list = field(default_factory=lambda: [0.0, 0.0])
    auto_step: bool = False


def _load(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"{path}: unsupported schema_version {version}")
    return data


def _check_keys(section: dict, allowed: set, where: str):
    if not isinstance(section, dict):
        raise ConfigError(f"{where} must be an object")
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(sorted(unknown))}")


def scenario_from_dict(data: dict, seed: Optional[int] = None) -> SolveJob:
    _check_keys(data, SCENARIO_KEYS, "scenario")
    if "anchors" not in data:
        raise ConfigError("scenario needs 'anchors'")
    try:
        anchors = as_points(data["anchors"])
    except ValueError as exc:
        raise InvalidScenario(f"anchors: {exc}") from None
    source = data.get("source")
    ranges = data.get("ranges")
    noise = data.get("noise")
    if ranges is None:
        if source is None:
            raise ConfigError("scenario needs 'ranges' or 'source'")
        if noise:
            _check_keys(noise, NOISE_KEYS, "noise")
            model = RssModel(noise.get("source_strength", 1.0), noise.get("path_loss_exponent", 3.0))
            spec = ShadowingSpec(
                float(noise.get("sigma_db", 0.0)),
                seed=int(noise.get("seed", 0) if seed is None else seed),
                samples=int(noise.get("samples", 1)),
            )
            ranges = noisy_ranges(model, spec, source, anchors)
        else:
            ranges = np.hypot(*(anchors - as_point(source)).T)
    scenario = Scenario(anchors=anchors, ranges=ranges, source=source, label=str(data.get("label", "")))

    solver = data.get("solver", {})
    _check_keys(solver, SOLVER_KEYS, "solver")
    algorithm = data.get("algorithm", "convex")
    if algorithm not in ALGORITHMS + ("direct",):
        raise ConfigError(f"unknown algorithm {algorithm!r}")
    return SolveJob(
        scenario=scenario,
        algorithm=algorithm,
        weights=data.get("weights"),
        mu=float(solver.get("mu", 0.001)),
        max_iters=int(solver.get("max_iters", 200_000)),
        grad_tol=solver.get("grad_tol"),
        initial=list(solver.get("initial", [0.0, 0.0])),
        auto_step=bool(solver.get("auto_step", False)),
    )


def load_scenario(path, seed: Optional[int] = None) -> SolveJob:
    return scenario_from_dict(_load(path), seed)


def sweep_from_dict(data: dict) -> SweepConfig:
    _check_keys(data, SWEEP_KEYS, "sweep config")
    kw = {}
    if "anchors" in data:
        kw["anchors"] = np.asarray(data["anchors"], dtype=float)
    rss = data.get("rss", {})
    _check_keys(rss, {"source_strength", "path_loss_exponent", "samples"}, "rss")
    kw["rss"] = RssModel(float(rss.get("source_strength", 1.0)), float(rss.get("path_loss_exponent", 3.0)))
    kw["samples"] = int(rss.get("samples", 1))
    for key, cast in (("sigma_grid", tuple), ("trials", int), ("master_seed", int),
                      ("algorithms", tuple), ("workers", int)):
        if key in data:
            kw[key] = cast(data[key])
    box = data.get("sample_box")
    if box is not None:
        _check_keys(box, {"lower", "upper"}, "sample_box")
        kw["box_lower"] = tuple(float(v) for v in box["lower"])
        kw["box_upper"] = tuple(float(v) for v in box["upper"])
    solver = data.get("solver", {})
    _check_keys(solver, {"mu", "auto_step", "max_iters"}, "solver")
    if "mu" in solver:
        kw["mu"] = float(solver["mu"])
    if "max_iters" in solver:
        kw["max_iters"] = int(solver["max_iters"])
    kw["auto_step"] = bool(solver.get("auto_step", False))
    if data.get("ellipse") is not None:
        e = data["ellipse"]
        _check_keys(e, {"center", "semi_axes", "rotation_deg"}, "ellipse")
        kw["ellipse"] = Ellipse(tuple(e.get("center", (0.0, 0.0))), tuple(e["semi_axes"]),
                                float(e.get("rotation_deg", 0.0)))
    try:
        return SweepConfig(**kw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid sweep config: {exc}") from None


def load_sweep_config(path) -> SweepConfig:
    return sweep_from_dict(_load(path))


def write_json(data: dict, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")
    return path
