"""Reproduction runs and Monte Carlo sweeps comparing the convex localizer
with the squared-range baseline."""
from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from radloc.costs import BaselineCost, ConvexCost, assemble_quadratic
from radloc.errors import SourceOnAnchor
from radloc.geometry import as_points
from radloc.measurement import RssModel, ShadowingSpec, noisy_ranges
from radloc.scenario import (
    RSS_ANCHORS,
    SPURIOUS_INITIAL,
    SPURIOUS_SOURCE,
    spurious_scenario,
)
from radloc.solver import (
    DEFAULT_MAX_ITERS,
    DEFAULT_MU,
    SolverConfig,
    SolveResult,
    auto_step,
    default_grad_tol,
    descend,
    descend_batch,
    is_spurious,
)

ALGORITHMS = ("convex", "baseline")
GUARANTEED = "guaranteed-like"
UNGUARANTEED = "unguaranteed"


@dataclass(frozen=True)
class Ellipse:
    center: tuple = (0.0, 0.0)
    semi_axes: tuple = (1.0, 1.0)
    rotation_deg: float = 0.0

    def contains(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float) - np.asarray(self.center, dtype=float)
        t = math.radians(self.rotation_deg)
        c, s = math.cos(t), math.sin(t)
        u = c * pts[..., 0] + s * pts[..., 1]
        v = -s * pts[..., 0] + c * pts[..., 1]
        a, b = self.semi_axes
        return (u / a) ** 2 + (v / b) ** 2 <= 1.0


@dataclass(frozen=True)
class SweepConfig:
    anchors: np.ndarray = field(default_factory=lambda: RSS_ANCHORS.copy())
    rss: RssModel = field(default_factory=RssModel)
    sigma_grid: tuple = (0.0, 1.0, 2.0, 3.0, 4.0, 5.0)
    trials: int = 1000
    box_lower: tuple = (-10.0, -10.0)
    box_upper: tuple = (10.0, 10.0)
    master_seed: int = 0
    algorithms: tuple = ALGORITHMS
    mu: float = DEFAULT_MU
    auto_step: bool = False
    max_iters: int = DEFAULT_MAX_ITERS
    samples: int = 1
    ellipse: Optional[Ellipse] = None
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "anchors", as_points(self.anchors))
        object.__setattr__(self, "sigma_grid", tuple(float(s) for s in self.sigma_grid))
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        if not self.sigma_grid:
            raise ValueError("sigma_grid must not be empty")
        if any(s < 0 for s in self.sigma_grid):
            raise ValueError("sigma values must be non-negative")
        if int(self.trials) < 1:
            raise ValueError("trials must be >= 1")
        bad = set(self.algorithms) - set(ALGORITHMS)
        if bad or not self.algorithms:
            raise ValueError(f"algorithms must be a non-empty subset of {ALGORITHMS}")
        if not np.all(np.asarray(self.box_upper) > np.asarray(self.box_lower)):
            raise ValueError("sample box upper corner must exceed the lower corner")
        if self.master_seed < 0:
            raise ValueError("master_seed must be non-negative")


@dataclass
class TrialRecord:
    trial_id: int
    sigma_db: float
    algorithm: str
    target_class: str
    true_x: float
    true_y: float
    init_x: float
    init_y: float
    est_x: float
    est_y: float
    sq_error: float
    iterations: int
    converged: bool
    spurious: bool
    seed: int
    mu: float
    failure: str = ""

    @property
    def true_source(self):
        return np.array([self.true_x, self.true_y])

    @property
    def estimate(self):
        return np.array([self.est_x, self.est_y])


RECORD_FIELDS = [f.name for f in fields(TrialRecord)]
TABLE_FIELDS = ["sigma_db", "algorithm", "class", "mean_sq_error", "trial_count"]


def _record(trial_id, sigma, algorithm, cls, truth, init, est, iters, conv, spur, seed, mu, failure=""):
    if failure:
        est = (math.nan, math.nan)
        sq = math.nan
    else:
        sq = float((est[0] - truth[0]) ** 2 + (est[1] - truth[1]) ** 2)
    return TrialRecord(
        trial_id=int(trial_id),
        sigma_db=float(sigma),
        algorithm=algorithm,
        target_class=cls,
        true_x=float(truth[0]),
        true_y=float(truth[1]),
        init_x=float(init[0]),
        init_y=float(init[1]),
        est_x=float(est[0]),
        est_y=float(est[1]),
        sq_error=sq,
        iterations=int(iters),
        converged=bool(conv),
        spurious=bool(spur),
        seed=int(seed),
        mu=float(mu),
        failure=failure,
    )


# ---------------------------------------------------------------- example 1


def spurious_runs(mu: float = DEFAULT_MU, record_trajectory: bool = True) -> dict[str, SolveResult]:
    """Both descents on the spurious-stationary-point scenario from [3, 2]."""
    sc = spurious_scenario()
    costs = {"baseline": BaselineCost.from_scenario(sc), "convex": ConvexCost.from_scenario(sc)}
    cfg = SolverConfig(mu=mu, initial=SPURIOUS_INITIAL, record_trajectory=record_trajectory)
    return {name: descend(cost, cfg) for name, cost in costs.items()}


def run_example_spurious(mu: float = DEFAULT_MU) -> tuple[TrialRecord, TrialRecord]:
    """(baseline, convex) records for the spurious-stationary-point example."""
    runs = spurious_runs(mu, record_trajectory=False)
    out = []
    for name in ("baseline", "convex"):
        r = runs[name]
        spur = is_spurious(r.converged, r.estimate, SPURIOUS_SOURCE, r.grad_tol)
        out.append(
            _record(0, 0.0, name, "", SPURIOUS_SOURCE, SPURIOUS_INITIAL, r.estimate,
                    r.iterations, r.converged, spur, 0, mu)
        )
    return tuple(out)


# ---------------------------------------------------------------- sweeps


def trial_seed(master_seed: int, trial_id: int) -> int:
    return int(master_seed) ^ int(trial_id)


def sample_trial(cfg: SweepConfig, trial_id: int):
    """(true source, initial estimate) drawn uniformly in the sample box."""
    rng = np.random.Generator(np.random.PCG64([trial_seed(cfg.master_seed, trial_id), 0]))
    lo, hi = np.asarray(cfg.box_lower, float), np.asarray(cfg.box_upper, float)
    source = rng.uniform(lo, hi)
    initial = rng.uniform(lo, hi)
    return source, initial


def _batch_records(cfg, sigma, algorithm, ids, classes, sources, inits, seeds, res, mus, tols):
    out = {}
    for j, tid in enumerate(ids):
        failure = "NonFinite" if res.nonfinite[j] else ""
        spur = False if failure else is_spurious(res.converged[j], res.estimates[j], sources[j], tols[j])
        out[tid] = _record(tid, sigma, algorithm, classes[j], sources[j], inits[j], res.estimates[j],
                           res.iterations[j], res.converged[j], spur, seeds[j], mus[j], failure)
    return out


def _run_chunk(cfg: SweepConfig, trial_ids: Sequence[int]) -> list[TrialRecord]:
    trial_ids = list(trial_ids)
    anchors = cfg.anchors
    sampled = [sample_trial(cfg, t) for t in trial_ids]
    seeds = [trial_seed(cfg.master_seed, t) for t in trial_ids]

    failed = {}
    ok = []
    for t, (src, _) in zip(trial_ids, sampled):
        if np.any(np.hypot(*(anchors - src).T) <= 1e-12):
            failed[t] = SourceOnAnchor.__name__
        else:
            ok.append(t)
    pos = {t: k for k, t in enumerate(trial_ids)}
    sel = [pos[t] for t in ok]
    sources = np.array([sampled[k][0] for k in sel]).reshape(-1, 2)
    inits = np.array([sampled[k][1] for k in sel]).reshape(-1, 2)
    ok_seeds = [seeds[k] for k in sel]

    true_ranges = np.hypot(sources[:, None, 0] - anchors[:, 0], sources[:, None, 1] - anchors[:, 1])
    baseline_mu = np.full(len(ok), cfg.mu)
    cached = {}
    if len(ok):
        base0 = BaselineCost.from_ranges(anchors, true_ranges)
        tol0 = default_grad_tol(base0)
        res0 = descend_batch(base0, inits, baseline_mu, tol0, cfg.max_iters)
        cached["baseline"] = (res0, baseline_mu, tol0)
    if cfg.ellipse is not None:
        classes = ["inside" if c else "outside" for c in cfg.ellipse.contains(sources)]
    elif len(ok):
        res0 = cached["baseline"][0]
        good = [
            res0.converged[j] and not res0.nonfinite[j]
            and not is_spurious(True, res0.estimates[j], sources[j], tol0[j])
            for j in range(len(ok))
        ]
        classes = [GUARANTEED if g else UNGUARANTEED for g in good]
    else:
        classes = []

    if cfg.auto_step:
        q = assemble_quadratic(ConvexCost.from_ranges(anchors, np.ones(len(anchors))))
        convex_mu = np.full(len(ok), auto_step(q))
    else:
        convex_mu = np.full(len(ok), cfg.mu)

    by_trial: dict[int, list[TrialRecord]] = {t: [] for t in trial_ids}
    for sigma_idx, sigma in enumerate(cfg.sigma_grid):
        if not len(ok):
            break
        if sigma == 0:
            ranges = true_ranges
        else:
            ranges = np.array([
                noisy_ranges(cfg.rss, ShadowingSpec(sigma, seed=[s, 1], samples=cfg.samples), src, anchors)
                for s, src in zip(ok_seeds, sources)
            ])
        for algorithm in cfg.algorithms:
            if algorithm == "baseline" and sigma == 0:
                res, mus, tols = cached["baseline"]
            else:
                if algorithm == "convex":
                    cost, mus = ConvexCost.from_ranges(anchors, ranges), convex_mu
                else:
                    cost, mus = BaselineCost.from_ranges(anchors, ranges), baseline_mu
                tols = default_grad_tol(cost)
                res = descend_batch(cost, inits, mus, tols, cfg.max_iters)
            recs = _batch_records(cfg, sigma, algorithm, ok, classes, sources, inits, ok_seeds, res, mus, tols)
            for t, r in recs.items():
                by_trial[t].append(r)

    for t, reason in failed.items():
        src, init = sampled[pos[t]]
        for sigma in cfg.sigma_grid:
            for algorithm in cfg.algorithms:
                by_trial[t].append(
                    _record(t, sigma, algorithm, "", src, init, None, 0, False, False,
                            seeds[pos[t]], cfg.mu, failure=reason)
                )
    return [r for t in trial_ids for r in by_trial[t]]


def run_sweep(cfg: SweepConfig) -> tuple[list[TrialRecord], list[dict]]:
    """All trial records (trial-id order) and the aggregated error table."""
    ids = list(range(int(cfg.trials)))
    workers = max(1, int(cfg.workers))
    if workers == 1:
        records = _run_chunk(cfg, ids)
    else:
        chunks = [c.tolist() for c in np.array_split(ids, workers) if len(c)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, [cfg] * len(chunks), chunks))
        records = [r for part in parts for r in part]
    return records, aggregate(records, cfg.sigma_grid, cfg.algorithms)


def aggregate(records: Sequence[TrialRecord], sigma_grid=None, algorithms=ALGORITHMS) -> list[dict]:
    """Mean squared error per (sigma, algorithm, class), failed trials excluded.

    Class ``all`` pools every class.
    """
    if sigma_grid is None:
        sigma_grid = sorted({r.sigma_db for r in records})
    class_order = []
    for r in records:
        if r.target_class and r.target_class not in class_order:
            class_order.append(r.target_class)
    class_order = sorted(class_order) + ["all"]
    table = []
    for sigma in sigma_grid:
        for algorithm in algorithms:
            for cls in class_order:
                errs = [
                    r.sq_error for r in records
                    if r.sigma_db == sigma and r.algorithm == algorithm and not r.failure
                    and (cls == "all" or r.target_class == cls)
                ]
                if not errs:
                    continue
                table.append({
                    "sigma_db": float(sigma),
                    "algorithm": algorithm,
                    "class": cls,
                    "mean_sq_error": math.fsum(errs) / len(errs),
                    "trial_count": len(errs),
                })
    return table


# ---------------------------------------------------------------- CSV


def _fmt(v):
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_rows(path, header, rows):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([_fmt(v) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def emit_csv(records: Sequence[TrialRecord], path) -> Path:
    return _write_rows(path, RECORD_FIELDS, ([getattr(r, f) for f in RECORD_FIELDS] for r in records))


def emit_table_csv(table: Sequence[dict], path) -> Path:
    return _write_rows(path, TABLE_FIELDS, ([row[f] for f in TABLE_FIELDS] for row in table))


def emit_trajectory_csv(result: SolveResult, path) -> Path:
    rows = zip(result.trajectory_iters.tolist(), result.trajectory[:, 0].tolist(), result.trajectory[:, 1].tolist())
    return _write_rows(path, ["iteration", "x", "y"], rows)


def read_records(path) -> list[TrialRecord]:
    types = {f.name: f.type for f in fields(TrialRecord)}
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            kw = {}
            for name, raw in row.items():
                kind = types[name]
                if kind == "int":
                    kw[name] = int(raw)
                elif kind == "float":
                    kw[name] = float(raw)
                elif kind == "bool":
                    kw[name] = raw == "1"
                else:
                    kw[name] = raw
            out.append(TrialRecord(**kw))
    return out


def read_table(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return [
            {"sigma_db": float(r["sigma_db"]), "algorithm": r["algorithm"], "class": r["class"],
             "mean_sq_error": float(r["mean_sq_error"]), "trial_count": int(r["trial_count"])}
            for r in csv.DictReader(fh)
        ]
