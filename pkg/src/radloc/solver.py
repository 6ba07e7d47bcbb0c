"""Fixed-step gradient descent, the closed-form oracle, and step selection."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from radloc.costs import Quadratic2, lipschitz_bound
from radloc.errors import CollinearAnchors, DegenerateCost, NonFinite
from radloc.geometry import as_point

DEFAULT_MU = 0.001
DEFAULT_MAX_ITERS = 200_000
# trajectories keep every iterate up to this index, then every TRAJECTORY_STRIDE-th
TRAJECTORY_FULL = 10_000
TRAJECTORY_STRIDE = 10


@dataclass(frozen=True)
class SolverConfig:
    mu: float = DEFAULT_MU
    max_iters: int = DEFAULT_MAX_ITERS
    grad_tol: Optional[float] = None  # None: 1e-8 * (1 + ||grad(0)||)
    initial: np.ndarray = field(default_factory=lambda: np.zeros(2))
    record_trajectory: bool = False

    def __post_init__(self):
        if not (self.mu > 0 and np.isfinite(self.mu)):
            raise ValueError(f"step size must be positive, got {self.mu}")
        if int(self.max_iters) < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.grad_tol is not None and not self.grad_tol > 0:
            raise ValueError(f"grad_tol must be positive, got {self.grad_tol}")
        object.__setattr__(self, "max_iters", int(self.max_iters))
        object.__setattr__(self, "initial", as_point(self.initial))


@dataclass
class SolveResult:
    estimate: np.ndarray
    iterations: int
    converged: bool
    final_cost: float
    grad_norm: float
    grad_tol: float
    trajectory: Optional[np.ndarray] = None
    # iteration index of each trajectory row; exposes the decimation
    trajectory_iters: Optional[np.ndarray] = None


@dataclass
class BatchResult:
    estimates: np.ndarray
    iterations: np.ndarray
    converged: np.ndarray
    nonfinite: np.ndarray
    grad_norms: np.ndarray


def default_grad_tol(cost) -> np.ndarray:
    """Relative stopping threshold 1e-8 * (1 + ||grad(0)||).

    For the convex cost grad J(0) = -b, so this is 1e-8 * (1 + ||b||).
    """
    g0 = cost.gradient(np.zeros(cost.batch_shape + (2,)))
    return 1e-8 * (1.0 + np.hypot(g0[..., 0], g0[..., 1]))


def descend_batch(
    cost,
    initial,
    mu,
    grad_tol=None,
    max_iters: int = DEFAULT_MAX_ITERS,
    observer: Optional[Callable[[int, np.ndarray], None]] = None,
) -> BatchResult:
    """Run ``y <- y - mu * grad(y)`` independently for every batch entry.

    ``cost`` carries a leading batch axis of length T matching ``initial``
    (T, 2).  ``mu`` and ``grad_tol`` may be scalars or length-T arrays.
    Entries stop individually; a stopped entry is never touched again, so
    each result is independent of what else shares the batch.
    """
    y = np.array(initial, dtype=float)
    T = len(y)
    mu = np.broadcast_to(np.asarray(mu, dtype=float), (T,))
    tol = default_grad_tol(cost) if grad_tol is None else grad_tol
    tol = np.broadcast_to(np.asarray(tol, dtype=float), (T,))

    iterations = np.zeros(T, dtype=np.int64)
    converged = np.zeros(T, dtype=bool)
    nonfinite = np.zeros(T, dtype=bool)
    grad_norms = np.full(T, np.nan)

    can_subset = hasattr(cost, "subset")
    # compact state of the entries still iterating; written back on exit
    idx = np.arange(T)
    y_act, mu_act, tol_act = y.copy(), mu[:, None].copy(), tol.copy()
    sub = cost
    with np.errstate(over="ignore", invalid="ignore"):
        k = 0
        while idx.size:
            if can_subset:
                g = sub.gradient(y_act)
            else:
                y[idx] = y_act
                g = cost.gradient(y)[idx]
            gn = np.hypot(g[:, 0], g[:, 1])
            hit = gn <= tol_act
            at_cap = k == max_iters
            if at_cap or hit.any():
                done = hit | at_cap
                leaving = idx[done]
                grad_norms[leaving] = gn[done]
                converged[leaving] = hit[done]
                iterations[leaving] = k
                y[leaving] = y_act[done]
                if at_cap:
                    break
                keep = ~done
                idx, y_act, mu_act, tol_act = idx[keep], y_act[keep], mu_act[keep], tol_act[keep]
                g, gn = g[keep], gn[keep]
                if can_subset:
                    sub = cost.subset(idx)
                if not idx.size:
                    break
            step = y_act - mu_act * g
            bad = ~np.isfinite(step).all(axis=1)
            if bad.any():
                # report the last finite iterate
                failed = idx[bad]
                nonfinite[failed] = True
                iterations[failed] = k + 1
                grad_norms[failed] = gn[bad]
                y[failed] = y_act[bad]
                keep = ~bad
                idx, step, mu_act, tol_act = idx[keep], step[keep], mu_act[keep], tol_act[keep]
                if can_subset:
                    sub = cost.subset(idx)
            y_act = step
            k += 1
            if observer is not None:
                y[idx] = y_act
                observer(k, y)
    return BatchResult(y, iterations, converged, nonfinite, grad_norms)


def descend(cost, cfg: SolverConfig) -> SolveResult:
    """Fixed-step gradient descent on any cost exposing value/gradient."""
    if getattr(cost, "batch_shape", ()) != ():
        raise ValueError("descend expects an unbatched cost; use descend_batch")
    batched = cost.expand() if hasattr(cost, "expand") else cost
    tol = float(default_grad_tol(cost)) if cfg.grad_tol is None else float(cfg.grad_tol)

    traj, traj_iters = [cfg.initial.copy()], [0]

    def record(k, y):
        if k <= TRAJECTORY_FULL or k % TRAJECTORY_STRIDE == 0:
            traj.append(y[0].copy())
            traj_iters.append(k)

    observer = record if cfg.record_trajectory else None
    res = descend_batch(batched, cfg.initial[None], cfg.mu, tol, cfg.max_iters, observer)
    if res.nonfinite[0]:
        raise NonFinite(int(res.iterations[0]))
    estimate = res.estimates[0]
    trajectory = trajectory_iters = None
    if cfg.record_trajectory:
        if traj_iters[-1] != res.iterations[0]:
            traj.append(estimate.copy())
            traj_iters.append(int(res.iterations[0]))
        trajectory = np.array(traj)
        trajectory_iters = np.array(traj_iters, dtype=np.int64)
    return SolveResult(
        estimate=estimate,
        iterations=int(res.iterations[0]),
        converged=bool(res.converged[0]),
        final_cost=float(cost.value(estimate)),
        grad_norm=float(res.grad_norms[0]),
        grad_tol=tol,
        trajectory=trajectory,
        trajectory_iters=trajectory_iters,
    )


def auto_step(q: Quadratic2, safety: float = 0.9) -> float:
    """Step size ``safety * 2 / lambda_max(H)``, inside the descent bound."""
    if not 0.0 < safety <= 1.0:
        raise ValueError(f"safety must lie in (0, 1], got {safety}")
    lam = lipschitz_bound(q)
    if not lam > 0:
        raise DegenerateCost(f"largest Hessian eigenvalue is {lam}; no usable step size")
    return safety * 2.0 / lam


def solve_direct(q: Quadratic2) -> np.ndarray:
    """Unique minimizer H^-1 b of the convex quadratic."""
    if q.is_singular():
        raise CollinearAnchors(
            f"Hessian is singular (det={q.det:.3g}, trace={q.trace:.3g}); anchors are collinear"
        )
    return np.linalg.solve(q.hessian, q.rhs)


def is_spurious(converged: bool, estimate, truth, grad_tol: float) -> bool:
    """Converged to a stationary point farther than 10 * grad_tol from the truth."""
    if not converged:
        return False
    err = np.asarray(estimate, dtype=float) - np.asarray(truth, dtype=float)
    return bool(np.hypot(*err) > 10.0 * grad_tol)
