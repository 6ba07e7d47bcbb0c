"""Convex radical-axis cost, the non-convex squared-range baseline, and
the quadratic form used for step-size selection.

Both cost classes accept stacked parameters with leading batch axes so a
whole Monte Carlo sweep can be iterated in lockstep; arithmetic is
elementwise per batch entry, so a batched evaluation is bit-identical to
evaluating each entry on its own.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from radloc.errors import ConcentricCircles
from radloc.geometry import (
    RadicalAxis,
    concentric_eps,
    as_points,
    axis_feet,
    sequential_axes,
)


def _dot2(a, b):
    # explicit two-term sum keeps the operation order fixed across shapes
    return a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1]


@dataclass(frozen=True)
class ConvexCost:
    """J(y) = 1/2 sum_i ((y - foot_i) . e_i)^2 over radical axes.

    ``feet`` and ``directions`` have shape (..., K, 2).  Directions are the
    raw anchor differences, never normalized.
    """

    feet: np.ndarray
    directions: np.ndarray

    def __post_init__(self):
        feet = np.asarray(self.feet, dtype=float)
        directions = np.asarray(self.directions, dtype=float)
        if feet.shape[-1] != 2 or feet.ndim < 2:
            raise ValueError(f"feet must have shape (..., K, 2), got {feet.shape}")
        if directions.shape[-2:] != feet.shape[-2:]:
            raise ValueError("feet and directions disagree on the number of axes")
        if feet.shape[-2] < 2:
            raise ValueError("the convex cost needs at least 2 radical axes")
        object.__setattr__(self, "feet", feet)
        object.__setattr__(self, "directions", directions)

    @classmethod
    def from_axes(cls, axes: Sequence[RadicalAxis]) -> "ConvexCost":
        return cls(
            feet=np.array([ax.foot for ax in axes]),
            directions=np.array([ax.direction for ax in axes]),
        )

    @classmethod
    def from_scenario(cls, scenario) -> "ConvexCost":
        return cls.from_axes(sequential_axes(scenario))

    @classmethod
    def from_ranges(cls, anchors, ranges) -> "ConvexCost":
        """Sequential-pair cost built directly from ranges of shape (..., N).

        Same arithmetic as :func:`radloc.geometry.radical_axis`; the anchors
        are shared across the batch.
        """
        anchors = as_points(anchors)
        ranges = np.asarray(ranges, dtype=float)
        ci, cj = anchors[:-1], anchors[1:]
        for k, (a, b) in enumerate(zip(ci, cj)):
            if np.hypot(*(b - a)) <= concentric_eps(a, b):
                raise ConcentricCircles(pair_index=k)
        feet = axis_feet(ci, cj, ranges[..., :-1], ranges[..., 1:])
        directions = np.broadcast_to(cj - ci, feet.shape)
        return cls(feet=feet, directions=directions)

    @property
    def batch_shape(self):
        return self.feet.shape[:-2]

    def expand(self) -> "ConvexCost":
        return ConvexCost(self.feet[None], self.directions[None])

    def subset(self, idx) -> "ConvexCost":
        return ConvexCost(self.feet[idx], self.directions[idx])

    def residuals(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        return _dot2(y[..., None, :] - self.feet, self.directions)

    def value(self, y) -> np.ndarray:
        r = self.residuals(y)
        return 0.5 * (r * r).sum(axis=-1)

    def gradient(self, y) -> np.ndarray:
        r = self.residuals(y)
        return (r[..., None] * self.directions).sum(axis=-2)


@dataclass(frozen=True)
class BaselineCost:
    """J1(y) = 1/2 sum_i w_i (||x_i - y||^2 - d_i^2)^2.

    ``squared_ranges`` and ``weights`` have shape (..., N); the anchors (N, 2)
    are shared across any batch axes.
    """

    anchors: np.ndarray
    squared_ranges: np.ndarray
    weights: np.ndarray = None

    def __post_init__(self):
        anchors = as_points(self.anchors)
        sq = np.asarray(self.squared_ranges, dtype=float)
        if len(anchors) < 3:
            raise ValueError("the baseline cost needs at least 3 anchors")
        if sq.shape[-1] != len(anchors):
            raise ValueError("one squared range per anchor is required")
        if np.any(sq < 0):
            raise ValueError("squared ranges must be non-negative")
        weights = np.ones_like(sq) if self.weights is None else np.asarray(self.weights, dtype=float)
        if weights.shape[-1] != len(anchors):
            raise ValueError("one weight per anchor is required")
        if np.any(weights <= 0):
            raise ValueError("weights must be strictly positive")
        object.__setattr__(self, "anchors", anchors)
        object.__setattr__(self, "squared_ranges", sq)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_scenario(cls, scenario, weights=None) -> "BaselineCost":
        r = np.asarray(scenario.ranges, dtype=float)
        return cls(scenario.anchors, r * r, weights)

    @classmethod
    def from_ranges(cls, anchors, ranges, weights=None) -> "BaselineCost":
        r = np.asarray(ranges, dtype=float)
        return cls(anchors, r * r, weights)

    @property
    def batch_shape(self):
        return self.squared_ranges.shape[:-1]

    def expand(self) -> "BaselineCost":
        return BaselineCost(self.anchors, self.squared_ranges[None], self.weights[None])

    def subset(self, idx) -> "BaselineCost":
        return BaselineCost(self.anchors, self.squared_ranges[idx], self.weights[idx])

    def _offsets(self, y):
        y = np.asarray(y, dtype=float)
        diff = y[..., None, :] - self.anchors
        return diff, _dot2(diff, diff) - self.squared_ranges

    def value(self, y) -> np.ndarray:
        _, r = self._offsets(y)
        return 0.5 * (self.weights * r * r).sum(axis=-1)

    def gradient(self, y) -> np.ndarray:
        diff, r = self._offsets(y)
        return 2.0 * ((self.weights * r)[..., None] * diff).sum(axis=-2)


@dataclass(frozen=True)
class Quadratic2:
    """J(y) = 1/2 y'Hy - b'y + const, so that grad J(y) = H y - b."""

    hessian: np.ndarray
    rhs: np.ndarray

    def gradient(self, y) -> np.ndarray:
        return np.asarray(y, dtype=float) @ self.hessian.T - self.rhs

    @property
    def trace(self) -> float:
        return float(self.hessian[0, 0] + self.hessian[1, 1])

    @property
    def det(self) -> float:
        h = self.hessian
        return float(h[0, 0] * h[1, 1] - h[0, 1] * h[1, 0])

    def is_singular(self, rel: float = 1e-12) -> bool:
        return self.det <= rel * self.trace**2


def convex_value(cost: ConvexCost, y):
    return cost.value(y)


def convex_gradient(cost: ConvexCost, y):
    return cost.gradient(y)


def baseline_value(cost: BaselineCost, y):
    return cost.value(y)


def baseline_gradient(cost: BaselineCost, y):
    return cost.gradient(y)


def assemble_quadratic(cost: ConvexCost) -> Quadratic2:
    if cost.batch_shape:
        raise ValueError("assemble_quadratic expects a single (unbatched) cost")
    e = cost.directions
    hessian = (e[:, :, None] * e[:, None, :]).sum(axis=0)
    offsets = _dot2(e, cost.feet)
    rhs = (offsets[:, None] * e).sum(axis=0)
    return Quadratic2(hessian=hessian, rhs=rhs)


def eigenvalues(q: Quadratic2) -> tuple[float, float]:
    """(smallest, largest) eigenvalue of the symmetric 2x2 Hessian."""
    h = q.hessian
    mid = 0.5 * (h[0, 0] + h[1, 1])
    rad = float(np.hypot(0.5 * (h[0, 0] - h[1, 1]), 0.5 * (h[0, 1] + h[1, 0])))
    return mid - rad, mid + rad


def lipschitz_bound(q: Quadratic2) -> float:
    """Largest Hessian eigenvalue: a global Lipschitz constant of grad J."""
    return eigenvalues(q)[1]
