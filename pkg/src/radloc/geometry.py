"""Planar points, measurement circles and radical axes."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from radloc.errors import ConcentricCircles, InvalidScenario


def as_point(p) -> np.ndarray:
    """Coerce ``p`` to a finite float array of shape (2,)."""
    arr = np.array(p, dtype=float).reshape(-1)
    if arr.shape != (2,):
        raise ValueError(f"expected a 2-D point, got shape {np.shape(p)}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"point has non-finite coordinates: {arr}")
    return arr


def as_points(ps) -> np.ndarray:
    arr = np.array(ps, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"expected an (N, 2) array of points, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("points contain non-finite coordinates")
    return arr


@dataclass(frozen=True)
class Circle:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        r = float(self.radius)
        if not np.isfinite(r) or r < 0:
            raise ValueError(f"radius must be finite and non-negative, got {self.radius}")
        object.__setattr__(self, "radius", r)

    def power(self, p) -> np.ndarray:
        """Power of point(s) ``p``: squared distance to the center minus r^2."""
        diff = np.asarray(p, dtype=float) - self.center
        return (diff * diff).sum(axis=-1) - self.radius**2


@dataclass(frozen=True)
class RadicalAxis:
    """The line ``{p : (p - foot) . direction = 0}``.

    ``direction`` is the unnormalized center difference ``c_j - c_i``; the
    line itself runs perpendicular to it through ``foot``.
    """

    foot: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "foot", as_point(self.foot))
        object.__setattr__(self, "direction", as_point(self.direction))
        if not np.hypot(*self.direction) > 0:
            raise ValueError("radical axis direction must be non-zero")

    def residual(self, p) -> np.ndarray:
        """Signed ``(p - foot) . direction``; zero exactly on the line."""
        diff = np.asarray(p, dtype=float) - self.foot
        return (diff * self.direction).sum(axis=-1)

    def point_at(self, t) -> np.ndarray:
        """Points on the line, parametrized along the unit tangent."""
        e = self.direction / np.hypot(*self.direction)
        tangent = np.array([-e[1], e[0]])
        t = np.asarray(t, dtype=float)
        return self.foot + t[..., None] * tangent


def concentric_eps(ci, cj):
    return 1e-12 * max(1.0, float(np.hypot(*ci)), float(np.hypot(*cj)))


def axis_feet(ci, cj, ri, rj):
    """Vectorized foot points of radical axes; broadcasts over leading axes.

    ``ci``/``cj`` have trailing dimension 2, ``ri``/``rj`` are the radii.
    """
    e = cj - ci
    n = np.hypot(e[..., 0], e[..., 1])
    a = (n * n + ri * ri - rj * rj) / (2.0 * n)
    return ci + (a / n)[..., None] * e


def radical_axis(ci: Circle, cj: Circle) -> RadicalAxis:
    e = cj.center - ci.center
    if np.hypot(*e) <= concentric_eps(ci.center, cj.center):
        raise ConcentricCircles()
    foot = axis_feet(ci.center, cj.center, np.float64(ci.radius), np.float64(cj.radius))
    return RadicalAxis(foot=foot, direction=e)


def pair_axes(circles: Sequence[Circle], pairs: Iterable[tuple[int, int]]) -> list[RadicalAxis]:
    """Radical axes for an explicit list of circle index pairs."""
    axes = []
    for k, (i, j) in enumerate(pairs):
        try:
            axes.append(radical_axis(circles[i], circles[j]))
        except ConcentricCircles:
            raise ConcentricCircles(pair_index=k) from None
    return axes


def sequential_axes(scenario) -> list[RadicalAxis]:
    """Axes of consecutive anchor pairs (1,2), (2,3), ..., (N-1,N).

    ``scenario`` needs ``anchors`` (N, 2) and ``ranges`` (N,).
    """
    anchors = as_points(scenario.anchors)
    ranges = np.asarray(scenario.ranges, dtype=float)
    n = len(anchors)
    if n < 3:
        raise InvalidScenario(f"need N > 2 anchors for 2-D localization, got N = {n}")
    if ranges.shape != (n,):
        raise InvalidScenario(f"expected {n} ranges, got shape {ranges.shape}")
    circles = [Circle(c, r) for c, r in zip(anchors, ranges)]
    return pair_axes(circles, [(k, k + 1) for k in range(n - 1)])


def circle_intersections(ci: Circle, cj: Circle, tol: float = 1e-12) -> list[np.ndarray]:
    """Intersection points of two circles (0, 1 or 2 of them).

    Uses the law of cosines for the angle at ``ci.center`` so that it does
    not share arithmetic with :func:`radical_axis`.
    """
    e = cj.center - ci.center
    dist = float(np.hypot(*e))
    if dist <= concentric_eps(ci.center, cj.center):
        raise ConcentricCircles()
    r1, r2 = ci.radius, cj.radius
    if r1 == 0.0:
        return [ci.center.copy()] if abs(dist - r2) <= tol * max(1.0, dist) else []
    cos_phi = (r1 * r1 + dist * dist - r2 * r2) / (2.0 * r1 * dist)
    if abs(cos_phi) > 1.0 + tol:
        return []
    cos_phi = min(1.0, max(-1.0, cos_phi))
    base = np.arctan2(e[1], e[0])
    phi = np.arccos(cos_phi)
    if phi == 0.0 or phi == np.pi:
        angles = [base + phi]
    else:
        angles = [base + phi, base - phi]
    return [ci.center + r1 * np.array([np.cos(t), np.sin(t)]) for t in angles]
