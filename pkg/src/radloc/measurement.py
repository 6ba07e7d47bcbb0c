"""RSS path-loss ranging with log-normal shadowing.

Noise is injected into the received signal strength and then inverted back
to a distance, so range errors are multiplicative: a shadowing draw of
``g`` dB scales the reported distance by ``10 ** (-g / (10 * eta))``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from radloc.errors import NonPositiveDistance, NonPositiveSignal, SourceOnAnchor
from radloc.geometry import as_point, as_points


@dataclass(frozen=True)
class RssModel:
    source_strength: float = 1.0
    path_loss_exponent: float = 3.0

    def __post_init__(self):
        if not self.source_strength > 0:
            raise ValueError("source strength must be positive")
        if not self.path_loss_exponent > 0:
            raise ValueError("path-loss exponent must be positive")


@dataclass(frozen=True)
class ShadowingSpec:
    """Zero-mean Gaussian shadowing in dB.

    ``samples`` > 1 averages that many independent dB draws per anchor
    before inversion (a crude stand-in for repeated emissions).
    """

    sigma_db: float = 0.0
    seed: int = 0
    samples: int = 1

    def __post_init__(self):
        if not self.sigma_db >= 0:
            raise ValueError("sigma_db must be non-negative")
        if int(self.samples) < 1:
            raise ValueError("samples must be >= 1")


def rss_at(m: RssModel, d):
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise NonPositiveDistance(f"distance must be positive, got {d}")
    return m.source_strength / d**m.path_loss_exponent


def distance_from_rss(m: RssModel, s):
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0):
        raise NonPositiveSignal(f"signal strength must be positive, got {s}")
    return (m.source_strength / s) ** (1.0 / m.path_loss_exponent)


def shadowing_db(spec: ShadowingSpec, n: int) -> np.ndarray:
    """Per-anchor shadowing in dB, N(0, sigma^2) (averaged over ``samples``).

    Draws are standard normals from PCG64 seeded with ``spec.seed`` and then
    scaled by sigma, so the same seed gives common random numbers across a
    sigma grid.
    """
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    z = rng.standard_normal((int(spec.samples), n)).mean(axis=0)
    return spec.sigma_db * z


def noisy_ranges(m: RssModel, spec: ShadowingSpec, source, anchors, eps: float = 1e-12):
    source = as_point(source)
    anchors = as_points(anchors)
    true_d = np.hypot(*(anchors - source).T)
    if np.any(true_d <= eps):
        raise SourceOnAnchor(f"source {source} coincides with an anchor")
    if spec.sigma_db == 0:
        return true_d
    omega = 10.0 ** (shadowing_db(spec, len(anchors)) / 10.0)
    return distance_from_rss(m, omega * rss_at(m, true_d))
