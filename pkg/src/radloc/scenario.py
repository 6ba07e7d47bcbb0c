from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from radloc.errors import InvalidScenario
from radloc.geometry import as_point, as_points


@dataclass(frozen=True)
class Scenario:
    """Anchor positions, the true source (if known) and measured ranges."""

    anchors: np.ndarray
    ranges: np.ndarray
    source: Optional[np.ndarray] = None
    label: str = ""

    def __post_init__(self):
        try:
            anchors = as_points(self.anchors)
        except ValueError as exc:
            raise InvalidScenario(str(exc)) from None
        if len(anchors) < 3:
            raise InvalidScenario(
                f"need N > 2 anchors for 2-D localization, got N = {len(anchors)}"
            )
        ranges = np.asarray(self.ranges, dtype=float).reshape(-1)
        if ranges.shape != (len(anchors),):
            raise InvalidScenario(f"expected {len(anchors)} ranges, got {ranges.size}")
        if not np.all(np.isfinite(ranges)) or np.any(ranges < 0):
            raise InvalidScenario("ranges must be finite and non-negative")
        object.__setattr__(self, "anchors", anchors)
        object.__setattr__(self, "ranges", ranges)
        if self.source is not None:
            object.__setattr__(self, "source", as_point(self.source))

    @classmethod
    def noise_free(cls, anchors, source, label: str = "") -> "Scenario":
        anchors = as_points(anchors)
        source = as_point(source)
        ranges = np.hypot(*(anchors - source).T)
        return cls(anchors=anchors, ranges=ranges, source=source, label=label)

    @property
    def n_anchors(self) -> int:
        return len(self.anchors)


# x1=[1,1], x2=[1,3], x3=[3,1], y*=0; the baseline cost has a stable
# stationary point at [3,3] here.
SPURIOUS_ANCHORS = np.array([[1.0, 1.0], [1.0, 3.0], [3.0, 1.0]])
SPURIOUS_SOURCE = np.array([0.0, 0.0])
SPURIOUS_POINT = np.array([3.0, 3.0])
SPURIOUS_INITIAL = np.array([3.0, 2.0])

RSS_ANCHORS = np.array([[-2.0, -1.0], [-1.0, -3.0], [-1.0, 1.0], [1.0, 0.0]])


def spurious_scenario() -> Scenario:
    return Scenario.noise_free(SPURIOUS_ANCHORS, SPURIOUS_SOURCE, label="spurious-stationary")
