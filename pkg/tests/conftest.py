import numpy as np
import pytest

from radloc.scenario import Scenario, spurious_scenario


@pytest.fixture
def spurious():
    return spurious_scenario()


def random_scenario(rng, n=None, half_width=10.0, min_ratio=1e-3):
    """Noise-free scenario with well-spread (non-collinear) anchors.

    Anchors are redrawn until the convex Hessian has eigenvalue ratio
    >= ``min_ratio``.
    """
    from radloc.costs import ConvexCost, assemble_quadratic, eigenvalues

    n = int(rng.integers(3, 8)) if n is None else n
    while True:
        anchors = rng.uniform(-half_width, half_width, (n, 2))
        if np.min(np.hypot(*np.diff(anchors, axis=0).T)) < 1e-3 * half_width:
            continue
        source = rng.uniform(-half_width, half_width, 2)
        sc = Scenario.noise_free(anchors, source)
        lo, hi = eigenvalues(assemble_quadratic(ConvexCost.from_scenario(sc)))
        if lo >= min_ratio * hi:
            return sc


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
