"""Exception types raised by the localization toolkit."""


class LocalizationError(Exception):
    """Base class for every error the package raises on purpose."""


class InvalidScenario(LocalizationError, ValueError):
    """Scenario violates a structural requirement (e.g. fewer than 3 anchors)."""


class ConcentricCircles(LocalizationError, ValueError):
    def __init__(self, message="circles are concentric; radical axis undefined", pair_index=None):
        if pair_index is not None:
            message = f"{message} (pair {pair_index})"
        super().__init__(message)
        self.pair_index = pair_index


class CollinearAnchors(LocalizationError):
    """Hessian of the convex cost is singular, so the minimizer is a whole line."""


class DegenerateCost(LocalizationError):
    pass


class NonFinite(LocalizationError, FloatingPointError):
    def __init__(self, iteration):
        super().__init__(f"iterate became non-finite at iteration {iteration}; step size too large?")
        self.iteration = iteration


class NonPositiveDistance(LocalizationError, ValueError):
    pass


class NonPositiveSignal(LocalizationError, ValueError):
    pass


class SourceOnAnchor(LocalizationError, ValueError):
    pass


class ConfigError(LocalizationError, ValueError):
    """Malformed scenario or sweep configuration file."""
