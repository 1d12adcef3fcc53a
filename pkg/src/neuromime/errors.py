"""Exception types shared across the simulation modules."""


class BlowUpError(RuntimeError):
    """A trajectory left the configured bound; carries the failure time."""

    def __init__(self, message: str, t_fail: float):
        super().__init__(message)
        self.t_fail = t_fail


class StabilityError(ValueError):
    """Step size too large for the stiffest time constant; carries the bound."""

    def __init__(self, message: str, dt_max: float):
        super().__init__(message)
        self.dt_max = dt_max


class EstimationError(RuntimeError):
    """A statistical estimate could not be formed (too few neighbors, ...)."""


class DegenerateSignalError(ValueError):
    """A signal lacks the features an analysis needs (missing peaks, ...)."""


class TopologyError(ValueError):
    """A network definition produced an unsolvable nodal system."""


class FitFailure(RuntimeError):
    """Optimization budget exhausted; carries the best parameters seen."""

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best
