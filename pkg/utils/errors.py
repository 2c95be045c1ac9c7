"""
Error types shared by the simulator, the verification suites and the CLI.
"""

from typing import Optional, Tuple


class DimensionMismatchError(ValueError):
    """Raised when vector or matrix dimensions are inconsistent."""


class ConfigurationError(ValueError):
    """Raised for invalid gains, radii, manifolds or swarm settings."""


class ManifoldNotFoundError(LookupError):
    """Raised when a manifold name is not registered."""


class ScenarioError(ValueError):
    """Raised when a scenario file cannot be parsed or validated."""

    def __init__(self, message: str, location: Optional[str] = None):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class BarrierViolationError(RuntimeError):
    """Raised when two virtual coordinates get within the safe radius."""

    def __init__(
        self,
        message: str,
        time: Optional[float] = None,
        pair: Optional[Tuple[int, int]] = None,
        distance: Optional[float] = None,
    ):
        self.time = time
        self.pair = pair
        self.distance = distance
        details = []
        if time is not None:
            details.append(f"t={time:.6g}")
        if pair is not None:
            details.append(f"pair={pair}")
        if distance is not None:
            details.append(f"distance={distance:.6g}")
        super().__init__(f"{message} ({', '.join(details)})" if details else message)


class NumericFailureError(ArithmeticError):
    """Raised when the integrated state stops being finite."""


class DecouplingMismatchError(AssertionError):
    """Raised when the brute-force and closed-form propagation terms disagree."""

    def __init__(self, message: str, instance: dict):
        self.instance = instance
        super().__init__(message)
