"""
Parametrized m-D manifolds in R^n.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from utils.errors import ConfigurationError, DimensionMismatchError

logger = logging.getLogger(__name__)

# Partial derivatives above this magnitude are reported as a suspected violation
# of the bounded-derivative assumption.
PARTIAL_BOUND = 1e6

VALIDATION_STEP = 1e-5
VALIDATION_TOLERANCE = 1e-5


@dataclass(frozen=True)
class ManifoldSpec:
    """
    A manifold given by a parametrization f: R^m -> R^n.

    `function` maps arrays of shape (..., m) to (..., n). `jacobian_function`,
    when given, maps (..., m) to (..., n, m) with entry [j, l] = df_j/dw_l;
    otherwise partial derivatives come from central differences.
    """

    name: str
    n: int
    m: int
    function: Callable[[np.ndarray], np.ndarray]
    jacobian_function: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ConfigurationError(f"Manifold '{self.name}' needs n >= 1 and m >= 1, got n={self.n}, m={self.m}")

    @property
    def has_analytic_partials(self) -> bool:
        return self.jacobian_function is not None

    def _coordinates(self, omega) -> np.ndarray:
        w = np.asarray(omega, dtype=float)
        if w.ndim == 0 or w.shape[-1] != self.m:
            raise DimensionMismatchError(f"Manifold '{self.name}' expects {self.m} virtual coordinates, got shape {w.shape}")
        return w

    def evaluate(self, omega) -> np.ndarray:
        """Evaluate f at one point (m,) or a batch of points (..., m)."""
        w = self._coordinates(omega)
        values = np.asarray(self.function(w), dtype=float)
        if values.shape != w.shape[:-1] + (self.n,):
            raise DimensionMismatchError(
                f"Manifold '{self.name}' returned shape {values.shape}, expected {w.shape[:-1] + (self.n,)}"
            )
        return values

    def jacobian(self, omega) -> np.ndarray:
        """Partial derivatives df_j/dw_l with shape (..., n, m)."""
        w = self._coordinates(omega)
        if self.jacobian_function is None:
            steps = 1e-6 * np.maximum(1.0, np.abs(w))
            return self.finite_difference_jacobian(w, steps)

        partials = np.asarray(self.jacobian_function(w), dtype=float)
        if partials.shape != w.shape[:-1] + (self.n, self.m):
            raise DimensionMismatchError(
                f"Manifold '{self.name}' returned partials of shape {partials.shape}, "
                f"expected {w.shape[:-1] + (self.n, self.m)}"
            )
        return partials

    def partial(self, omega, j: int, l: int) -> float:
        """Single partial derivative df_j/dw_l (both indices 1-based)."""
        if not 1 <= j <= self.n:
            raise IndexError(f"component index {j} out of range 1..{self.n}")
        if not 1 <= l <= self.m:
            raise IndexError(f"coordinate index {l} out of range 1..{self.m}")
        w = self._coordinates(omega)
        if w.ndim != 1:
            raise DimensionMismatchError("partial() takes a single point")
        return float(self.jacobian(w)[j - 1, l - 1])

    def finite_difference_jacobian(self, omega, steps) -> np.ndarray:
        """Central-difference partials; `steps` broadcasts against omega."""
        w = self._coordinates(omega)
        h = np.broadcast_to(np.asarray(steps, dtype=float), w.shape)
        columns = []
        for l in range(self.m):
            forward = w.copy()
            backward = w.copy()
            forward[..., l] += h[..., l]
            backward[..., l] -= h[..., l]
            delta = self.evaluate(forward) - self.evaluate(backward)
            columns.append(delta / (2.0 * h[..., l])[..., np.newaxis])
        return np.stack(columns, axis=-1)

    def validate_partials(self, samples: int = 100, seed: int = 0, spread: float = np.pi) -> float:
        """
        Check analytic partials against central differences on random points.

        Returns the largest absolute deviation; raises ConfigurationError when it
        exceeds the tolerance or when values are not finite.
        """
        rng = np.random.default_rng(seed)
        points = rng.uniform(-spread, spread, size=(samples, self.m))

        values = self.evaluate(points)
        if not np.all(np.isfinite(values)):
            raise ConfigurationError(f"Manifold '{self.name}' is not finite on sampled points")
        if not self.has_analytic_partials:
            return 0.0

        analytic = self.jacobian(points)
        numeric = self.finite_difference_jacobian(points, VALIDATION_STEP)
        if not np.all(np.isfinite(analytic)):
            raise ConfigurationError(f"Manifold '{self.name}' has non-finite partials on sampled points")

        deviation = float(np.max(np.abs(analytic - numeric)))
        if deviation > VALIDATION_TOLERANCE:
            raise ConfigurationError(
                f"Analytic partials of manifold '{self.name}' deviate from central differences by {deviation:.3g}"
            )
        logger.debug(f"Validated partials of '{self.name}' on {samples} points, max deviation {deviation:.3g}")
        return deviation


def exceeds_partial_bound(partials: np.ndarray) -> bool:
    """True when any partial derivative looks unbounded."""
    return bool(np.any(np.abs(partials) > PARTIAL_BOUND))
