"""
Implicit error functions phi_j(x, w) = x_j - f_j(w) and their gradients.
"""

from dataclasses import dataclass

import numpy as np

from linalg.core import as_vector
from manifolds.spec import ManifoldSpec


@dataclass(frozen=True)
class ImplicitError:
    """Vector of on-manifold convergence errors, one entry per ambient coordinate."""

    values: np.ndarray

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.values))


def phi(spec: ManifoldSpec, x, omega) -> ImplicitError:
    """Return x - f(omega)."""
    position = as_vector(x, spec.n, name="position")
    coordinates = as_vector(omega, spec.m, name="virtual coordinates")
    return ImplicitError(values=position - spec.evaluate(coordinates))


def gradient_phi(spec: ManifoldSpec, omega, j: int) -> np.ndarray:
    """
    Gradient of phi_j in R^(n+m) (j is 1-based).

    The first n entries are the unit vector e_j, the last m are -df_j/dw_l.
    """
    if not 1 <= j <= spec.n:
        raise IndexError(f"error index {j} out of range 1..{spec.n}")
    coordinates = as_vector(omega, spec.m, name="virtual coordinates")
    gradient = np.zeros(spec.n + spec.m)
    gradient[j - 1] = 1.0
    gradient[spec.n:] = -spec.jacobian(coordinates)[j - 1]
    return gradient


def gradients(spec: ManifoldSpec, omega) -> np.ndarray:
    """All n gradients stacked as rows: [I_n | -F]."""
    coordinates = as_vector(omega, spec.m, name="virtual coordinates")
    return np.hstack([np.eye(spec.n), -spec.jacobian(coordinates)])
