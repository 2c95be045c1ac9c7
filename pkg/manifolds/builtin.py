"""
Registry of built-in manifolds: helicoid in R^3, 3-torus in R^4 and the unit circle.
"""

from functools import lru_cache
from typing import Callable, Dict, List, Optional

import numpy as np

from manifolds.spec import ManifoldSpec
from utils.errors import ManifoldNotFoundError


def _stack_components(components: List, shape) -> np.ndarray:
    return np.stack([np.broadcast_to(c, shape) for c in components], axis=-1)


def _stack_jacobian(rows: List[List], shape) -> np.ndarray:
    return np.stack([_stack_components(row, shape) for row in rows], axis=-2)


def helicoid3() -> ManifoldSpec:
    """
    Helicoid with three virtual coordinates:
        x1 = (4 + 3 cos w1) cos w2
        x2 = (4 + 3 cos w1) sin w2
        x3 = w1 + sin(w2 + w3)
    """

    def function(w):
        w1, w2, w3 = w[..., 0], w[..., 1], w[..., 2]
        radius = 4.0 + 3.0 * np.cos(w1)
        return _stack_components([radius * np.cos(w2), radius * np.sin(w2), w1 + np.sin(w2 + w3)], w1.shape)

    def jacobian(w):
        w1, w2, w3 = w[..., 0], w[..., 1], w[..., 2]
        radius = 4.0 + 3.0 * np.cos(w1)
        twist = np.cos(w2 + w3)
        zero = np.zeros_like(w1)
        return _stack_jacobian(
            [
                [-3.0 * np.sin(w1) * np.cos(w2), -radius * np.sin(w2), zero],
                [-3.0 * np.sin(w1) * np.sin(w2), radius * np.cos(w2), zero],
                [np.ones_like(w1), twist, twist],
            ],
            w1.shape,
        )

    return ManifoldSpec(name="helicoid3", n=3, m=3, function=function, jacobian_function=jacobian)


def torus3in4() -> ManifoldSpec:
    """
    3-torus embedded in R^4:
        x1 = (6 + 3 cos w1) cos w2
        x2 = (6 + 3 cos w1) sin w2
        x3 = 3 sin w2 cos w3
        x4 = 3 sin w2 sin w3
    """

    def function(w):
        w1, w2, w3 = w[..., 0], w[..., 1], w[..., 2]
        radius = 6.0 + 3.0 * np.cos(w1)
        return _stack_components(
            [
                radius * np.cos(w2),
                radius * np.sin(w2),
                3.0 * np.sin(w2) * np.cos(w3),
                3.0 * np.sin(w2) * np.sin(w3),
            ],
            w1.shape,
        )

    def jacobian(w):
        w1, w2, w3 = w[..., 0], w[..., 1], w[..., 2]
        radius = 6.0 + 3.0 * np.cos(w1)
        zero = np.zeros_like(w1)
        return _stack_jacobian(
            [
                [-3.0 * np.sin(w1) * np.cos(w2), -radius * np.sin(w2), zero],
                [-3.0 * np.sin(w1) * np.sin(w2), radius * np.cos(w2), zero],
                [zero, 3.0 * np.cos(w2) * np.cos(w3), -3.0 * np.sin(w2) * np.sin(w3)],
                [zero, 3.0 * np.cos(w2) * np.sin(w3), 3.0 * np.sin(w2) * np.cos(w3)],
            ],
            w1.shape,
        )

    return ManifoldSpec(name="torus3in4", n=4, m=3, function=function, jacobian_function=jacobian)


def circle2() -> ManifoldSpec:
    """Unit circle [cos w, sin w] in R^2 (one virtual coordinate)."""

    def function(w):
        w1 = w[..., 0]
        return _stack_components([np.cos(w1), np.sin(w1)], w1.shape)

    def jacobian(w):
        w1 = w[..., 0]
        return _stack_jacobian([[-np.sin(w1)], [np.cos(w1)]], w1.shape)

    return ManifoldSpec(name="circle2", n=2, m=1, function=function, jacobian_function=jacobian)


def affine_manifold(partials, offset=None, name: str = "affine") -> ManifoldSpec:
    """
    Affine manifold f(w) = F w + b with constant partial derivatives F (n x m).

    Handy wherever prescribed partials are needed, e.g. random partials in the
    decoupling verification or the all-zero partials of a constant manifold.
    """
    matrix = np.array(partials, dtype=float, ndmin=2)
    n, m = matrix.shape
    shift = np.zeros(n) if offset is None else np.asarray(offset, dtype=float)

    def function(w):
        return w @ matrix.T + shift

    def jacobian(w):
        return np.broadcast_to(matrix, w.shape[:-1] + (n, m)).copy()

    return ManifoldSpec(name=name, n=n, m=m, function=function, jacobian_function=jacobian)


BUILTIN_MANIFOLDS: Dict[str, Callable[[], ManifoldSpec]] = {
    "helicoid3": helicoid3,
    "torus3in4": torus3in4,
    "circle2": circle2,
}


def available_manifolds() -> List[str]:
    return sorted(BUILTIN_MANIFOLDS)


@lru_cache(maxsize=None)
def builtin(name: str) -> ManifoldSpec:
    """Return a registered manifold; analytic partials are validated on first use."""
    factory: Optional[Callable[[], ManifoldSpec]] = BUILTIN_MANIFOLDS.get(name)
    if factory is None:
        raise ManifoldNotFoundError(f"Unknown manifold '{name}'. Available: {', '.join(available_manifolds())}")

    spec = factory()
    spec.validate_partials()
    return spec
