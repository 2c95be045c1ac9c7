"""
Higher-dimensional guiding vector field on R^(n+m).

The field is the propagation term (a generalized cross product of the n error
gradients and m-1 auxiliary vectors) plus the convergence term
-sum_j k_j phi_j grad(phi_j). With the auxiliary vectors returned by
`feasible_aux_vectors` the last m entries of the propagation term are all
(-1)^n, independent of the manifold; `propagation_closed_form` uses that
closed form and is the production path.
"""

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from linalg.core import as_matrix, as_vector, generalized_cross
from manifolds.implicit import gradients, phi
from manifolds.spec import ManifoldSpec
from utils.errors import ConfigurationError, DimensionMismatchError


@dataclass(frozen=True)
class AuxiliaryVectorSet:
    n: int
    m: int
    vectors: Tuple[np.ndarray, ...]

    def as_matrix(self) -> np.ndarray:
        return np.vstack(self.vectors) if self.vectors else np.empty((0, self.n + self.m))


@dataclass(frozen=True)
class GvfField:
    propagation: np.ndarray
    convergence: np.ndarray
    total: np.ndarray
    gains: np.ndarray


def orientation(n: int) -> float:
    """(-1)^n, the constant virtual-coordinate velocity of the decoupled field."""
    return -1.0 if n % 2 else 1.0


def expand_gains(gains, n: int) -> np.ndarray:
    """Replicate a scalar gain n times; validate strict positivity."""
    values = np.atleast_1d(np.asarray(gains, dtype=float))
    if values.size == 1:
        values = np.full(n, float(values[0]))
    values = as_vector(values, n, name="gains")
    if np.any(values <= 0.0):
        raise ConfigurationError(f"Gains must be strictly positive, got {values.tolist()}")
    return values


def feasible_aux_vectors(n: int, m: int) -> AuxiliaryVectorSet:
    """
    The m-1 auxiliary vectors [0_n | -1, e_(k+1)] that decouple the
    virtual-coordinate entries of the propagation term. Empty when m = 1.
    """
    if n < 1 or m < 1:
        raise ConfigurationError(f"Need n >= 1 and m >= 1, got n={n}, m={m}")

    vectors = []
    for k in range(1, m):
        vector = np.zeros(n + m)
        vector[n] = -1.0
        vector[n + k] = 1.0
        vectors.append(vector)
    return AuxiliaryVectorSet(n=n, m=m, vectors=tuple(vectors))


def bruteforce_from_partials(partials, aux_vectors: Sequence) -> np.ndarray:
    """Generalized cross product of the gradients [e_j | -F_j] followed by the auxiliary vectors."""
    matrix = as_matrix(partials, name="partials")
    n, m = matrix.shape
    if len(aux_vectors) != m - 1:
        raise DimensionMismatchError(f"Need {m - 1} auxiliary vectors for m={m}, got {len(aux_vectors)}")
    aux = [as_vector(v, n + m, name=f"auxiliary vector {idx + 1}") for idx, v in enumerate(aux_vectors)]

    rows = np.hstack([np.eye(n), -matrix])
    return generalized_cross(list(rows) + aux)


def propagation_bruteforce(spec: ManifoldSpec, omega, aux: AuxiliaryVectorSet) -> np.ndarray:
    """Propagation term computed literally from its cross-product definition."""
    if aux.n != spec.n or aux.m != spec.m:
        raise DimensionMismatchError(
            f"Auxiliary vectors built for n={aux.n}, m={aux.m} but manifold has n={spec.n}, m={spec.m}"
        )
    rows = gradients(spec, omega)
    return generalized_cross(list(rows) + list(aux.vectors))


def propagation_from_partials(partials) -> np.ndarray:
    """Closed form: [(-1)^n F 1_m ; (-1)^n 1_m]."""
    matrix = as_matrix(partials, name="partials")
    n, m = matrix.shape
    sign = orientation(n)
    return np.concatenate([sign * matrix.sum(axis=1), np.full(m, sign)])


def propagation_closed_form(spec: ManifoldSpec, omega) -> np.ndarray:
    coordinates = as_vector(omega, spec.m, name="virtual coordinates")
    return propagation_from_partials(spec.jacobian(coordinates))


def coupling_demo(partials, aux: Sequence) -> np.ndarray:
    """
    Propagation term for arbitrary, possibly infeasible, auxiliary vectors.

    With infeasible vectors the last m entries depend on the partials; with the
    feasible ones this equals `propagation_from_partials`.
    """
    return bruteforce_from_partials(partials, aux)


def hgvf(spec: ManifoldSpec, x, omega, gains) -> GvfField:
    """Assemble the field at p = [x, omega]."""
    k = expand_gains(gains, spec.n)
    coordinates = as_vector(omega, spec.m, name="virtual coordinates")
    errors = phi(spec, x, coordinates).values
    partials = spec.jacobian(coordinates)

    weighted = k * errors
    convergence = np.concatenate([-weighted, partials.T @ weighted])
    propagation = propagation_from_partials(partials)
    return GvfField(propagation=propagation, convergence=convergence, total=propagation + convergence, gains=k)


def dynamic_matrix(spec: ManifoldSpec, omega) -> np.ndarray:
    """
    Closed-loop matrix D with [dPhi/dt ; dw/dt] = D [u ; u_w]:

        D = [[I_n, -F], [0, I_m]]
    """
    coordinates = as_vector(omega, spec.m, name="virtual coordinates")
    matrix = np.eye(spec.n + spec.m)
    matrix[: spec.n, spec.n:] = -spec.jacobian(coordinates)
    return matrix


def closed_loop_rates(spec: ManifoldSpec, omega, u_x, u_omega) -> Tuple[np.ndarray, np.ndarray]:
    """Error rate dPhi/dt and coordinate rate dw/dt produced by a velocity command."""
    command = np.concatenate([as_vector(u_x, spec.n, name="u_x"), as_vector(u_omega, spec.m, name="u_omega")])
    rates = dynamic_matrix(spec, omega) @ command
    return rates[: spec.n], rates[spec.n:]
