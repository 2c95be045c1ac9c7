"""
Distributed coordinated guiding-vector-field controller.

Each robot follows the decoupled guiding vector field in [x, w] and adds, on
its virtual coordinates, an attraction towards the virtual target and a
barrier repulsion from neighbours within the sensing radius R.
"""

from dataclasses import dataclass
from typing import Collection, Optional, Sequence, Tuple

import numpy as np

from coordination.potential import AlphaPotential
from gvf.field import expand_gains, orientation
from linalg.core import as_vector
from manifolds.implicit import phi
from manifolds.spec import ManifoldSpec
from utils.errors import BarrierViolationError, ConfigurationError


@dataclass(frozen=True)
class NeighborView:
    """What one robot senses: neighbours' virtual coordinates and the target's."""

    neighbor_omegas: Tuple[Tuple[int, np.ndarray], ...]
    target_omega: np.ndarray

    @property
    def ids(self) -> Tuple[int, ...]:
        return tuple(robot_id for robot_id, _ in self.neighbor_omegas)


@dataclass(frozen=True)
class ControlOutput:
    u_x: np.ndarray
    u_omega: np.ndarray


def alpha(pot: AlphaPotential, s: float) -> float:
    """Barrier weight at distance s; s <= r means the barrier was crossed."""
    if s <= pot.r:
        raise BarrierViolationError("virtual coordinates within the safe radius", distance=float(s))
    return float(pot.values(s))


def neighbor_set(
    all_omegas: Sequence[Tuple[int, np.ndarray]],
    self_id: int,
    pot: AlphaPotential,
    target_omega=None,
    broken: Collection[int] = (),
) -> NeighborView:
    """
    Robots whose virtual coordinates lie within R of robot `self_id`.

    Broken robots are neither listed nor allowed to sense.
    """
    lookup = {robot_id: np.asarray(w, dtype=float) for robot_id, w in all_omegas}
    if self_id not in lookup:
        raise ValueError(f"Robot {self_id} is not part of the swarm")
    own = lookup[self_id]
    target = np.zeros_like(own) if target_omega is None else as_vector(target_omega, own.size, name="target")

    neighbors = []
    for robot_id, w in all_omegas:
        if robot_id == self_id or robot_id in broken:
            continue
        if np.linalg.norm(own - lookup[robot_id]) <= pot.R:
            neighbors.append((robot_id, lookup[robot_id]))
    return NeighborView(neighbor_omegas=tuple(neighbors), target_omega=target)


def repulsion(self_omega, other_omega, pot: AlphaPotential) -> np.ndarray:
    """Push on `self_omega` from one neighbour, directed away from it."""
    offset = np.asarray(self_omega, dtype=float) - np.asarray(other_omega, dtype=float)
    distance = float(np.linalg.norm(offset))
    if distance <= pot.r:
        raise BarrierViolationError("virtual coordinates within the safe radius", distance=distance)
    return alpha(pot, distance) * offset / distance


def delta(self_omega, view: NeighborView, c: float, pot: AlphaPotential) -> np.ndarray:
    """Coordination term -c (w_i - w_*) + sum_k alpha(|w_i - w_k|) (w_i - w_k) / |w_i - w_k|."""
    if c <= 0.0:
        raise ConfigurationError(f"Attraction gain c must be positive, got {c}")
    own = as_vector(self_omega, name="virtual coordinates")
    result = -c * (own - view.target_omega)
    for robot_id, w in view.neighbor_omegas:
        try:
            result = result + repulsion(own, w, pot)
        except BarrierViolationError as e:
            raise BarrierViolationError(f"neighbour {robot_id} within the safe radius", distance=e.distance) from e
    return result


def cgvf_control(
    spec: ManifoldSpec,
    x,
    omega,
    view: NeighborView,
    gains,
    c: float,
    pot: AlphaPotential,
) -> ControlOutput:
    """
    Control law of one robot, written entry by entry:

        u_j   = (-1)^n sum_l df_j/dw_l - k_j phi_j
        u_w,l = (-1)^n + sum_j k_j phi_j df_j/dw_l + delta_l
    """
    k = expand_gains(gains, spec.n)
    coordinates = as_vector(omega, spec.m, name="virtual coordinates")
    errors = phi(spec, x, coordinates).values
    partials = spec.jacobian(coordinates)
    sign = orientation(spec.n)
    coordination = delta(coordinates, view, c, pot)

    u_x = np.empty(spec.n)
    for j in range(spec.n):
        u_x[j] = sign * sum(partials[j, l] for l in range(spec.m)) - k[j] * errors[j]

    u_omega = np.empty(spec.m)
    for l in range(spec.m):
        u_omega[l] = sign + sum(k[j] * errors[j] * partials[j, l] for j in range(spec.n)) + coordination[l]

    return ControlOutput(u_x=u_x, u_omega=u_omega)


@dataclass(frozen=True)
class SwarmControl:
    """Controls of every robot for one snapshot; rows of broken robots are zero."""

    u_x: np.ndarray
    u_omega: np.ndarray
    errors: np.ndarray
    partials: np.ndarray


def swarm_control(
    spec: ManifoldSpec,
    positions: np.ndarray,
    omegas: np.ndarray,
    alive: np.ndarray,
    target_omega: np.ndarray,
    gains: np.ndarray,
    attraction: np.ndarray,
    pot: AlphaPotential,
    time: Optional[float] = None,
) -> SwarmControl:
    """
    Vectorised control of the whole swarm against one immutable snapshot,
    using the compact form

        u   = (-1)^n F 1_m - K Phi
        u_w = (-1)^n 1_m + F^T K Phi + delta
    """
    sign = orientation(spec.n)
    errors = positions - spec.evaluate(omegas)
    partials = spec.jacobian(omegas)
    weighted = gains * errors

    u_x = sign * partials.sum(axis=2) - weighted

    offsets = omegas[:, np.newaxis, :] - omegas[np.newaxis, :, :]
    distances = np.linalg.norm(offsets, axis=2)
    sensing = alive[:, np.newaxis] & alive[np.newaxis, :] & ~np.eye(len(alive), dtype=bool)
    neighbors = sensing & (distances <= pot.R)

    if np.any(distances[neighbors] <= pot.r):
        masked = np.where(neighbors, distances, np.inf)
        i, k = np.unravel_index(np.argmin(masked), masked.shape)
        raise BarrierViolationError(
            "virtual coordinates within the safe radius",
            time=time,
            pair=(int(i) + 1, int(k) + 1),
            distance=float(distances[i, k]),
        )

    weights = np.zeros_like(distances)
    weights[neighbors] = pot.values(distances[neighbors]) / distances[neighbors]
    coordination = -attraction[:, np.newaxis] * (omegas - target_omega) + np.einsum("ik,ikl->il", weights, offsets)

    u_omega = sign + np.einsum("ijl,ij->il", partials, weighted) + coordination

    u_x[~alive] = 0.0
    u_omega[~alive] = 0.0
    return SwarmControl(u_x=u_x, u_omega=u_omega, errors=errors, partials=partials)
