"""
Lyapunov function of the closed-loop swarm.

    V = sum_i Phi_i^T K_i Phi_i + sum_i c_i |w_i - w_*|^2
        + sum_i sum_(k != i) integral_(|w_i - w_k|)^R alpha(s) ds

Only alive robots contribute. Every summand is non-negative, and V is
non-increasing along exact closed-loop trajectories.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from sim.state import SwarmConfig, SwarmState, pairwise_distances
from utils.errors import BarrierViolationError


@dataclass(frozen=True)
class LyapunovMonitor:
    error_term: float
    attraction_term: float
    barrier_term: float

    @property
    def components(self) -> Tuple[float, float, float]:
        return self.error_term, self.attraction_term, self.barrier_term

    @property
    def value(self) -> float:
        return self.error_term + self.attraction_term + self.barrier_term


def lyapunov(config: SwarmConfig, state: SwarmState) -> LyapunovMonitor:
    alive = state.alive
    positions = state.positions[alive]
    omegas = state.omegas[alive]

    errors = positions - config.manifold.evaluate(omegas)
    error_term = float(np.sum(config.gains[alive] * errors**2))

    offsets = omegas - config.target_omega(state.time)
    attraction_term = float(np.sum(config.attraction[alive] * np.sum(offsets**2, axis=1)))

    pot = config.potential
    distances = pairwise_distances(omegas)
    off_diagonal = ~np.eye(len(omegas), dtype=bool)
    if np.any(distances[off_diagonal] <= pot.r):
        ids = np.flatnonzero(alive) + 1
        masked = np.where(off_diagonal, distances, np.inf)
        i, k = np.unravel_index(np.argmin(masked), masked.shape)
        raise BarrierViolationError(
            "Lyapunov function undefined inside the safe radius",
            time=state.time,
            pair=(int(ids[i]), int(ids[k])),
            distance=float(masked[i, k]),
        )

    # ordered pairs: each unordered pair counts twice
    barrier_term = float(np.sum(pot.integral(distances[off_diagonal])))
    return LyapunovMonitor(error_term=error_term, attraction_term=attraction_term, barrier_term=barrier_term)
