"""
Swarm configuration and state containers.
"""

import logging
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from coordination.potential import AlphaPotential
from gvf.field import orientation
from manifolds.spec import ManifoldSpec
from utils.errors import ConfigurationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RobotState:
    """One robot: physical position, virtual coordinates and whether it still runs."""

    id: int
    x: np.ndarray
    omega: np.ndarray
    alive: bool = True


@dataclass(frozen=True)
class SwarmState:
    """Stacked state of all robots at one instant; robot i sits in row i - 1."""

    time: float
    positions: np.ndarray
    omegas: np.ndarray
    alive: np.ndarray

    @property
    def size(self) -> int:
        return self.positions.shape[0]

    def robots(self) -> List[RobotState]:
        return [
            RobotState(id=i + 1, x=self.positions[i].copy(), omega=self.omegas[i].copy(), alive=bool(self.alive[i]))
            for i in range(self.size)
        ]

    def with_breakdowns(self, robot_ids: Sequence[int]) -> "SwarmState":
        alive = self.alive.copy()
        alive[[robot_id - 1 for robot_id in robot_ids]] = False
        return replace(self, alive=alive)


def pairwise_distances(omegas: np.ndarray) -> np.ndarray:
    return np.linalg.norm(omegas[:, np.newaxis, :] - omegas[np.newaxis, :, :], axis=2)


def closest_pair(omegas: np.ndarray, alive: Optional[np.ndarray] = None) -> Tuple[Optional[Tuple[int, int]], float]:
    """Closest pair of (alive) robots as 1-based ids, with its distance; (None, inf) for < 2 robots."""
    count = omegas.shape[0]
    mask = np.ones(count, dtype=bool) if alive is None else alive
    distances = pairwise_distances(omegas)
    valid = mask[:, np.newaxis] & mask[np.newaxis, :] & ~np.eye(count, dtype=bool)
    if not np.any(valid):
        return None, float("inf")
    masked = np.where(valid, distances, np.inf)
    i, k = np.unravel_index(np.argmin(masked), masked.shape)
    return (int(i) + 1, int(k) + 1), float(masked[i, k])


@dataclass(frozen=True)
class SwarmConfig:
    """
    Everything a run needs. Gains are stored per robot: `gains` has shape
    (N, n) and `attraction` shape (N,).
    """

    manifold: ManifoldSpec
    gains: np.ndarray
    attraction: np.ndarray
    potential: AlphaPotential
    dt: float
    t_end: float
    dt_min: float
    initial_positions: np.ndarray
    initial_omegas: np.ndarray
    target_omega0: np.ndarray
    breakdowns: Tuple[Tuple[int, float], ...] = ()
    decimation: int = 1
    name: str = "scenario"
    seed: Optional[int] = None

    def __post_init__(self):
        n, m, count = self.manifold.n, self.manifold.m, self.n_robots
        if count < 1:
            raise ConfigurationError("A swarm needs at least one robot")
        if self.initial_positions.shape != (count, n):
            raise ConfigurationError(f"Initial positions must have shape ({count}, {n}), got {self.initial_positions.shape}")
        if self.initial_omegas.shape != (count, m):
            raise ConfigurationError(f"Initial virtual coordinates must have shape ({count}, {m}), got {self.initial_omegas.shape}")
        if self.gains.shape != (count, n) or np.any(self.gains <= 0.0):
            raise ConfigurationError(f"Gains k must be positive with shape ({count}, {n})")
        if self.attraction.shape != (count,) or np.any(self.attraction <= 0.0):
            raise ConfigurationError(f"Attraction gains c must be positive with shape ({count},)")
        if self.target_omega0.shape != (m,):
            raise ConfigurationError(f"Target virtual coordinates must have dimension {m}")
        if not self.dt > 0.0 or not 0.0 < self.dt_min <= self.dt:
            raise ConfigurationError(f"Need dt > 0 and 0 < dt_min <= dt, got dt={self.dt}, dt_min={self.dt_min}")
        if self.t_end < 0.0:
            raise ConfigurationError(f"Horizon t_end must be non-negative, got {self.t_end}")
        if self.decimation < 1:
            raise ConfigurationError(f"Decimation must be >= 1, got {self.decimation}")
        for robot_id, time in self.breakdowns:
            if not 1 <= robot_id <= count:
                raise ConfigurationError(f"Breakdown refers to robot {robot_id}, swarm has robots 1..{count}")
            if time < 0.0:
                raise ConfigurationError(f"Breakdown time of robot {robot_id} is negative")
        finite = [self.initial_positions, self.initial_omegas, self.gains, self.attraction, self.target_omega0]
        if not all(np.all(np.isfinite(a)) for a in finite):
            raise ConfigurationError("Configuration contains non-finite values")

        pair, distance = closest_pair(self.initial_omegas)
        if pair is not None and distance <= self.potential.r:
            raise ConfigurationError(
                f"Initial virtual coordinates of robots {pair[0]} and {pair[1]} are {distance:.4g} apart; "
                f"the initial separation assumption requires more than r={self.potential.r}"
            )

    @property
    def n_robots(self) -> int:
        return self.initial_positions.shape[0]

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    def target_omega(self, time: float) -> np.ndarray:
        """Virtual target w_*(t) = w_*(0) + (-1)^n t 1_m, in closed form."""
        return self.target_omega0 + orientation(self.manifold.n) * time

    def initial_state(self) -> SwarmState:
        return SwarmState(
            time=0.0,
            positions=self.initial_positions.copy(),
            omegas=self.initial_omegas.copy(),
            alive=np.ones(self.n_robots, dtype=bool),
        )


def sample_initial_states(
    spec: ManifoldSpec,
    n_robots: int,
    seed: int,
    x_bounds: Tuple,
    omega_bounds: Tuple,
    r: float,
    max_attempts: int = 10_000,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Uniform positions and virtual coordinates in a box, resampled until every
    pair of virtual coordinates is more than r apart.
    """
    rng = np.random.default_rng(seed)
    x_low, x_high = (np.broadcast_to(np.asarray(b, dtype=float), (spec.n,)) for b in x_bounds)
    w_low, w_high = (np.broadcast_to(np.asarray(b, dtype=float), (spec.m,)) for b in omega_bounds)

    for attempt in range(1, max_attempts + 1):
        positions = rng.uniform(x_low, x_high, size=(n_robots, spec.n))
        omegas = rng.uniform(w_low, w_high, size=(n_robots, spec.m))
        _, distance = closest_pair(omegas)
        if distance > r:
            logger.debug(f"Sampled initial states after {attempt} attempt(s)")
            return positions, omegas

    raise ConfigurationError(
        f"Could not place {n_robots} robots with virtual coordinates separated by more than r={r} "
        f"after {max_attempts} attempts; enlarge the sampling box"
    )
