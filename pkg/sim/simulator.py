"""
Deterministic swarm simulator.

Integrates x_i' = u_i and w_i' = u_w,i for every alive robot with classical
fourth-order Runge-Kutta on the stacked state. The virtual target moves in
closed form. Broken robots keep their state bit for bit and leave every
neighbour set.

Near the barrier the closed loop gets stiff, so a nominal step of size dt is
split into halved substeps (never below dt_min) when a pair comes within
r + 0.05 (R - r), or when a trial substep hits the barrier, produces a
non-finite state or moves a virtual coordinate by more than (R - r) / 4.
Substeps always add up to dt exactly.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from coordination.controller import SwarmControl, swarm_control
from gvf.field import orientation
from manifolds.spec import exceeds_partial_bound
from sim.lyapunov import lyapunov
from sim.state import SwarmConfig, SwarmState, closest_pair, pairwise_distances
from utils.errors import BarrierViolationError, NumericFailureError

logger = logging.getLogger(__name__)

# Breakdowns scheduled up to this far after a grid time are applied at that time.
BREAKDOWN_TIME_TOLERANCE = 1e-12

NEAR_BARRIER_FRACTION = 0.05
MAX_SHIFT_FRACTION = 0.25


@dataclass(frozen=True)
class SimulationTrace:
    """
    Recorded samples of a run. Arrays are indexed [sample, robot, component];
    robot i sits at index i - 1.

    `min_separation` is tracked at every integration step, not only at the
    recorded samples.
    """

    name: str
    manifold: str
    n: int
    m: int
    r: float
    R: float
    breakdowns: Tuple[Tuple[int, float], ...]
    times: np.ndarray
    positions: np.ndarray
    omegas: np.ndarray
    phi_norms: np.ndarray
    u_omega: np.ndarray
    alive: np.ndarray
    target: np.ndarray
    mean_error: np.ndarray
    min_distance: np.ndarray
    max_neighbor_distance: np.ndarray
    lyapunov: np.ndarray
    lyapunov_components: np.ndarray
    min_separation: float
    min_separation_pair: Optional[Tuple[int, int]]
    min_separation_time: Optional[float]

    @property
    def n_samples(self) -> int:
        return len(self.times)

    @property
    def n_robots(self) -> int:
        return self.positions.shape[1]

    @property
    def sign(self) -> float:
        return orientation(self.n)

    @property
    def final_alive(self) -> List[int]:
        return [int(i) + 1 for i in np.flatnonzero(self.alive[-1])]


class SwarmSimulator:
    def __init__(self, config: SwarmConfig):
        self.config = config
        pot = config.potential
        self._near_band = NEAR_BARRIER_FRACTION * (pot.R - pot.r)
        self._max_shift = MAX_SHIFT_FRACTION * (pot.R - pot.r)
        self._pending_breakdowns = sorted(config.breakdowns, key=lambda event: (event[1], event[0]))
        self._warned_partials = False

    def control(self, state: SwarmState) -> SwarmControl:
        """Controls of every robot at `state`, with the target evaluated at `state.time`."""
        return self._evaluate(state.positions, state.omegas, state.alive, state.time)

    def _evaluate(self, positions, omegas, alive, time: float) -> SwarmControl:
        cfg = self.config
        control = swarm_control(
            cfg.manifold,
            positions,
            omegas,
            alive,
            cfg.target_omega(time),
            cfg.gains,
            cfg.attraction,
            cfg.potential,
            time=time,
        )
        if not self._warned_partials and exceeds_partial_bound(control.partials[alive]):
            self._warned_partials = True
            logger.warning(
                f"Partial derivatives of '{cfg.manifold.name}' exceed {np.max(np.abs(control.partials)):.3g} "
                f"at t={time:.6g}; the manifold may not have bounded derivatives"
            )
        return control

    def _rk4(self, state: SwarmState, h: float, first: Optional[SwarmControl] = None) -> Tuple[np.ndarray, np.ndarray]:
        p, w, alive, t = state.positions, state.omegas, state.alive, state.time

        k1 = first if first is not None else self._evaluate(p, w, alive, t)
        k2 = self._evaluate(p + 0.5 * h * k1.u_x, w + 0.5 * h * k1.u_omega, alive, t + 0.5 * h)
        k3 = self._evaluate(p + 0.5 * h * k2.u_x, w + 0.5 * h * k2.u_omega, alive, t + 0.5 * h)
        k4 = self._evaluate(p + h * k3.u_x, w + h * k3.u_omega, alive, t + h)

        positions = p + h / 6.0 * (k1.u_x + 2.0 * k2.u_x + 2.0 * k3.u_x + k4.u_x)
        omegas = w + h / 6.0 * (k1.u_omega + 2.0 * k2.u_omega + 2.0 * k3.u_omega + k4.u_omega)

        frozen = ~alive[:, np.newaxis]
        return np.where(frozen, p, positions), np.where(frozen, w, omegas)

    def _initial_substep(self, state: SwarmState) -> float:
        cfg = self.config
        _, distance = closest_pair(state.omegas, state.alive)
        gap = distance - cfg.potential.r
        if gap >= self._near_band:
            return cfg.dt
        halvings = 1 + int(math.floor(math.log2(self._near_band / max(gap, 1e-300))))
        return max(cfg.dt / 2.0**halvings, cfg.dt_min)

    def _rejection(self, state: SwarmState, h: float, positions, omegas) -> Optional[Exception]:
        """Reason to reject a trial substep, or None to accept it."""
        time = state.time + h
        if not (np.all(np.isfinite(positions)) and np.all(np.isfinite(omegas))):
            return NumericFailureError(f"state stopped being finite at t={time:.6g}")

        pair, distance = closest_pair(omegas, state.alive)
        if pair is not None and distance <= self.config.potential.r:
            return BarrierViolationError("virtual coordinates within the safe radius", time=time, pair=pair, distance=distance)

        if h > self.config.dt_min:
            shift = float(np.max(np.abs(omegas - state.omegas), initial=0.0))
            if shift > self._max_shift:
                return NumericFailureError(f"virtual coordinates moved {shift:.3g} in one substep at t={time:.6g}")
        return None

    def advance(self, state: SwarmState, end_time: float, first: Optional[SwarmControl] = None) -> SwarmState:
        """Integrate from `state.time` to `end_time` with safeguarded RK4 substeps."""
        cfg = self.config
        current = state
        h = self._initial_substep(state)

        while current.time < end_time:
            remaining = end_time - current.time
            last = h >= remaining
            trial = remaining if last else h

            try:
                positions, omegas = self._rk4(current, trial, first if current is state else None)
                reason = self._rejection(current, trial, positions, omegas)
            except BarrierViolationError as e:
                reason = BarrierViolationError("barrier reached inside a substep", time=e.time, pair=e.pair, distance=e.distance)

            if reason is None:
                current = SwarmState(
                    time=end_time if last else current.time + trial,
                    positions=positions,
                    omegas=omegas,
                    alive=current.alive,
                )
                continue

            if trial <= cfg.dt_min:
                raise reason
            h = max(trial / 2.0, cfg.dt_min)
            logger.debug(f"Refining substep to {h:.3g}s at t={current.time:.6g}: {reason}")

        return current

    def step(self, state: SwarmState) -> SwarmState:
        """One nominal step of size dt; broken robots are left untouched."""
        return self.advance(state, state.time + self.config.dt)

    def apply_breakdowns(self, state: SwarmState) -> SwarmState:
        due = [
            robot_id
            for robot_id, time in self._pending_breakdowns
            if time <= state.time + BREAKDOWN_TIME_TOLERANCE
        ]
        if not due:
            return state
        self._pending_breakdowns = [event for event in self._pending_breakdowns if event[0] not in due]
        broken = state.with_breakdowns(due)
        for robot in broken.robots():
            if robot.id in due:
                logger.info(
                    f"Robot {robot.id} broke down at t={state.time:.6g}s, frozen at x={robot.x.tolist()}, "
                    f"w={robot.omega.tolist()}"
                )
        return broken

    def run(self) -> SimulationTrace:
        cfg = self.config
        n_steps = cfg.n_steps
        checkpoints = {max(1, round(n_steps * tenth / 10)): tenth * 10 for tenth in range(1, 11)}
        logger.info(
            f"Simulating '{cfg.name}': {cfg.n_robots} robots on '{cfg.manifold.name}', "
            f"t_end={cfg.t_end}s, dt={cfg.dt}s"
        )

        samples = {key: [] for key in ("times", "positions", "omegas", "phi", "u_omega", "alive", "target")}
        samples.update({key: [] for key in ("mean_error", "min_distance", "max_neighbor", "lyapunov", "components")})
        separation: Tuple[float, Optional[Tuple[int, int]], Optional[float]] = (float("inf"), None, None)

        state = cfg.initial_state()
        control = None
        for k in range(n_steps + 1):
            if k > 0:
                state = self.advance(state, k * cfg.dt, first=control)
            state = self.apply_breakdowns(state)
            control = self.control(state)

            pair, distance = closest_pair(state.omegas, state.alive)
            if distance < separation[0]:
                separation = (distance, pair, state.time)

            if k % cfg.decimation == 0 or k == n_steps:
                self._record(samples, state, control)

            if k in checkpoints and n_steps > 0:
                logger.info(
                    f"{cfg.name}: t={state.time:.3f}s ({checkpoints[k]}%), "
                    f"max |Phi|={samples['phi'][-1].max():.3g}, V={samples['lyapunov'][-1]:.6g}"
                )

        logger.info(f"Finished '{cfg.name}' with {int(state.alive.sum())} of {cfg.n_robots} robots alive")
        return SimulationTrace(
            name=cfg.name,
            manifold=cfg.manifold.name,
            n=cfg.manifold.n,
            m=cfg.manifold.m,
            r=cfg.potential.r,
            R=cfg.potential.R,
            breakdowns=tuple(cfg.breakdowns),
            times=np.array(samples["times"]),
            positions=np.array(samples["positions"]),
            omegas=np.array(samples["omegas"]),
            phi_norms=np.array(samples["phi"]),
            u_omega=np.array(samples["u_omega"]),
            alive=np.array(samples["alive"]),
            target=np.array(samples["target"]),
            mean_error=np.array(samples["mean_error"]),
            min_distance=np.array(samples["min_distance"]),
            max_neighbor_distance=np.array(samples["max_neighbor"]),
            lyapunov=np.array(samples["lyapunov"]),
            lyapunov_components=np.array(samples["components"]),
            min_separation=separation[0],
            min_separation_pair=separation[1],
            min_separation_time=separation[2],
        )

    def _record(self, samples: dict, state: SwarmState, control: SwarmControl) -> None:
        cfg = self.config
        alive = state.alive
        target = cfg.target_omega(state.time)

        alive_omegas = state.omegas[alive]
        distances = pairwise_distances(alive_omegas)
        off_diagonal = ~np.eye(len(alive_omegas), dtype=bool)
        neighbors = distances[off_diagonal & (distances <= cfg.potential.R)]
        _, closest = closest_pair(state.omegas, alive)
        monitor = lyapunov(cfg, state)

        samples["times"].append(state.time)
        samples["positions"].append(state.positions.copy())
        samples["omegas"].append(state.omegas.copy())
        samples["phi"].append(np.linalg.norm(control.errors, axis=1))
        samples["u_omega"].append(control.u_omega.copy())
        samples["alive"].append(alive.copy())
        samples["target"].append(target)
        samples["mean_error"].append(alive_omegas.mean(axis=0) - target if alive.any() else np.zeros(cfg.manifold.m))
        samples["min_distance"].append(closest)
        samples["max_neighbor"].append(float(neighbors.max()) if neighbors.size else float("nan"))
        samples["lyapunov"].append(monitor.value)
        samples["components"].append(monitor.components)


def step(config: SwarmConfig, state: SwarmState) -> SwarmState:
    return SwarmSimulator(config).step(state)


def run(config: SwarmConfig) -> SimulationTrace:
    return SwarmSimulator(config).run()
