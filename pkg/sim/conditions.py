"""
Success conditions evaluated on a finished trace.

    C1   on-manifold convergence       max_i |Phi_i| <= tol
    C2   on-manifold maneuvering       max_i |w_i' - (-1)^n 1_m| <= tol
    C3a  centroid tracks the target    |mean_i w_i - w_*| <= tol
    C3b  spacing                       r < |w_i - w_k| for alive pairs over the whole run,
                                       neighbour distances < R at the end

All checks are restricted to the robots alive at the final sample.
"""

from typing import Dict, Iterable, List, Optional, Tuple, Union

import numpy as np

from models.report import ConditionReport, ConditionResult, ConditionTolerances
from sim.simulator import SimulationTrace
from sim.state import closest_pair

ALL_CONDITIONS = ("C1", "C2", "C3a", "C3b")

LYAPUNOV_SLACK = 1e-6


def _as_tolerances(tolerances) -> ConditionTolerances:
    if tolerances is None:
        return ConditionTolerances()
    if isinstance(tolerances, ConditionTolerances):
        return tolerances
    return ConditionTolerances(**tolerances)


def _worst_robot(values: np.ndarray, alive: np.ndarray) -> Tuple[float, Optional[int]]:
    if not alive.any():
        return 0.0, None
    masked = np.where(alive, values, -np.inf)
    index = int(np.argmax(masked))
    return float(masked[index]), index + 1


def _check_c1(trace: SimulationTrace, tol: ConditionTolerances) -> ConditionResult:
    witness, robot = _worst_robot(trace.phi_norms[-1], trace.alive[-1])
    return ConditionResult(
        name="C1", passed=witness <= tol.phi, witness=witness, threshold=tol.phi, robot=robot,
        detail="max |Phi_i|",
    )


def _check_c2(trace: SimulationTrace, tol: ConditionTolerances) -> ConditionResult:
    deviation = np.linalg.norm(trace.u_omega[-1] - trace.sign, axis=1)
    witness, robot = _worst_robot(deviation, trace.alive[-1])
    return ConditionResult(
        name="C2", passed=witness <= tol.omega_rate, witness=witness, threshold=tol.omega_rate, robot=robot,
        detail=f"max |w_i' - ({trace.sign:+.0f}) 1_m|",
    )


def _check_c3a(trace: SimulationTrace, tol: ConditionTolerances) -> ConditionResult:
    witness = float(np.linalg.norm(trace.mean_error[-1]))
    return ConditionResult(
        name="C3a", passed=witness <= tol.centroid, witness=witness, threshold=tol.centroid,
        detail="|mean of alive w_i - w_*|",
    )


def _check_c3b(trace: SimulationTrace) -> ConditionResult:
    separation, pair = trace.min_separation, trace.min_separation_pair
    for sample in range(trace.n_samples):
        sample_pair, distance = closest_pair(trace.omegas[sample], trace.alive[sample])
        if distance < separation:
            separation, pair = distance, sample_pair

    farthest = trace.max_neighbor_distance[-1]
    within_sensing = bool(np.isnan(farthest) or farthest < trace.R)
    passed = separation > trace.r and within_sensing
    detail = f"min separation over the run, final max neighbour distance {farthest:.6g} (R={trace.R:g})"
    return ConditionResult(
        name="C3b", passed=passed, witness=float(separation), threshold=trace.r, pair=pair, detail=detail,
    )


def check_conditions(
    trace: SimulationTrace,
    tolerances: Union[ConditionTolerances, Dict, None] = None,
    conditions: Iterable[str] = ALL_CONDITIONS,
) -> ConditionReport:
    tol = _as_tolerances(tolerances)
    conditions = list(conditions)
    checks = {
        "C1": lambda: _check_c1(trace, tol),
        "C2": lambda: _check_c2(trace, tol),
        "C3a": lambda: _check_c3a(trace, tol),
        "C3b": lambda: _check_c3b(trace),
    }
    unknown = [name for name in conditions if name not in checks]
    if unknown:
        raise ValueError(f"Unknown conditions {unknown}; expected a subset of {list(ALL_CONDITIONS)}")

    return ConditionReport(
        time=float(trace.times[-1]),
        alive=trace.final_alive,
        results=[checks[name]() for name in conditions],
    )


def ordering_signature(trace: SimulationTrace) -> Dict[int, Tuple[int, ...]]:
    """For every alive robot, the other alive robots ranked by final virtual distance (ties by id)."""
    alive = trace.final_alive
    omegas = trace.omegas[-1]
    signature = {}
    for robot_id in alive:
        others = [other for other in alive if other != robot_id]
        others.sort(key=lambda other: (np.linalg.norm(omegas[robot_id - 1] - omegas[other - 1]), other))
        signature[robot_id] = tuple(others)
    return signature


def relative_drift(trace: SimulationTrace, fraction: float = 0.1) -> float:
    """
    Largest change of any relative virtual displacement w_i - w_k of alive robots
    over the final `fraction` of the run, measured against its final value.
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must lie in (0, 1], got {fraction}")
    start = trace.times[-1] - fraction * (trace.times[-1] - trace.times[0])
    window = trace.omegas[trace.times >= start][:, trace.alive[-1]]
    relative = window[:, :, np.newaxis, :] - window[:, np.newaxis, :, :]
    drift = np.linalg.norm(relative - relative[-1], axis=-1)
    return float(drift.max(initial=0.0))


def lyapunov_increases(trace: SimulationTrace, slack: float = LYAPUNOV_SLACK) -> List[int]:
    """Sample indices k with V(t_k+1) > V(t_k) + slack * max(1, V(t_k))."""
    values = trace.lyapunov
    allowed = values[:-1] + slack * np.maximum(1.0, values[:-1])
    return [int(k) for k in np.flatnonzero(values[1:] > allowed)]
