"""
Scenario loading: JSON parsing, defaults, overrides, validation and
construction of the simulator configuration.
"""

import copy
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError

from coordination.potential import AlphaPotential
from manifolds.builtin import builtin
from manifolds.expression import from_expressions
from manifolds.spec import ManifoldSpec
from models.scenario import ScenarioFile
from sim.state import SwarmConfig, sample_initial_states
from utils.config import get_simulation_defaults
from utils.constants import SCENARIOS_DIR, SIMULATION_CONFIG_PATH
from utils.errors import ScenarioError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LoadedScenario:
    source: Path
    scenario: ScenarioFile
    config: SwarmConfig


def list_bundled() -> List[Tuple[str, str]]:
    """(name, description) of every bundled scenario, sorted by name."""
    entries = []
    for path in sorted(Path(SCENARIOS_DIR).glob("*.json")):
        raw = read_scenario_json(path)
        entries.append((path.stem, raw.get("description", "")))
    return entries


def resolve_scenario_path(name_or_path: str) -> Path:
    """A path to an existing file, or the name of a bundled scenario."""
    path = Path(name_or_path)
    if path.is_file():
        return path
    bundled = Path(SCENARIOS_DIR) / f"{name_or_path}.json"
    if bundled.is_file():
        return bundled
    names = ", ".join(name for name, _ in list_bundled())
    raise ScenarioError(f"No scenario file or bundled scenario named '{name_or_path}' (bundled: {names})")


def read_scenario_json(path: Path) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = json.load(f)
    except json.JSONDecodeError as e:
        raise ScenarioError(e.msg, location=f"{path}:{e.lineno}:{e.colno}") from e
    except OSError as e:
        raise ScenarioError(f"Cannot read scenario file: {e}", location=str(path)) from e

    if not isinstance(raw, dict):
        raise ScenarioError("Scenario must be a JSON object", location=f"{path}:1:1")
    return raw


def deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """Recursive merge; values from `override` win, nested mappings are merged."""
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def _decode_value(text: str) -> Any:
    # JSON first: YAML would read "5e-4" as a string
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _resolve_key(raw: Dict[str, Any], key: str) -> List[str]:
    if "." in key:
        return key.split(".")
    if key in raw:
        return [key]
    sections = [name for name, value in raw.items() if isinstance(value, dict) and key in value]
    if len(sections) == 1:
        return [sections[0], key]
    if not sections:
        raise ScenarioError(f"Unknown key '{key}'; use a dotted path such as integrator.{key}", location="--set")
    raise ScenarioError(f"Key '{key}' is ambiguous, it appears in {sorted(sections)}", location="--set")


def apply_overrides(raw: Dict[str, Any], overrides: Sequence[str]) -> Dict[str, Any]:
    """Apply `a.b=value` assignments to a scenario mapping."""
    result = copy.deepcopy(raw)
    for override in overrides:
        if "=" not in override:
            raise ScenarioError(f"Override '{override}' is not of the form key=value", location="--set")
        key, text = override.split("=", 1)
        path = _resolve_key(result, key.strip())

        node = result
        for part in path[:-1]:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise ScenarioError(f"Cannot set '{key}': '{part}' is not a section", location="--set")
            node = child
        node[path[-1]] = _decode_value(text.strip())
        logger.info(f"Override {'.'.join(path)} = {node[path[-1]]!r}")
    return result


def _format_location(loc: Sequence) -> str:
    parts = []
    for item in loc:
        if isinstance(item, int):
            parts.append(f"[{item}]")
        else:
            parts.append(("." if parts else "") + str(item))
    return "".join(parts)


def validate_scenario(raw: Dict[str, Any], source: str = "scenario") -> ScenarioFile:
    try:
        return ScenarioFile.model_validate(raw)
    except ValidationError as e:
        errors = e.errors()
        first = _format_location(errors[0]["loc"])
        messages = "; ".join(f"{_format_location(err['loc']) or '<root>'}: {err['msg']}" for err in errors)
        raise ScenarioError(messages, location=f"{source}:{first}" if first else source) from e


def _manifold(scenario: ScenarioFile, name: str) -> ManifoldSpec:
    section = scenario.manifold
    if section.name is not None:
        return builtin(section.name)
    return from_expressions(section.expressions, m=section.m, name=f"{name}-manifold")


def _gain_matrix(k, n_robots: int, n: int) -> np.ndarray:
    values = np.asarray(k, dtype=float)
    if values.ndim == 0:
        return np.full((n_robots, n), float(values))
    if values.shape == (n,):
        return np.tile(values, (n_robots, 1))
    if values.shape == (n_robots, n):
        return values.copy()
    raise ScenarioError(
        f"Expected a scalar, {n} values or {n_robots} rows of {n} values, got shape {values.shape}",
        location="gains.k",
    )


def _attraction_vector(c, n_robots: int) -> np.ndarray:
    values = np.asarray(c, dtype=float)
    if values.ndim == 0:
        return np.full(n_robots, float(values))
    if values.shape == (n_robots,):
        return values.copy()
    raise ScenarioError(f"Expected a scalar or {n_robots} values, got shape {values.shape}", location="gains.c")


def _initial_states(scenario: ScenarioFile, spec: ManifoldSpec, r: float) -> Tuple[np.ndarray, np.ndarray]:
    robots = scenario.robots
    if robots.initial_states is None:
        box = robots.box
        return sample_initial_states(
            spec,
            robots.count,
            robots.seed,
            x_bounds=(box.x_low, box.x_high),
            omega_bounds=(box.omega_low, box.omega_high),
            r=r,
            max_attempts=robots.max_sampling_attempts,
        )

    for idx, state in enumerate(robots.initial_states):
        if len(state.x) != spec.n:
            raise ScenarioError(f"x needs {spec.n} entries, got {len(state.x)}", location=f"robots.initial_states[{idx}]")
        if len(state.omega) != spec.m:
            raise ScenarioError(
                f"omega needs {spec.m} entries, got {len(state.omega)}", location=f"robots.initial_states[{idx}]"
            )
    positions = np.array([state.x for state in robots.initial_states], dtype=float)
    omegas = np.array([state.omega for state in robots.initial_states], dtype=float)
    return positions, omegas


def build_config(scenario: ScenarioFile, name: str) -> SwarmConfig:
    """Turn a validated scenario into the simulator configuration."""
    spec = _manifold(scenario, name)
    try:
        potential = AlphaPotential(r=scenario.radii.r, R=scenario.radii.R)
    except ValidationError as e:
        raise ScenarioError(e.errors()[0]["msg"], location="radii") from e

    n_robots = scenario.robots.n_robots
    positions, omegas = _initial_states(scenario, spec, potential.r)

    target = scenario.target.omega0
    if target is not None and len(target) != spec.m:
        raise ScenarioError(f"Expected {spec.m} entries, got {len(target)}", location="target.omega0")

    return SwarmConfig(
        manifold=spec,
        gains=_gain_matrix(scenario.gains.k, n_robots, spec.n),
        attraction=_attraction_vector(scenario.gains.c, n_robots),
        potential=potential,
        dt=scenario.integrator.dt,
        t_end=scenario.integrator.t_end,
        dt_min=scenario.integrator.dt_min,
        initial_positions=positions,
        initial_omegas=omegas,
        target_omega0=np.zeros(spec.m) if target is None else np.asarray(target, dtype=float),
        breakdowns=tuple((event.robot, event.time) for event in scenario.breakdowns),
        decimation=scenario.outputs.decimation,
        name=name,
        seed=scenario.robots.seed,
    )


def load_scenario(
    name_or_path: str,
    overrides: Sequence[str] = (),
    defaults_path: Optional[str] = SIMULATION_CONFIG_PATH,
) -> LoadedScenario:
    """
    Read a scenario file (or bundled scenario name), merge it over the YAML
    defaults, apply overrides, validate it and build the swarm configuration.
    """
    path = resolve_scenario_path(name_or_path)
    raw = read_scenario_json(path)
    if defaults_path is not None:
        raw = deep_merge(get_simulation_defaults(defaults_path), raw)
    raw = apply_overrides(raw, overrides)

    scenario = validate_scenario(raw, source=str(path))
    name = scenario.name or path.stem
    config = build_config(scenario, name)
    logger.info(f"Loaded scenario '{name}' from {path}")
    return LoadedScenario(source=path, scenario=scenario, config=config)
