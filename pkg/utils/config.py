import os
import yaml
from pathlib import Path
from typing import Dict, Any

from utils.constants import DEFAULT_OUTPUT_DIR, OUTPUT_DIR_ENV


def load_config(config_path: str) -> Dict[str, Any]:
    """Load and validate YAML configuration file."""
    path = Path(config_path)
    if not path.exists():
        raise FileNotFoundError(f"Config file not found: {config_path}")

    with open(path, "r", encoding="utf-8") as f:
        config = yaml.safe_load(f)

    if not config:
        raise ValueError(f"Invalid config file: empty or malformed YAML in {config_path}")

    return config


def get_simulation_defaults(config_path: str) -> Dict[str, Any]:
    """Load scenario defaults (gains, radii, integrator, ...) from the simulation configuration."""
    config = load_config(config_path)

    if "simulation" not in config:
        raise ValueError(f"Invalid simulation config file: missing 'simulation' key in {config_path}")

    defaults = config["simulation"]
    if not isinstance(defaults, dict):
        raise ValueError(f"Invalid simulation config file: 'simulation' must be a mapping in {config_path}")

    return defaults


def get_verification_config(config_path: str) -> Dict[str, Any]:
    """Load settings of the decoupling and coupling verification suites."""
    config = load_config(config_path)

    if "verification" not in config:
        raise ValueError(f"Invalid verification config file: missing 'verification' key in {config_path}")

    verification = config["verification"]
    for section in ("decoupling", "coupling_demo"):
        if section not in verification:
            raise ValueError(f"Invalid verification config file: missing 'verification.{section}' in {config_path}")

    return verification


def get_output_dir() -> str:
    """Directory for run artifacts, taken from the environment when set."""
    return os.getenv(OUTPUT_DIR_ENV) or DEFAULT_OUTPUT_DIR
