"""Configuration file path constants."""

from pathlib import Path

PROJECT_ROOT = Path(__file__).resolve().parent.parent

# Configuration file paths
SIMULATION_CONFIG_PATH = str(PROJECT_ROOT / "config" / "simulation.yaml")
VERIFICATION_CONFIG_PATH = str(PROJECT_ROOT / "config" / "verification.yaml")

# Bundled scenarios
SCENARIOS_DIR = str(PROJECT_ROOT / "scenarios" / "bundled")

# Artifact output
OUTPUT_DIR_ENV = "MANIFOLD_NAV_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = "runs"
