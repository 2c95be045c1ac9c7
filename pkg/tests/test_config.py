import os
import pytest
import yaml
from unittest.mock import patch

from utils.config import get_output_dir, get_simulation_defaults, get_verification_config, load_config
from utils.constants import SIMULATION_CONFIG_PATH, VERIFICATION_CONFIG_PATH


class TestConfig:
    """Essential tests for config functions."""

    def test_load_config_valid_file(self, tmp_path):
        """Test loading a valid YAML configuration file."""
        config_data = {"simulation": {"gains": {"k": 0.7}}}

        config_file = tmp_path / "config.yaml"
        config_file.write_text(yaml.dump(config_data))

        result = load_config(str(config_file))
        assert result == config_data

    def test_load_config_file_not_found(self, tmp_path):
        """Test that FileNotFoundError is raised when config file doesn't exist."""
        non_existent_file = tmp_path / "nonexistent.yaml"

        with pytest.raises(FileNotFoundError):
            load_config(str(non_existent_file))

    def test_load_config_empty_file(self, tmp_path):
        """Test that ValueError is raised for an empty YAML file."""
        config_file = tmp_path / "empty.yaml"
        config_file.write_text("")

        with pytest.raises(ValueError):
            load_config(str(config_file))

    def test_get_simulation_defaults_valid(self, tmp_path):
        """Test getting the simulation section from a valid configuration."""
        config_data = {"simulation": {"radii": {"r": 0.4, "R": 1.6}}}

        config_file = tmp_path / "simulation.yaml"
        config_file.write_text(yaml.dump(config_data))

        assert get_simulation_defaults(str(config_file)) == {"radii": {"r": 0.4, "R": 1.6}}

    def test_get_simulation_defaults_missing_key(self, tmp_path):
        """Test that ValueError is raised when 'simulation' key is missing."""
        config_file = tmp_path / "other.yaml"
        config_file.write_text(yaml.dump({"other": "value"}))

        with pytest.raises(ValueError):
            get_simulation_defaults(str(config_file))

    def test_get_verification_config_missing_section(self, tmp_path):
        """Test that ValueError is raised when the coupling demo section is missing."""
        config_file = tmp_path / "verification.yaml"
        config_file.write_text(yaml.dump({"verification": {"decoupling": {"trials": 1}}}))

        with pytest.raises(ValueError):
            get_verification_config(str(config_file))

    def test_shipped_simulation_defaults(self):
        """Test the shipped defaults carry the reference gains, radii and integrator settings."""
        defaults = get_simulation_defaults(SIMULATION_CONFIG_PATH)

        assert defaults["gains"] == {"k": 0.7, "c": 20.0}
        assert defaults["radii"] == {"r": 0.4, "R": 1.6}
        assert defaults["integrator"]["dt"] == 0.001
        assert defaults["integrator"]["t_end"] == 30.0
        assert defaults["robots"]["max_sampling_attempts"] == 10000

    def test_shipped_verification_config(self):
        """Test the shipped verification settings."""
        verification = get_verification_config(VERIFICATION_CONFIG_PATH)

        assert verification["decoupling"]["tolerance"] == 1e-9
        assert verification["decoupling"]["max_dimension"] == 10

    @patch.dict(os.environ, {"MANIFOLD_NAV_OUTPUT_DIR": "/tmp/artifacts"})
    def test_get_output_dir_from_environment(self):
        """Test the output directory comes from the environment when set."""
        assert get_output_dir() == "/tmp/artifacts"

    @patch.dict(os.environ, {}, clear=True)
    def test_get_output_dir_default(self):
        """Test the output directory falls back to runs/."""
        assert get_output_dir() == "runs"
