from dataclasses import replace

import numpy as np
import pytest
from pydantic import ValidationError
from scipy.optimize import brentq

from coordination.potential import AlphaPotential
from manifolds.builtin import circle2, helicoid3
from models.report import ConditionTolerances
from sim.conditions import check_conditions, lyapunov_increases, ordering_signature, relative_drift
from sim.simulator import run
from sim.state import SwarmConfig

POT = AlphaPotential(r=0.4, R=1.6)


def make_config(spec, positions, omegas, target=None, t_end=0.0, c=20.0):
    positions = np.asarray(positions, dtype=float)
    omegas = np.asarray(omegas, dtype=float)
    count = len(positions)
    return SwarmConfig(
        manifold=spec,
        gains=np.full((count, spec.n), 0.7),
        attraction=np.full(count, c),
        potential=POT,
        dt=1e-3,
        t_end=t_end,
        dt_min=1e-6,
        initial_positions=positions,
        initial_omegas=omegas,
        target_omega0=np.zeros(spec.m) if target is None else np.asarray(target, dtype=float),
    )


@pytest.fixture
def scattered_trace():
    """Three robots off the circle, recorded at t = 0 only."""
    config = make_config(circle2(), [[2.0, 0.0], [0.0, 1.0], [-1.0, 0.0]], [[0.0], [1.0], [2.5]])
    return run(config)


@pytest.fixture
def converged_trace():
    """A lone robot that starts on the circle at the target."""
    spec = circle2()
    return run(make_config(spec, spec.evaluate([[0.3]]), [[0.3]], target=[0.3], t_end=0.05))


class TestCheckConditions:
    """Tests for check_conditions."""

    def test_converged_robot_passes(self, converged_trace):
        """Test that a robot already on the manifold at the target meets every condition."""
        report = check_conditions(converged_trace)
        assert report.passed
        assert [result.name for result in report.results] == ["C1", "C2", "C3a", "C3b"]
        assert report.time == pytest.approx(0.05)
        assert report.alive == [1]

    def test_zero_horizon_fails_convergence(self, scattered_trace):
        """Test that C1 fails at t = 0 and names the robot farthest from the manifold."""
        report = check_conditions(scattered_trace)
        c1 = report.result("C1")
        assert not c1.passed
        assert c1.robot == 1
        assert c1.witness == pytest.approx(1.0)
        assert not report.passed
        assert "FAIL" in report.format()

    def test_custom_tolerances(self, scattered_trace):
        """Test that tolerances can be passed as a dict."""
        report = check_conditions(scattered_trace, {"phi": 2.0}, conditions=["C1"])
        assert report.passed
        assert report.result("C1").threshold == 2.0

    def test_unknown_tolerance_key(self, scattered_trace):
        """Test that misspelt tolerances are rejected."""
        with pytest.raises(ValidationError):
            check_conditions(scattered_trace, {"phii": 2.0})

    def test_unknown_condition(self, scattered_trace):
        """Test that an unknown condition name raises ValueError."""
        with pytest.raises(ValueError, match="C4"):
            check_conditions(scattered_trace, conditions=["C1", "C4"])

    def test_conditions_from_generator(self, converged_trace):
        """Test that any iterable of names is accepted."""
        report = check_conditions(converged_trace, ConditionTolerances(), conditions=(n for n in ["C3a", "C3b"]))
        assert [result.name for result in report.results] == ["C3a", "C3b"]

    def test_missing_result(self, converged_trace):
        """Test that asking for an unchecked condition raises KeyError."""
        report = check_conditions(converged_trace, conditions=["C1"])
        with pytest.raises(KeyError):
            report.result("C2")

    def test_coincident_coordinates_fail_spacing(self, scattered_trace):
        """Test that two coinciding virtual coordinates fail C3b with the offending pair."""
        omegas = scattered_trace.omegas.copy()
        omegas[-1, 1] = omegas[-1, 0]
        broken = replace(scattered_trace, omegas=omegas)

        result = check_conditions(broken, conditions=["C3b"]).result("C3b")
        assert not result.passed
        assert set(result.pair) == {1, 2}
        assert result.witness == 0.0

    def test_neighbour_beyond_sensing_radius_fails_spacing(self, scattered_trace):
        """Test that a final neighbour distance of R or more fails C3b."""
        widened = replace(scattered_trace, max_neighbor_distance=np.array([1.6]))
        assert not check_conditions(widened, conditions=["C3b"]).passed

    def test_broken_robots_ignored(self, scattered_trace):
        """Test that robots broken at the end are left out of C1."""
        alive = scattered_trace.alive.copy()
        alive[-1, 0] = False
        report = check_conditions(replace(scattered_trace, alive=alive), conditions=["C1"])
        assert report.alive == [2, 3]
        assert report.result("C1").robot == 3


class TestOrderingSignature:
    """Tests for ordering_signature."""

    def test_ranks_by_distance(self, scattered_trace):
        """Test the neighbour ranking of three robots on a line."""
        assert ordering_signature(scattered_trace) == {1: (2, 3), 2: (1, 3), 3: (2, 1)}

    def test_ties_broken_by_id(self):
        """Test that equidistant robots are ranked by id."""
        trace = run(make_config(circle2(), [[1.0, 0.0]] * 3, [[0.0], [1.0], [2.0]]))
        assert ordering_signature(trace)[2] == (1, 3)


class TestRelativeDrift:
    """Tests for relative_drift."""

    def test_rigid_motion_has_no_drift(self):
        """Test that an equilibrium pair keeps its relative displacement."""
        c = 20.0
        spacing = brentq(lambda s: float(POT.values(s)) - c * s / 2.0, POT.r + 1e-9, POT.R)
        omegas = np.array([[spacing / 2.0, 0.0, 0.0], [-spacing / 2.0, 0.0, 0.0]])
        spec = helicoid3()
        trace = run(make_config(spec, spec.evaluate(omegas), omegas, t_end=0.1, c=c))
        assert relative_drift(trace) < 1e-9

    def test_invalid_fraction(self, scattered_trace):
        """Test that the window fraction must lie in (0, 1]."""
        with pytest.raises(ValueError):
            relative_drift(scattered_trace, fraction=0.0)


class TestLyapunovIncreases:
    """Tests for lyapunov_increases."""

    def test_detects_increase(self, scattered_trace):
        """Test that only samples followed by a rise beyond the slack are reported."""
        values = np.array([5.0, 4.0, 4.0 + 1e-9, 4.5, 1.0])
        trace = replace(scattered_trace, lyapunov=values)
        assert lyapunov_increases(trace) == [2]

    def test_descent_on_short_run(self):
        """Test that V does not rise along a short helicoid run."""
        spec = helicoid3()
        omegas = np.array([[0.0, 0.0, 0.0], [0.8, 0.1, 0.0], [0.1, 0.9, 0.2]])
        trace = run(make_config(spec, spec.evaluate(omegas) + 0.3, omegas, t_end=0.5))
        assert lyapunov_increases(trace) == []
