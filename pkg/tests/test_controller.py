import numpy as np
import pytest

from coordination.controller import (
    NeighborView,
    alpha,
    cgvf_control,
    delta,
    neighbor_set,
    repulsion,
    swarm_control,
)
from coordination.potential import AlphaPotential
from gvf.field import hgvf
from manifolds.builtin import helicoid3, torus3in4
from utils.errors import BarrierViolationError, ConfigurationError

POT = AlphaPotential(r=0.4, R=1.6)


def make_swarm(spec, count, seed):
    """Random positions and well-separated virtual coordinates."""
    rng = np.random.default_rng(seed)
    omegas = np.array([[0.9 * i, 0.4 * ((-1) ** i), 0.1 * i] for i in range(count)]) + rng.uniform(-0.05, 0.05, (count, 3))
    positions = rng.uniform(-5.0, 5.0, size=(count, spec.n))
    return positions, omegas


class TestNeighbours:
    """Tests for neighbor_set and alpha."""

    def test_neighbours_within_sensing_radius(self):
        """Test that only robots within R are listed."""
        omegas = [(1, np.array([0.0, 0.0])), (2, np.array([1.0, 0.0])), (3, np.array([2.0, 0.0]))]
        view = neighbor_set(omegas, 1, POT, target_omega=[0.5, 0.5])
        assert view.ids == (2,)
        np.testing.assert_allclose(view.target_omega, [0.5, 0.5])

    def test_broken_robots_excluded(self):
        """Test that broken robots are not neighbours."""
        omegas = [(1, np.array([0.0])), (2, np.array([1.0])), (3, np.array([-1.0]))]
        assert neighbor_set(omegas, 1, POT, broken={2}).ids == (3,)

    def test_missing_self(self):
        """Test that an unknown robot id raises ValueError."""
        with pytest.raises(ValueError):
            neighbor_set([(1, np.zeros(2))], 5, POT)

    def test_alpha_barrier(self):
        """Test that alpha refuses distances at or below r."""
        with pytest.raises(BarrierViolationError):
            alpha(POT, 0.4)
        assert alpha(POT, 1.0) == pytest.approx(1.0)


class TestDelta:
    """Tests for delta and repulsion."""

    def test_no_neighbours(self):
        """Test that without neighbours only the attraction remains."""
        view = NeighborView(neighbor_omegas=(), target_omega=np.array([1.0, 2.0]))
        np.testing.assert_allclose(delta([0.0, 0.0], view, 20.0, POT), [20.0, 40.0])

    def test_repulsion_is_antisymmetric(self):
        """Test that two robots push each other apart equally."""
        a, b = np.array([0.0, 0.0, 0.0]), np.array([0.6, 0.0, 0.0])
        push = repulsion(a, b, POT)
        np.testing.assert_allclose(push, -repulsion(b, a, POT))
        assert push[0] < 0.0

    def test_translation_invariance(self):
        """Test that shifting every coordinate and the target leaves delta unchanged."""
        shift = np.array([3.0, -1.0, 0.5])
        own = np.array([0.1, 0.2, 0.3])
        others = ((2, np.array([0.9, 0.2, 0.3])), (3, np.array([0.1, -0.8, 0.5])))
        target = np.array([0.0, 0.0, 0.0])
        base = delta(own, NeighborView(others, target), 20.0, POT)
        shifted_view = NeighborView(tuple((i, w + shift) for i, w in others), target + shift)
        np.testing.assert_allclose(delta(own + shift, shifted_view, 20.0, POT), base, atol=1e-12)

    def test_barrier_names_neighbour(self):
        """Test that a neighbour inside r is named in the error."""
        view = NeighborView(((7, np.array([0.1, 0.0])),), np.zeros(2))
        with pytest.raises(BarrierViolationError, match="neighbour 7"):
            delta([0.0, 0.0], view, 1.0, POT)

    def test_attraction_must_be_positive(self):
        """Test that c <= 0 raises ConfigurationError."""
        view = NeighborView((), np.zeros(2))
        with pytest.raises(ConfigurationError):
            delta([0.0, 0.0], view, 0.0, POT)


class TestControlLaw:
    """Tests for cgvf_control and swarm_control."""

    def test_equals_field_plus_coordination(self):
        """Test u = field position part, u_w = field virtual part + delta."""
        spec = helicoid3()
        x = np.array([4.0, 2.0, -1.0])
        omega = np.array([0.2, -0.3, 0.4])
        view = NeighborView(((2, np.array([1.0, -0.3, 0.4])),), np.zeros(3))
        control = cgvf_control(spec, x, omega, view, 0.7, 20.0, POT)
        field = hgvf(spec, x, omega, 0.7)

        np.testing.assert_allclose(control.u_x, field.total[:3], atol=1e-12)
        np.testing.assert_allclose(control.u_omega, field.total[3:] + delta(omega, view, 20.0, POT), atol=1e-12)

    def test_on_manifold_at_target(self):
        """Test that a lone robot on the manifold at the target moves with (-1)^n per axis."""
        spec = torus3in4()
        omega = np.array([0.5, 1.0, -0.2])
        view = NeighborView((), omega.copy())
        control = cgvf_control(spec, spec.evaluate(omega), omega, view, 0.7, 20.0, POT)
        np.testing.assert_allclose(control.u_omega, [1.0, 1.0, 1.0], atol=1e-12)
        np.testing.assert_allclose(control.u_x, spec.jacobian(omega).sum(axis=1), atol=1e-12)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_vectorised_matches_per_robot(self, seed):
        """Test swarm_control against the componentwise per-robot law."""
        spec = helicoid3()
        positions, omegas = make_swarm(spec, 5, seed)
        alive = np.array([True, True, False, True, True])
        target = np.array([0.3, -0.1, 0.2])
        gains = np.full((5, 3), 0.7)
        attraction = np.full(5, 20.0)
        result = swarm_control(spec, positions, omegas, alive, target, gains, attraction, POT)

        everyone = [(i + 1, omegas[i]) for i in range(5)]
        for i in np.flatnonzero(alive):
            view = neighbor_set(everyone, i + 1, POT, target_omega=target, broken={3})
            expected = cgvf_control(spec, positions[i], omegas[i], view, 0.7, 20.0, POT)
            np.testing.assert_allclose(result.u_x[i], expected.u_x, atol=1e-10)
            np.testing.assert_allclose(result.u_omega[i], expected.u_omega, atol=1e-10)

        np.testing.assert_array_equal(result.u_x[2], 0.0)
        np.testing.assert_array_equal(result.u_omega[2], 0.0)

    def test_barrier_pair_is_one_based(self):
        """Test that a pair inside r raises with 1-based ids and the time."""
        spec = helicoid3()
        omegas = np.array([[0.0, 0.0, 0.0], [2.0, 0.0, 0.0], [2.1, 0.0, 0.0]])
        positions = spec.evaluate(omegas)
        with pytest.raises(BarrierViolationError) as excinfo:
            swarm_control(
                spec, positions, omegas, np.ones(3, dtype=bool), np.zeros(3), np.full((3, 3), 0.7), np.full(3, 20.0),
                POT, time=1.5,
            )
        assert set(excinfo.value.pair) == {2, 3}
        assert excinfo.value.time == 1.5
        assert excinfo.value.distance == pytest.approx(0.1)

    def test_broken_robot_inside_barrier_is_ignored(self):
        """Test that a broken robot never triggers the barrier."""
        spec = helicoid3()
        omegas = np.array([[0.0, 0.0, 0.0], [0.1, 0.0, 0.0]])
        positions = spec.evaluate(omegas)
        alive = np.array([True, False])
        result = swarm_control(spec, positions, omegas, alive, np.zeros(3), np.full((2, 3), 0.7), np.full(2, 20.0), POT)
        np.testing.assert_allclose(result.u_omega[0], -1.0 - 20.0 * omegas[0], atol=1e-12)
