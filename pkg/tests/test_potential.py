import numpy as np
import pytest
from pydantic import ValidationError
from scipy.integrate import quad

from coordination.potential import AlphaPotential


@pytest.fixture
def pot():
    return AlphaPotential(r=0.4, R=1.6)


class TestAlphaPotential:
    """Tests for AlphaPotential."""

    def test_values(self, pot):
        """Test alpha at reference distances."""
        assert pot.values(1.0) == pytest.approx(1.0)
        assert pot.values(1.6) == 0.0
        assert pot.values(5.0) == 0.0
        assert pot.values(0.41) == pytest.approx(1.19**2 / 0.01**2)

    def test_strictly_decreasing(self, pot):
        """Test that alpha decreases strictly on (r, R)."""
        s = np.linspace(0.401, 1.599, 500)
        assert np.all(np.diff(pot.values(s)) < 0.0)

    def test_derivative_matches_finite_differences(self, pot):
        """Test d alpha / ds against central differences, including continuity at R."""
        s = np.linspace(0.45, 2.0, 50)
        h = 1e-6
        numeric = (pot.values(s + h) - pot.values(s - h)) / (2 * h)
        np.testing.assert_allclose(pot.derivative(s), numeric, atol=1e-5, rtol=1e-6)
        assert pot.derivative(1.6) == 0.0

    @pytest.mark.parametrize("eps, tol", [(1e-4, 1e-3), (1e-6, 1e-7)])
    def test_continuous_at_sensing_radius(self, pot, eps, tol):
        """Test that alpha and d alpha / ds close up across R; the derivative gap shrinks like 2 eps / (R - r)^2."""
        assert abs(float(pot.values(1.6 - eps)) - float(pot.values(1.6 + eps))) < tol
        assert abs(float(pot.derivative(1.6 - eps)) - float(pot.derivative(1.6 + eps))) < 2.0 * eps

    def test_integral_on_reference_interval(self, pot):
        """Test the integral over [1.0, 1.6] against adaptive quadrature."""
        expected, _ = quad(lambda s: float(pot.values(s)), 1.0, 1.6, epsabs=1e-14, epsrel=1e-14)
        assert float(pot.integral(1.0, 1.6)) == pytest.approx(expected, abs=1e-9)

    def test_integral_on_random_intervals(self, pot):
        """Test the closed-form integral against quadrature on 100 random intervals."""
        rng = np.random.default_rng(0)
        for _ in range(100):
            a, b = np.sort(rng.uniform(0.45, 1.6, size=2))
            expected, _ = quad(lambda s: float(pot.values(s)), a, b, epsabs=1e-14, epsrel=1e-14, limit=200)
            assert float(pot.integral(a, b)) == pytest.approx(expected, abs=1e-9)

    def test_empty_and_outside_intervals(self, pot):
        """Test that the integral vanishes from R to R and beyond R."""
        assert float(pot.integral(1.6)) == 0.0
        assert float(pot.integral(2.5)) == 0.0
        assert float(pot.integral(1.0, 3.0)) == pytest.approx(float(pot.integral(1.0)))

    def test_vectorised_integral(self, pot):
        """Test that integral accepts arrays of lower bounds."""
        lower = np.array([0.8, 1.2, 1.6, 2.0])
        result = pot.integral(lower)
        assert result.shape == (4,)
        assert result[0] > result[1] > result[2] == 0.0

    @pytest.mark.parametrize("r, R", [(1.6, 0.4), (1.0, 1.0), (-0.1, 1.0)])
    def test_invalid_radii(self, r, R):
        """Test that r must be positive and below R."""
        with pytest.raises(ValidationError):
            AlphaPotential(r=r, R=R)

    def test_frozen(self, pot):
        """Test that the radii cannot be reassigned."""
        with pytest.raises(ValidationError):
            pot.r = 0.1
